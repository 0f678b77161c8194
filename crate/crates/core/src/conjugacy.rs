// SPDX-License-Identifier: Apache-2.0

//! Conjugacy in `G(1,n)` and synthesis of separating finite quotients.
//!
//! Every element of `G(1,n)` is conjugate to some `a^t b^r`. For `|n| ≥ 2`
//! two such elements with the same `t > 0` are conjugate iff
//! `n^x·r ≡ s (mod |n^t − 1|)` is solvable; with `t = 0` iff the `b`-exponents
//! agree once all factors of `n` are divided out.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numtheory;
use crate::presentation::{is_residually_finite, GroupParams};
use crate::quotients::{cyclic_witness, perm_quotient_search_traced, FiniteQuotient};
use crate::witness::{ClaimKind, Target, Witness};
use crate::words::{self, solvable_normal_form, Word, DEFAULT_BIT_GUARD};

/// Bounds for the searches behind witness synthesis.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SearchLimits {
    pub max_degree: usize,
    pub bit_guard: u64,
    pub search_bound: u64,
}

impl Default for SearchLimits {
    fn default() -> Self {
        SearchLimits {
            max_degree: 8,
            bit_guard: DEFAULT_BIT_GUARD,
            search_bound: crate::presentation::DEFAULT_SEARCH_BOUND,
        }
    }
}

/// `a^t b^r` representing a conjugacy class of `G(1,n)`, `|n| ≥ 2`.
///
/// `t ≥ 0`; when the input had negative `a`-exponent sum the form describes
/// its inverse and `inverted` is set. `n ∤ r` unless `r = 0`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ConjugacyForm {
    pub t: BigInt,
    pub r: BigInt,
    pub inverted: bool,
}

impl ConjugacyForm {
    /// The `a`-exponent sum of the original element.
    pub fn signed_t(&self) -> BigInt {
        if self.inverted {
            -&self.t
        } else {
            self.t.clone()
        }
    }

    pub fn to_word(&self) -> Word {
        Word::a(self.t.clone()).multiply(&Word::b(self.r.clone()))
    }
}

fn require_nondegenerate(n: i64) -> Result<()> {
    if n.unsigned_abs() < 2 {
        return Err(Error::Precondition(format!(
            "solvable conjugacy needs |n| >= 2, got n={n}; use is_conjugate for n = 1 or -1"
        )));
    }
    Ok(())
}

pub fn conjugacy_form(n: i64, w: &Word) -> Result<ConjugacyForm> {
    require_nondegenerate(n)?;
    let mut nf = solvable_normal_form(n, w)?;
    let inverted = nf.p < nf.q;
    if inverted {
        nf = solvable_normal_form(n, &w.inverse())?;
    }
    // a^p b^s a^-q is conjugate (by a^q) to a^(p-q) b^s, and a b^(nr) a^-1 = b^r.
    let nb = BigInt::from(n);
    let t = nf.a_shift();
    let mut r = nf.s;
    while !r.is_zero() && (&r % &nb).is_zero() {
        r /= &nb;
    }
    Ok(ConjugacyForm { t, r, inverted })
}

pub fn is_conjugate_solvable(n: i64, w1: &Word, w2: &Word) -> Result<bool> {
    let (f1, f2) = (conjugacy_form(n, w1)?, conjugacy_form(n, w2)?);
    if f1.signed_t() != f2.signed_t() {
        return Ok(false);
    }
    if f1.t.is_zero() {
        return Ok(f1.r == f2.r);
    }
    let t = f1.t.to_u32().ok_or_else(|| Error::ResourceLimit(format!("t={} too large", f1.t)))?;
    let modulus = numtheory::u_t(n, t)?;
    Ok(numtheory::solve_exp_congruence(n, f1.r, f2.r, modulus)?.is_some())
}

/// `(t, r)` with `w = a^t b^r` in `G(1,±1)`.
fn unit_form(n: i64, w: &Word) -> Result<(BigInt, BigInt)> {
    let nf = solvable_normal_form(n, w)?;
    // a^p b^s a^-q = a^(p-q) · a^q b^s a^-q = a^(p-q) b^(s n^q) when n = ±1.
    let r = if n == -1 && nf.q % 2 == 1 { -nf.s.clone() } else { nf.s.clone() };
    Ok((nf.a_shift(), r))
}

/// Conjugacy in `G(1,n)` for every `n`, including the free abelian group
/// `G(1,1)` and the Klein-bottle group `G(1,−1)`.
///
/// In `G(1,−1)`, conjugating `a^t b^r` by `a` negates `r`, and by `b` adds
/// `2` to `r` when `t` is odd; these generate all conjugations.
pub fn is_conjugate(g: GroupParams, w1: &Word, w2: &Word) -> Result<bool> {
    let (c, swapped) = g.canonical_with_swap();
    if c.m != 1 {
        return Err(Error::Precondition(format!("conjugacy is only decided for m = 1, got {c}")));
    }
    let (w1, w2) = if swapped { (w1.invert_a(), w2.invert_a()) } else { (w1.clone(), w2.clone()) };
    match c.n {
        1 => Ok(unit_form(1, &w1)? == unit_form(1, &w2)?),
        -1 => {
            let ((t1, r1), (t2, r2)) = (unit_form(-1, &w1)?, unit_form(-1, &w2)?);
            Ok(t1 == t2 && if t1.is_even() { r1 == r2 || r1 == -r2 } else { (r1 - r2).is_even() })
        }
        n => is_conjugate_solvable(n, &w1, &w2),
    }
}

fn cyclic_target(order: &BigInt) -> Result<Target> {
    let c = order.to_u64().ok_or_else(|| Error::ResourceLimit(format!("cyclic order {order} too large")))?;
    Ok(Target::Cyclic { order: cyclic_witness(c)?.k })
}

fn metacyclic(n: i64, k: impl Into<BigInt>, l: impl Into<BigInt>) -> Result<Target> {
    Ok(Target::Metacyclic(FiniteQuotient::from_big(n, &k.into(), &l.into())?))
}

/// Canonical parameters and the word rewritten to match them.
fn canonical_word(g: GroupParams, w: &Word, trace: &mut Vec<String>) -> (GroupParams, Word) {
    let (c, swapped) = g.canonical_with_swap();
    if swapped {
        trace.push(format!("{g} is presented as {c} via a -> a^-1"));
        (c, w.invert_a())
    } else {
        if c != g {
            trace.push(format!("{g} is presented as {c}"));
        }
        (c, w.clone())
    }
}

pub fn separate_element(g: GroupParams, w: &Word) -> Result<Witness> {
    separate_element_with(g, w, &SearchLimits::default())
}

/// A finite image of `G(m,n)` in which `w` survives.
///
/// Tried in order: the `a`-exponent sum; for `m = 1` a metacyclic
/// `H_n(l−1, l)`; for `|n| = m` and `w` a power of `b`, a metacyclic
/// `H_±1(k, l)`; otherwise a permutation image.
pub fn separate_element_with(g: GroupParams, w: &Word, limits: &SearchLimits) -> Result<Witness> {
    let mut trace = Vec::new();
    let (c, w) = canonical_word(g, w, &mut trace);
    if !is_residually_finite(c).is_true() {
        return Err(Error::Precondition(format!("{c} is not residually finite")));
    }
    let reduced = words::britton_reduce_guarded(c, &w, limits.bit_guard)?;
    if reduced.is_empty() {
        return Err(Error::Precondition(format!("{w} is trivial in {c}")));
    }
    let claim = vec![w.clone()];
    let sum = w.a_exponent_sum();
    if !sum.is_zero() {
        let order = sum.abs() + 1u32;
        trace.push(format!("a-exponent sum {sum} survives modulo {order}"));
        return Ok(Witness::new(c, cyclic_target(&order)?, ClaimKind::ElementNontrivial, claim)
            .with_strategy("a_exponent_sum", trace));
    }
    if c.m == 1 {
        let r = if c.n.unsigned_abs() >= 2 { conjugacy_form(c.n, &w)?.r } else { unit_form(c.n, &w)?.1 };
        let l = numtheory::smallest_prime_avoiding(&[&BigInt::from(c.n), &r]);
        trace.push(format!("w is conjugate to b^{r}; {l} is the least prime dividing neither n nor {r}"));
        return Ok(Witness::new(c, metacyclic(c.n, l - 1, l)?, ClaimKind::ElementNontrivial, claim)
            .with_strategy("solvable_metacyclic", trace));
    }
    if c.is_equal_modulus() {
        if let Some(j) = reduced.as_b_power() {
            let eps = c.n.signum();
            let l = numtheory::smallest_prime_avoiding(&[&j, &BigInt::from(c.n)]);
            let k = if eps == 1 || l == 2 { 1 } else { 2 };
            trace.push(format!("w = b^{j}; {l} is the least prime dividing neither {j} nor n"));
            return Ok(Witness::new(c, metacyclic(eps, k, l)?, ClaimKind::ElementNontrivial, claim)
                .with_strategy("equal_modulus_metacyclic", trace));
        }
    }
    let q = perm_quotient_search_traced(c, &reduced, limits.max_degree, &mut trace)?;
    Ok(Witness::new(c, Target::Permutation(q), ClaimKind::ElementNontrivial, claim)
        .with_strategy("permutation_search", trace))
}

/// A finite image of `G(1,n)` in which `w1` and `w2` are not conjugate.
pub fn separate_conjugacy(n: i64, w1: &Word, w2: &Word) -> Result<Witness> {
    let g = GroupParams::new(1, n)?;
    if is_conjugate(g, w1, w2)? {
        return Err(Error::Precondition(format!("{w1} and {w2} are conjugate in {g}")));
    }
    let words = vec![w1.clone(), w2.clone()];
    let done = |target: Target, strategy: &str, trace: Vec<String>| {
        Ok(Witness::new(g, target, ClaimKind::NonConjugate, words.clone()).with_strategy(strategy, trace))
    };
    let (s1, s2) = (w1.a_exponent_sum(), w2.a_exponent_sum());
    if s1 != s2 {
        let order = (&s1 - &s2).abs() + 1u32;
        let trace = vec![format!("a-exponent sums {s1} and {s2} differ modulo {order}")];
        return done(cyclic_target(&order)?, "a_exponent_sum", trace);
    }
    if n == 1 {
        let (r1, r2) = (unit_form(1, w1)?.1, unit_form(1, w2)?.1);
        let diff = &r1 - &r2;
        let l = numtheory::smallest_prime_avoiding(&[&diff]);
        let trace = vec![format!("b-exponents {r1} and {r2} differ modulo {l}")];
        return done(metacyclic(1, 1, l)?, "b_exponent_modulus", trace);
    }
    if n == -1 {
        let ((t, r1), (_, r2)) = (unit_form(-1, w1)?, unit_form(-1, w2)?);
        if t.is_odd() {
            let trace = vec![format!("odd t: b-exponents {r1} and {r2} differ in parity")];
            return done(metacyclic(-1, 2, 2)?, "klein_parity", trace);
        }
        let (d, s) = (&r1 - &r2, &r1 + &r2);
        let l = numtheory::smallest_prime_avoiding(&[&d, &s]);
        let trace = vec![format!("even t: {r1} is not +-{r2} modulo {l}")];
        return done(metacyclic(-1, 2, l)?, "klein_sign", trace);
    }
    let (f1, f2) = (conjugacy_form(n, w1)?, conjugacy_form(n, w2)?);
    let mut trace = vec![format!(
        "classes a^{} b^{} and a^{} b^{}{}",
        f1.t,
        f1.r,
        f2.t,
        f2.r,
        if f1.inverted { " (inverses)" } else { "" }
    )];
    if f1.t.is_positive() {
        let t = f1.t.to_u32().ok_or_else(|| Error::ResourceLimit(format!("t={} too large", f1.t)))?;
        let u = numtheory::u_t(n, t)?;
        trace.push(format!("{} and {} are not ({n},{u})-equivalent", f1.r, f2.r));
        return done(metacyclic(n, t, u)?, "twisted_b_power_classes", trace);
    }
    if f1.r.is_zero() || f2.r.is_zero() {
        let nontrivial = if f1.r.is_zero() { w2 } else { w1 };
        let inner = separate_element(g, nontrivial)?;
        trace.push(format!("one element is trivial; {nontrivial} survives in {}", inner.target));
        trace.extend(inner.meta.search_trace);
        return done(inner.target, "element_separation", trace);
    }
    let t = numtheory::find_unsolvable_modulus(n, f1.r.clone(), f2.r.clone())?;
    let u = numtheory::u_t(n, t)?;
    trace.push(format!("t = {t} is the least t with {n}^x {} = {} (mod {u}) unsolvable", f1.r, f2.r));
    done(metacyclic(n, t, u)?, "unsolvable_exponential_congruence", trace)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::witness::verify;

    fn w(s: &str) -> Word {
        s.parse().unwrap()
    }

    fn gp(m: i64, n: i64) -> GroupParams {
        GroupParams::new(m, n).unwrap()
    }

    fn form(t: i64, r: i64) -> (BigInt, BigInt) {
        (t.into(), r.into())
    }

    fn tr(f: &ConjugacyForm) -> (BigInt, BigInt) {
        (f.t.clone(), f.r.clone())
    }

    #[test]
    fn form_examples() {
        assert_eq!(tr(&conjugacy_form(2, &w("a b^4")).unwrap()), form(1, 1));
        assert_eq!(tr(&conjugacy_form(2, &w("a b a^-1")).unwrap()), form(0, 1));
        // r = -2 here; -2 and 2 are (3, 8)-equivalent (3·(-2) = -6 ≡ 2).
        let f = conjugacy_form(3, &w("a^-2 b^6")).unwrap();
        assert_eq!(tr(&f), form(2, -2));
        assert!(f.inverted);
        assert!(numtheory::solve_exp_congruence(3, -2, 2, 8).unwrap().is_some());
        assert!(conjugacy_form(1, &w("a")).is_err());
    }

    #[test]
    fn decide_examples() {
        assert!(is_conjugate_solvable(2, &w("a b"), &w("a b^3")).unwrap());
        assert!(!is_conjugate_solvable(3, &w("a b"), &w("a b^2")).unwrap());
        assert!(!is_conjugate_solvable(2, &w("b"), &w("b^3")).unwrap());
        assert!(is_conjugate_solvable(2, &w("b"), &w("a b^2 a^-1")).unwrap());
        assert!(!is_conjugate_solvable(2, &w("a"), &w("a^-1")).unwrap());
        assert!(is_conjugate_solvable(3, &w("a^-1 b"), &w("b a^-1")).unwrap());
        assert!(matches!(is_conjugate_solvable(-1, &w("a"), &w("a")), Err(Error::Precondition(_))));
    }

    #[test]
    fn unit_twist_deciders() {
        let abelian = gp(1, 1);
        assert!(is_conjugate(abelian, &w("a b"), &w("b a")).unwrap());
        assert!(!is_conjugate(abelian, &w("b"), &w("b^-1")).unwrap());
        let klein = gp(1, -1);
        assert!(is_conjugate(klein, &w("b"), &w("b^-1")).unwrap());
        assert!(!is_conjugate(klein, &w("b"), &w("b^3")).unwrap());
        assert!(is_conjugate(klein, &w("a b"), &w("a b^3")).unwrap());
        assert!(is_conjugate(klein, &w("a b"), &w("a b^-1")).unwrap());
        assert!(!is_conjugate(klein, &w("a b"), &w("a b^2")).unwrap());
        assert!(is_conjugate(klein, &w("a^2 b^3"), &w("a^2 b^-3")).unwrap());
        assert!(!is_conjugate(klein, &w("a^2 b^3"), &w("a^2 b^5")).unwrap());
        assert!(is_conjugate(gp(-1, 1), &w("b"), &w("b^-1")).unwrap());
        assert!(is_conjugate(gp(1, 2), &w("b"), &w("a b^2 a^-1")).unwrap());
        assert!(is_conjugate(gp(2, 1), &w("b"), &w("a^-1 b^2 a")).unwrap());
        assert!(is_conjugate(gp(2, 2), &w("b"), &w("b")).is_err());
    }

    #[test]
    fn separate_element_examples() {
        let wit = separate_element(gp(1, 2), &w("b^3")).unwrap();
        assert_eq!(wit.target, Target::Metacyclic(FiniteQuotient::new(2, 4, 5).unwrap()));
        let wit = separate_element(gp(1, 3), &w("a^2 b")).unwrap();
        assert_eq!(wit.target, Target::Cyclic { order: 3 });
        let wit = separate_element(gp(2, 2), &w("b^2")).unwrap();
        assert_eq!(wit.target, Target::Metacyclic(FiniteQuotient::new(1, 1, 3).unwrap()));
        let wit = separate_element(gp(3, -3), &w("b^3")).unwrap();
        assert_eq!(wit.target, Target::Metacyclic(FiniteQuotient::new(-1, 1, 2).unwrap()));
        let wit = separate_element(gp(3, -3), &w("b^2")).unwrap();
        assert_eq!(wit.target, Target::Metacyclic(FiniteQuotient::new(-1, 2, 5).unwrap()));
        let wit = separate_element(gp(2, 2), &w("a^-1 b a b^-1")).unwrap();
        assert!(matches!(wit.target, Target::Permutation(_)));
        assert_eq!(wit.meta.strategy, "permutation_search");
        for wit in [
            separate_element(gp(1, 2), &w("b^3")).unwrap(),
            separate_element(gp(2, 2), &w("a^-1 b a b^-1")).unwrap(),
            separate_element(gp(1, -1), &w("a b a^-1")).unwrap(),
            separate_element(gp(1, 1), &w("b^6")).unwrap(),
            separate_element(gp(2, 1), &w("a^-1 b a")).unwrap(),
        ] {
            assert_eq!(verify(&wit), Ok(()), "{}", wit.to_json());
        }
    }

    #[test]
    fn separate_element_refusals() {
        assert!(matches!(separate_element(gp(2, 3), &w("b")), Err(Error::Precondition(_))));
        assert!(matches!(separate_element(gp(1, 2), &w("a^-1 b a b^-2")), Err(Error::Precondition(_))));
    }

    #[test]
    fn separate_conjugacy_examples() {
        let wit = separate_conjugacy(2, &w("b"), &w("b^3")).unwrap();
        assert_eq!(wit.target, Target::Metacyclic(FiniteQuotient::new(2, 2, 3).unwrap()));
        let wit = separate_conjugacy(2, &w("b"), &w("b^5")).unwrap();
        assert_eq!(wit.target, Target::Metacyclic(FiniteQuotient::new(2, 3, 7).unwrap()));
        let wit = separate_conjugacy(3, &w("a b"), &w("a b^2")).unwrap();
        assert_eq!(wit.target, Target::Metacyclic(FiniteQuotient::new(3, 1, 2).unwrap()));
        let wit = separate_conjugacy(2, &w("a^2 b"), &w("a^3 b")).unwrap();
        assert_eq!(wit.target, Target::Cyclic { order: 2 });
        assert!(separate_conjugacy(2, &w("b"), &w("a b^2 a^-1")).is_err());
    }

    #[test]
    fn separate_conjugacy_witnesses_verify() {
        let cases = [
            (2, "b", "b^3"),
            (2, "b", "1"),
            (3, "a b", "a b^2"),
            (-2, "b", "b^-1"),
            (-3, "a^-1 b", "a^-1 b^2"),
            (1, "b", "b^2"),
            (-1, "b", "b^3"),
            (-1, "a b", "a b^2"),
            (3, "a^-2 b", "a^-2 b^2"),
        ];
        for (n, x, y) in cases {
            let wit = separate_conjugacy(n, &w(x), &w(y)).unwrap();
            assert_eq!(verify(&wit), Ok(()), "n={n} {x} vs {y}: {}", wit.to_json());
        }
    }
}
