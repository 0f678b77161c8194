// SPDX-License-Identifier: Apache-2.0

//! Group parameters and the residual / separability classification of
//! `G(m,n) = ⟨a, b | a⁻¹ b^m a = b^n⟩`.
//!
//! Every predicate works on the canonical form `|n| ≥ m > 0` and answers with
//! a [`Verdict`] carrying a machine-readable [`Reason`].

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use serde::{Deserialize, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::numtheory::{self, PrimeSet};
use crate::quotients::FiniteGroup;
use crate::words::Word;

/// Default ceiling for the π-number search in [`is_residually_pi`].
pub const DEFAULT_SEARCH_BOUND: u64 = 1_000_000;

/// The pair `(m, n)` of `G(m,n)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "RawParams")]
pub struct GroupParams {
    pub m: i64,
    pub n: i64,
}

#[derive(Deserialize)]
struct RawParams {
    m: i64,
    n: i64,
}

impl TryFrom<RawParams> for GroupParams {
    type Error = Error;

    fn try_from(raw: RawParams) -> Result<Self> {
        GroupParams::new(raw.m, raw.n)
    }
}

impl GroupParams {
    pub fn new(m: i64, n: i64) -> Result<Self> {
        if m == 0 || n == 0 {
            return Err(Error::ZeroParameter { m, n });
        }
        Ok(GroupParams { m, n })
    }

    /// The unique isomorphic pair with `|n| ≥ m > 0`.
    pub fn canonical(self) -> GroupParams {
        self.canonical_with_swap().0
    }

    /// Canonical form, plus whether `m` and `n` were exchanged. After an
    /// exchange, words must be rewritten with [`Word::invert_a`].
    pub fn canonical_with_swap(self) -> (GroupParams, bool) {
        let (mut m, mut n, mut swapped) = (self.m, self.n, false);
        if m.unsigned_abs() > n.unsigned_abs() {
            std::mem::swap(&mut m, &mut n);
            swapped = true;
        }
        if m < 0 {
            m = -m;
            n = -n;
        }
        (GroupParams { m, n }, swapped)
    }

    pub fn is_canonical(self) -> bool {
        self.canonical() == self
    }

    pub fn gcd(self) -> i64 {
        self.m.gcd(&self.n)
    }

    /// `m = 1` after canonicalization: the solvable groups `G(1,n)`.
    pub fn is_solvable_case(self) -> bool {
        self.canonical().m == 1
    }

    /// `|n| = m`: the groups where `⟨b^m⟩` is normal.
    pub fn is_equal_modulus(self) -> bool {
        self.m.unsigned_abs() == self.n.unsigned_abs()
    }
}

impl fmt::Display for GroupParams {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "G({},{})", self.m, self.n)
    }
}

pub fn canonicalize(g: GroupParams) -> GroupParams {
    g.canonical()
}

pub fn is_isomorphic(g1: GroupParams, g2: GroupParams) -> bool {
    g1.canonical() == g2.canonical()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Truth {
    True,
    False,
    Unknown,
}

impl From<bool> for Truth {
    fn from(b: bool) -> Self {
        if b {
            Truth::True
        } else {
            Truth::False
        }
    }
}

impl fmt::Display for Truth {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Truth::True => "true",
            Truth::False => "false",
            Truth::Unknown => "unknown",
        })
    }
}

/// Which clause of the classification fired.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Reason {
    RfCriterion,
    PResidualCriterion,
    PiResidualEqualModulus,
    PiResidualSinglePrime,
    PiResidualDividesNMinusOne,
    PiResidualTwoPrimes,
    PiResidualPiNumberFound,
    PiResidualNoCoprimePiNumber,
    PiResidualSearchExhausted,
    NotResiduallyFinite,
    VirtualPSolvable,
    VirtualPEqualModulus,
    VirtualNotResiduallyFinite,
    VirtualPiSomePrime,
    VirtualPiNoPrime,
    ConjugacySeparableIffRf,
    ConjugacyPiEqualModulus,
    ConjugacyPiTwoPrimes,
    ConjugacyPiNotResidual,
    ConjugacyPiUndecided,
    SubgroupEqualModulus,
    SubgroupCyclicNotClosed,
    SubgroupNotResiduallyFinite,
}

impl Reason {
    pub fn code(self) -> &'static str {
        match self {
            Reason::RfCriterion => "rf_criterion",
            Reason::PResidualCriterion => "p_residual_criterion",
            Reason::PiResidualEqualModulus => "pi_residual_equal_modulus",
            Reason::PiResidualSinglePrime => "pi_residual_single_prime",
            Reason::PiResidualDividesNMinusOne => "pi_residual_divides_n_minus_one",
            Reason::PiResidualTwoPrimes => "pi_residual_two_primes",
            Reason::PiResidualPiNumberFound => "pi_residual_pi_number_found",
            Reason::PiResidualNoCoprimePiNumber => "pi_residual_no_coprime_pi_number",
            Reason::PiResidualSearchExhausted => "pi_residual_search_exhausted",
            Reason::NotResiduallyFinite => "not_residually_finite",
            Reason::VirtualPSolvable => "virtual_p_solvable",
            Reason::VirtualPEqualModulus => "virtual_p_equal_modulus",
            Reason::VirtualNotResiduallyFinite => "virtual_not_residually_finite",
            Reason::VirtualPiSomePrime => "virtual_pi_some_prime",
            Reason::VirtualPiNoPrime => "virtual_pi_no_prime",
            Reason::ConjugacySeparableIffRf => "conjugacy_separable_iff_rf",
            Reason::ConjugacyPiEqualModulus => "conjugacy_pi_equal_modulus",
            Reason::ConjugacyPiTwoPrimes => "conjugacy_pi_two_primes",
            Reason::ConjugacyPiNotResidual => "conjugacy_pi_not_residual",
            Reason::ConjugacyPiUndecided => "conjugacy_pi_undecided",
            Reason::SubgroupEqualModulus => "subgroup_equal_modulus",
            Reason::SubgroupCyclicNotClosed => "subgroup_cyclic_not_closed",
            Reason::SubgroupNotResiduallyFinite => "subgroup_not_residually_finite",
        }
    }

    pub fn description(self) -> &'static str {
        match self {
            Reason::RfCriterion => "residually finite iff m = 1 or |n| = m",
            Reason::PResidualCriterion => {
                "F_p-residual iff m = 1 and n = 1 (mod p), or |n| = m = p^r with p = 2 when n = -m"
            }
            Reason::PiResidualEqualModulus => "|n| = m: F_pi-residual iff m is a pi-number, and 2 in pi when n = -m",
            Reason::PiResidualSinglePrime => "single prime: same as F_p-residuality",
            Reason::PiResidualDividesNMinusOne => "some prime of pi divides n - 1",
            Reason::PiResidualTwoPrimes => {
                "pi = {p < q} avoiding n - 1: F_pi-residual iff (n,q) = 1, p | q - 1 and ord_q(n) is a p-number"
            }
            Reason::PiResidualPiNumberFound => "found a pi-number s > 1 coprime to n with ord_s(n) a pi-number",
            Reason::PiResidualNoCoprimePiNumber => "every prime of pi divides n, so no pi-number s > 1 is coprime to n",
            Reason::PiResidualSearchExhausted => {
                "no qualifying pi-number up to the search bound; larger ones may exist"
            }
            Reason::NotResiduallyFinite => "|n| > m > 1: not residually finite",
            Reason::VirtualPSolvable => "m = 1: virtually F_p-residual iff p does not divide n",
            Reason::VirtualPEqualModulus => "|n| = m: virtually F_p-residual for every prime p",
            Reason::VirtualNotResiduallyFinite => {
                "|n| > m > 1: a finite-index residually finite subgroup would make G residually finite"
            }
            Reason::VirtualPiSomePrime => "virtually F_p-residual for some p in pi",
            Reason::VirtualPiNoPrime => "virtually F_p-residual for no p in pi",
            Reason::ConjugacySeparableIffRf => "conjugacy separable iff residually finite",
            Reason::ConjugacyPiEqualModulus => "|n| = m: conjugacy F_pi-separable iff F_pi-residual",
            Reason::ConjugacyPiTwoPrimes => "m = 1, n != +-1: never conjugacy F_pi-separable for a two-prime pi",
            Reason::ConjugacyPiNotResidual => "not F_pi-residual, hence not conjugacy F_pi-separable",
            Reason::ConjugacyPiUndecided => "m = 1, n != +-1, F_pi-residual with |pi| != 2: undecided",
            Reason::SubgroupEqualModulus => "|n| = m: subgroup separable",
            Reason::SubgroupCyclicNotClosed => {
                "m = 1, |n| > 1: <b> is not separable (a b a^-1 lies in <b>N for every finite-index N)"
            }
            Reason::SubgroupNotResiduallyFinite => "|n| > m > 1: not residually finite, so not subgroup separable",
        }
    }
}

impl fmt::Display for Reason {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.description())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", content = "value", rename_all = "snake_case")]
pub enum WitnessHint {
    /// A nontrivial element that dies in every relevant finite quotient, or
    /// an element outside a non-separable subgroup.
    Word(Word),
    /// The π-number `s` realizing F_π-residuality.
    PiNumber(u64),
    /// The prime that settled a virtual / π question.
    Prime(u64),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Verdict {
    pub value: Truth,
    pub reason: Reason,
    pub witness_hint: Option<WitnessHint>,
}

impl Verdict {
    fn new(value: impl Into<Truth>, reason: Reason) -> Self {
        Verdict { value: value.into(), reason, witness_hint: None }
    }

    fn with_hint(mut self, hint: WitnessHint) -> Self {
        self.witness_hint = Some(hint);
        self
    }

    pub fn is_true(&self) -> bool {
        self.value == Truth::True
    }

    pub fn is_false(&self) -> bool {
        self.value == Truth::False
    }
}

impl Serialize for Verdict {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        use serde::ser::SerializeStruct;
        #[derive(Serialize)]
        struct ReasonOut {
            code: &'static str,
            description: &'static str,
        }
        let mut st = serializer.serialize_struct("Verdict", 3)?;
        st.serialize_field("value", &self.value)?;
        st.serialize_field("reason", &ReasonOut { code: self.reason.code(), description: self.reason.description() })?;
        st.serialize_field("witness_hint", &self.witness_hint)?;
        st.end()
    }
}

fn require_prime(p: u64) -> Result<()> {
    if numtheory::is_prime(&BigInt::from(p)) {
        Ok(())
    } else {
        Err(Error::NotPrime(p.to_string()))
    }
}

fn require_nonempty(pi: &PrimeSet) -> Result<()> {
    if pi.is_empty() {
        Err(Error::EmptyPrimeSet)
    } else {
        Ok(())
    }
}

fn is_power_of(mut x: u64, p: u64) -> bool {
    while x % p == 0 {
        x /= p;
    }
    x == 1
}

/// `[a b^d a⁻¹, b]`, `d = gcd(m,n)`; nontrivial in a non-residually-finite
/// `G(m,n)` yet trivial in all of its finite quotients.
pub fn killed_commutator(g: GroupParams) -> Word {
    let conj = Word::a(1).multiply(&Word::b(g.gcd())).multiply(&Word::a(-1));
    Word::commutator(&conj, &Word::b(1))
}

pub fn is_residually_finite(g: GroupParams) -> Verdict {
    let c = g.canonical();
    let rf = c.m == 1 || c.is_equal_modulus();
    let v = Verdict::new(rf, Reason::RfCriterion);
    if rf {
        v
    } else {
        v.with_hint(WitnessHint::Word(killed_commutator(c)))
    }
}

pub fn is_residually_p(g: GroupParams, p: u64) -> Result<Verdict> {
    require_prime(p)?;
    let c = g.canonical();
    let pi = p as i64;
    let solvable = c.m == 1 && (c.n - 1).rem_euclid(pi) == 0;
    let equal = c.is_equal_modulus() && is_power_of(c.m as u64, p) && (c.n > 0 || p == 2);
    Ok(Verdict::new(solvable || equal, Reason::PResidualCriterion))
}

/// F_π-residuality.
///
/// Exact for `|n| = m`, for `|n| > m > 1`, and for `m = 1` with `|π| ≤ 2`.
/// For larger π and `m = 1` it searches π-numbers up to `search_bound` and
/// answers `Unknown` if none qualifies.
pub fn is_residually_pi(g: GroupParams, pi: &PrimeSet, search_bound: u64) -> Result<Verdict> {
    require_nonempty(pi)?;
    let c = g.canonical();
    if c.is_equal_modulus() {
        let ok = numtheory::is_pi_number(c.m, pi) && (c.n > 0 || pi.contains(2));
        return Ok(Verdict::new(ok, Reason::PiResidualEqualModulus));
    }
    if c.m > 1 {
        return Ok(Verdict::new(false, Reason::NotResiduallyFinite).with_hint(WitnessHint::Word(killed_commutator(c))));
    }
    let n = c.n;
    if pi.len() == 1 {
        let p = pi.iter().next().expect("non-empty");
        let v = is_residually_p(c, p)?;
        let out = Verdict::new(v.value, Reason::PiResidualSinglePrime);
        return Ok(if v.is_true() { out.with_hint(WitnessHint::PiNumber(p)) } else { out });
    }
    if let Some(p) = pi.iter().find(|&p| (n - 1).rem_euclid(p as i64) == 0) {
        return Ok(Verdict::new(true, Reason::PiResidualDividesNMinusOne).with_hint(WitnessHint::PiNumber(p)));
    }
    if pi.len() == 2 {
        let mut it = pi.iter();
        let (p, q) = (it.next().expect("two"), it.next().expect("two"));
        let coprime = n.rem_euclid(q as i64) != 0;
        let ok = coprime && (q - 1) % p == 0 && {
            let ord = numtheory::multiplicative_order(n, q)?;
            numtheory::is_pi_number(ord, &PrimeSet::singleton(p)?)
        };
        let v = Verdict::new(ok, Reason::PiResidualTwoPrimes);
        return Ok(if ok { v.with_hint(WitnessHint::PiNumber(q)) } else { v });
    }
    if pi.iter().all(|p| n.rem_euclid(p as i64) == 0) {
        return Ok(Verdict::new(false, Reason::PiResidualNoCoprimePiNumber));
    }
    for s in numtheory::pi_numbers(pi, search_bound).skip(1) {
        if n.rem_euclid(s as i64) == 0 || num_integer::gcd(n.unsigned_abs(), s) != 1 {
            continue;
        }
        let ord = numtheory::multiplicative_order(n, s)?;
        if numtheory::is_pi_number(ord, pi) {
            return Ok(Verdict::new(true, Reason::PiResidualPiNumberFound).with_hint(WitnessHint::PiNumber(s)));
        }
    }
    Ok(Verdict::new(Truth::Unknown, Reason::PiResidualSearchExhausted))
}

pub fn is_virtually_residually_p(g: GroupParams, p: u64) -> Result<Verdict> {
    require_prime(p)?;
    let c = g.canonical();
    Ok(if c.is_equal_modulus() {
        Verdict::new(true, Reason::VirtualPEqualModulus)
    } else if c.m == 1 {
        Verdict::new(c.n.rem_euclid(p as i64) != 0, Reason::VirtualPSolvable)
    } else {
        Verdict::new(false, Reason::VirtualNotResiduallyFinite)
    })
}

pub fn is_virtually_residually_pi(g: GroupParams, pi: &PrimeSet) -> Result<Verdict> {
    require_nonempty(pi)?;
    for p in pi.iter() {
        if is_virtually_residually_p(g, p)?.is_true() {
            return Ok(Verdict::new(true, Reason::VirtualPiSomePrime).with_hint(WitnessHint::Prime(p)));
        }
    }
    Ok(Verdict::new(false, Reason::VirtualPiNoPrime))
}

pub fn is_conjugacy_separable(g: GroupParams) -> Verdict {
    let rf = is_residually_finite(g);
    Verdict { reason: Reason::ConjugacySeparableIffRf, ..rf }
}

/// Conjugacy F_π-separability; `Unknown` where the classification is open.
pub fn is_conjugacy_separable_pi(g: GroupParams, pi: &PrimeSet, search_bound: u64) -> Result<Verdict> {
    require_nonempty(pi)?;
    let c = g.canonical();
    if c.is_equal_modulus() {
        let v = is_residually_pi(c, pi, search_bound)?;
        return Ok(Verdict { reason: Reason::ConjugacyPiEqualModulus, ..v });
    }
    if c.m > 1 {
        return Ok(Verdict::new(false, Reason::NotResiduallyFinite).with_hint(WitnessHint::Word(killed_commutator(c))));
    }
    if pi.len() == 2 {
        return Ok(Verdict::new(false, Reason::ConjugacyPiTwoPrimes));
    }
    let residual = is_residually_pi(c, pi, search_bound)?;
    Ok(if residual.is_false() {
        Verdict::new(false, Reason::ConjugacyPiNotResidual)
    } else {
        Verdict::new(Truth::Unknown, Reason::ConjugacyPiUndecided)
    })
}

pub fn is_subgroup_separable(g: GroupParams) -> Verdict {
    let c = g.canonical();
    if c.is_equal_modulus() {
        Verdict::new(true, Reason::SubgroupEqualModulus)
    } else if c.m == 1 {
        Verdict::new(false, Reason::SubgroupCyclicNotClosed)
            .with_hint(WitnessHint::Word("a b a^-1".parse().expect("literal word")))
    } else {
        Verdict::new(false, Reason::SubgroupNotResiduallyFinite).with_hint(WitnessHint::Word(killed_commutator(c)))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum SigmaKind {
    #[serde(rename = "F")]
    Finite,
    #[serde(rename = "F_p")]
    FiniteP,
}

/// Parameters of the `p`-adic split `m = p^r m1`, `n = p^s n1`,
/// `d = gcd(m1,n1)`, `m1 = d u`, `n1 = d v`.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct SigmaParameters {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub p: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub r: Option<u32>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub s: Option<u32>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub m1: Option<i64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub n1: Option<i64>,
    pub d: i64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub u: Option<i64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub v: Option<i64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub t: Option<u32>,
}

/// Normal generating set of the finite (or finite-p) residual.
///
/// Either a single power `b^e` (`power_exponent`), or the commutator family
/// `{[a^k b^e a^{-k}, b] : k ∈ ℤ}` (`commutator_exponent`) optionally joined
/// by one extra element.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SigmaDescription {
    pub kind: SigmaKind,
    pub group: GroupParams,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub commutator_exponent: Option<i64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub extra_element: Option<Word>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub power_exponent: Option<i64>,
    pub parameters: SigmaParameters,
}

impl SigmaDescription {
    /// `[a^k b^e a^{-k}, b]` for the stored exponent `e`.
    pub fn commutator_member(&self, k: i64) -> Option<Word> {
        let e = self.commutator_exponent?;
        let conj = Word::a(k).multiply(&Word::b(e)).multiply(&Word::a(-k));
        Some(Word::commutator(&conj, &Word::b(1)))
    }

    pub fn power_element(&self) -> Option<Word> {
        self.power_exponent.map(Word::b)
    }

    /// Instantiated generators with `|k| ≤ k_max`.
    pub fn generators(&self, k_max: i64) -> Vec<Word> {
        let mut out: Vec<Word> = self.power_element().into_iter().collect();
        out.extend(self.extra_element.clone());
        if self.commutator_exponent.is_some() {
            out.extend((-k_max..=k_max).filter_map(|k| self.commutator_member(k)));
        }
        out
    }

    pub fn is_power_case(&self) -> bool {
        self.power_exponent.is_some()
    }
}

pub fn sigma_description(g: GroupParams) -> SigmaDescription {
    let c = g.canonical();
    let d = c.gcd();
    SigmaDescription {
        kind: SigmaKind::Finite,
        group: c,
        commutator_exponent: Some(d),
        extra_element: None,
        power_exponent: None,
        parameters: SigmaParameters { d, ..Default::default() },
    }
}

fn split_p_part(x: i64, p: i64) -> (u32, i64) {
    let (mut e, mut rest) = (0u32, x);
    while rest % p == 0 {
        rest /= p;
        e += 1;
    }
    (e, rest)
}

pub fn sigma_p_description(g: GroupParams, p: u64) -> Result<SigmaDescription> {
    require_prime(p)?;
    let c = g.canonical();
    let pi = p as i64;
    let (r, m1) = split_p_part(c.m, pi);
    let (s, n1) = split_p_part(c.n, pi);
    let d = m1.gcd(&n1);
    let (u, v) = (m1 / d, n1 / d);
    let mut parameters = SigmaParameters {
        p: Some(p),
        r: Some(r),
        s: Some(s),
        m1: Some(m1),
        n1: Some(n1),
        d,
        u: Some(u),
        v: Some(v),
        t: None,
    };
    let desc = if r != s || (m1 - n1).rem_euclid(pi) != 0 {
        let t = r.min(s);
        parameters.t = Some(t);
        SigmaDescription {
            kind: SigmaKind::FiniteP,
            group: c,
            commutator_exponent: None,
            extra_element: None,
            power_exponent: Some(pi.pow(t)),
            parameters,
        }
    } else {
        let pr = pi.pow(r);
        let extra = Word::a(-1).multiply(&Word::b(pr * u)).multiply(&Word::a(1)).multiply(&Word::b(-pr * v));
        SigmaDescription {
            kind: SigmaKind::FiniteP,
            group: c,
            commutator_exponent: Some(pr),
            extra_element: Some(extra),
            power_exponent: None,
            parameters,
        }
    };
    Ok(desc)
}

/// For elements of equal finite order with `x^n = y^m`, `x^d` commutes with
/// `y` where `d = gcd(m,n)`. Returns `None` when the hypotheses fail,
/// otherwise whether `[x^d, y] = 1` actually holds (always expected).
pub fn power_commutator_check<G: FiniteGroup>(group: &G, x: &G::Elem, y: &G::Elem, m: i64, n: i64) -> Option<bool> {
    if group.order_of(x) != group.order_of(y) || group.pow(x, n) != group.pow(y, m) {
        return None;
    }
    let xd = group.pow(x, m.gcd(&n));
    Some(group.mul(&xd, y) == group.mul(y, &xd))
}
