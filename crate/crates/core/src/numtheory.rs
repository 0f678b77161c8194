// SPDX-License-Identifier: Apache-2.0

//! Arbitrary-precision number theory used by the classification predicates
//! and the conjugacy machinery: factorization, multiplicative orders,
//! π-numbers and exponential congruences `n^x · r ≡ s (mod M)`.

use std::cmp::Reverse;
use std::collections::{BTreeSet, BinaryHeap};
use std::fmt;

use num_bigint::{BigInt, Sign};
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Upper limit on `t` for [`find_unsolvable_modulus`]. The search always
/// terminates mathematically; this only guards against runaway inputs.
pub const MAX_MODULUS_SEARCH: u32 = 2048;

const SMALL_PRIMES: [u64; 25] =
    [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53, 59, 61, 67, 71, 73, 79, 83, 89, 97];

const TRIAL_DIVISION_LIMIT: u64 = 10_000;

/// A finite, non-repeating set of primes.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "Vec<u64>", into = "Vec<u64>")]
pub struct PrimeSet {
    primes: BTreeSet<u64>,
}

impl PrimeSet {
    pub fn new<I: IntoIterator<Item = u64>>(primes: I) -> Result<Self> {
        let mut set = BTreeSet::new();
        for p in primes {
            if !is_prime(&BigInt::from(p)) {
                return Err(Error::NotPrime(p.to_string()));
            }
            set.insert(p);
        }
        Ok(PrimeSet { primes: set })
    }

    pub fn singleton(p: u64) -> Result<Self> {
        Self::new([p])
    }

    pub fn len(&self) -> usize {
        self.primes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.primes.is_empty()
    }

    pub fn contains(&self, p: u64) -> bool {
        self.primes.contains(&p)
    }

    /// Primes in increasing order.
    pub fn iter(&self) -> impl Iterator<Item = u64> + '_ {
        self.primes.iter().copied()
    }

    /// All non-empty proper subsets, smallest first.
    pub fn proper_subsets(&self) -> Vec<PrimeSet> {
        let items: Vec<u64> = self.iter().collect();
        let mut out = Vec::new();
        for mask in 1..(1u32 << items.len()) - 1 {
            let primes = items.iter().enumerate().filter(|(i, _)| mask & (1 << i) != 0).map(|(_, &p)| p).collect();
            out.push(PrimeSet { primes });
        }
        out.sort_by_key(|s| (s.len(), s.iter().collect::<Vec<_>>()));
        out
    }
}

impl TryFrom<Vec<u64>> for PrimeSet {
    type Error = Error;

    fn try_from(v: Vec<u64>) -> Result<Self> {
        PrimeSet::new(v)
    }
}

impl From<PrimeSet> for Vec<u64> {
    fn from(s: PrimeSet) -> Self {
        s.primes.into_iter().collect()
    }
}

impl fmt::Display for PrimeSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.iter().map(|p| p.to_string()).collect();
        write!(f, "{{{}}}", parts.join(","))
    }
}

/// Signed prime factorization `unit · ∏ p^e`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Factorization {
    pub unit: i8,
    /// Prime/exponent pairs with strictly increasing primes.
    pub factors: Vec<(BigInt, u32)>,
}

impl Factorization {
    pub fn reconstruct(&self) -> BigInt {
        let mut acc = BigInt::from(self.unit);
        for (p, e) in &self.factors {
            acc *= num_traits::pow(p.clone(), *e as usize);
        }
        acc
    }

    pub fn primes(&self) -> impl Iterator<Item = &BigInt> {
        self.factors.iter().map(|(p, _)| p)
    }
}

impl fmt::Display for Factorization {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.unit < 0 {
            write!(f, "-")?;
        }
        if self.factors.is_empty() {
            return write!(f, "1");
        }
        let parts: Vec<String> =
            self.factors.iter().map(|(p, e)| if *e == 1 { p.to_string() } else { format!("{p}^{e}") }).collect();
        write!(f, "{}", parts.join("*"))
    }
}

fn mod_pow(base: &BigInt, exp: &BigInt, modulus: &BigInt) -> BigInt {
    base.mod_floor(modulus).modpow(exp, modulus)
}

/// Deterministic Miller–Rabin with the first thirteen prime bases; exact for
/// every input below 3.3·10^24.
pub fn is_prime(x: &BigInt) -> bool {
    if x < &BigInt::from(2) {
        return false;
    }
    for &p in &SMALL_PRIMES {
        let p = BigInt::from(p);
        if x == &p {
            return true;
        }
        if (x % &p).is_zero() {
            return false;
        }
    }
    let one = BigInt::one();
    let x_minus_1 = x - &one;
    let mut d = x_minus_1.clone();
    let mut s = 0u32;
    while d.is_even() {
        d >>= 1;
        s += 1;
    }
    'bases: for &a in &SMALL_PRIMES[..13] {
        let mut y = mod_pow(&BigInt::from(a), &d, x);
        if y == one || y == x_minus_1 {
            continue;
        }
        for _ in 1..s {
            y = (&y * &y) % x;
            if y == x_minus_1 {
                continue 'bases;
            }
        }
        return false;
    }
    true
}

// Brent's variant with fixed starting points so results are reproducible.
fn pollard_rho(x: &BigInt) -> BigInt {
    if x.is_even() {
        return BigInt::from(2);
    }
    let one = BigInt::one();
    let mut c = BigInt::one();
    loop {
        let f = |v: &BigInt| (v * v + &c) % x;
        let mut y = BigInt::from(2);
        let mut r: u64 = 1;
        let mut q = BigInt::one();
        let mut g = BigInt::one();
        let mut ys = y.clone();
        let mut xx = y.clone();
        const BATCH: u64 = 64;
        while g == one {
            xx = y.clone();
            for _ in 0..r {
                y = f(&y);
            }
            let mut k = 0;
            while k < r && g == one {
                ys = y.clone();
                for _ in 0..BATCH.min(r - k) {
                    y = f(&y);
                    q = (q * (&xx - &y).abs()) % x;
                }
                g = q.gcd(x);
                k += BATCH;
            }
            r *= 2;
        }
        if &g == x {
            loop {
                ys = f(&ys);
                g = (&xx - &ys).abs().gcd(x);
                if g > one {
                    break;
                }
            }
        }
        if &g != x {
            return g;
        }
        c += 1;
    }
}

fn factor_into(x: BigInt, out: &mut Vec<BigInt>) {
    if x.is_one() {
        return;
    }
    if is_prime(&x) {
        out.push(x);
        return;
    }
    let d = pollard_rho(&x);
    let rest = &x / &d;
    factor_into(d, out);
    factor_into(rest, out);
}

/// Exact factorization of a nonzero integer: trial division up to 10^4,
/// then Pollard's rho on whatever cofactor remains.
pub fn factorize(x: impl Into<BigInt>) -> Result<Factorization> {
    let x: BigInt = x.into();
    if x.is_zero() {
        return Err(Error::FactorizeZero);
    }
    let unit = if x.is_negative() { -1 } else { 1 };
    let mut rest = x.abs();
    let mut primes: Vec<BigInt> = Vec::new();
    let mut d = 2u64;
    while d <= TRIAL_DIVISION_LIMIT {
        let bd = BigInt::from(d);
        if &bd * &bd > rest {
            break;
        }
        while (&rest % &bd).is_zero() {
            rest /= &bd;
            primes.push(bd.clone());
        }
        d += if d == 2 { 1 } else { 2 };
    }
    if !rest.is_one() {
        factor_into(rest, &mut primes);
    }
    primes.sort();
    let mut factors: Vec<(BigInt, u32)> = Vec::new();
    for p in primes {
        match factors.last_mut() {
            Some((q, e)) if *q == p => *e += 1,
            _ => factors.push((p, 1)),
        }
    }
    Ok(Factorization { unit, factors })
}

/// Euler's totient. `euler_phi(1) == 1`.
pub fn euler_phi(l: impl Into<BigInt>) -> Result<BigInt> {
    let l: BigInt = l.into();
    if !l.is_positive() {
        return Err(Error::Precondition(format!("totient needs a positive argument, got {l}")));
    }
    let f = factorize(l.clone())?;
    let mut phi = l;
    for p in f.primes() {
        phi = phi / p * (p - 1);
    }
    Ok(phi)
}

/// Smallest `x ≥ 1` with `n^x ≡ 1 (mod modulus)`.
pub fn multiplicative_order(n: impl Into<BigInt>, modulus: impl Into<BigInt>) -> Result<BigInt> {
    let n: BigInt = n.into();
    let modulus: BigInt = modulus.into();
    if modulus < BigInt::from(2) {
        return Err(Error::Precondition(format!("modulus must be at least 2, got {modulus}")));
    }
    let n = n.mod_floor(&modulus);
    if !n.gcd(&modulus).is_one() {
        return Err(Error::NotAUnit { value: n.to_string(), modulus: modulus.to_string() });
    }
    let mut order = euler_phi(modulus.clone())?;
    for (q, _) in factorize(order.clone())?.factors {
        while (&order % &q).is_zero() {
            let candidate = &order / &q;
            if mod_pow(&n, &candidate, &modulus).is_one() {
                order = candidate;
            } else {
                break;
            }
        }
    }
    Ok(order)
}

/// True iff every prime factor of `x` lies in `pi`.
pub fn is_pi_number(x: impl Into<BigInt>, pi: &PrimeSet) -> bool {
    let mut x: BigInt = x.into();
    if !x.is_positive() {
        return false;
    }
    for p in pi.iter() {
        let p = BigInt::from(p);
        while (&x % &p).is_zero() {
            x /= &p;
        }
    }
    x.is_one()
}

/// Smallest `x ≥ 0` with `n^x · r ≡ s (mod modulus)`, or `None`.
///
/// The scan runs over one period of `n` modulo `modulus`, so a `None` is a
/// proof of unsolvability. A modulus of 1 makes every congruence hold.
pub fn solve_exp_congruence(
    n: impl Into<BigInt>,
    r: impl Into<BigInt>,
    s: impl Into<BigInt>,
    modulus: impl Into<BigInt>,
) -> Result<Option<u64>> {
    let (n, r, s, modulus): (BigInt, BigInt, BigInt, BigInt) = (n.into(), r.into(), s.into(), modulus.into());
    if modulus.is_one() {
        return Ok(Some(0));
    }
    if modulus < BigInt::one() {
        return Err(Error::Precondition(format!("modulus must be positive, got {modulus}")));
    }
    let n = n.mod_floor(&modulus);
    if !n.gcd(&modulus).is_one() {
        return Err(Error::NotAUnit { value: n.to_string(), modulus: modulus.to_string() });
    }
    let period = multiplicative_order(n.clone(), modulus.clone())?;
    let period = period
        .to_u64()
        .ok_or_else(|| Error::ResourceLimit(format!("order {period} too large for an exhaustive scan")))?;
    let target = s.mod_floor(&modulus);
    let mut cur = r.mod_floor(&modulus);
    for x in 0..period {
        if cur == target {
            return Ok(Some(x));
        }
        cur = (cur * &n) % &modulus;
    }
    Ok(None)
}

/// `|n^t − 1|`.
pub fn u_t(n: impl Into<BigInt>, t: u32) -> Result<BigInt> {
    let n: BigInt = n.into();
    if n.abs() < BigInt::from(2) {
        return Err(Error::Precondition(format!("u_t needs |n| >= 2, got n={n}")));
    }
    if t == 0 {
        return Err(Error::Precondition("u_t needs t >= 1".into()));
    }
    Ok((num_traits::pow(n, t as usize) - BigInt::one()).abs())
}

fn check_modulus_inputs(n: &BigInt, r: &BigInt, s: &BigInt) -> Result<()> {
    if n.abs() < BigInt::from(2) {
        return Err(Error::Divisibility(format!("need |n| >= 2, got n={n}")));
    }
    if r.is_zero() || s.is_zero() {
        return Err(Error::Divisibility("r and s must be nonzero".into()));
    }
    if r == s {
        return Err(Error::Divisibility(format!("r and s must differ (both {r})")));
    }
    if (r % n).is_zero() || (s % n).is_zero() {
        return Err(Error::Divisibility(format!("n={n} must divide neither r={r} nor s={s}")));
    }
    Ok(())
}

/// Smallest `t ≥ 1` for which `n^x · r ≡ s (mod u_t)` has no solution.
/// Moduli `u_t = 1` are skipped since every congruence holds there.
pub fn find_unsolvable_modulus(n: impl Into<BigInt>, r: impl Into<BigInt>, s: impl Into<BigInt>) -> Result<u32> {
    let (n, r, s): (BigInt, BigInt, BigInt) = (n.into(), r.into(), s.into());
    check_modulus_inputs(&n, &r, &s)?;
    for t in 1..=MAX_MODULUS_SEARCH {
        let modulus = u_t(n.clone(), t)?;
        if modulus.is_one() {
            continue;
        }
        if solve_exp_congruence(n.clone(), r.clone(), s.clone(), modulus)?.is_none() {
            return Ok(t);
        }
    }
    Err(Error::ResourceLimit(format!(
        "no unsolvable modulus found for n={n}, r={r}, s={s} with t <= {MAX_MODULUS_SEARCH}"
    )))
}

/// Constructive threshold past which `n^x · r ≡ s (mod u_t)` is unsolvable.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct UnsolvableModulusBound {
    /// Number of base-|n| digits of |r|, minus one.
    pub k: u32,
    /// Digit padding `l` at which the residues separate.
    pub l0: u32,
    /// `k + l0 + 1` (doubled when `n < 0`).
    pub t0: u32,
}

fn digits_msb_first(r: &BigInt, base: &BigInt) -> Vec<BigInt> {
    let mut digits = Vec::new();
    let mut v = r.clone();
    while v.is_positive() {
        let (q, d) = v.div_rem(base);
        digits.push(d);
        v = q;
    }
    digits.reverse();
    digits
}

fn from_digits(digits: &[BigInt], base: &BigInt) -> BigInt {
    digits.iter().fold(BigInt::zero(), |acc, d| acc * base + d)
}

fn positive_bound(n: &BigInt, r: &BigInt, s: &BigInt) -> Result<UnsolvableModulusBound> {
    let digits = digits_msb_first(r, n);
    let k = (digits.len() - 1) as u32;
    let l0 = if s.is_positive() {
        let mut l = 1u32;
        let mut pow = n.clone();
        while &pow <= s {
            pow *= n;
            l += 1;
        }
        l
    } else {
        // Every R_i must sit strictly below n^(k+l+1) − 1 + s. The gaps
        // n^(k+l+1) − R_i are bounded below by expressions increasing in l.
        let slack = BigInt::one() - s;
        let nk1 = num_traits::pow(n.clone(), (k + 1) as usize);
        let nk2 = &nk1 * n;
        let mut rotations = Vec::new();
        for i in 1..=k as usize {
            let mut rotated = digits[i..].to_vec();
            rotated.extend_from_slice(&digits[..i]);
            let r_i = from_digits(&rotated, n);
            let p_i = from_digits(&digits[..i], n);
            rotations.push((r_i, p_i));
        }
        let mut l = 1u32;
        loop {
            let nl = num_traits::pow(n.clone(), l as usize);
            let nl1 = &nl / n;
            let ok_first = &nl * (&nk1 - r) > slack;
            let ok_rot = rotations.iter().all(|(r_i, p_i)| &nl * (&nk1 - r_i + p_i) - p_i > slack);
            let ok_tail = &nl1 * (&nk2 - r) > slack;
            if ok_first && ok_rot && ok_tail {
                break l;
            }
            l += 1;
        }
    };
    Ok(UnsolvableModulusBound { k, l0, t0: k + l0 + 1 })
}

/// Constructive bound for the exponential congruence: every `t ≥ t0` makes
/// `n^x · r ≡ s (mod u_t)` unsolvable.
///
/// Negative `r` is handled by negating both residues. Negative `n` goes
/// through `n²`, `r²`, `s²`; the certificate then covers even `t ≥ t0` only,
/// and `s = −r` has no constructive bound at all.
pub fn unsolvable_modulus_bound(
    n: impl Into<BigInt>,
    r: impl Into<BigInt>,
    s: impl Into<BigInt>,
) -> Result<UnsolvableModulusBound> {
    let (n, mut r, mut s): (BigInt, BigInt, BigInt) = (n.into(), r.into(), s.into());
    check_modulus_inputs(&n, &r, &s)?;
    if n.is_negative() {
        let (r2, s2) = (&r * &r, &s * &s);
        if r2 == s2 {
            return Err(Error::Precondition(format!("no constructive bound for negative n={n} with s = -r")));
        }
        let inner = positive_bound(&(&n * &n), &r2, &s2)?;
        return Ok(UnsolvableModulusBound { t0: 2 * inner.t0, ..inner });
    }
    if r.sign() == Sign::Minus {
        r = -r;
        s = -s;
    }
    positive_bound(&n, &r, &s)
}

/// π-numbers in increasing order, starting at 1, up to `bound` inclusive.
pub fn pi_numbers(pi: &PrimeSet, bound: u64) -> impl Iterator<Item = u64> {
    let primes: Vec<u64> = pi.iter().collect();
    let mut heap = BinaryHeap::new();
    heap.push(Reverse(1u64));
    let mut last = 0u64;
    std::iter::from_fn(move || loop {
        let Reverse(x) = heap.pop()?;
        if x == last {
            continue;
        }
        last = x;
        for &p in &primes {
            if let Some(y) = x.checked_mul(p) {
                if y <= bound {
                    heap.push(Reverse(y));
                }
            }
        }
        return Some(x);
    })
}

/// Smallest prime dividing none of `values` (zeros are ignored).
pub fn smallest_prime_avoiding(values: &[&BigInt]) -> u64 {
    let mut p = 2u64;
    loop {
        let bp = BigInt::from(p);
        if is_prime(&bp) && values.iter().all(|v| v.is_zero() || !(*v % &bp).is_zero()) {
            return p;
        }
        p += 1;
    }
}
