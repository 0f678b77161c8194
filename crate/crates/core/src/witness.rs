// SPDX-License-Identifier: Apache-2.0

//! Separation certificates: a finite target group, images of `a` and `b`, and
//! a claim about some words. [`verify`] rechecks a certificate from its data
//! alone, with its own arithmetic, so it does not share code paths with the
//! searches that produce certificates.

use std::collections::{HashSet, VecDeque};
use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::ToPrimitive;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::presentation::GroupParams;
use crate::quotients::{FiniteQuotient, PermQuotient};
use crate::words::{Generator, Word};

/// Targets larger than this are refused rather than checked for hours.
pub const MAX_VERIFY_ORDER: u128 = 50_000_000;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "type", content = "params", rename_all = "snake_case")]
pub enum Target {
    /// `H_ν(k,l)` with `a ↦ (1,0)`, `b ↦ (0,1)`.
    Metacyclic(FiniteQuotient),
    /// `ℤ_order` with `a ↦ 1`, `b ↦ 0`.
    Cyclic { order: u64 },
    /// Explicit permutation images.
    Permutation(PermQuotient),
}

impl fmt::Display for Target {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Target::Metacyclic(h) => write!(f, "{h}"),
            Target::Cyclic { order } => write!(f, "Z_{order}"),
            Target::Permutation(q) => write!(f, "{q}"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ClaimKind {
    /// `words = [w]`: the image of `w` is not the identity.
    ElementNontrivial,
    /// `words = [w1, w2]`: the images are not conjugate in the target.
    NonConjugate,
    /// `words = [w, h]`: the image of `w` lies outside `⟨image of h⟩`.
    OutsideSubgroup,
}

impl ClaimKind {
    fn arity(self) -> usize {
        match self {
            ClaimKind::ElementNontrivial => 1,
            ClaimKind::NonConjugate | ClaimKind::OutsideSubgroup => 2,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Claim {
    pub kind: ClaimKind,
    pub words: Vec<Word>,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Meta {
    /// Which construction produced the target.
    #[serde(rename = "theorem")]
    pub strategy: String,
    #[serde(default)]
    pub search_trace: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Witness {
    pub source: GroupParams,
    pub target: Target,
    pub claim: Claim,
    #[serde(default)]
    pub meta: Meta,
}

impl Witness {
    pub fn new(source: GroupParams, target: Target, kind: ClaimKind, words: Vec<Word>) -> Self {
        Witness { source, target, claim: Claim { kind, words }, meta: Meta::default() }
    }

    pub fn with_strategy(mut self, strategy: &str, trace: Vec<String>) -> Self {
        self.meta = Meta { strategy: strategy.to_string(), search_trace: trace };
        self
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("witness serializes")
    }

    pub fn from_json(text: &str) -> Result<Witness, VerifyError> {
        serde_json::from_str(text).map_err(|e| VerifyError::Malformed(e.to_string()))
    }
}

/// Which part of a certificate failed.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum VerifyError {
    #[error("malformed witness: {0}")]
    Malformed(String),
    #[error("target is not a group: {0}")]
    InvalidTarget(String),
    #[error("defining relation fails in the target: {0}")]
    RelationFails(String),
    #[error("claim fails: {0}")]
    ClaimFails(String),
    #[error("target too large to check exhaustively: {0}")]
    TooLarge(String),
}

/// Arithmetic for the three target kinds, kept separate from `quotients`.
trait Checker {
    type E: Clone + Eq + std::hash::Hash + fmt::Debug;
    fn one(&self) -> Self::E;
    fn gens(&self) -> [Self::E; 2];
    fn mul(&self, x: &Self::E, y: &Self::E) -> Self::E;
    fn inverse(&self, x: &Self::E) -> Self::E;
    /// Every element of the image of `G`, i.e. of `⟨a, b⟩`.
    fn all(&self) -> Vec<Self::E>;
    fn size_hint(&self) -> u128;

    fn power(&self, x: &Self::E, e: &BigInt) -> Self::E {
        let mut base = if e < &BigInt::from(0) { self.inverse(x) } else { x.clone() };
        let mut e = e.magnitude().clone();
        let mut acc = self.one();
        let two = num_bigint::BigUint::from(2u32);
        while e > num_bigint::BigUint::from(0u32) {
            if e.is_odd() {
                acc = self.mul(&acc, &base);
            }
            base = self.mul(&base, &base);
            e /= &two;
        }
        acc
    }

    fn eval(&self, w: &Word) -> Self::E {
        let [a, b] = self.gens();
        w.syllables().iter().fold(self.one(), |acc, s| {
            let g = if s.generator == Generator::A { &a } else { &b };
            self.mul(&acc, &self.power(g, &s.exponent))
        })
    }

    fn conjugate(&self, x: &Self::E, y: &Self::E) -> bool {
        self.all().iter().any(|g| &self.mul(&self.mul(&self.inverse(g), x), g) == y)
    }
}

/// `(ν mod l, k, l)`.
struct MetaCheck(u64, u64, u64);

impl MetaCheck {
    /// `ν^e mod l`.
    fn twist(&self, mut e: u64) -> u128 {
        let l = self.2 as u128;
        let (mut base, mut acc) = (self.0 as u128 % l, 1 % l);
        while e > 0 {
            if e & 1 == 1 {
                acc = acc * base % l;
            }
            base = base * base % l;
            e >>= 1;
        }
        acc
    }
}

impl Checker for MetaCheck {
    type E = (u64, u64);

    fn one(&self) -> (u64, u64) {
        (0, 0)
    }

    fn gens(&self) -> [(u64, u64); 2] {
        [(1 % self.1, 0), (0, 1 % self.2)]
    }

    fn mul(&self, x: &(u64, u64), y: &(u64, u64)) -> (u64, u64) {
        let l = self.2 as u128;
        let j = (x.1 as u128 * self.twist(y.0) + y.1 as u128) % l;
        ((x.0 + y.0) % self.1, j as u64)
    }

    fn inverse(&self, x: &(u64, u64)) -> (u64, u64) {
        // (a^i b^j)^-1 = b^-j a^-i = a^-i b^(-j ν^-i), and ν^-i = ν^(k-i).
        let i = (self.1 - x.0) % self.1;
        let l = self.2 as u128;
        let j = (l - x.1 as u128 * self.twist(i) % l) % l;
        (i, j as u64)
    }

    fn all(&self) -> Vec<(u64, u64)> {
        (0..self.1).flat_map(|i| (0..self.2).map(move |j| (i, j))).collect()
    }

    fn size_hint(&self) -> u128 {
        self.1 as u128 * self.2 as u128
    }
}

struct CycCheck(u64);

impl Checker for CycCheck {
    type E = u64;

    fn one(&self) -> u64 {
        0
    }

    fn gens(&self) -> [u64; 2] {
        [1 % self.0, 0]
    }

    fn mul(&self, x: &u64, y: &u64) -> u64 {
        ((*x as u128 + *y as u128) % self.0 as u128) as u64
    }

    fn inverse(&self, x: &u64) -> u64 {
        (self.0 - x) % self.0
    }

    fn all(&self) -> Vec<u64> {
        (0..self.0).collect()
    }

    fn size_hint(&self) -> u128 {
        self.0 as u128
    }
}

struct PermCheck {
    a: Vec<u32>,
    b: Vec<u32>,
}

impl Checker for PermCheck {
    type E = Vec<u32>;

    fn one(&self) -> Vec<u32> {
        (0..self.a.len() as u32).collect()
    }

    fn gens(&self) -> [Vec<u32>; 2] {
        [self.a.clone(), self.b.clone()]
    }

    fn mul(&self, x: &Vec<u32>, y: &Vec<u32>) -> Vec<u32> {
        x.iter().map(|&p| y[p as usize]).collect()
    }

    fn inverse(&self, x: &Vec<u32>) -> Vec<u32> {
        let mut out = vec![0; x.len()];
        for (i, &p) in x.iter().enumerate() {
            out[p as usize] = i as u32;
        }
        out
    }

    fn power(&self, x: &Vec<u32>, e: &BigInt) -> Vec<u32> {
        // Reduce by the order first; permutation orders are tiny.
        let mut order = 1u64;
        let mut cur = x.clone();
        while cur != self.one() {
            cur = self.mul(&cur, x);
            order += 1;
        }
        let e = e.mod_floor(&BigInt::from(order)).to_u64().expect("below order");
        (0..e).fold(self.one(), |acc, _| self.mul(&acc, x))
    }

    fn all(&self) -> Vec<Vec<u32>> {
        let mut seen: HashSet<Vec<u32>> = HashSet::new();
        let mut queue = VecDeque::from([self.one()]);
        seen.insert(self.one());
        while let Some(x) = queue.pop_front() {
            for g in [&self.a, &self.b] {
                let y = self.mul(&x, g);
                if seen.insert(y.clone()) {
                    queue.push_back(y);
                }
            }
        }
        seen.into_iter().collect()
    }

    fn size_hint(&self) -> u128 {
        (1..=self.a.len() as u128).product()
    }
}

fn check_claim<C: Checker>(c: &C, source: GroupParams, claim: &Claim) -> Result<(), VerifyError> {
    if c.size_hint() > MAX_VERIFY_ORDER && claim.kind != ClaimKind::ElementNontrivial {
        return Err(VerifyError::TooLarge(format!("order bound {}", c.size_hint())));
    }
    let [a, b] = c.gens();
    let lhs = c.mul(&c.mul(&c.inverse(&a), &c.power(&b, &BigInt::from(source.m))), &a);
    let rhs = c.power(&b, &BigInt::from(source.n));
    if lhs != rhs {
        return Err(VerifyError::RelationFails(format!(
            "a^-1 b^{} a = {lhs:?} but b^{} = {rhs:?}",
            source.m, source.n
        )));
    }
    if claim.words.len() != claim.kind.arity() {
        return Err(VerifyError::Malformed(format!(
            "claim {:?} takes {} word(s), got {}",
            claim.kind,
            claim.kind.arity(),
            claim.words.len()
        )));
    }
    let images: Vec<C::E> = claim.words.iter().map(|w| c.eval(w)).collect();
    match claim.kind {
        ClaimKind::ElementNontrivial => {
            if images[0] == c.one() {
                return Err(VerifyError::ClaimFails(format!("{} maps to the identity", claim.words[0])));
            }
        }
        ClaimKind::NonConjugate => {
            if c.conjugate(&images[0], &images[1]) {
                return Err(VerifyError::ClaimFails(format!(
                    "images of {} and {} are conjugate",
                    claim.words[0], claim.words[1]
                )));
            }
        }
        ClaimKind::OutsideSubgroup => {
            let (x, h) = (&images[0], &images[1]);
            let mut cur = c.one();
            loop {
                if &cur == x {
                    return Err(VerifyError::ClaimFails(format!(
                        "image of {} lies in the subgroup generated by the image of {}",
                        claim.words[0], claim.words[1]
                    )));
                }
                cur = c.mul(&cur, h);
                if cur == c.one() {
                    break;
                }
            }
        }
    }
    Ok(())
}

/// Rechecks a witness: the target is a group, the relation of `G(m,n)`
/// holds for the images, and the claim holds (by exhaustive search where
/// conjugacy is involved).
pub fn verify(wit: &Witness) -> Result<(), VerifyError> {
    let src = wit.source;
    if src.m == 0 || src.n == 0 {
        return Err(VerifyError::Malformed("zero group parameter".into()));
    }
    match &wit.target {
        Target::Metacyclic(h) => {
            let (k, l) = (h.k, h.l);
            if k == 0 || l == 0 {
                return Err(VerifyError::InvalidTarget("k and l must be positive".into()));
            }
            let nu = h.n.rem_euclid(l as i64) as u64;
            let checker = MetaCheck(nu, k, l);
            // a^k = 1 must act trivially on ⟨b⟩.
            if checker.twist(k) != 1 % l as u128 {
                return Err(VerifyError::InvalidTarget(format!("{}^{k} is not 1 modulo {l}", h.n)));
            }
            check_claim(&checker, src, &wit.claim)
        }
        Target::Cyclic { order } => {
            if *order == 0 {
                return Err(VerifyError::InvalidTarget("cyclic order must be positive".into()));
            }
            check_claim(&CycCheck(*order), src, &wit.claim)
        }
        Target::Permutation(q) => {
            let (a, b) = (q.image_a.images().to_vec(), q.image_b.images().to_vec());
            if a.len() != q.degree || b.len() != q.degree {
                return Err(VerifyError::InvalidTarget("permutation degree mismatch".into()));
            }
            check_claim(&PermCheck { a, b }, src, &wit.claim)
        }
    }
}

/// [`verify`] applied to serialized JSON.
pub fn verify_json(text: &str) -> Result<Witness, VerifyError> {
    let wit = Witness::from_json(text)?;
    verify(&wit)?;
    Ok(wit)
}
