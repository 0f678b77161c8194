// SPDX-License-Identifier: Apache-2.0

//! Finite images of `G(m,n)`.
//!
//! [`FiniteQuotient`] is the metacyclic group
//! `H_ν(k,l) = ⟨a, b | a⁻¹ b a = b^ν, a^k = b^l = 1⟩` with elements `a^i b^j`.
//! [`PermQuotient`] is a pair of permutations satisfying the defining relation,
//! found by [`perm_quotient_search`] when no metacyclic image will do.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::ToPrimitive;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numtheory;
use crate::presentation::GroupParams;
use crate::words::{self, Generator, Word};

/// Minimal interface for brute-force computations in a finite group.
pub trait FiniteGroup {
    type Elem: Clone + PartialEq + fmt::Debug;

    fn identity(&self) -> Self::Elem;
    fn mul(&self, x: &Self::Elem, y: &Self::Elem) -> Self::Elem;
    fn inv(&self, x: &Self::Elem) -> Self::Elem;

    fn pow(&self, x: &Self::Elem, e: i64) -> Self::Elem {
        let mut base = if e < 0 { self.inv(x) } else { x.clone() };
        let mut e = e.unsigned_abs();
        let mut acc = self.identity();
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(&acc, &base);
            }
            base = self.mul(&base, &base);
            e >>= 1;
        }
        acc
    }

    fn order_of(&self, x: &Self::Elem) -> u64 {
        let id = self.identity();
        let mut cur = x.clone();
        let mut k = 1;
        while cur != id {
            cur = self.mul(&cur, x);
            k += 1;
        }
        k
    }
}

fn mod_pow(base: u64, mut e: u64, modulus: u64) -> u64 {
    if modulus == 1 {
        return 0;
    }
    let m = modulus as u128;
    let mut b = base as u128 % m;
    let mut acc = 1u128;
    while e > 0 {
        if e & 1 == 1 {
            acc = acc * b % m;
        }
        b = b * b % m;
        e >>= 1;
    }
    acc as u64
}

fn reduce_mod(x: &BigInt, modulus: u64) -> u64 {
    x.mod_floor(&BigInt::from(modulus)).to_u64().expect("residue fits in u64")
}

/// `H_ν(k,l)`: `ℤ_l ⋊ ℤ_k`, `a` acting on `b` by `b ↦ b^ν`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "RawQuotient")]
pub struct FiniteQuotient {
    /// The twist ν as given (its residue mod `l` is what matters).
    pub n: i64,
    pub k: u64,
    pub l: u64,
    #[serde(skip)]
    n_mod_l: u64,
}

#[derive(Deserialize)]
struct RawQuotient {
    n: i64,
    k: u64,
    l: u64,
}

impl TryFrom<RawQuotient> for FiniteQuotient {
    type Error = Error;

    fn try_from(raw: RawQuotient) -> Result<Self> {
        FiniteQuotient::new(raw.n, raw.k, raw.l)
    }
}

/// The element `a^i b^j` of a [`FiniteQuotient`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct QuotientElement {
    pub i: u64,
    pub j: u64,
}

impl fmt::Display for QuotientElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{})", self.i, self.j)
    }
}

impl FiniteQuotient {
    pub fn new(n: i64, k: u64, l: u64) -> Result<Self> {
        if k == 0 || l == 0 {
            return Err(Error::InvalidQuotient(format!("k and l must be positive (k={k}, l={l})")));
        }
        let n_mod_l = n.rem_euclid(l as i64) as u64;
        if mod_pow(n_mod_l, k, l) != 1 % l {
            return Err(Error::InvalidQuotient(format!("{n}^{k} is not 1 modulo {l}")));
        }
        Ok(FiniteQuotient { n, k, l, n_mod_l })
    }

    /// Like [`FiniteQuotient::new`] for moduli given as big integers.
    pub fn from_big(n: i64, k: &BigInt, l: &BigInt) -> Result<Self> {
        let too_big =
            |what: &str, v: &BigInt| Error::ResourceLimit(format!("{what}={v} does not fit a machine-word quotient"));
        let k = k.to_u64().ok_or_else(|| too_big("k", k))?;
        let l = l.to_u64().ok_or_else(|| too_big("l", l))?;
        FiniteQuotient::new(n, k, l)
    }

    pub fn n_mod_l(&self) -> u64 {
        self.n_mod_l
    }

    pub fn order(&self) -> u128 {
        self.k as u128 * self.l as u128
    }

    pub fn element(&self, i: i64, j: i64) -> QuotientElement {
        QuotientElement { i: i.rem_euclid(self.k as i64) as u64, j: j.rem_euclid(self.l as i64) as u64 }
    }

    pub fn gen_a(&self) -> QuotientElement {
        QuotientElement { i: 1 % self.k, j: 0 }
    }

    pub fn gen_b(&self) -> QuotientElement {
        QuotientElement { i: 0, j: 1 % self.l }
    }

    pub fn multiply(&self, x: QuotientElement, y: QuotientElement) -> QuotientElement {
        let twist = mod_pow(self.n_mod_l, y.i, self.l) as u128;
        let l = self.l as u128;
        QuotientElement {
            i: ((x.i as u128 + y.i as u128) % self.k as u128) as u64,
            j: ((x.j as u128 * twist + y.j as u128) % l) as u64,
        }
    }

    pub fn invert(&self, x: QuotientElement) -> QuotientElement {
        let i = (self.k - x.i) % self.k;
        let twist = mod_pow(self.n_mod_l, i, self.l) as u128;
        let l = self.l as u128;
        let j = (x.j as u128 * twist) % l;
        QuotientElement { i, j: ((l - j) % l) as u64 }
    }

    /// Image of `w` under `a ↦ (1,0)`, `b ↦ (0,1)`, as a map of free groups.
    pub fn evaluate(&self, w: &Word) -> QuotientElement {
        w.syllables().iter().fold(self.identity(), |acc, syl| {
            let g = match syl.generator {
                Generator::A => QuotientElement { i: reduce_mod(&syl.exponent, self.k), j: 0 },
                Generator::B => QuotientElement { i: 0, j: reduce_mod(&syl.exponent, self.l) },
            };
            self.multiply(acc, g)
        })
    }

    /// Whether `a⁻¹ b^m a = b^n` holds for the images, i.e. `m·ν ≡ n (mod l)`.
    pub fn admits(&self, g: GroupParams) -> bool {
        let l = self.l as i128;
        ((g.m as i128 * self.n_mod_l as i128 - g.n as i128).rem_euclid(l)) == 0
    }

    /// [`FiniteQuotient::evaluate`] as a homomorphism from `G(m,n)`.
    pub fn evaluate_from(&self, g: GroupParams, w: &Word) -> Result<QuotientElement> {
        if !self.admits(g) {
            return Err(Error::RelationViolated(format!("{self} does not receive {g}")));
        }
        Ok(self.evaluate(w))
    }

    pub fn elements(&self) -> impl Iterator<Item = QuotientElement> + '_ {
        (0..self.k).flat_map(move |i| (0..self.l).map(move |j| QuotientElement { i, j }))
    }

    /// Exhaustive search over all `k·l` conjugators.
    pub fn is_conjugate(&self, x: QuotientElement, y: QuotientElement) -> bool {
        self.elements().any(|g| self.multiply(self.multiply(self.invert(g), x), g) == y)
    }

    /// Whether `b^r` and `b^s` are conjugate, via `ν^x·r ≡ s (mod l)`.
    pub fn conjugate_b_powers(&self, r: i64, s: i64) -> bool {
        numtheory::solve_exp_congruence(self.n_mod_l, r, s, self.l).expect("ν is a unit modulo l").is_some()
    }
}

impl FiniteGroup for FiniteQuotient {
    type Elem = QuotientElement;

    fn identity(&self) -> QuotientElement {
        QuotientElement { i: 0, j: 0 }
    }

    fn mul(&self, x: &QuotientElement, y: &QuotientElement) -> QuotientElement {
        self.multiply(*x, *y)
    }

    fn inv(&self, x: &QuotientElement) -> QuotientElement {
        self.invert(*x)
    }
}

impl fmt::Display for FiniteQuotient {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "H_{}({},{})", self.n, self.k, self.l)
    }
}

pub fn make_quotient(n: i64, k: u64, l: u64) -> Result<FiniteQuotient> {
    FiniteQuotient::new(n, k, l)
}

pub fn q_multiply(h: &FiniteQuotient, x: QuotientElement, y: QuotientElement) -> QuotientElement {
    h.multiply(x, y)
}

pub fn q_invert(h: &FiniteQuotient, x: QuotientElement) -> QuotientElement {
    h.invert(x)
}

pub fn q_is_conjugate(h: &FiniteQuotient, x: QuotientElement, y: QuotientElement) -> bool {
    h.is_conjugate(x, y)
}

pub fn q_conjugate_b_powers(h: &FiniteQuotient, r: i64, s: i64) -> bool {
    h.conjugate_b_powers(r, s)
}

/// `ℤ_c` as `H_1(c,1)`: `a ↦ 1`, `b ↦ 0`, so it reads off the `a`-exponent sum.
pub fn cyclic_witness(c: u64) -> Result<FiniteQuotient> {
    if c < 2 {
        return Err(Error::Precondition(format!("cyclic quotient needs order >= 2, got {c}")));
    }
    FiniteQuotient::new(1, c, 1)
}

/// A permutation of `{0, …, d−1}`, acting on the right: `x^(pq) = (x^p)^q`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Perm(Vec<u32>);

impl Perm {
    pub fn identity(degree: usize) -> Self {
        Perm((0..degree as u32).collect())
    }

    /// From an image list; `images[x]` is where `x` goes.
    pub fn from_images(images: Vec<u32>) -> Result<Self> {
        let mut seen = vec![false; images.len()];
        for &y in &images {
            let slot = seen
                .get_mut(y as usize)
                .ok_or_else(|| Error::Precondition(format!("image {y} out of range for degree {}", images.len())))?;
            if std::mem::replace(slot, true) {
                return Err(Error::Precondition(format!("{y} appears twice in a permutation")));
            }
        }
        Ok(Perm(images))
    }

    pub fn degree(&self) -> usize {
        self.0.len()
    }

    pub fn images(&self) -> &[u32] {
        &self.0
    }

    pub fn apply(&self, x: u32) -> u32 {
        self.0[x as usize]
    }

    /// `self` followed by `other`.
    pub fn then(&self, other: &Perm) -> Perm {
        Perm(self.0.iter().map(|&x| other.0[x as usize]).collect())
    }

    pub fn inverse(&self) -> Perm {
        let mut out = vec![0; self.0.len()];
        for (x, &y) in self.0.iter().enumerate() {
            out[y as usize] = x as u32;
        }
        Perm(out)
    }

    pub fn is_identity(&self) -> bool {
        self.0.iter().enumerate().all(|(x, &y)| x as u32 == y)
    }

    /// All cycles, fixed points included, each starting at its least point,
    /// ordered by that point.
    pub fn cycles(&self) -> Vec<Vec<u32>> {
        let mut seen = vec![false; self.0.len()];
        let mut out = Vec::new();
        for start in 0..self.0.len() {
            if seen[start] {
                continue;
            }
            let mut cycle = Vec::new();
            let mut x = start as u32;
            while !seen[x as usize] {
                seen[x as usize] = true;
                cycle.push(x);
                x = self.0[x as usize];
            }
            out.push(cycle);
        }
        out
    }

    pub fn cycle_type(&self) -> Vec<usize> {
        let mut t: Vec<usize> = self.cycles().iter().map(Vec::len).collect();
        t.sort_unstable_by(|a, b| b.cmp(a));
        t
    }

    pub fn order(&self) -> u64 {
        self.cycles().iter().fold(1u64, |acc, c| acc.lcm(&(c.len() as u64)))
    }

    pub fn pow_big(&self, e: &BigInt) -> Perm {
        let e = e.mod_floor(&BigInt::from(self.order())).to_i64().expect("below order");
        PermGroup { degree: self.degree() }.pow(self, e)
    }

    /// Cycle notation on `{1, …, d}`, e.g. `(1 2 3)(4 5)`; identity is `()`.
    pub fn to_cycle_notation(&self) -> String {
        let mut out = String::new();
        for cycle in self.cycles().into_iter().filter(|c| c.len() > 1) {
            let pts: Vec<String> = cycle.iter().map(|x| (x + 1).to_string()).collect();
            out.push('(');
            out.push_str(&pts.join(" "));
            out.push(')');
        }
        if out.is_empty() {
            out.push_str("()");
        }
        out
    }

    pub fn from_cycle_notation(text: &str, degree: usize) -> Result<Perm> {
        let bad = |msg: String| Error::Parse { pos: 0, msg };
        let mut images: Vec<u32> = (0..degree as u32).collect();
        let mut seen = vec![false; degree];
        let mut rest = text.trim();
        while !rest.is_empty() {
            let body = rest
                .strip_prefix('(')
                .and_then(|r| r.split_once(')'))
                .ok_or_else(|| bad(format!("malformed cycle notation '{text}'")))?;
            let pts = body
                .0
                .split([' ', ','])
                .filter(|s| !s.is_empty())
                .map(|s| {
                    let x: usize = s.parse().map_err(|_| bad(format!("bad point '{s}'")))?;
                    if x == 0 || x > degree {
                        return Err(bad(format!("point {x} outside 1..={degree}")));
                    }
                    if std::mem::replace(&mut seen[x - 1], true) {
                        return Err(bad(format!("point {x} repeated")));
                    }
                    Ok(x as u32 - 1)
                })
                .collect::<Result<Vec<u32>>>()?;
            for (idx, &x) in pts.iter().enumerate() {
                images[x as usize] = pts[(idx + 1) % pts.len()];
            }
            rest = body.1.trim_start();
        }
        Ok(Perm(images))
    }
}

impl fmt::Display for Perm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_cycle_notation())
    }
}

/// The symmetric group of a given degree, for [`FiniteGroup`] computations.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PermGroup {
    pub degree: usize,
}

impl FiniteGroup for PermGroup {
    type Elem = Perm;

    fn identity(&self) -> Perm {
        Perm::identity(self.degree)
    }

    fn mul(&self, x: &Perm, y: &Perm) -> Perm {
        x.then(y)
    }

    fn inv(&self, x: &Perm) -> Perm {
        x.inverse()
    }

    fn order_of(&self, x: &Perm) -> u64 {
        x.order()
    }
}

/// Images of `a` and `b` in `S_degree`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "RawPermQuotient", into = "RawPermQuotient")]
pub struct PermQuotient {
    pub degree: usize,
    pub image_a: Perm,
    pub image_b: Perm,
}

#[derive(Serialize, Deserialize)]
struct RawPermQuotient {
    degree: usize,
    a: String,
    b: String,
}

impl TryFrom<RawPermQuotient> for PermQuotient {
    type Error = Error;

    fn try_from(raw: RawPermQuotient) -> Result<Self> {
        Ok(PermQuotient {
            degree: raw.degree,
            image_a: Perm::from_cycle_notation(&raw.a, raw.degree)?,
            image_b: Perm::from_cycle_notation(&raw.b, raw.degree)?,
        })
    }
}

impl From<PermQuotient> for RawPermQuotient {
    fn from(q: PermQuotient) -> Self {
        RawPermQuotient { degree: q.degree, a: q.image_a.to_cycle_notation(), b: q.image_b.to_cycle_notation() }
    }
}

impl PermQuotient {
    pub fn group(&self) -> PermGroup {
        PermGroup { degree: self.degree }
    }

    pub fn satisfies(&self, g: GroupParams) -> bool {
        let x = self.image_b.pow_big(&BigInt::from(g.m));
        let y = self.image_b.pow_big(&BigInt::from(g.n));
        self.image_a.inverse().then(&x).then(&self.image_a) == y
    }

    pub fn evaluate(&self, w: &Word) -> Perm {
        w.syllables().iter().fold(Perm::identity(self.degree), |acc, syl| {
            let g = match syl.generator {
                Generator::A => &self.image_a,
                Generator::B => &self.image_b,
            };
            acc.then(&g.pow_big(&syl.exponent))
        })
    }
}

impl fmt::Display for PermQuotient {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "S_{}: a -> {}, b -> {}", self.degree, self.image_a, self.image_b)
    }
}

fn partitions(d: usize) -> Vec<Vec<usize>> {
    fn go(rest: usize, max: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if rest == 0 {
            out.push(cur.clone());
            return;
        }
        for part in (1..=rest.min(max)).rev() {
            cur.push(part);
            go(rest - part, part, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    go(d, d, &mut Vec::new(), &mut out);
    out
}

/// The permutation with consecutive cycles of the given lengths.
fn perm_of_cycle_type(parts: &[usize]) -> Perm {
    let mut images = Vec::new();
    let mut start = 0u32;
    for &len in parts {
        let len = len as u32;
        images.extend((0..len).map(|i| start + (i + 1) % len));
        start += len;
    }
    Perm(images)
}

/// Every `a` with `a⁻¹ x a = y`, ascending by image list.
fn conjugators(x: &Perm, y: &Perm) -> Vec<Perm> {
    fn go(idx: usize, xc: &[Vec<u32>], yc: &[Vec<u32>], used: &mut [bool], images: &mut [u32], out: &mut Vec<Perm>) {
        if idx == xc.len() {
            out.push(Perm(images.to_vec()));
            return;
        }
        let cx = &xc[idx];
        for (j, cy) in yc.iter().enumerate() {
            if used[j] || cy.len() != cx.len() {
                continue;
            }
            used[j] = true;
            for rot in 0..cy.len() {
                for (pos, &pt) in cx.iter().enumerate() {
                    images[pt as usize] = cy[(pos + rot) % cy.len()];
                }
                go(idx + 1, xc, yc, used, images, out);
            }
            used[j] = false;
        }
    }
    if x.cycle_type() != y.cycle_type() {
        return Vec::new();
    }
    let (xc, yc) = (x.cycles(), y.cycles());
    let mut out = Vec::new();
    let mut images = vec![0; x.degree()];
    go(0, &xc, &yc, &mut vec![false; yc.len()], &mut images, &mut out);
    out.sort();
    out
}

/// All permutation images of `G(m,n)` of degree `d`, with `b` ranging over
/// one representative per cycle type, in the search order: increasing order
/// of `b`, then lexicographic in `(b, a)`.
pub fn perm_quotients_of_degree(g: GroupParams, d: usize) -> Vec<PermQuotient> {
    let mut bs: Vec<Perm> = partitions(d).iter().map(|p| perm_of_cycle_type(p)).collect();
    bs.sort_by_key(|b| (b.order(), b.clone()));
    let mut out = Vec::new();
    for b in bs {
        let x = b.pow_big(&BigInt::from(g.m));
        let y = b.pow_big(&BigInt::from(g.n));
        for a in conjugators(&x, &y) {
            out.push(PermQuotient { degree: d, image_a: a, image_b: b.clone() });
        }
    }
    out
}

/// Lazily walks [`perm_quotients_of_degree`] for `d = 1, …, max_degree`.
pub fn perm_quotients(g: GroupParams, max_degree: usize) -> impl Iterator<Item = PermQuotient> {
    (1..=max_degree).flat_map(move |d| perm_quotients_of_degree(g, d))
}

/// First permutation image (in the deterministic search order) where
/// `target` is not the identity.
pub fn perm_quotient_search(g: GroupParams, target: &Word, max_degree: usize) -> Result<PermQuotient> {
    perm_quotient_search_traced(g, target, max_degree, &mut Vec::new())
}

pub fn perm_quotient_search_traced(
    g: GroupParams,
    target: &Word,
    max_degree: usize,
    trace: &mut Vec<String>,
) -> Result<PermQuotient> {
    if words::is_trivial(g, target)? {
        return Err(Error::Precondition(format!("{target} is trivial in {g}")));
    }
    for d in 1..=max_degree {
        let candidates = perm_quotients_of_degree(g, d);
        let found = candidates.iter().position(|q| !q.evaluate(target).is_identity());
        match found {
            Some(idx) => {
                trace.push(format!("degree {d}: hit at candidate {} of {}", idx + 1, candidates.len()));
                return Ok(candidates[idx].clone());
            }
            None => trace.push(format!("degree {d}: {} candidates, none separates", candidates.len())),
        }
    }
    Err(Error::BoundsExhausted(format!("no permutation image of degree <= {max_degree} separates {target} in {g}")))
}

impl FromStr for Perm {
    type Err = Error;

    /// Cycle notation; the degree is the largest point mentioned.
    fn from_str(s: &str) -> Result<Perm> {
        let degree = s.split(|c: char| !c.is_ascii_digit()).filter_map(|t| t.parse::<usize>().ok()).max().unwrap_or(0);
        Perm::from_cycle_notation(s, degree)
    }
}
