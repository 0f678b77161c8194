// SPDX-License-Identifier: Apache-2.0

//! Words over the generators `a`, `b` and the word problem for `G(m,n)`.
//!
//! `G(m,n)` is an HNN extension of `⟨b⟩` with stable letter `a`, so a word
//! is trivial exactly when repeatedly removing pinches `a⁻¹ b^{mk} a → b^{nk}`
//! and `a b^{nk} a⁻¹ → b^{mk}` leaves nothing.
//!
//! Word syntax: `a`, `b`, `A` (= `a^-1`), `B` (= `b^-1`), each optionally
//! followed by `^k`; whitespace and `*` separate tokens. `1` is the empty
//! word, `( … )^k` groups, and `[u, v]` is the commutator `u⁻¹ v⁻¹ u v`.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::presentation::GroupParams;

/// Default ceiling on the bit length of any exponent produced by a pinch.
pub const DEFAULT_BIT_GUARD: u64 = 1_000_000;

const MAX_PINCHES: u64 = 100_000_000;
const MAX_GROUP_POWER: i64 = 10_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Generator {
    A,
    B,
}

impl Generator {
    fn letter(self) -> char {
        match self {
            Generator::A => 'a',
            Generator::B => 'b',
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Syllable {
    pub generator: Generator,
    pub exponent: BigInt,
}

/// A freely reduced word: adjacent syllables use different generators and
/// no exponent is zero.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct Word {
    syllables: Vec<Syllable>,
}

impl Word {
    pub fn identity() -> Self {
        Word::default()
    }

    pub fn a(exp: impl Into<BigInt>) -> Self {
        Word::from_syllables([(Generator::A, exp.into())])
    }

    pub fn b(exp: impl Into<BigInt>) -> Self {
        Word::from_syllables([(Generator::B, exp.into())])
    }

    /// Builds a word, merging and cancelling as it goes.
    pub fn from_syllables<I>(items: I) -> Self
    where
        I: IntoIterator<Item = (Generator, BigInt)>,
    {
        let mut w = Word::identity();
        for (g, e) in items {
            w.push(g, e);
        }
        w
    }

    pub fn push(&mut self, generator: Generator, exponent: BigInt) {
        if exponent.is_zero() {
            return;
        }
        match self.syllables.last_mut() {
            Some(last) if last.generator == generator => {
                last.exponent += exponent;
                if last.exponent.is_zero() {
                    self.syllables.pop();
                }
            }
            _ => self.syllables.push(Syllable { generator, exponent }),
        }
    }

    pub fn syllables(&self) -> &[Syllable] {
        &self.syllables
    }

    pub fn len(&self) -> usize {
        self.syllables.len()
    }

    pub fn is_empty(&self) -> bool {
        self.syllables.is_empty()
    }

    pub fn multiply(&self, other: &Word) -> Word {
        let mut out = self.clone();
        for s in &other.syllables {
            out.push(s.generator, s.exponent.clone());
        }
        out
    }

    pub fn inverse(&self) -> Word {
        Word {
            syllables: self
                .syllables
                .iter()
                .rev()
                .map(|s| Syllable { generator: s.generator, exponent: -&s.exponent })
                .collect(),
        }
    }

    pub fn pow(&self, k: i64) -> Word {
        let base = if k < 0 { self.inverse() } else { self.clone() };
        (0..k.unsigned_abs()).fold(Word::identity(), |acc, _| acc.multiply(&base))
    }

    /// `u⁻¹ v⁻¹ u v`.
    pub fn commutator(u: &Word, v: &Word) -> Word {
        u.inverse().multiply(&v.inverse()).multiply(u).multiply(v)
    }

    /// `h⁻¹ · self · h`.
    pub fn conjugate_by(&self, h: &Word) -> Word {
        h.inverse().multiply(self).multiply(h)
    }

    /// Exponent sum of `a`; the image under `a ↦ 1, b ↦ 0` onto ℤ.
    pub fn a_exponent_sum(&self) -> BigInt {
        self.syllables.iter().filter(|s| s.generator == Generator::A).map(|s| &s.exponent).sum()
    }

    /// Number of `a`-letters, counted with multiplicity.
    pub fn a_length(&self) -> BigInt {
        self.syllables.iter().filter(|s| s.generator == Generator::A).map(|s| s.exponent.abs()).sum()
    }

    /// Replaces `a` by `a⁻¹`; carries a word of `G(m,n)` over to `G(n,m)`.
    pub fn invert_a(&self) -> Word {
        Word {
            syllables: self
                .syllables
                .iter()
                .map(|s| match s.generator {
                    Generator::A => Syllable { generator: Generator::A, exponent: -&s.exponent },
                    Generator::B => s.clone(),
                })
                .collect(),
        }
    }

    /// If the word is `b^j` (or empty), returns `j`.
    pub fn as_b_power(&self) -> Option<BigInt> {
        match self.syllables.as_slice() {
            [] => Some(BigInt::zero()),
            [s] if s.generator == Generator::B => Some(s.exponent.clone()),
            _ => None,
        }
    }
}

impl std::ops::Mul<&Word> for &Word {
    type Output = Word;

    fn mul(self, rhs: &Word) -> Word {
        self.multiply(rhs)
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.syllables.is_empty() {
            return write!(f, "1");
        }
        for (i, s) in self.syllables.iter().enumerate() {
            if i > 0 {
                write!(f, " ")?;
            }
            write!(f, "{}", s.generator.letter())?;
            if !s.exponent.is_one() {
                write!(f, "^{}", s.exponent)?;
            }
        }
        Ok(())
    }
}

impl Serialize for Word {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Word {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

impl FromStr for Word {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        parse(s)
    }
}

/// Parses the word syntax described in the module docs.
pub fn parse(text: &str) -> Result<Word> {
    let mut p = Parser { chars: text.char_indices().collect(), pos: 0, len: text.len() };
    let w = p.sequence()?;
    p.skip_separators();
    if let Some(c) = p.peek() {
        return Err(p.error(format!("unexpected character '{c}'")));
    }
    Ok(w)
}

struct Parser {
    chars: Vec<(usize, char)>,
    pos: usize,
    len: usize,
}

impl Parser {
    fn peek(&self) -> Option<char> {
        self.chars.get(self.pos).map(|&(_, c)| c)
    }

    fn offset(&self) -> usize {
        self.chars.get(self.pos).map_or(self.len, |&(i, _)| i)
    }

    fn error(&self, msg: impl Into<String>) -> Error {
        Error::Parse { pos: self.offset(), msg: msg.into() }
    }

    fn skip_separators(&mut self) {
        while matches!(self.peek(), Some(c) if c.is_whitespace() || c == '*') {
            self.pos += 1;
        }
    }

    fn skip_whitespace(&mut self) {
        while matches!(self.peek(), Some(c) if c.is_whitespace()) {
            self.pos += 1;
        }
    }

    fn sequence(&mut self) -> Result<Word> {
        let mut w = Word::identity();
        loop {
            self.skip_separators();
            match self.peek() {
                None | Some(']') | Some(')') | Some(',') => return Ok(w),
                _ => {
                    let item = self.item()?;
                    w = w.multiply(&item);
                }
            }
        }
    }

    fn item(&mut self) -> Result<Word> {
        let c = self.peek().ok_or_else(|| self.error("unexpected end of input"))?;
        let atom = match c {
            'a' | 'b' | 'A' | 'B' => {
                self.pos += 1;
                let generator = if c.eq_ignore_ascii_case(&'a') { Generator::A } else { Generator::B };
                let sign = if c.is_ascii_uppercase() { -1 } else { 1 };
                let exp = self.exponent()?.unwrap_or_else(BigInt::one) * sign;
                return Ok(Word::from_syllables([(generator, exp)]));
            }
            '1' => {
                self.pos += 1;
                Word::identity()
            }
            '(' => {
                self.pos += 1;
                let inner = self.sequence()?;
                self.expect(')')?;
                inner
            }
            '[' => {
                self.pos += 1;
                let u = self.sequence()?;
                self.expect(',')?;
                let v = self.sequence()?;
                self.expect(']')?;
                Word::commutator(&u, &v)
            }
            other => return Err(self.error(format!("unexpected character '{other}'"))),
        };
        match self.exponent()? {
            None => Ok(atom),
            Some(k) => {
                let k = k
                    .to_i64()
                    .filter(|k| k.abs() <= MAX_GROUP_POWER)
                    .ok_or_else(|| self.error(format!("group power {k} out of range")))?;
                Ok(atom.pow(k))
            }
        }
    }

    fn expect(&mut self, want: char) -> Result<()> {
        self.skip_separators();
        if self.peek() == Some(want) {
            self.pos += 1;
            Ok(())
        } else {
            Err(self.error(format!("expected '{want}'")))
        }
    }

    fn exponent(&mut self) -> Result<Option<BigInt>> {
        if self.peek() != Some('^') {
            return Ok(None);
        }
        self.pos += 1;
        self.skip_whitespace();
        let start = self.pos;
        if matches!(self.peek(), Some('-') | Some('+')) {
            self.pos += 1;
        }
        let digits_start = self.pos;
        while matches!(self.peek(), Some(c) if c.is_ascii_digit()) {
            self.pos += 1;
        }
        if self.pos == digits_start {
            return Err(self.error("expected an integer exponent after '^'"));
        }
        let text: String = self.chars[start..self.pos].iter().map(|&(_, c)| c).collect();
        text.parse::<BigInt>().map(Some).map_err(|e| self.error(e.to_string()))
    }
}

struct Block {
    sign: i8,
    count: u64,
    tail: BigInt,
}

/// Britton reduction with the default exponent guard.
pub fn britton_reduce(g: GroupParams, w: &Word) -> Result<Word> {
    britton_reduce_guarded(g, w, DEFAULT_BIT_GUARD)
}

/// Removes pinches leftmost-innermost until none remain.
///
/// Every pinch deletes two `a`-letters, so the loop terminates; pinched
/// exponents are rescaled by `n/m` or `m/n` and are checked against
/// `max_bits`.
pub fn britton_reduce_guarded(g: GroupParams, w: &Word, max_bits: u64) -> Result<Word> {
    let m = BigInt::from(g.m);
    let n = BigInt::from(g.n);
    let mut prefix = BigInt::zero();
    let mut blocks: Vec<Block> = Vec::new();
    let mut pinches = 0u64;

    for syl in w.syllables() {
        match syl.generator {
            Generator::B => match blocks.last_mut() {
                Some(last) => last.tail += &syl.exponent,
                None => prefix += &syl.exponent,
            },
            Generator::A => {
                let sign: i8 = if syl.exponent.is_negative() { -1 } else { 1 };
                let mut count = syl
                    .exponent
                    .abs()
                    .to_u64()
                    .ok_or_else(|| Error::ResourceLimit(format!("a-exponent {} too large", syl.exponent)))?;
                while count > 0 {
                    let Some(last) = blocks.last_mut() else {
                        blocks.push(Block { sign, count, tail: BigInt::zero() });
                        break;
                    };
                    if last.sign == -sign {
                        // a⁻¹ b^{mk} a → b^{nk}   or   a b^{nk} a⁻¹ → b^{mk}
                        let (divisor, multiplier) = if last.sign < 0 { (&m, &n) } else { (&n, &m) };
                        let (k, rem) = last.tail.div_rem(divisor);
                        if rem.is_zero() {
                            let replaced = k * multiplier;
                            if replaced.bits() > max_bits {
                                return Err(Error::ResourceLimit(format!("pinched exponent exceeds {max_bits} bits")));
                            }
                            pinches += 1;
                            if pinches > MAX_PINCHES {
                                return Err(Error::ResourceLimit("too many pinches".into()));
                            }
                            count -= 1;
                            if last.count > 1 {
                                last.count -= 1;
                                last.tail = replaced;
                            } else {
                                blocks.pop();
                                match blocks.last_mut() {
                                    Some(prev) => prev.tail += replaced,
                                    None => prefix += replaced,
                                }
                            }
                            continue;
                        }
                    } else if last.tail.is_zero() {
                        last.count += count;
                        break;
                    }
                    blocks.push(Block { sign, count, tail: BigInt::zero() });
                    break;
                }
            }
        }
    }

    let mut out = Word::identity();
    out.push(Generator::B, prefix);
    for block in blocks {
        out.push(Generator::A, BigInt::from(block.count) * block.sign);
        out.push(Generator::B, block.tail);
    }
    Ok(out)
}

/// Word problem: Britton's lemma says a reduced word is trivial only if empty.
pub fn is_trivial(g: GroupParams, w: &Word) -> Result<bool> {
    Ok(britton_reduce(g, w)?.is_empty())
}

pub fn are_equal(g: GroupParams, w1: &Word, w2: &Word) -> Result<bool> {
    is_trivial(g, &w1.multiply(&w2.inverse()))
}

/// `Some(j)` when `w = b^j` in `G(m,n)`, `None` when `w ∉ ⟨b⟩`.
pub fn cyclic_subgroup_membership(g: GroupParams, w: &Word) -> Result<Option<BigInt>> {
    Ok(britton_reduce(g, w)?.as_b_power())
}

pub fn a_exponent_sum(w: &Word) -> BigInt {
    w.a_exponent_sum()
}

/// Unique form `a^p b^s a^{-q}` of an element of `G(1,n)`.
///
/// Invariants: `p, q ≥ 0`; when both are positive, `n ∤ s` (which also rules
/// out `s = 0`).
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct SolvableNormalForm {
    pub p: u64,
    pub s: BigInt,
    pub q: u64,
}

impl SolvableNormalForm {
    pub fn to_word(&self) -> Word {
        Word::from_syllables([
            (Generator::A, BigInt::from(self.p)),
            (Generator::B, self.s.clone()),
            (Generator::A, -BigInt::from(self.q)),
        ])
    }

    /// `p − q`, the image under the exponent-sum map.
    pub fn a_shift(&self) -> BigInt {
        BigInt::from(self.p) - BigInt::from(self.q)
    }
}

fn power_of(n: &BigInt, e: u64) -> Result<BigInt> {
    let e = usize::try_from(e)
        .ok()
        .filter(|&e| e as u64 * n.bits() <= DEFAULT_BIT_GUARD)
        .ok_or_else(|| Error::ResourceLimit(format!("n^{e} exceeds the exponent guard")))?;
    Ok(num_traits::pow(n.clone(), e))
}

/// Normal form in `G(1,n)` via `ba = ab^n` and `a⁻¹b = b^n a⁻¹`.
pub fn solvable_normal_form(n: i64, w: &Word) -> Result<SolvableNormalForm> {
    if n == 0 {
        return Err(Error::ZeroParameter { m: 1, n });
    }
    let nb = BigInt::from(n);
    let (mut p, mut s, mut q) = (0u64, BigInt::zero(), 0u64);
    let too_long = || Error::ResourceLimit("a-exponent too large".into());
    for syl in w.syllables() {
        match syl.generator {
            Generator::B => s += &syl.exponent * power_of(&nb, q)?,
            Generator::A if syl.exponent.is_negative() => {
                let k = (-&syl.exponent).to_u64().ok_or_else(too_long)?;
                q = q.checked_add(k).ok_or_else(too_long)?;
            }
            Generator::A => {
                let mut k = syl.exponent.to_u64().ok_or_else(too_long)?;
                let d = k.min(q);
                q -= d;
                k -= d;
                if k > 0 {
                    p = p.checked_add(k).ok_or_else(too_long)?;
                    s *= power_of(&nb, k)?;
                }
            }
        }
        if s.is_zero() {
            let d = p.min(q);
            p -= d;
            q -= d;
        }
        while p > 0 && q > 0 && (&s % &nb).is_zero() {
            s /= &nb;
            p -= 1;
            q -= 1;
        }
    }
    Ok(SolvableNormalForm { p, s, q })
}
