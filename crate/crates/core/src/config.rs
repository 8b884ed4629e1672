//! Configurations x ∈ A^(Z^d) with exact symbol queries, the translation
//! action, and the compact metric.
//!
//! The metric is d(x, y) = Σ_i 2^(-i) [x(g_i) ≠ y(g_i)] over the canonical
//! enumeration g_1, g_2, ... of Z^d. Truncating at K terms gives the interval
//! [partial, partial + 2^(-K)]. Since Σ 2^(-i) = 1, diam = 1 and the identity
//! g_1 = 0 carries weight 1/2.

use crate::error::{Error, Result};
use crate::group::{enumerate, GroupElem};
use crate::numeric::{Interval, Rat};
use crate::subset::SubsetDesc;
use crate::sturmian::{coding_symbol, ContinuedFraction, Convention};
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Alphabet {
    labels: Vec<char>,
}

impl Alphabet {
    pub fn of_size(k: usize) -> Alphabet {
        assert!(k >= 1 && k <= 36, "alphabet size in 1..=36");
        let digits = "0123456789abcdefghijklmnopqrstuvwxyz";
        Alphabet { labels: digits.chars().take(k).collect() }
    }

    pub fn binary() -> Alphabet {
        Alphabet::of_size(2)
    }

    pub fn size(&self) -> usize {
        self.labels.len()
    }

    pub fn label(&self, sym: u8) -> char {
        self.labels[sym as usize]
    }

    pub fn index_of(&self, c: char) -> Option<u8> {
        self.labels.iter().position(|&l| l == c).map(|i| i as u8)
    }
}

/// Substitution rules with seeds making the fixed point bi-infinite: after
/// `power` applications the right seed's image starts with it and the left
/// seed's image ends with it.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SubstitutionRule {
    pub rules: Vec<Vec<u8>>,
    pub right_seed: u8,
    pub left_seed: u8,
    pub power: u32,
}

impl SubstitutionRule {
    /// Thue–Morse: 0 -> 01, 1 -> 10; σ² is prolongable on 0 in both directions.
    pub fn thue_morse() -> SubstitutionRule {
        SubstitutionRule { rules: vec![vec![0, 1], vec![1, 0]], right_seed: 0, left_seed: 0, power: 2 }
    }

    fn apply_once(&self, w: &[u8]) -> Vec<u8> {
        w.iter().flat_map(|&s| self.rules[s as usize].iter().copied()).collect()
    }

    fn apply(&self, w: &[u8]) -> Vec<u8> {
        let mut out = w.to_vec();
        for _ in 0..self.power {
            out = self.apply_once(&out);
        }
        out
    }

    pub fn validate(&self) -> Result<()> {
        if self.rules.is_empty() || self.rules.iter().any(|r| r.is_empty()) {
            return Err(Error::usage("substitution rules must be nonempty"));
        }
        let k = self.rules.len() as u8;
        if self.rules.iter().flatten().any(|&s| s >= k) {
            return Err(Error::usage("substitution image symbol out of range"));
        }
        let r = self.apply(&[self.right_seed]);
        if r.len() < 2 || r[0] != self.right_seed {
            return Err(Error::usage("right seed not prolongable under the given power"));
        }
        let l = self.apply(&[self.left_seed]);
        if l.len() < 2 || *l.last().unwrap() != self.left_seed {
            return Err(Error::usage("left seed not prolongable under the given power"));
        }
        Ok(())
    }
}

const SUBSTITUTION_HORIZON: usize = 1 << 22;

/// A finitely described point of A^(Z^d). Symbol queries are exact and
/// terminating within each variant's declared horizon.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum ConfigDesc {
    Constant { sym: u8, dim: usize },
    /// x(g) = block[g mod period], row-major over the period box.
    Periodic { period: Vec<u64>, block: Vec<u8> },
    FiniteDefect { background: Box<ConfigDesc>, overrides: BTreeMap<GroupElem, u8> },
    /// Sturmian coding of the rotation by α with offset β (Z only).
    RotationCoding { alpha: ContinuedFraction, beta: Rat, convention: Convention },
    /// Bi-infinite fixed point of a substitution (Z only).
    SubstitutionFixedPoint { rule: SubstitutionRule },
    /// 0 on the subset, 1 off it (the indicator convention used throughout).
    IndicatorOfSubset { set: SubsetDesc },
    /// The point listing all words over the alphabet in length-lex order on
    /// n >= 0 (0 on n < 0); a transitive point of the full shift (Z only).
    TransitiveWordCatalog { k: u8 },
    /// Symbols advanced by one (mod k) on the subset.
    FlipOnSubset { base: Box<ConfigDesc>, on: SubsetDesc, k: u8 },
    /// Lazy translate: x(g + by).
    Shifted { base: Box<ConfigDesc>, by: GroupElem },
}

impl ConfigDesc {
    /// 1-D periodic configuration from a digit string, e.g. "0011".
    pub fn periodic_word(word: &str) -> Result<ConfigDesc> {
        let block: Option<Vec<u8>> =
            word.chars().map(|c| c.to_digit(36).map(|d| d as u8)).collect();
        let block = block.ok_or_else(|| Error::usage("bad symbol in periodic word"))?;
        if block.is_empty() {
            return Err(Error::usage("empty periodic word"));
        }
        Ok(ConfigDesc::Periodic { period: vec![block.len() as u64], block })
    }

    pub fn constant(sym: u8, dim: usize) -> ConfigDesc {
        ConfigDesc::Constant { sym, dim }
    }

    pub fn dim(&self) -> usize {
        match self {
            ConfigDesc::Constant { dim, .. } => *dim,
            ConfigDesc::Periodic { period, .. } => period.len(),
            ConfigDesc::FiniteDefect { background, .. } => background.dim(),
            ConfigDesc::RotationCoding { .. }
            | ConfigDesc::SubstitutionFixedPoint { .. }
            | ConfigDesc::TransitiveWordCatalog { .. } => 1,
            ConfigDesc::IndicatorOfSubset { set } => set.dim(),
            ConfigDesc::FlipOnSubset { base, .. } => base.dim(),
            ConfigDesc::Shifted { base, .. } => base.dim(),
        }
    }

    /// Exact symbol query.
    pub fn symbol_at(&self, g: &GroupElem) -> Result<u8> {
        match self {
            ConfigDesc::Constant { sym, .. } => Ok(*sym),
            ConfigDesc::Periodic { period, block } => {
                let mut idx = 0usize;
                for (c, &m) in g.coords().iter().zip(period) {
                    idx = idx * m as usize + c.rem_euclid(m as i64) as usize;
                }
                Ok(block[idx])
            }
            ConfigDesc::FiniteDefect { background, overrides } => match overrides.get(g) {
                Some(&s) => Ok(s),
                None => background.symbol_at(g),
            },
            ConfigDesc::RotationCoding { alpha, beta, convention } => {
                coding_symbol(alpha, beta, *convention, g.as_scalar())
            }
            ConfigDesc::SubstitutionFixedPoint { rule } => {
                substitution_symbol(rule, g.as_scalar())
            }
            ConfigDesc::IndicatorOfSubset { set } => {
                Ok(if set.contains(g)? { 0 } else { 1 })
            }
            ConfigDesc::TransitiveWordCatalog { k } => catalog_symbol(*k, g.as_scalar()),
            ConfigDesc::FlipOnSubset { base, on, k } => {
                let s = base.symbol_at(g)?;
                Ok(if on.contains(g)? { (s + 1) % k } else { s })
            }
            ConfigDesc::Shifted { base, by } => base.symbol_at(&g.add(by)),
        }
    }

    /// The translation action: (s · x)(g) = x(g + s), lazily described.
    pub fn translate(&self, s: &GroupElem) -> ConfigDesc {
        if s.is_zero() {
            return self.clone();
        }
        match self {
            ConfigDesc::Constant { .. } => self.clone(),
            ConfigDesc::Shifted { base, by } => {
                ConfigDesc::Shifted { base: base.clone(), by: by.add(s) }
            }
            _ => ConfigDesc::Shifted { base: Box::new(self.clone()), by: *s },
        }
    }
}

fn substitution_symbol(rule: &SubstitutionRule, n: i64) -> Result<u8> {
    rule.validate()?;
    if n >= 0 {
        let n = n as usize;
        let mut w = vec![rule.right_seed];
        while w.len() <= n {
            if w.len() > SUBSTITUTION_HORIZON {
                return Err(Error::HorizonExceeded("substitution expansion".into()));
            }
            w = rule.apply(&w);
        }
        Ok(w[n])
    } else {
        let m = (-n) as usize;
        let mut w = vec![rule.left_seed];
        while w.len() < m {
            if w.len() > SUBSTITUTION_HORIZON {
                return Err(Error::HorizonExceeded("substitution expansion".into()));
            }
            w = rule.apply(&w);
        }
        Ok(w[w.len() - m])
    }
}

/// Symbol of the word-catalog point: all words over {0..k-1} listed in
/// length-lex order starting at position 0; zero on negative positions.
fn catalog_symbol(k: u8, n: i64) -> Result<u8> {
    if n < 0 {
        return Ok(0);
    }
    let mut n = n as u128;
    let k128 = k as u128;
    let mut len = 1u128;
    let mut count = k128; // words of this length
    loop {
        let total = len
            .checked_mul(count)
            .ok_or_else(|| Error::HorizonExceeded("catalog position".into()))?;
        if n < total {
            let word_index = n / len;
            let offset = (n % len) as u32;
            // Digit `offset` (big-endian) of word_index in base k, width len.
            let shift = (len as u32 - 1 - offset) as u32;
            let mut v = word_index;
            for _ in 0..shift {
                v /= k128;
            }
            return Ok((v % k128) as u8);
        }
        n -= total;
        len += 1;
        count = count
            .checked_mul(k128)
            .ok_or_else(|| Error::HorizonExceeded("catalog position".into()))?;
    }
}

/// Truncation depth and weighting of the configuration metric.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MetricSpec {
    pub trunc: u32,
}

impl Default for MetricSpec {
    fn default() -> Self {
        MetricSpec { trunc: 20 }
    }
}

/// d(x, y) as the interval [S_K, S_K + 2^(-K)] with
/// S_K = Σ_{i<=K} 2^(-i) [x(g_i) ≠ y(g_i)].
pub fn distance(x: &ConfigDesc, y: &ConfigDesc, k: u32) -> Result<Interval> {
    if k == 0 {
        return Err(Error::usage("truncation must be >= 1"));
    }
    let dim = x.dim();
    let num = distance_numerator(x, y, &GroupElem::zero(dim), &enumerate(dim, k as usize)?, k)?;
    let lo = Rat::ratio_big(num.into(), num::BigInt::from(1) << k);
    let hi = &lo + &Rat::pow2_neg(k);
    Ok(Interval::new(lo, hi))
}

/// 2^K * S_K for the pair translated by t: Σ 2^(K-i) [x(g_i + t) ≠ y(g_i + t)].
/// Exact dyadic numerator, the workhorse of the mean-metric averages.
pub fn distance_numerator(
    x: &ConfigDesc,
    y: &ConfigDesc,
    t: &GroupElem,
    enumeration: &[GroupElem],
    k: u32,
) -> Result<u64> {
    assert!(k as usize <= enumeration.len() && k <= 62);
    let mut num = 0u64;
    for (i, g) in enumeration.iter().take(k as usize).enumerate() {
        let p = g.add(t);
        if x.symbol_at(&p)? != y.symbol_at(&p)? {
            num += 1u64 << (k as usize - 1 - i);
        }
    }
    Ok(num)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ge(n: i64) -> GroupElem {
        GroupElem::scalar(n)
    }

    #[test]
    fn periodic_symbols() {
        let x = ConfigDesc::periodic_word("01").unwrap();
        assert_eq!(x.symbol_at(&ge(5)).unwrap(), 1);
        assert_eq!(x.symbol_at(&ge(-1)).unwrap(), 1);
        assert_eq!(x.symbol_at(&ge(-2)).unwrap(), 0);
    }

    #[test]
    fn translation_action_axioms() {
        let x = ConfigDesc::periodic_word("0011").unwrap();
        let e = ge(0);
        for n in -8..=8 {
            assert_eq!(
                x.translate(&e).symbol_at(&ge(n)).unwrap(),
                x.symbol_at(&ge(n)).unwrap()
            );
        }
        // Composition = addition, tested pointwise.
        let s = ge(3);
        let t = ge(-5);
        let xy = x.translate(&s).translate(&t);
        let direct = x.translate(&s.add(&t));
        for n in -8..=8 {
            assert_eq!(xy.symbol_at(&ge(n)).unwrap(), direct.symbol_at(&ge(n)).unwrap());
        }
        // Periodic "01" shifted by 1 is "10" pointwise.
        let shifted = ConfigDesc::periodic_word("01").unwrap().translate(&ge(1));
        let ten = ConfigDesc::periodic_word("10").unwrap();
        for n in -4..=4 {
            assert_eq!(shifted.symbol_at(&ge(n)).unwrap(), ten.symbol_at(&ge(n)).unwrap());
        }
        // Constants are fixed points.
        let c = ConfigDesc::constant(1, 1);
        assert_eq!(c.translate(&s), c);
    }

    #[test]
    fn distance_examples() {
        let zero = ConfigDesc::constant(0, 1);
        let one = ConfigDesc::constant(1, 1);
        let d = distance(&zero, &zero, 10).unwrap();
        assert_eq!(d.lo, Rat::zero());
        assert_eq!(d.hi, Rat::pow2_neg(10));

        let d01 = distance(&zero, &one, 10).unwrap();
        assert_eq!(d01.lo, Rat::one() - Rat::pow2_neg(10));
        assert_eq!(d01.hi, Rat::one());

        let mut overrides = BTreeMap::new();
        overrides.insert(ge(0), 1u8);
        let defect = ConfigDesc::FiniteDefect { background: Box::new(zero.clone()), overrides };
        let dd = distance(&zero, &defect, 10).unwrap();
        assert_eq!(dd.lo, Rat::new(1, 2));
        assert_eq!(dd.hi, Rat::new(1, 2) + Rat::pow2_neg(10));
    }

    #[test]
    fn metric_symmetry_and_triangle() {
        let a = ConfigDesc::periodic_word("010").unwrap();
        let b = ConfigDesc::periodic_word("0011").unwrap();
        let c = ConfigDesc::periodic_word("01").unwrap();
        let k = 12;
        let dab = distance(&a, &b, k).unwrap();
        let dba = distance(&b, &a, k).unwrap();
        assert_eq!(dab, dba);
        let dac = distance(&a, &c, k).unwrap();
        let dcb = distance(&c, &b, k).unwrap();
        // Triangle inequality on midpoints within 2 * 2^(-K).
        let slack = Rat::int(2) * Rat::pow2_neg(k);
        assert!(dab.midpoint() <= dac.midpoint() + dcb.midpoint() + slack);
    }

    #[test]
    fn indicator_convention() {
        // 0 on the set, per the correspondence convention.
        let x = ConfigDesc::IndicatorOfSubset { set: SubsetDesc::progression(2, 0) };
        assert_eq!(x.symbol_at(&ge(4)).unwrap(), 0);
        assert_eq!(x.symbol_at(&ge(3)).unwrap(), 1);
    }

    #[test]
    fn catalog_lists_all_words() {
        // Oracle: concatenate all binary words in length-lex order directly.
        let mut expect: Vec<u8> = Vec::new();
        for len in 1..=5u32 {
            for w in 0..(1u32 << len) {
                for bit in (0..len).rev() {
                    expect.push(((w >> bit) & 1) as u8);
                }
            }
        }
        let x = ConfigDesc::TransitiveWordCatalog { k: 2 };
        for (i, &sym) in expect.iter().enumerate() {
            assert_eq!(x.symbol_at(&ge(i as i64)).unwrap(), sym, "position {i}");
        }
        assert_eq!(x.symbol_at(&ge(-3)).unwrap(), 0);
    }

    #[test]
    fn thue_morse_parity_oracle() {
        let x = ConfigDesc::SubstitutionFixedPoint { rule: SubstitutionRule::thue_morse() };
        for n in 0..200i64 {
            let parity = (n as u64).count_ones() as u8 % 2;
            assert_eq!(x.symbol_at(&ge(n)).unwrap(), parity, "TM({n})");
        }
        // Left extension exists and is consistent under the square substitution.
        for n in -64..0i64 {
            let s = x.symbol_at(&ge(n)).unwrap();
            assert!(s <= 1);
        }
    }

    #[test]
    fn flip_on_subset() {
        let base = ConfigDesc::constant(0, 1);
        let y = ConfigDesc::FlipOnSubset {
            base: Box::new(base),
            on: SubsetDesc::progression(2, 0),
            k: 2,
        };
        assert_eq!(y.symbol_at(&ge(0)).unwrap(), 1);
        assert_eq!(y.symbol_at(&ge(1)).unwrap(), 0);
    }

    #[test]
    fn rotation_coding_in_config() {
        let x = ConfigDesc::RotationCoding {
            alpha: ContinuedFraction::golden(),
            beta: Rat::zero(),
            convention: Convention::LowerEdge,
        };
        assert_eq!(x.symbol_at(&ge(1)).unwrap(), 1);
    }
}
