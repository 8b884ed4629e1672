//! Exact arithmetic for Sturmian codings of irrational circle rotations.
//!
//! The rotation number α ∈ (0, 1) is given by its continued fraction. All
//! comparisons happen in the field Q + Qα: a number a + bα is compared by
//! reducing to a comparison of α against a rational, which the convergent
//! enclosures decide in finitely many steps (α is irrational, so ties are
//! impossible). No floating point is involved anywhere, so a symbol query is
//! either certified or reported as beyond the precision horizon.
//!
//! The coding with offset β emits x(n) = ⌊(n+1)α+β⌋ − ⌊nα+β⌋, i.e. symbol 1
//! exactly when {nα+β} falls in [1−α, 1).

use crate::error::{Error, Result};
use crate::numeric::Rat;
use num::BigInt;
use serde::{Deserialize, Serialize};
use std::cmp::Ordering;

/// A continued fraction [0; a1, a2, ...] with eventually repeating terms.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ContinuedFraction {
    /// Leading terms after the integer part (which is fixed to 0).
    pub pre: Vec<u64>,
    /// Repeating tail, nonempty.
    pub rep: Vec<u64>,
}

/// Levels of convergent refinement tried before giving up.
const MAX_LEVEL: usize = 256;

impl ContinuedFraction {
    pub fn new(pre: Vec<u64>, rep: Vec<u64>) -> Result<ContinuedFraction> {
        if rep.is_empty() || pre.iter().chain(&rep).any(|&a| a == 0) {
            return Err(Error::usage("continued fraction terms must be positive"));
        }
        Ok(ContinuedFraction { pre, rep })
    }

    /// Golden-mean conjugate (√5 − 1)/2 = [0; 1, 1, 1, ...].
    pub fn golden() -> ContinuedFraction {
        ContinuedFraction { pre: vec![], rep: vec![1] }
    }

    /// √2 − 1 = [0; 2, 2, 2, ...].
    pub fn silver() -> ContinuedFraction {
        ContinuedFraction { pre: vec![], rep: vec![2] }
    }

    fn term(&self, i: usize) -> u64 {
        if i < self.pre.len() {
            self.pre[i]
        } else {
            self.rep[(i - self.pre.len()) % self.rep.len()]
        }
    }

    /// Rational enclosure lo < α < hi from consecutive convergents.
    fn enclosure(&self, level: usize) -> (Rat, Rat) {
        // p_{-1}/q_{-1} = 1/0, p_0/q_0 = 0/1, then p_k = a_k p_{k-1} + p_{k-2}.
        let mut p_prev = BigInt::from(1);
        let mut q_prev = BigInt::from(0);
        let mut p = BigInt::from(0);
        let mut q = BigInt::from(1);
        for i in 0..level {
            let a = BigInt::from(self.term(i));
            let p_next = &a * &p + &p_prev;
            let q_next = &a * &q + &q_prev;
            p_prev = std::mem::replace(&mut p, p_next);
            q_prev = std::mem::replace(&mut q, q_next);
        }
        let last = Rat::ratio_big(p, q);
        let before = Rat::ratio_big(p_prev, q_prev);
        if last < before {
            (last, before)
        } else {
            (before, last)
        }
    }

    /// Exact comparison of α with a rational.
    pub fn cmp_rat(&self, r: &Rat) -> Ordering {
        for level in 2..MAX_LEVEL {
            let (lo, hi) = self.enclosure(level);
            if r < &lo {
                return Ordering::Greater;
            }
            if r > &hi {
                return Ordering::Less;
            }
            // r equal to an endpoint: the next level moves the endpoint past it.
        }
        unreachable!("rational comparison against an irrational must terminate");
    }

    pub fn to_f64(&self) -> f64 {
        let (lo, hi) = self.enclosure(40);
        (lo.to_f64() + hi.to_f64()) / 2.0
    }
}

/// An element a + bα of Q + Qα.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QAlpha {
    pub a: Rat,
    pub b: Rat,
}

impl QAlpha {
    pub fn rational(a: Rat) -> QAlpha {
        QAlpha { a, b: Rat::zero() }
    }

    pub fn alpha_times(n: i64) -> QAlpha {
        QAlpha { a: Rat::zero(), b: Rat::int(n) }
    }

    pub fn add(&self, o: &QAlpha) -> QAlpha {
        QAlpha { a: &self.a + &o.a, b: &self.b + &o.b }
    }

    pub fn sub(&self, o: &QAlpha) -> QAlpha {
        QAlpha { a: &self.a - &o.a, b: &self.b - &o.b }
    }

    pub fn add_int(&self, n: i64) -> QAlpha {
        QAlpha { a: &self.a + &Rat::int(n), b: self.b.clone() }
    }

    pub fn half_sum(&self, o: &QAlpha) -> QAlpha {
        let half = Rat::new(1, 2);
        QAlpha { a: (&self.a + &o.a) * half.clone(), b: (&self.b + &o.b) * half }
    }

    /// Sign of a + bα, decided exactly.
    pub fn sign(&self, cf: &ContinuedFraction) -> Ordering {
        if self.b.is_zero() {
            return self.a.cmp(&Rat::zero());
        }
        // a + bα vs 0  <=>  α vs −a/b, orientation by the sign of b.
        let threshold = -(self.a.clone()) / self.b.clone();
        let c = cf.cmp_rat(&threshold);
        if self.b > Rat::zero() {
            c
        } else {
            c.reverse()
        }
    }

    pub fn cmp(&self, o: &QAlpha, cf: &ContinuedFraction) -> Ordering {
        self.sub(o).sign(cf)
    }

    /// ⌊a + bα⌋, certified by refining the convergent enclosure.
    pub fn floor(&self, cf: &ContinuedFraction) -> Result<BigInt> {
        if self.b.is_zero() {
            return Ok(self.a.0.floor().to_integer());
        }
        for level in 2..MAX_LEVEL {
            let (lo, hi) = cf.enclosure(level);
            let (v_lo, v_hi) = if self.b > Rat::zero() {
                (&self.a + &(&self.b * &lo), &self.a + &(&self.b * &hi))
            } else {
                (&self.a + &(&self.b * &hi), &self.a + &(&self.b * &lo))
            };
            let f_lo = v_lo.0.floor().to_integer();
            let f_hi = v_hi.0.floor().to_integer();
            if f_lo == f_hi {
                return Ok(f_lo);
            }
        }
        Err(Error::HorizonExceeded(
            "floor of a + bα not certified within the convergent budget".into(),
        ))
    }

    /// Fractional part as an element of [0, 1).
    pub fn mod1(&self, cf: &ContinuedFraction) -> Result<QAlpha> {
        let f = self.floor(cf)?;
        Ok(QAlpha { a: &self.a - &Rat::from_bigint(f), b: self.b.clone() })
    }
}

/// Which edge of the partition interval the coding closes.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, Default)]
pub enum Convention {
    /// x(n) = ⌊(n+1)α+β⌋ − ⌊nα+β⌋; symbol 1 on {nα+β} ∈ [1−α, 1).
    #[default]
    LowerEdge,
    /// Ceiling variant; symbol 1 on {nα+β} ∈ (1−α, 1].
    UpperEdge,
}

/// Exact Sturmian symbol at position n for rotation α and offset β.
pub fn coding_symbol(
    cf: &ContinuedFraction,
    beta: &Rat,
    convention: Convention,
    n: i64,
) -> Result<u8> {
    let at = |m: i64| -> QAlpha { QAlpha { a: beta.clone(), b: Rat::int(m) } };
    let (hi, lo) = (at(n + 1), at(n));
    let diff = match convention {
        Convention::LowerEdge => hi.floor(cf)? - lo.floor(cf)?,
        Convention::UpperEdge => {
            // ⌈x⌉ = −⌊−x⌋
            let neg = |q: QAlpha| QAlpha { a: -q.a, b: -q.b };
            (-neg(hi).floor(cf)?) - (-neg(lo).floor(cf)?)
        }
    };
    Ok(if diff == BigInt::from(1) { 1 } else { 0 })
}

/// Half-open arcs [lo, hi) on the circle, endpoints in Q + Qα inside [0, 1];
/// arcs never wrap (wrapping input is split at 0).
#[derive(Clone, Debug)]
pub struct ArcSet {
    arcs: Vec<(QAlpha, QAlpha)>,
}

impl ArcSet {
    pub fn full() -> ArcSet {
        ArcSet { arcs: vec![(QAlpha::rational(Rat::zero()), QAlpha::rational(Rat::one()))] }
    }

    pub fn is_empty(&self) -> bool {
        self.arcs.is_empty()
    }

    /// The arc of phases t whose coding has `sym` at `position`:
    /// I_sym − position·α (mod 1) with I_0 = [0, 1−α), I_1 = [1−α, 1).
    pub fn symbol_arc(cf: &ContinuedFraction, position: i64, sym: u8) -> Result<ArcSet> {
        let one_minus_alpha = QAlpha { a: Rat::one(), b: Rat::int(-1) };
        let (lo, hi) = if sym == 0 {
            (QAlpha::rational(Rat::zero()), one_minus_alpha)
        } else {
            (one_minus_alpha, QAlpha::rational(Rat::one()))
        };
        let shift = QAlpha::alpha_times(-position);
        let lo = lo.add(&shift).mod1(cf)?;
        let mut hi = hi.add(&shift).mod1(cf)?;
        if hi.cmp(&lo, cf) != Ordering::Greater {
            hi = hi.add_int(1);
        }
        let one = QAlpha::rational(Rat::one());
        if hi.cmp(&one, cf) == Ordering::Greater {
            // Wraps: [lo, 1) ∪ [0, hi − 1).
            let first = (lo, one);
            let second = (QAlpha::rational(Rat::zero()), hi.add_int(-1));
            Ok(ArcSet { arcs: vec![second, first] })
        } else {
            Ok(ArcSet { arcs: vec![(lo, hi)] })
        }
    }

    pub fn intersect(&self, other: &ArcSet, cf: &ContinuedFraction) -> ArcSet {
        let mut out = Vec::new();
        for (alo, ahi) in &self.arcs {
            for (blo, bhi) in &other.arcs {
                let lo = if alo.cmp(blo, cf) == Ordering::Greater { alo } else { blo };
                let hi = if ahi.cmp(bhi, cf) == Ordering::Less { ahi } else { bhi };
                if lo.cmp(hi, cf) == Ordering::Less {
                    out.push((lo.clone(), hi.clone()));
                }
            }
        }
        ArcSet { arcs: out }
    }

    /// A phase strictly inside some arc, usable as a test point.
    pub fn sample_phase(&self) -> Option<QAlpha> {
        self.arcs.first().map(|(lo, hi)| lo.half_sum(hi))
    }
}

/// Is the finite pattern {(position, symbol)} realized by some coding phase?
pub fn pattern_nonempty(cf: &ContinuedFraction, constraints: &[(i64, u8)]) -> Result<bool> {
    let mut arcs = ArcSet::full();
    for &(pos, sym) in constraints {
        if sym > 1 {
            return Ok(false);
        }
        arcs = arcs.intersect(&ArcSet::symbol_arc(cf, pos, sym)?, cf);
        if arcs.is_empty() {
            return Ok(false);
        }
    }
    Ok(true)
}

/// All words of length n realized on [0, n), via prefix-arc extension.
pub fn words_of_length(cf: &ContinuedFraction, n: usize) -> Result<Vec<Vec<u8>>> {
    let mut frontier: Vec<(Vec<u8>, ArcSet)> = vec![(Vec::new(), ArcSet::full())];
    for pos in 0..n {
        let mut next = Vec::new();
        for (word, arcs) in &frontier {
            for sym in 0..2u8 {
                let extended = arcs.intersect(&ArcSet::symbol_arc(cf, pos as i64, sym)?, cf);
                if !extended.is_empty() {
                    let mut w = word.clone();
                    w.push(sym);
                    next.push((w, extended));
                }
            }
        }
        frontier = next;
    }
    Ok(frontier.into_iter().map(|(w, _)| w).collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn golden_enclosure() {
        let cf = ContinuedFraction::golden();
        let a = cf.to_f64();
        assert!((a - 0.6180339887).abs() < 1e-8);
        assert_eq!(cf.cmp_rat(&Rat::new(1, 2)), Ordering::Greater);
        assert_eq!(cf.cmp_rat(&Rat::new(2, 3)), Ordering::Less);
        // 3/5 is a convergent; the comparison still resolves.
        assert_eq!(cf.cmp_rat(&Rat::new(3, 5)), Ordering::Greater);
    }

    #[test]
    fn coding_matches_float_oracle() {
        let cf = ContinuedFraction::golden();
        let alpha = (5f64.sqrt() - 1.0) / 2.0;
        for n in -60..=60i64 {
            let exact = coding_symbol(&cf, &Rat::zero(), Convention::LowerEdge, n).unwrap();
            let float = ((n + 1) as f64 * alpha).floor() - (n as f64 * alpha).floor();
            assert_eq!(exact as f64, float, "mismatch at n = {n}");
        }
        // ⌊2α⌋ − ⌊α⌋ = 1 for the golden conjugate.
        assert_eq!(coding_symbol(&cf, &Rat::zero(), Convention::LowerEdge, 1).unwrap(), 1);
    }

    #[test]
    fn conventions_agree_off_boundary_orbit() {
        let cf = ContinuedFraction::silver();
        let beta = Rat::new(1, 3);
        for n in -20..=20i64 {
            let lo = coding_symbol(&cf, &beta, Convention::LowerEdge, n).unwrap();
            let hi = coding_symbol(&cf, &beta, Convention::UpperEdge, n).unwrap();
            assert_eq!(lo, hi, "β = 1/3 never hits the boundary orbit; n = {n}");
        }
    }

    #[test]
    fn word_complexity_is_n_plus_one() {
        let cf = ContinuedFraction::golden();
        for n in 1..=12usize {
            let words = words_of_length(&cf, n).unwrap();
            let distinct: std::collections::BTreeSet<_> = words.iter().cloned().collect();
            assert_eq!(distinct.len(), n + 1, "complexity at n = {n}");
        }
    }

    #[test]
    fn forbidden_pattern_detected() {
        // With α ≈ 0.618 the 1-symbol has frequency α > 1/2, so "00" is the
        // forbidden length-2 word: I_0 ∩ (I_0 − α) = ∅.
        let cf = ContinuedFraction::golden();
        assert!(!pattern_nonempty(&cf, &[(0, 0), (1, 0)]).unwrap());
        assert!(pattern_nonempty(&cf, &[(0, 1), (1, 1)]).unwrap());
        assert!(pattern_nonempty(&cf, &[(0, 1), (1, 0)]).unwrap());
        assert!(pattern_nonempty(&cf, &[(0, 0), (5, 1)]).unwrap());
    }

    #[test]
    fn qalpha_floor() {
        let cf = ContinuedFraction::golden();
        // 10α ≈ 6.18
        let q = QAlpha { a: Rat::zero(), b: Rat::int(10) };
        assert_eq!(q.floor(&cf).unwrap(), BigInt::from(6));
        let neg = QAlpha { a: Rat::zero(), b: Rat::int(-10) };
        assert_eq!(neg.floor(&cf).unwrap(), BigInt::from(-7));
    }
}
