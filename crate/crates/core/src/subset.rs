//! Finitely described subsets of Z^d with exact membership queries.
//!
//! A `SubsetDesc` is evaluated lazily: no infinite set is ever materialized.
//! The periodic fragment of the algebra (periodic sets, finite sets, and
//! their boolean combinations, shifts and complements) normalizes to a
//! canonical `Normalized::PeriodicMod` form on which densities are exact.

use crate::error::{Error, Result};
use crate::group::{GroupElem, Window};
use serde::{Deserialize, Serialize};
use std::collections::BTreeSet;

/// Integer expression in the block index j: coeff * base^j + lin * j + cst.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct IntExpr {
    pub pow_coeff: i64,
    pub pow_base: i64,
    pub lin: i64,
    pub cst: i64,
}

impl IntExpr {
    pub fn constant(c: i64) -> IntExpr {
        IntExpr { pow_coeff: 0, pow_base: 2, lin: 0, cst: c }
    }

    pub fn linear(a: i64, c: i64) -> IntExpr {
        IntExpr { pow_coeff: 0, pow_base: 2, lin: a, cst: c }
    }

    pub fn power(coeff: i64, base: i64) -> IntExpr {
        IntExpr { pow_coeff: coeff, pow_base: base, lin: 0, cst: 0 }
    }

    pub fn value(&self, j: i64) -> Result<i64> {
        let overflow = || Error::Overflow(format!("block expression at j = {j}"));
        let mut v: i64 = 0;
        if self.pow_coeff != 0 {
            if j < 0 {
                return Err(Error::usage("negative exponent in block rule"));
            }
            let p = checked_pow(self.pow_base, j as u32).ok_or_else(overflow)?;
            v = self.pow_coeff.checked_mul(p).ok_or_else(overflow)?;
        }
        let lin = self.lin.checked_mul(j).ok_or_else(overflow)?;
        v = v.checked_add(lin).ok_or_else(overflow)?;
        v.checked_add(self.cst).ok_or_else(overflow)
    }

    /// True when value(j) is strictly increasing and unbounded in j >= j0.
    pub fn is_unbounded_increasing(&self) -> bool {
        (self.pow_coeff > 0 && self.pow_base >= 2) || (self.pow_coeff == 0 && self.lin > 0)
    }

    pub fn to_dsl(&self) -> String {
        let mut parts = Vec::new();
        if self.pow_coeff != 0 {
            if self.pow_coeff == 1 {
                parts.push(format!("{}^j", self.pow_base));
            } else {
                parts.push(format!("{}*{}^j", self.pow_coeff, self.pow_base));
            }
        }
        if self.lin != 0 {
            if self.lin == 1 {
                parts.push("j".to_string());
            } else {
                parts.push(format!("{}*j", self.lin));
            }
        }
        if self.cst != 0 || parts.is_empty() {
            parts.push(self.cst.to_string());
        }
        parts.join("+")
    }
}

fn checked_pow(base: i64, exp: u32) -> Option<i64> {
    base.checked_pow(exp)
}

/// A finitely described subset of Z^d.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum SubsetDesc {
    /// Residue classes: g in E iff (g mod m) in residues. Modulus per axis.
    Periodic { modulus: Vec<u64>, residues: BTreeSet<Vec<u64>> },
    /// Finite explicit set; queries outside the declared universe error out.
    Explicit { window: Window, universe: Option<(Vec<i64>, Vec<i64>)> },
    /// Union of blocks [start(j), start(j)+len(j)) for j in j0..=j1 (Z only).
    BlockUnion { j0: i64, j1: Option<i64>, start: IntExpr, len: IntExpr },
    Shift { inner: Box<SubsetDesc>, by: GroupElem },
    Complement { inner: Box<SubsetDesc> },
    Union { a: Box<SubsetDesc>, b: Box<SubsetDesc> },
    Intersection { a: Box<SubsetDesc>, b: Box<SubsetDesc> },
}

impl SubsetDesc {
    /// Arithmetic progression a*Z + b in Z.
    pub fn progression(a: u64, b: i64) -> SubsetDesc {
        assert!(a >= 1);
        let r = b.rem_euclid(a as i64) as u64;
        SubsetDesc::Periodic { modulus: vec![a], residues: [vec![r]].into_iter().collect() }
    }

    pub fn full(dim: usize) -> SubsetDesc {
        SubsetDesc::Periodic {
            modulus: vec![1; dim],
            residues: [vec![0; dim]].into_iter().collect(),
        }
    }

    pub fn empty_set(dim: usize) -> SubsetDesc {
        SubsetDesc::Periodic { modulus: vec![1; dim], residues: BTreeSet::new() }
    }

    pub fn finite(window: Window) -> SubsetDesc {
        SubsetDesc::Explicit { window, universe: None }
    }

    pub fn shift(self, by: GroupElem) -> SubsetDesc {
        SubsetDesc::Shift { inner: Box::new(self), by }
    }

    pub fn complement(self) -> SubsetDesc {
        SubsetDesc::Complement { inner: Box::new(self) }
    }

    pub fn union(self, other: SubsetDesc) -> SubsetDesc {
        SubsetDesc::Union { a: Box::new(self), b: Box::new(other) }
    }

    pub fn intersection(self, other: SubsetDesc) -> SubsetDesc {
        SubsetDesc::Intersection { a: Box::new(self), b: Box::new(other) }
    }

    pub fn dim(&self) -> usize {
        match self {
            SubsetDesc::Periodic { modulus, .. } => modulus.len(),
            SubsetDesc::Explicit { window, .. } => window.dim().unwrap_or(1),
            SubsetDesc::BlockUnion { .. } => 1,
            SubsetDesc::Shift { inner, .. } | SubsetDesc::Complement { inner } => inner.dim(),
            SubsetDesc::Union { a, .. } | SubsetDesc::Intersection { a, .. } => a.dim(),
        }
    }

    /// Exact membership query.
    pub fn contains(&self, g: &GroupElem) -> Result<bool> {
        match self {
            SubsetDesc::Periodic { modulus, residues } => {
                let r: Vec<u64> = g
                    .coords()
                    .iter()
                    .zip(modulus)
                    .map(|(&c, &m)| c.rem_euclid(m as i64) as u64)
                    .collect();
                Ok(residues.contains(&r))
            }
            SubsetDesc::Explicit { window, universe } => {
                if let Some((lo, hi)) = universe {
                    let inside = g
                        .coords()
                        .iter()
                        .zip(lo.iter().zip(hi))
                        .all(|(&c, (&l, &h))| l <= c && c <= h);
                    if !inside {
                        return Err(Error::UniverseExceeded(format!(
                            "query at {g} outside declared universe"
                        )));
                    }
                }
                Ok(window.contains(g))
            }
            SubsetDesc::BlockUnion { j0, j1, start, len } => {
                let n = g.as_scalar();
                let mut j = *j0;
                loop {
                    if let Some(j1) = j1 {
                        if j > *j1 {
                            return Ok(false);
                        }
                    } else if !start.is_unbounded_increasing() {
                        return Err(Error::usage(
                            "open-ended block rule requires increasing start",
                        ));
                    }
                    let s = start.value(j)?;
                    if j1.is_none() && s > n {
                        return Ok(false);
                    }
                    let l = len.value(j)?.max(0);
                    if s <= n && n < s.checked_add(l).ok_or_else(|| {
                        Error::Overflow("block end".into())
                    })? {
                        return Ok(true);
                    }
                    j += 1;
                    if j - j0 > 4096 {
                        return Err(Error::CapExceeded("block rule iteration".into()));
                    }
                }
            }
            SubsetDesc::Shift { inner, by } => inner.contains(&g.sub(by)),
            SubsetDesc::Complement { inner } => Ok(!inner.contains(g)?),
            SubsetDesc::Union { a, b } => Ok(a.contains(g)? || b.contains(g)?),
            SubsetDesc::Intersection { a, b } => Ok(a.contains(g)? && b.contains(g)?),
        }
    }

    /// Number of elements in the interval [lo, hi] of Z (d = 1).
    pub fn count_in_interval(&self, lo: i64, hi: i64) -> Result<u64> {
        debug_assert_eq!(self.dim(), 1);
        if lo > hi {
            return Ok(0);
        }
        // Fast closed forms where the structure allows them.
        match self {
            SubsetDesc::BlockUnion { j0, j1, start, len } => {
                let mut total = 0u64;
                let mut j = *j0;
                loop {
                    if let Some(j1) = j1 {
                        if j > *j1 {
                            break;
                        }
                    }
                    let s = start.value(j)?;
                    if j1.is_none() && s > hi {
                        break;
                    }
                    let l = len.value(j)?.max(0);
                    let a = s.max(lo);
                    let b = (s + l - 1).min(hi);
                    if a <= b {
                        total += (b - a + 1) as u64;
                    }
                    j += 1;
                    if j - j0 > 4096 {
                        return Err(Error::CapExceeded("block rule iteration".into()));
                    }
                }
                Ok(total)
            }
            SubsetDesc::Shift { inner, by } => {
                inner.count_in_interval(lo - by.as_scalar(), hi - by.as_scalar())
            }
            SubsetDesc::Complement { inner } => {
                Ok((hi - lo + 1) as u64 - inner.count_in_interval(lo, hi)?)
            }
            SubsetDesc::Periodic { modulus, residues } => {
                let m = modulus[0] as i64;
                let mut total = 0u64;
                for r in residues {
                    let r = r[0] as i64;
                    // count n in [lo, hi] with n ≡ r (mod m)
                    let first = lo + (r - lo).rem_euclid(m);
                    if first <= hi {
                        total += ((hi - first) / m + 1) as u64;
                    }
                }
                Ok(total)
            }
            _ => {
                let mut total = 0u64;
                for n in lo..=hi {
                    if self.contains(&GroupElem::scalar(n))? {
                        total += 1;
                    }
                }
                Ok(total)
            }
        }
    }

    pub fn normalize(&self) -> Result<Normalized> {
        normalize(self)
    }

    /// Canonical DSL text (d = 1 descriptions).
    pub fn to_dsl(&self) -> String {
        match self {
            SubsetDesc::Periodic { modulus, residues } => {
                let m = modulus[0];
                if residues.is_empty() {
                    return "{}".to_string();
                }
                let terms: Vec<String> = residues
                    .iter()
                    .map(|r| if r[0] == 0 { format!("{m}Z") } else { format!("{m}Z+{}", r[0]) })
                    .collect();
                join_union(terms)
            }
            SubsetDesc::Explicit { window, .. } => {
                let items: Vec<String> =
                    window.iter().map(|g| g.as_scalar().to_string()).collect();
                format!("{{{}}}", items.join(","))
            }
            SubsetDesc::BlockUnion { j0, j1, start, len } => {
                let hi = j1.map(|v| v.to_string()).unwrap_or_default();
                format!("blocks(j={j0}..{hi}: {}, {})", start.to_dsl(), len.to_dsl())
            }
            SubsetDesc::Shift { inner, by } => {
                format!("shift({}, {})", inner.to_dsl(), by.as_scalar())
            }
            SubsetDesc::Complement { inner } => format!("compl({})", inner.to_dsl()),
            SubsetDesc::Union { a, b } => format!("union({}, {})", a.to_dsl(), b.to_dsl()),
            SubsetDesc::Intersection { a, b } => {
                format!("inter({}, {})", a.to_dsl(), b.to_dsl())
            }
        }
    }
}

fn join_union(terms: Vec<String>) -> String {
    let mut it = terms.into_iter();
    let first = it.next().unwrap();
    it.fold(first, |acc, t| format!("union({acc}, {t})"))
}

/// Canonical form of the exactly-analyzable fragment: a periodic set
/// modified by finitely many insertions and deletions.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Normalized {
    PeriodicMod {
        modulus: Vec<u64>,
        residues: BTreeSet<Vec<u64>>,
        /// Points added on top of the periodic part (disjoint from it).
        plus: Window,
        /// Points removed from the periodic part (subset of it).
        minus: Window,
    },
    /// Contains a block rule or other non-periodic structure.
    Other,
}

impl Normalized {
    pub fn periodic(modulus: Vec<u64>, residues: BTreeSet<Vec<u64>>) -> Normalized {
        Normalized::PeriodicMod { modulus, residues, plus: Window::empty(), minus: Window::empty() }
    }

    /// Exact density |R|/prod(m) of the periodic part (defects wash out).
    pub fn exact_density(&self) -> Option<crate::numeric::Rat> {
        match self {
            Normalized::PeriodicMod { modulus, residues, .. } => {
                let m: u64 = modulus.iter().product();
                Some(crate::numeric::Rat::new(residues.len() as i64, m as i64))
            }
            Normalized::Other => None,
        }
    }

    pub fn is_finite(&self) -> bool {
        matches!(self, Normalized::PeriodicMod { residues, .. } if residues.is_empty())
    }
}

fn lcm(a: u64, b: u64) -> u64 {
    a / gcd(a, b) * b
}

fn gcd(a: u64, b: u64) -> u64 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

fn lift_residues(
    modulus: &[u64],
    residues: &BTreeSet<Vec<u64>>,
    target: &[u64],
) -> BTreeSet<Vec<u64>> {
    // Enumerate residues of the target modulus whose reduction lies in `residues`.
    let mut out = BTreeSet::new();
    let mut cur = vec![0u64; target.len()];
    loop {
        let reduced: Vec<u64> = cur.iter().zip(modulus).map(|(&c, &m)| c % m).collect();
        if residues.contains(&reduced) {
            out.insert(cur.clone());
        }
        let mut i = target.len();
        loop {
            if i == 0 {
                return out;
            }
            i -= 1;
            cur[i] += 1;
            if cur[i] < target[i] {
                break;
            }
            cur[i] = 0;
        }
    }
}

const NORMALIZE_PERIOD_CAP: u64 = 1 << 20;

fn normalize(desc: &SubsetDesc) -> Result<Normalized> {
    use Normalized::*;
    use SubsetDesc as D;
    Ok(match desc {
        D::Periodic { modulus, residues } => {
            Normalized::periodic(modulus.clone(), residues.clone())
        }
        D::Explicit { window, .. } => PeriodicMod {
            modulus: vec![1; window.dim().unwrap_or(1)],
            residues: BTreeSet::new(),
            plus: window.clone(),
            minus: Window::empty(),
        },
        D::BlockUnion { j1, .. } => {
            // A block union with few blocks is still a finite set, but density
            // analysis treats it by windowed scans; keep it out of the exact path.
            let _ = j1;
            Other
        }
        D::Shift { inner, by } => match normalize(inner)? {
            PeriodicMod { modulus, residues, plus, minus } => {
                let shifted: BTreeSet<Vec<u64>> = residues
                    .iter()
                    .map(|r| {
                        r.iter()
                            .zip(by.coords().iter().zip(&modulus))
                            .map(|(&ri, (&s, &m))| (ri as i64 + s).rem_euclid(m as i64) as u64)
                            .collect()
                    })
                    .collect();
                PeriodicMod {
                    modulus,
                    residues: shifted,
                    plus: plus.translate(by),
                    minus: minus.translate(by),
                }
            }
            Other => Other,
        },
        D::Complement { inner } => match normalize(inner)? {
            PeriodicMod { modulus, residues, plus, minus } => {
                let all: BTreeSet<Vec<u64>> = lift_residues(&vec![1; modulus.len()], &[vec![0; modulus.len()]].into_iter().collect(), &modulus);
                let comp: BTreeSet<Vec<u64>> = all.difference(&residues).cloned().collect();
                PeriodicMod { modulus, residues: comp, plus: minus, minus: plus }
            }
            Other => Other,
        },
        D::Union { a, b } => combine(desc, a, b, true)?,
        D::Intersection { a, b } => combine(desc, a, b, false)?,
    })
}

fn combine(orig: &SubsetDesc, a: &SubsetDesc, b: &SubsetDesc, union: bool) -> Result<Normalized> {
    let na = normalize(a)?;
    let nb = normalize(b)?;
    let (Normalized::PeriodicMod { modulus: ma, residues: ra, plus: pa, minus: qa },
         Normalized::PeriodicMod { modulus: mb, residues: rb, plus: pb, minus: qb }) = (&na, &nb)
    else {
        return Ok(Normalized::Other);
    };
    if ma.len() != mb.len() {
        return Err(Error::usage("dimension mismatch in set combinator"));
    }
    let m: Vec<u64> = ma.iter().zip(mb).map(|(&x, &y)| lcm(x, y)).collect();
    if m.iter().product::<u64>() > NORMALIZE_PERIOD_CAP {
        return Ok(Normalized::Other);
    }
    let la = lift_residues(ma, ra, &m);
    let lb = lift_residues(mb, rb, &m);
    let residues: BTreeSet<Vec<u64>> = if union {
        la.union(&lb).cloned().collect()
    } else {
        la.intersection(&lb).cloned().collect()
    };
    // Defects: re-evaluate membership of both operands on the union of the
    // defect supports; everything off that support follows the periodic parts.
    let mut support: Vec<GroupElem> = Vec::new();
    support.extend(pa.iter().chain(qa.iter()).chain(pb.iter()).chain(qb.iter()).copied());
    let support = Window::from_vec(support);
    let mut plus = Vec::new();
    let mut minus = Vec::new();
    for g in support.iter() {
        let actual = orig.contains(g)?;
        let r: Vec<u64> = g
            .coords()
            .iter()
            .zip(&m)
            .map(|(&c, &mm)| c.rem_euclid(mm as i64) as u64)
            .collect();
        let periodic = residues.contains(&r);
        if actual && !periodic {
            plus.push(*g);
        } else if !actual && periodic {
            minus.push(*g);
        }
    }
    Ok(Normalized::PeriodicMod {
        modulus: m,
        residues,
        plus: Window::from_vec(plus),
        minus: Window::from_vec(minus),
    })
}
