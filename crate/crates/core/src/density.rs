//! Upper/lower Banach density and Følner asymptotic densities.
//!
//! Periodic descriptions (including finite modifications) get exact values:
//! for a set with residues R modulo m the translate supremum cycles through
//! the residues and one full period attains the infimum, so BD* = |R|/m as a
//! point interval. Everything else is handled by windowed scans whose scope
//! (window schedule, shift radius) is recorded in the estimate.
//!
//! Windowed semantics: the upper bound is min over scheduled window lengths
//! of the in-scope translate supremum of |E ∩ (F+g)|/|F|. The lower bound is
//! the density of the largest window anchored at the best placement found, a
//! stage value of a concrete shifted-window Følner sequence; it estimates an
//! asymptotic density, which never exceeds BD*. When finite-stage wobble
//! pushes it above the upper bound it is clamped and the raw value kept in
//! the evidence block.

use crate::error::{Error, Result};
use crate::group::{FolnerSpec, GroupElem, Window};
use crate::numeric::Rat;
use crate::subset::{Normalized, SubsetDesc};
use serde::{Deserialize, Serialize};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Method {
    ExactPeriodic,
    Windowed,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DensityParams {
    /// Largest window length in the schedule.
    pub n_max: usize,
    /// Translates searched: g in [-shift_radius, shift_radius].
    pub shift_radius: i64,
}

impl Default for DensityParams {
    fn default() -> Self {
        DensityParams { n_max: 24, shift_radius: 512 }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize, Default)]
pub struct DensityEvidence {
    /// Window length attaining the upper bound.
    pub best_len: Option<usize>,
    /// Placement attaining the supremum at that length.
    pub best_shift: Option<i64>,
    /// Anchored stage ratio before clamping, when it exceeded the upper bound.
    pub raw_lower: Option<Rat>,
}

/// A certified interval for a density value.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DensityEstimate {
    pub lower: Rat,
    pub upper: Rat,
    pub method: Method,
    pub params: DensityParams,
    pub evidence: DensityEvidence,
}

impl DensityEstimate {
    fn exact(v: Rat, params: DensityParams) -> DensityEstimate {
        DensityEstimate {
            lower: v.clone(),
            upper: v,
            method: Method::ExactPeriodic,
            params,
            evidence: DensityEvidence::default(),
        }
    }

    pub fn is_exact(&self) -> bool {
        self.method == Method::ExactPeriodic
    }

    pub fn as_interval(&self) -> crate::numeric::Interval {
        crate::numeric::Interval::new(self.lower.clone(), self.upper.clone())
    }
}

/// Upper Banach density BD*(E).
pub fn banach_upper_density(e: &SubsetDesc, params: &DensityParams) -> Result<DensityEstimate> {
    if params.n_max == 0 {
        return Err(Error::usage("n_max must be >= 1"));
    }
    match e.normalize()? {
        n @ Normalized::PeriodicMod { .. } => {
            let d = n.exact_density().expect("periodic normal form");
            Ok(DensityEstimate::exact(d, params.clone()))
        }
        Normalized::Other => windowed_upper_density(e, params),
    }
}

/// Lower Banach density BD_*(E) = 1 - BD*(complement of E).
pub fn banach_lower_density(e: &SubsetDesc, params: &DensityParams) -> Result<DensityEstimate> {
    let comp = e.clone().complement();
    let est = banach_upper_density(&comp, params)?;
    Ok(DensityEstimate {
        lower: Rat::one() - est.upper,
        upper: Rat::one() - est.lower,
        method: est.method,
        params: est.params,
        evidence: est.evidence,
    })
}

fn windowed_upper_density(e: &SubsetDesc, params: &DensityParams) -> Result<DensityEstimate> {
    if e.dim() != 1 {
        return Err(Error::Unsupported(
            "windowed density scans are implemented for Z only".into(),
        ));
    }
    let r = params.shift_radius;
    let n_max = params.n_max as i64;
    let mut upper: Option<(Rat, usize, i64)> = None;
    let mut anchored: Option<Rat> = None;
    for len in 1..=n_max {
        // sup over g in [-r, r] of |E ∩ [g, g+len)| / len
        let mut best: Option<(u64, i64)> = None;
        let mut g = -r;
        while g <= r {
            let c = e.count_in_interval(g, g + len - 1)?;
            if best.map_or(true, |(bc, _)| c > bc) {
                best = Some((c, g));
            }
            g += 1;
        }
        let (count, at) = best.expect("nonempty scope");
        let ratio = Rat::new(count as i64, len);
        if upper.as_ref().map_or(true, |(u, _, _)| &ratio < u) {
            upper = Some((ratio.clone(), len as usize, at));
        }
        if len == n_max {
            anchored = Some(ratio);
        }
    }
    let (upper, best_len, best_shift) = upper.expect("nonempty schedule");
    let stage = anchored.expect("nonempty schedule");
    let (lower, raw_lower) = if stage <= upper {
        (stage, None)
    } else {
        (upper.clone(), Some(stage))
    };
    Ok(DensityEstimate {
        lower,
        upper,
        method: Method::Windowed,
        params: params.clone(),
        evidence: DensityEvidence {
            best_len: Some(best_len),
            best_shift: Some(best_shift),
            raw_lower,
        },
    })
}

/// One row of an asymptotic-density table.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DensityRow {
    pub n: usize,
    pub window_size: u64,
    pub count: u64,
    pub ratio: Rat,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AsymptoticDensity {
    pub rows: Vec<DensityRow>,
    /// Max of the ratios over the tail half of the computed range.
    pub upper_empirical: Rat,
    /// Min of the ratios over the tail half of the computed range.
    pub lower_empirical: Rat,
    /// Exact limit, present only for periodic descriptions.
    pub exact_limit: Option<Rat>,
}

/// Exact ratios |E ∩ F_n|/|F_n| along a Følner sequence, with empirical
/// limsup/liminf over the computed range. Only periodic descriptions earn an
/// exact-limit claim.
pub fn asymptotic_density(
    e: &SubsetDesc,
    folner: &FolnerSpec,
    indices: &[usize],
) -> Result<AsymptoticDensity> {
    if indices.is_empty() {
        return Err(Error::usage("empty index range"));
    }
    let mut rows = Vec::with_capacity(indices.len());
    for &n in indices {
        let w = folner.window(n)?;
        let count = count_in_window(e, &w)?;
        rows.push(DensityRow {
            n,
            window_size: w.len() as u64,
            count,
            ratio: Rat::new(count as i64, w.len() as i64),
        });
    }
    let tail_start = rows.len() / 2;
    let tail = &rows[tail_start..];
    let upper_empirical = tail.iter().map(|r| r.ratio.clone()).max().unwrap();
    let lower_empirical = tail.iter().map(|r| r.ratio.clone()).min().unwrap();
    let exact_limit = e.normalize()?.exact_density();
    Ok(AsymptoticDensity { rows, upper_empirical, lower_empirical, exact_limit })
}

fn count_in_window(e: &SubsetDesc, w: &Window) -> Result<u64> {
    // Interval windows in Z go through the closed-form counter.
    if e.dim() == 1 && w.dim() == Some(1) && !w.is_empty() {
        let lo = w.elems()[0].as_scalar();
        let hi = w.elems()[w.len() - 1].as_scalar();
        if (hi - lo + 1) as usize == w.len() {
            return e.count_in_interval(lo, hi);
        }
    }
    let mut c = 0;
    for g in w.iter() {
        if e.contains(g)? {
            c += 1;
        }
    }
    Ok(c)
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct CalculusCheck {
    pub name: String,
    pub pass: bool,
    pub details: String,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct CalculusReport {
    pub checks: Vec<CalculusCheck>,
    pub all_pass: bool,
}

/// Exact verification of the Banach-density calculus on periodic inputs:
/// shift invariance, monotonicity, complement duality, and the density-one
/// lemmas (intersection and translate of density-one sets).
pub fn verify_density_calculus(
    e1: &SubsetDesc,
    e2: &SubsetDesc,
    s: &GroupElem,
    params: &DensityParams,
) -> Result<CalculusReport> {
    let n1 = e1.normalize()?;
    let n2 = e2.normalize()?;
    if matches!(n1, Normalized::Other) || matches!(n2, Normalized::Other) {
        return Err(Error::usage(
            "density calculus verification requires exactly-periodic inputs",
        ));
    }
    let bd = |e: &SubsetDesc| -> Result<Rat> { Ok(banach_upper_density(e, params)?.upper) };
    let mut checks = Vec::new();

    // Shift invariance: BD*(E1 + s) = BD*(E1).
    let d1 = bd(e1)?;
    let d1s = bd(&e1.clone().shift(*s))?;
    checks.push(CalculusCheck {
        name: "shift_invariance".into(),
        pass: d1 == d1s,
        details: format!("BD*(E1)={d1} BD*(E1+{s})={d1s}"),
    });

    // Monotonicity on constructed nesting: E1 ∩ E2 ⊆ E1 ⊆ E1 ∪ E2.
    let inter = e1.clone().intersection(e2.clone());
    let uni = e1.clone().union(e2.clone());
    let di = bd(&inter)?;
    let du = bd(&uni)?;
    checks.push(CalculusCheck {
        name: "monotonicity".into(),
        pass: di <= d1 && d1 <= du,
        details: format!("BD*(E1∩E2)={di} <= BD*(E1)={d1} <= BD*(E1∪E2)={du}"),
    });
    // Direct nesting when the caller passed nested sets.
    if subset_of(e1, e2)? {
        let d2 = bd(e2)?;
        checks.push(CalculusCheck {
            name: "monotonicity_direct".into(),
            pass: d1 <= d2,
            details: format!("E1 ⊆ E2: BD*(E1)={d1} <= BD*(E2)={d2}"),
        });
    }

    // Complement duality: BD_*(E1) = 1 - BD*(complement) and BD_* <= BD*.
    let low = banach_lower_density(e1, params)?.upper;
    let comp = bd(&e1.clone().complement())?;
    checks.push(CalculusCheck {
        name: "complement_duality".into(),
        pass: low.clone() + comp.clone() == Rat::one() && low <= d1,
        details: format!("BD_*(E1)={low} BD*(∁E1)={comp}"),
    });

    // Density-one calculus: F_i = complement of a finite chunk of E_i.
    let chunk = |e: &SubsetDesc| -> Result<SubsetDesc> {
        let mut pts = Vec::new();
        for n in -8..=8 {
            let g = GroupElem::scalar(n);
            if e.contains(&g)? {
                pts.push(g);
            }
        }
        Ok(SubsetDesc::finite(Window::from_vec(pts)).complement())
    };
    let f1 = chunk(e1)?;
    let f2 = chunk(e2)?;
    let df1 = bd(&f1)?;
    let df2 = bd(&f2)?;
    let dfi = bd(&f1.clone().intersection(f2.clone()))?;
    let dft = bd(&f1.clone().shift(*s))?;
    let one = Rat::one();
    checks.push(CalculusCheck {
        name: "density_one_intersection".into(),
        pass: df1 == one && df2 == one && dfi == one,
        details: format!("BD(F1)={df1} BD(F2)={df2} BD(F1∩F2)={dfi}"),
    });
    checks.push(CalculusCheck {
        name: "density_one_translate".into(),
        pass: dft == one,
        details: format!("BD(F1+{s})={dft}"),
    });

    let all_pass = checks.iter().all(|c| c.pass);
    Ok(CalculusReport { checks, all_pass })
}

/// E1 ⊆ E2, decided exactly on the common period plus defect supports.
fn subset_of(e1: &SubsetDesc, e2: &SubsetDesc) -> Result<bool> {
    if e1.dim() != 1 || e2.dim() != 1 {
        return Ok(false);
    }
    let (period, defect_support) = match (e1.normalize()?, e2.normalize()?) {
        (
            Normalized::PeriodicMod { modulus: m1, plus: p1, minus: q1, .. },
            Normalized::PeriodicMod { modulus: m2, plus: p2, minus: q2, .. },
        ) => {
            let m = m1[0] / gcd(m1[0], m2[0]) * m2[0];
            let mut extra: Vec<i64> = Vec::new();
            for w in [&p1, &q1, &p2, &q2] {
                extra.extend(w.iter().map(|g| g.as_scalar()));
            }
            (m, extra)
        }
        _ => return Ok(false),
    };
    for n in 0..period as i64 {
        let g = GroupElem::scalar(n);
        if e1.contains(&g)? && !e2.contains(&g)? {
            return Ok(false);
        }
    }
    for n in defect_support {
        let g = GroupElem::scalar(n);
        if e1.contains(&g)? && !e2.contains(&g)? {
            return Ok(false);
        }
    }
    Ok(true)
}

fn gcd(a: u64, b: u64) -> u64 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::subset::IntExpr;

    fn block_set() -> SubsetDesc {
        // ⋃_j [2^j, 2^j + j), j = 1..40
        SubsetDesc::BlockUnion {
            j0: 1,
            j1: Some(40),
            start: IntExpr::power(1, 2),
            len: IntExpr::linear(1, 0),
        }
    }

    #[test]
    fn exact_progressions() {
        let p = DensityParams::default();
        for a in 2..=12u64 {
            for b in 0..a as i64 {
                let est = banach_upper_density(&SubsetDesc::progression(a, b), &p).unwrap();
                assert!(est.is_exact());
                assert_eq!(est.upper, Rat::new(1, a as i64));
                let low = banach_lower_density(&SubsetDesc::progression(a, b), &p).unwrap();
                assert_eq!(low.lower, Rat::new(1, a as i64));
            }
        }
    }

    #[test]
    fn exact_edge_sets() {
        let p = DensityParams::default();
        let full = SubsetDesc::full(1);
        assert_eq!(banach_upper_density(&full, &p).unwrap().upper, Rat::one());
        let fin = SubsetDesc::finite(Window::interval(3, 17));
        let est = banach_upper_density(&fin, &p).unwrap();
        assert!(est.is_exact());
        assert_eq!(est.upper, Rat::zero());
        assert_eq!(banach_lower_density(&SubsetDesc::full(1), &p).unwrap().lower, Rat::one());
    }

    #[test]
    fn windowed_block_set() {
        // Long blocks keep the translate supremum at 1 for every length <= 12,
        // and the anchored lower bound lands on a full block.
        let p = DensityParams { n_max: 12, shift_radius: 5000 };
        let est = banach_upper_density(&block_set(), &p).unwrap();
        assert_eq!(est.method, Method::Windowed);
        assert_eq!(est.upper, Rat::one());
        assert!(est.lower >= Rat::new(11, 12), "lower = {}", est.lower);
    }

    #[test]
    fn block_set_lower_banach_density_is_zero() {
        // The complement contains arbitrarily long runs, so within the scanned
        // scope its translate supremum is 1 at every length.
        let p = DensityParams { n_max: 12, shift_radius: 5000 };
        let est = banach_lower_density(&block_set(), &p).unwrap();
        assert_eq!(est.upper, Rat::zero());
    }

    #[test]
    fn asymptotic_density_periodic() {
        let e = SubsetDesc::progression(2, 0);
        let f = FolnerSpec::centered(1);
        let idx: Vec<usize> = (1..=100).collect();
        let a = asymptotic_density(&e, &f, &idx).unwrap();
        assert_eq!(a.exact_limit, Some(Rat::new(1, 2)));
        for row in &a.rows {
            let err = (row.ratio.clone() - Rat::new(1, 2)).abs();
            assert!(err <= Rat::new(1, 2 * row.n as i64 + 1));
        }
    }

    #[test]
    fn asymptotic_density_blocks_vanishes() {
        let f = FolnerSpec::centered(1);
        let a = asymptotic_density(&block_set(), &f, &[1 << 14]).unwrap();
        assert!(a.rows[0].ratio < Rat::new(1, 100));
        assert!(a.exact_limit.is_none());
    }

    #[test]
    fn asymptotic_density_empty() {
        let e = SubsetDesc::finite(Window::empty());
        let f = FolnerSpec::centered(1);
        let a = asymptotic_density(&e, &f, &[1, 2, 3]).unwrap();
        assert!(a.rows.iter().all(|r| r.ratio.is_zero()));
    }

    #[test]
    fn calculus_report_passes() {
        let p = DensityParams::default();
        let e1 = SubsetDesc::progression(2, 0);
        let e2 = SubsetDesc::progression(2, 0).union(SubsetDesc::progression(3, 0));
        let rep = verify_density_calculus(&e1, &e2, &GroupElem::scalar(7), &p).unwrap();
        assert!(rep.all_pass, "{:?}", rep.checks);
        // Nested pair: residues {0,2,3,4} mod 6 give BD*(E2) = 2/3.
        let direct = rep.checks.iter().find(|c| c.name == "monotonicity_direct").unwrap();
        assert!(direct.details.contains("2/3"), "{}", direct.details);
        let est = banach_upper_density(&e2, &p).unwrap();
        assert_eq!(est.upper, Rat::new(2, 3));
    }

    #[test]
    fn calculus_rejects_inexact() {
        let p = DensityParams::default();
        let err =
            verify_density_calculus(&block_set(), &SubsetDesc::full(1), &GroupElem::scalar(1), &p);
        assert!(err.is_err());
    }

    #[test]
    fn subadditivity_on_periodic() {
        let p = DensityParams::default();
        let e1 = SubsetDesc::progression(4, 1);
        let e2 = SubsetDesc::progression(6, 3);
        let du = banach_upper_density(&e1.clone().union(e2.clone()), &p).unwrap().upper;
        let d1 = banach_upper_density(&e1, &p).unwrap().upper;
        let d2 = banach_upper_density(&e2, &p).unwrap().upper;
        assert!(du <= d1 + d2);
    }
}
