//! The acting group Z^d: elements, finite windows, Følner sequences and
//! invariance defects.
//!
//! Everything is exact integer / rational arithmetic. The canonical
//! enumeration orders Z^d by max-norm shells, breaking ties inside a shell
//! lexicographically in the folded coordinate order 0, 1, -1, 2, -2, ...
//! so that `enumerate(1, 5) = [0, 1, -1, 2, -2]`.

use crate::error::{Error, Result};
use crate::numeric::Rat;
use serde::{Deserialize, Serialize};
use std::fmt;

/// Hard cap on the dimension of the acting group.
pub const MAX_DIM: usize = 4;

/// An element of Z^d, d <= MAX_DIM. Copy and cheap to move around.
#[derive(Clone, Copy, PartialEq, Eq, Hash)]
pub struct GroupElem {
    dim: u8,
    c: [i64; MAX_DIM],
}

impl GroupElem {
    pub fn new(coords: &[i64]) -> GroupElem {
        assert!(
            !coords.is_empty() && coords.len() <= MAX_DIM,
            "dimension must be in 1..={MAX_DIM}"
        );
        let mut c = [0i64; MAX_DIM];
        c[..coords.len()].copy_from_slice(coords);
        GroupElem { dim: coords.len() as u8, c }
    }

    pub fn zero(dim: usize) -> GroupElem {
        GroupElem::new(&vec![0; dim])
    }

    /// Shorthand for an element of Z.
    pub fn scalar(n: i64) -> GroupElem {
        GroupElem::new(&[n])
    }

    pub fn dim(&self) -> usize {
        self.dim as usize
    }

    pub fn coords(&self) -> &[i64] {
        &self.c[..self.dim as usize]
    }

    /// For d = 1, the single coordinate.
    pub fn as_scalar(&self) -> i64 {
        debug_assert_eq!(self.dim, 1);
        self.c[0]
    }

    pub fn add(&self, other: &GroupElem) -> GroupElem {
        assert_eq!(self.dim, other.dim, "dimension mismatch");
        let mut c = self.c;
        for i in 0..self.dim as usize {
            c[i] += other.c[i];
        }
        GroupElem { dim: self.dim, c }
    }

    pub fn neg(&self) -> GroupElem {
        let mut c = self.c;
        for v in c.iter_mut().take(self.dim as usize) {
            *v = -*v;
        }
        GroupElem { dim: self.dim, c }
    }

    pub fn sub(&self, other: &GroupElem) -> GroupElem {
        self.add(&other.neg())
    }

    pub fn is_zero(&self) -> bool {
        self.coords().iter().all(|&v| v == 0)
    }

    pub fn max_norm(&self) -> i64 {
        self.coords().iter().map(|v| v.abs()).max().unwrap_or(0)
    }

    /// Folded coordinate key: 0 -> 0, n -> 2n, -n -> 2n+1 (n > 0).
    fn fold_key(&self) -> [u64; MAX_DIM] {
        let mut k = [0u64; MAX_DIM];
        for i in 0..self.dim as usize {
            let v = self.c[i];
            k[i] = if v >= 0 { 2 * v as u64 } else { 2 * (-v) as u64 + 1 };
        }
        k
    }
}

impl PartialOrd for GroupElem {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for GroupElem {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.coords().cmp(other.coords())
    }
}

impl fmt::Debug for GroupElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.dim == 1 {
            write!(f, "{}", self.c[0])
        } else {
            write!(f, "({})", self.coords().iter().map(|v| v.to_string()).collect::<Vec<_>>().join(","))
        }
    }
}

impl fmt::Display for GroupElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

impl Serialize for GroupElem {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.coords().serialize(s)
    }
}

impl<'de> Deserialize<'de> for GroupElem {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let v = Vec::<i64>::deserialize(d)?;
        if v.is_empty() || v.len() > MAX_DIM {
            return Err(serde::de::Error::custom("dimension out of range"));
        }
        Ok(GroupElem::new(&v))
    }
}

/// A finite subset of Z^d, stored sorted and deduplicated.
#[derive(Clone, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub struct Window {
    elems: Vec<GroupElem>,
}

impl Window {
    pub fn from_vec(mut elems: Vec<GroupElem>) -> Window {
        elems.sort();
        elems.dedup();
        Window { elems }
    }

    pub fn empty() -> Window {
        Window { elems: Vec::new() }
    }

    /// The interval [lo, hi] in Z.
    pub fn interval(lo: i64, hi: i64) -> Window {
        Window { elems: (lo..=hi).map(GroupElem::scalar).collect() }
    }

    /// The box [lo, hi]^d in Z^d.
    pub fn centered_box(dim: usize, radius: i64) -> Window {
        Window::boxed(dim, -radius, radius)
    }

    pub fn boxed(dim: usize, lo: i64, hi: i64) -> Window {
        assert!(dim >= 1 && dim <= MAX_DIM && lo <= hi);
        let mut elems = Vec::new();
        let mut cur = vec![lo; dim];
        loop {
            elems.push(GroupElem::new(&cur));
            let mut i = dim;
            loop {
                if i == 0 {
                    return Window { elems };
                }
                i -= 1;
                if cur[i] < hi {
                    cur[i] += 1;
                    for v in cur.iter_mut().skip(i + 1) {
                        *v = lo;
                    }
                    break;
                }
            }
        }
    }

    pub fn len(&self) -> usize {
        self.elems.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elems.is_empty()
    }

    pub fn contains(&self, g: &GroupElem) -> bool {
        self.elems.binary_search(g).is_ok()
    }

    pub fn iter(&self) -> impl Iterator<Item = &GroupElem> {
        self.elems.iter()
    }

    pub fn elems(&self) -> &[GroupElem] {
        &self.elems
    }

    pub fn translate(&self, g: &GroupElem) -> Window {
        // Adding a constant preserves sort order.
        Window { elems: self.elems.iter().map(|e| e.add(g)).collect() }
    }

    pub fn dim(&self) -> Option<usize> {
        self.elems.first().map(|e| e.dim())
    }

    /// |A ∩ (A + g)| by binary search.
    pub fn translate_overlap(&self, g: &GroupElem) -> usize {
        self.elems.iter().filter(|e| self.contains(&e.add(g))).count()
    }
}

/// The canonical enumeration g_1, g_2, ... of Z^d.
pub fn enumerate(dim: usize, count: usize) -> Result<Vec<GroupElem>> {
    if count == 0 {
        return Err(Error::usage("enumeration count must be >= 1"));
    }
    if dim == 0 || dim > MAX_DIM {
        return Err(Error::usage(format!("dimension must be in 1..={MAX_DIM}")));
    }
    let mut out = Vec::with_capacity(count);
    let mut shell: i64 = 0;
    while out.len() < count {
        let mut members = shell_members(dim, shell);
        members.sort_by_key(|e| e.fold_key());
        for e in members {
            out.push(e);
            if out.len() == count {
                break;
            }
        }
        shell += 1;
    }
    Ok(out)
}

fn shell_members(dim: usize, s: i64) -> Vec<GroupElem> {
    if s == 0 {
        return vec![GroupElem::zero(dim)];
    }
    let mut out = Vec::new();
    let mut cur = vec![-s; dim];
    'outer: loop {
        if cur.iter().any(|v| v.abs() == s) {
            out.push(GroupElem::new(&cur));
        }
        let mut i = dim;
        loop {
            if i == 0 {
                break 'outer;
            }
            i -= 1;
            if cur[i] < s {
                cur[i] += 1;
                for v in cur.iter_mut().skip(i + 1) {
                    *v = -s;
                }
                break;
            }
        }
    }
    out
}

/// How the box side length grows with the index n.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum GrowthRule {
    /// radius or side = scale * n
    Linear { scale: u32 },
}

impl GrowthRule {
    fn value(&self, n: usize) -> i64 {
        match self {
            GrowthRule::Linear { scale } => (*scale as i64) * (n as i64),
        }
    }
}

/// Shift applied to the n-th box of a shifted-box sequence.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum ShiftRule {
    /// s_n = 2^n along the first axis.
    PowerOfTwo,
    /// Explicit shift per index (1-based).
    Explicit(Vec<GroupElem>),
}

/// A recipe for a Følner sequence in Z^d.
///
/// Boxes in Z^d provably satisfy |gF_n Δ F_n|/|F_n| -> 0 for every g; an
/// `ExplicitList` carries no such guarantee and is flagged unchecked.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum FolnerSpec {
    /// F_n = [-r(n), r(n)]^d
    CenteredBoxes { dim: usize, growth: GrowthRule },
    /// F_n = [0, r(n))^d + s_n
    ShiftedBoxes { dim: usize, growth: GrowthRule, shifts: ShiftRule },
    /// Arbitrary user-supplied windows; invariance unchecked.
    ExplicitList { windows: Vec<Window> },
}

impl FolnerSpec {
    pub fn centered(dim: usize) -> FolnerSpec {
        FolnerSpec::CenteredBoxes { dim, growth: GrowthRule::Linear { scale: 1 } }
    }

    pub fn is_checked(&self) -> bool {
        !matches!(self, FolnerSpec::ExplicitList { .. })
    }

    pub fn dim(&self) -> Option<usize> {
        match self {
            FolnerSpec::CenteredBoxes { dim, .. } | FolnerSpec::ShiftedBoxes { dim, .. } => Some(*dim),
            FolnerSpec::ExplicitList { windows } => windows.first().and_then(|w| w.dim()),
        }
    }

    /// The n-th window, n >= 1.
    pub fn window(&self, n: usize) -> Result<Window> {
        if n == 0 {
            return Err(Error::usage("Følner index must be >= 1"));
        }
        match self {
            FolnerSpec::CenteredBoxes { dim, growth } => {
                Ok(Window::centered_box(*dim, growth.value(n)))
            }
            FolnerSpec::ShiftedBoxes { dim, growth, shifts } => {
                let side = growth.value(n);
                if side < 1 {
                    return Err(Error::usage("degenerate box"));
                }
                let base = Window::boxed(*dim, 0, side - 1);
                let shift = match shifts {
                    ShiftRule::PowerOfTwo => {
                        let mut c = vec![0i64; *dim];
                        c[0] = 1i64
                            .checked_shl(n as u32)
                            .ok_or_else(|| Error::Overflow("2^n shift".into()))?;
                        GroupElem::new(&c)
                    }
                    ShiftRule::Explicit(list) => *list
                        .get(n - 1)
                        .ok_or_else(|| Error::usage(format!("shift index {n} beyond list")))?,
                };
                Ok(base.translate(&shift))
            }
            FolnerSpec::ExplicitList { windows } => windows
                .get(n - 1)
                .cloned()
                .ok_or_else(|| Error::usage(format!("index {n} beyond explicit list"))),
        }
    }
}

/// |gA Δ A| / |A| as an exact rational; lands in [0, 2].
pub fn invariance_defect(a: &Window, g: &GroupElem) -> Rat {
    assert!(!a.is_empty(), "defect of empty window");
    let overlap = a.translate_overlap(g);
    Rat::new(2 * (a.len() as i64 - overlap as i64), a.len() as i64)
}

/// Exact evaluation of (F, eps)-invariance: |{s in A : F + s ⊆ A}| >= (1-eps)|A|.
pub fn is_invariant(a: &Window, f: &Window, eps: &Rat) -> bool {
    assert!(!a.is_empty() && !f.is_empty());
    let good = a
        .iter()
        .filter(|s| f.iter().all(|t| a.contains(&t.add(s))))
        .count();
    // good >= (1 - eps) * |A|  <=>  good * 1 >= |A| - eps*|A|
    let lhs = Rat::int(good as i64);
    let rhs = (Rat::one() - eps.clone()) * Rat::int(a.len() as i64);
    lhs >= rhs
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn enumeration_shell_order() {
        let e = enumerate(1, 5).unwrap();
        let want: Vec<i64> = vec![0, 1, -1, 2, -2];
        assert_eq!(e.iter().map(|g| g.as_scalar()).collect::<Vec<_>>(), want);

        let e2 = enumerate(2, 1).unwrap();
        assert_eq!(e2[0], GroupElem::zero(2));

        assert!(enumerate(1, 0).is_err());
    }

    #[test]
    fn enumeration_2d_first_shell() {
        let e = enumerate(2, 9).unwrap();
        let coords: Vec<Vec<i64>> = e.iter().map(|g| g.coords().to_vec()).collect();
        assert_eq!(coords[0], vec![0, 0]);
        // Shell 1 in folded-lex order.
        assert_eq!(coords[1], vec![0, 1]);
        assert_eq!(coords[2], vec![0, -1]);
        assert_eq!(coords[3], vec![1, 0]);
        assert_eq!(coords[4], vec![1, 1]);
        assert_eq!(coords[5], vec![1, -1]);
        assert_eq!(coords[6], vec![-1, 0]);
        assert_eq!(coords[7], vec![-1, 1]);
        assert_eq!(coords[8], vec![-1, -1]);
    }

    #[test]
    fn enumeration_is_injective() {
        let e = enumerate(2, 200).unwrap();
        let mut seen = std::collections::HashSet::new();
        for g in &e {
            assert!(seen.insert(*g));
        }
        // Shells are exhausted in order: norms are nondecreasing.
        for w in e.windows(2) {
            assert!(w[0].max_norm() <= w[1].max_norm());
        }
    }

    #[test]
    fn folner_windows() {
        let f = FolnerSpec::centered(1);
        let w = f.window(3).unwrap();
        assert_eq!(w.len(), 7);
        assert!(w.contains(&GroupElem::scalar(-3)) && w.contains(&GroupElem::scalar(3)));

        let s = FolnerSpec::ShiftedBoxes {
            dim: 1,
            growth: GrowthRule::Linear { scale: 1 },
            shifts: ShiftRule::PowerOfTwo,
        };
        let w2 = s.window(2).unwrap();
        assert_eq!(
            w2.iter().map(|g| g.as_scalar()).collect::<Vec<_>>(),
            vec![4, 5]
        );

        let b = FolnerSpec::CenteredBoxes { dim: 2, growth: GrowthRule::Linear { scale: 1 } };
        assert_eq!(b.window(1).unwrap().len(), 9);

        let ex = FolnerSpec::ExplicitList { windows: vec![Window::interval(0, 1)] };
        assert!(ex.window(2).is_err());
        assert!(!ex.is_checked());
    }

    #[test]
    fn defect_examples() {
        let a = Window::interval(0, 99);
        assert_eq!(invariance_defect(&a, &GroupElem::scalar(1)), Rat::new(2, 100));
        assert_eq!(invariance_defect(&a, &GroupElem::scalar(0)), Rat::zero());
        let single = Window::interval(0, 0);
        assert_eq!(invariance_defect(&single, &GroupElem::scalar(5)), Rat::int(2));
    }

    #[test]
    fn defect_box_bound() {
        // For boxes: defect(F_n, g) <= 2 d |g|_inf (2n+1)^(d-1) / (2n+1)^d.
        for dim in 1..=2usize {
            let spec = FolnerSpec::centered(dim);
            for n in [2usize, 5, 9] {
                let w = spec.window(n).unwrap();
                for g in [
                    GroupElem::new(&vec![1; dim]),
                    GroupElem::new(&vec![2; dim]),
                ] {
                    let defect = invariance_defect(&w, &g);
                    let side = 2 * n as i64 + 1;
                    let bound = Rat::new(2 * dim as i64 * g.max_norm(), side);
                    assert!(defect <= bound, "defect {defect} > bound {bound}");
                }
            }
        }
    }

    #[test]
    fn invariance_examples() {
        let a = Window::interval(0, 99);
        let f = Window::from_vec(vec![GroupElem::scalar(0), GroupElem::scalar(1)]);
        assert!(is_invariant(&a, &f, &Rat::new(2, 100)));
        assert!(!is_invariant(&a, &f, &Rat::new(5, 1000)));
        let id = Window::from_vec(vec![GroupElem::scalar(0)]);
        assert!(is_invariant(&a, &id, &Rat::zero()));
    }

    #[test]
    fn invariance_monotone_in_eps() {
        let a = Window::interval(0, 30);
        let f = Window::interval(0, 3);
        let mut prev = false;
        for k in 0..=10 {
            let eps = Rat::new(k, 10);
            let v = is_invariant(&a, &f, &eps);
            assert!(!prev || v, "monotonicity in eps violated");
            prev = v;
        }
    }
}
