//! Vertex shifts of finite type on Z: adjacency graphs, the essential part,
//! strong connectivity, exact walk counting and gap connectivity.
//!
//! A word a_0 ... a_{n-1} is in the language iff every adjacent pair is an
//! allowed edge and the word extends to a bi-infinite walk, which after
//! trimming to the essential subgraph (every state has in- and out-degree
//! >= 1) is automatic.

use crate::error::{Error, Result};
use num::BigUint;
use serde::{Deserialize, Serialize};
use std::collections::HashMap;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SftGraph {
    /// allowed[a][b] = the word "ab" is admissible.
    pub allowed: Vec<Vec<bool>>,
}

impl SftGraph {
    pub fn new(allowed: Vec<Vec<bool>>) -> Result<SftGraph> {
        let k = allowed.len();
        if k == 0 || allowed.iter().any(|row| row.len() != k) {
            return Err(Error::usage("adjacency matrix must be square and nonempty"));
        }
        Ok(SftGraph { allowed })
    }

    pub fn from_matrix(m: &[Vec<u64>]) -> Result<SftGraph> {
        SftGraph::new(m.iter().map(|r| r.iter().map(|&v| v != 0).collect()).collect())
    }

    /// Golden-mean shift: forbid "11" over {0, 1}.
    pub fn golden_mean() -> SftGraph {
        SftGraph { allowed: vec![vec![true, true], vec![true, false]] }
    }

    pub fn symbols(&self) -> usize {
        self.allowed.len()
    }

    /// States surviving the iterated removal of sources and sinks. Only these
    /// symbols occur in bi-infinite walks.
    pub fn essential_states(&self) -> Vec<usize> {
        let k = self.symbols();
        let mut alive = vec![true; k];
        loop {
            let mut changed = false;
            for a in 0..k {
                if !alive[a] {
                    continue;
                }
                let has_out = (0..k).any(|b| alive[b] && self.allowed[a][b]);
                let has_in = (0..k).any(|b| alive[b] && self.allowed[b][a]);
                if !has_out || !has_in {
                    alive[a] = false;
                    changed = true;
                }
            }
            if !changed {
                break;
            }
        }
        (0..k).filter(|&a| alive[a]).collect()
    }

    pub fn is_essential_symbol(&self, a: usize) -> bool {
        self.essential_states().contains(&a)
    }

    /// Strong connectivity of the essential subgraph (Kosaraju on <= 64 states).
    pub fn is_irreducible(&self) -> bool {
        let states = self.essential_states();
        if states.is_empty() {
            return false;
        }
        let reach = |transpose: bool| -> usize {
            let mut seen: HashMap<usize, bool> = states.iter().map(|&s| (s, false)).collect();
            let mut stack = vec![states[0]];
            seen.insert(states[0], true);
            let mut count = 0;
            while let Some(a) = stack.pop() {
                count += 1;
                for &b in &states {
                    let edge = if transpose { self.allowed[b][a] } else { self.allowed[a][b] };
                    if edge && !seen[&b] {
                        seen.insert(b, true);
                        stack.push(b);
                    }
                }
            }
            count
        };
        reach(false) == states.len() && reach(true) == states.len()
    }

    /// Exact number of admissible words of length n (n >= 1).
    pub fn word_count(&self, n: usize) -> BigUint {
        let states = self.essential_states();
        if states.is_empty() || n == 0 {
            return BigUint::from(0u32);
        }
        let mut v: HashMap<usize, BigUint> =
            states.iter().map(|&s| (s, BigUint::from(1u32))).collect();
        for _ in 1..n {
            let mut next: HashMap<usize, BigUint> = HashMap::new();
            for &a in &states {
                let mut acc = BigUint::from(0u32);
                for &b in &states {
                    if self.allowed[a][b] {
                        acc += &v[&b];
                    }
                }
                next.insert(a, acc);
            }
            v = next;
        }
        states.iter().map(|s| v[s].clone()).sum()
    }

    /// Is there a walk from a to b with exactly `gap` edges through essential
    /// states? gap = 0 means a == b.
    pub fn connects(&self, a: usize, b: usize, gap: u64) -> bool {
        let states = self.essential_states();
        if !states.contains(&a) || !states.contains(&b) {
            return false;
        }
        if gap == 0 {
            return a == b;
        }
        let base = self.bool_matrix(&states);
        let m = bool_mat_pow(&base, gap);
        let ia = states.iter().position(|&s| s == a).unwrap();
        let ib = states.iter().position(|&s| s == b).unwrap();
        m[ia][ib]
    }

    /// Smallest g <= cap such that every ordered pair of essential states is
    /// connected by a walk of exactly g edges (None if the graph is not
    /// primitive within the cap).
    pub fn universal_gap(&self, cap: u64) -> Option<u64> {
        let states = self.essential_states();
        if states.is_empty() {
            return None;
        }
        let base = self.bool_matrix(&states);
        let mut m = identity(states.len());
        for g in 1..=cap {
            m = bool_mat_mul(&m, &base);
            if m.iter().all(|row| row.iter().all(|&v| v)) {
                return Some(g);
            }
        }
        None
    }

    fn bool_matrix(&self, states: &[usize]) -> Vec<Vec<bool>> {
        states
            .iter()
            .map(|&a| states.iter().map(|&b| self.allowed[a][b]).collect())
            .collect()
    }

    /// Is the word admissible edge-by-edge (symbols need not be essential)?
    pub fn word_allowed(&self, word: &[u8]) -> bool {
        word.windows(2).all(|w| self.allowed[w[0] as usize][w[1] as usize])
    }

    /// A shortest walk from a to b (inclusive ends) through essential states.
    pub fn path_between(&self, a: usize, b: usize) -> Option<Vec<u8>> {
        let states = self.essential_states();
        if !states.contains(&a) || !states.contains(&b) {
            return None;
        }
        let mut prev: HashMap<usize, usize> = HashMap::new();
        let mut queue = std::collections::VecDeque::from([a]);
        let mut seen = std::collections::HashSet::from([a]);
        while let Some(u) = queue.pop_front() {
            if u == b && u != a {
                break;
            }
            for &v in &states {
                if self.allowed[u][v] && seen.insert(v) {
                    prev.insert(v, u);
                    queue.push_back(v);
                }
            }
        }
        if a == b {
            return Some(vec![a as u8]);
        }
        if !prev.contains_key(&b) {
            return None;
        }
        let mut path = vec![b];
        let mut cur = b;
        while cur != a {
            cur = prev[&cur];
            path.push(cur);
        }
        path.reverse();
        Some(path.into_iter().map(|s| s as u8).collect())
    }
}

fn identity(n: usize) -> Vec<Vec<bool>> {
    (0..n).map(|i| (0..n).map(|j| i == j).collect()).collect()
}

fn bool_mat_mul(a: &[Vec<bool>], b: &[Vec<bool>]) -> Vec<Vec<bool>> {
    let n = a.len();
    let mut out = vec![vec![false; n]; n];
    for i in 0..n {
        for l in 0..n {
            if a[i][l] {
                for j in 0..n {
                    out[i][j] |= b[l][j];
                }
            }
        }
    }
    out
}

fn bool_mat_pow(base: &[Vec<bool>], mut e: u64) -> Vec<Vec<bool>> {
    let mut result = identity(base.len());
    let mut b = base.to_vec();
    while e > 0 {
        if e & 1 == 1 {
            result = bool_mat_mul(&result, &b);
        }
        b = bool_mat_mul(&b, &b);
        e >>= 1;
    }
    result
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn golden_word_counts_are_fibonacci() {
        let g = SftGraph::golden_mean();
        // 2, 3, 5, 8, 13, ...
        let want = [2u32, 3, 5, 8, 13, 21, 34];
        for (i, &w) in want.iter().enumerate() {
            assert_eq!(g.word_count(i + 1), BigUint::from(w));
        }
    }

    #[test]
    fn essential_trim() {
        // State 2 is a sink; it must be trimmed.
        let g = SftGraph::from_matrix(&[
            vec![1, 1, 1],
            vec![1, 0, 0],
            vec![0, 0, 0],
        ])
        .unwrap();
        assert_eq!(g.essential_states(), vec![0, 1]);
        assert!(g.is_irreducible());
    }

    #[test]
    fn two_fixed_points_not_irreducible() {
        let g = SftGraph::from_matrix(&[vec![1, 0], vec![0, 1]]).unwrap();
        assert!(!g.is_irreducible());
        assert_eq!(g.word_count(4), BigUint::from(2u32));
    }

    #[test]
    fn gap_connectivity() {
        let g = SftGraph::golden_mean();
        assert!(g.connects(1, 1, 2)); // 1 -> 0 -> 1
        assert!(!g.connects(1, 1, 1)); // "11" forbidden
        assert!(g.connects(0, 1, 3));
        assert_eq!(g.universal_gap(10), Some(2));
    }

    #[test]
    fn paths() {
        let g = SftGraph::golden_mean();
        let p = g.path_between(1, 1).unwrap();
        assert_eq!(p, vec![1]);
        let p01 = g.path_between(0, 1).unwrap();
        assert!(g.word_allowed(&p01));
        assert_eq!(*p01.first().unwrap(), 0);
        assert_eq!(*p01.last().unwrap(), 1);
    }
}
