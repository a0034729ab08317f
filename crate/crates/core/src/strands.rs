//! Strand diagrams: the basis combinatorics of the raw strands algebra.
//!
//! A diagram is a bijection from a source point set to a target point set
//! that never moves a point down. Products compose when the inversion count
//! adds; the differential resolves one crossing at a time.

use std::fmt;

/// A strand diagram (S, T, phi), stored as the source-sorted list of strands
/// (s, phi(s)) with phi(s) >= s.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct StrandDiagram {
    strands: Vec<(u8, u8)>,
}

impl StrandDiagram {
    pub fn new(mut strands: Vec<(u8, u8)>) -> Self {
        strands.sort_unstable();
        let d = StrandDiagram { strands };
        debug_assert!(d.strands.iter().all(|&(s, t)| t >= s), "strand moves down");
        debug_assert!(d.strands.windows(2).all(|w| w[0].0 < w[1].0), "duplicate source");
        debug_assert!(
            {
                let mut targets: Vec<u8> = d.strands.iter().map(|&(_, t)| t).collect();
                targets.sort_unstable();
                targets.windows(2).all(|w| w[0] < w[1])
            },
            "duplicate target"
        );
        d
    }

    pub fn identity(points: &[u8]) -> Self {
        StrandDiagram::new(points.iter().map(|&p| (p, p)).collect())
    }

    pub fn strands(&self) -> &[(u8, u8)] {
        &self.strands
    }

    pub fn sources(&self) -> impl Iterator<Item = u8> + '_ {
        self.strands.iter().map(|&(s, _)| s)
    }

    pub fn targets(&self) -> Vec<u8> {
        let mut t: Vec<u8> = self.strands.iter().map(|&(_, t)| t).collect();
        t.sort_unstable();
        t
    }

    pub fn is_identity(&self) -> bool {
        self.strands.iter().all(|&(s, t)| s == t)
    }

    /// Number of pairs s1 < s2 with phi(s1) > phi(s2).
    pub fn inversions(&self) -> usize {
        let mut count = 0;
        for i in 0..self.strands.len() {
            for j in (i + 1)..self.strands.len() {
                if self.strands[i].1 > self.strands[j].1 {
                    count += 1;
                }
            }
        }
        count
    }

    /// Composition self then other; `None` when target/source sets differ or
    /// the inversion counts fail to add (a double crossing).
    pub fn compose(&self, other: &StrandDiagram) -> Option<StrandDiagram> {
        if self.targets() != other.sources().collect::<Vec<_>>() {
            return None;
        }
        let composed: Vec<(u8, u8)> = self
            .strands
            .iter()
            .map(|&(s, t)| {
                let idx = other.strands.binary_search_by_key(&t, |&(s2, _)| s2).unwrap();
                (s, other.strands[idx].1)
            })
            .collect();
        let result = StrandDiagram::new(composed);
        if result.inversions() == self.inversions() + other.inversions() {
            Some(result)
        } else {
            None
        }
    }

    /// Differential: resolve each crossing whose smoothing drops the
    /// inversion count by exactly one.
    pub fn differential(&self) -> Vec<StrandDiagram> {
        let my_inv = self.inversions();
        let mut out = Vec::new();
        for i in 0..self.strands.len() {
            for j in (i + 1)..self.strands.len() {
                if self.strands[i].1 > self.strands[j].1 {
                    let mut resolved = self.strands.clone();
                    resolved[i].1 = self.strands[j].1;
                    resolved[j].1 = self.strands[i].1;
                    let d = StrandDiagram::new(resolved);
                    if d.inversions() + 1 == my_inv {
                        out.push(d);
                    }
                }
            }
        }
        out
    }
}

impl fmt::Display for StrandDiagram {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.strands.is_empty() {
            return write!(f, "()");
        }
        let parts: Vec<String> = self
            .strands
            .iter()
            .map(|&(s, t)| if s == t { format!("{s}:{t}") } else { format!("{s}>{t}") })
            .collect();
        write!(f, "{}", parts.join(","))
    }
}

/// All diagrams with k strands on points 1..n, lexicographically ordered.
pub fn enumerate_diagrams(n: usize, k: usize) -> Vec<StrandDiagram> {
    let mut out = Vec::new();
    let mut sources = Vec::with_capacity(k);
    fn choose_sources(
        n: usize,
        k: usize,
        from: u8,
        sources: &mut Vec<u8>,
        out: &mut Vec<StrandDiagram>,
    ) {
        if sources.len() == k {
            let mut strands = Vec::with_capacity(k);
            let mut used = vec![false; n + 1];
            assign_targets(n, sources, 0, &mut used, &mut strands, out);
            return;
        }
        for s in from..=(n as u8) {
            sources.push(s);
            choose_sources(n, k, s + 1, sources, out);
            sources.pop();
        }
    }
    fn assign_targets(
        n: usize,
        sources: &[u8],
        idx: usize,
        used: &mut Vec<bool>,
        strands: &mut Vec<(u8, u8)>,
        out: &mut Vec<StrandDiagram>,
    ) {
        if idx == sources.len() {
            out.push(StrandDiagram::new(strands.clone()));
            return;
        }
        let s = sources[idx];
        for t in s..=(n as u8) {
            if !used[t as usize] {
                used[t as usize] = true;
                strands.push((s, t));
                assign_targets(n, sources, idx + 1, used, strands, out);
                strands.pop();
                used[t as usize] = false;
            }
        }
    }
    choose_sources(n, k, 1, &mut sources, &mut out);
    out.sort();
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn compose_respects_crossings() {
        let a = StrandDiagram::new(vec![(1, 2)]);
        let b = StrandDiagram::new(vec![(2, 3)]);
        assert_eq!(a.compose(&b), Some(StrandDiagram::new(vec![(1, 3)])));
        assert_eq!(b.compose(&a), None);
    }

    #[test]
    fn double_crossing_product_dies() {
        // (1>3, 2:2) . (2>4, 3:3) resolves the same pair twice
        let a = StrandDiagram::new(vec![(1, 3), (2, 2)]);
        let b = StrandDiagram::new(vec![(2, 4), (3, 3)]);
        assert_eq!(a.compose(&b), None);
    }

    #[test]
    fn differential_drops_one_inversion() {
        let d = StrandDiagram::new(vec![(1, 3), (2, 2)]);
        assert_eq!(d.inversions(), 1);
        assert_eq!(d.differential(), vec![StrandDiagram::new(vec![(1, 2), (2, 3)])]);
        assert!(StrandDiagram::new(vec![(1, 2), (2, 3)]).differential().is_empty());
    }

    #[test]
    fn enumerate_small() {
        // n=2, k=1: 1:1, 2:2, 1>2
        assert_eq!(enumerate_diagrams(2, 1).len(), 3);
        // n=3, k=1: three identities + 1>2,1>3,2>3
        assert_eq!(enumerate_diagrams(3, 1).len(), 6);
    }
}
