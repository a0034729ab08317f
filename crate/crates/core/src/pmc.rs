//! Pointed matched circles.
//!
//! A genus-k circle carries 4k marked points labeled 1..4k in the order they
//! appear after the basepoint, and a fixed-point-free matching pairing them.
//! The basepoint sits in the gap between point 4k and point 1, so chords are
//! simply pairs p < q and never wrap around.

use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct PointedMatchedCircle {
    k: usize,
    /// 2k pairs, each sorted, the list sorted by smaller element.
    matching: Vec<(usize, usize)>,
}

/// An arc between two marked points, avoiding the basepoint gap.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Chord {
    pub start: usize,
    pub end: usize,
}

impl Chord {
    pub fn new(start: usize, end: usize) -> Self {
        assert!(start < end, "chord endpoints must satisfy start < end");
        Chord { start, end }
    }
}

impl PointedMatchedCircle {
    /// Validates and canonicalizes a matching on {1..4k}.
    pub fn new(k: usize, matching: &[(usize, usize)]) -> Result<Self> {
        if k == 0 {
            return Err(Error::MalformedMatching("genus must be positive".into()));
        }
        let n = 4 * k;
        if matching.len() != 2 * k {
            return Err(Error::MalformedMatching(format!(
                "expected {} pairs, got {}",
                2 * k,
                matching.len()
            )));
        }
        let mut seen = vec![false; n + 1];
        let mut pairs = Vec::with_capacity(2 * k);
        for &(a, b) in matching {
            if a == b {
                return Err(Error::MalformedMatching(format!("pair ({a},{b}) is degenerate")));
            }
            for p in [a, b] {
                if p == 0 || p > n {
                    return Err(Error::MalformedMatching(format!("point {p} out of range 1..{n}")));
                }
                if seen[p] {
                    return Err(Error::MalformedMatching(format!("point {p} matched twice")));
                }
                seen[p] = true;
            }
            pairs.push((a.min(b), a.max(b)));
        }
        pairs.sort_unstable();
        let circle = PointedMatchedCircle { k, matching: pairs };
        if circle.surgery_components() != 1 {
            return Err(Error::DisconnectedSurgery);
        }
        Ok(circle)
    }

    pub fn genus(&self) -> usize {
        self.k
    }

    pub fn num_points(&self) -> usize {
        4 * self.k
    }

    pub fn matching(&self) -> &[(usize, usize)] {
        &self.matching
    }

    /// Index (0-based, in canonical pair order) of the pair containing `p`.
    pub fn pair_of(&self, p: usize) -> usize {
        self.matching
            .iter()
            .position(|&(a, b)| a == p || b == p)
            .expect("point out of range")
    }

    pub fn num_pairs(&self) -> usize {
        2 * self.k
    }

    /// Components of the 1-manifold obtained by surgery along the matched
    /// 0-spheres. Cuts the circle at all marked points and reglues each
    /// pair's four loose ends crosswise, then walks the arc cycles.
    fn surgery_components(&self) -> usize {
        let n = self.num_points();
        // Arc i runs from point i+1 to point i+2 (mod n); arcs are 0-based.
        // next[a] = arc following arc a after regluing.
        // At a matched pair {p,q}: the arc ending at p continues as the arc
        // starting at q, and vice versa.
        let mut start_at = vec![0usize; n + 1]; // point -> arc starting there
        for a in 0..n {
            let startpt = a + 1;
            start_at[startpt] = a;
        }
        let mut next = vec![usize::MAX; n];
        for &(p, q) in &self.matching {
            let end_p = (p + n - 2) % n; // arc ending at p
            let end_q = (q + n - 2) % n;
            next[end_p] = start_at[q];
            next[end_q] = start_at[p];
        }
        let mut visited = vec![false; n];
        let mut components = 0;
        for a0 in 0..n {
            if visited[a0] {
                continue;
            }
            components += 1;
            let mut a = a0;
            while !visited[a] {
                visited[a] = true;
                a = next[a];
            }
        }
        components
    }

    /// Orientation reversal: relabels point i as 4k+1-i and re-canonicalizes.
    pub fn reverse(&self) -> PointedMatchedCircle {
        let n = self.num_points();
        let pairs: Vec<(usize, usize)> =
            self.matching.iter().map(|&(a, b)| (n + 1 - a, n + 1 - b)).collect();
        PointedMatchedCircle::new(self.k, &pairs).expect("reversal preserves validity")
    }

    /// All chords p < q, lexicographically ordered.
    pub fn chords(&self) -> Vec<Chord> {
        let n = self.num_points();
        let mut out = Vec::with_capacity(n * (n - 1) / 2);
        for p in 1..=n {
            for q in (p + 1)..=n {
                out.push(Chord::new(p, q));
            }
        }
        out
    }
}

/// Names accepted by [`standard`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum StandardName {
    Torus,
    Split(usize),
    Antipodal(usize),
    Genus3Z1,
    Genus3Z2,
}

impl StandardName {
    pub fn parse(s: &str) -> Result<Self> {
        let t = s.trim();
        let lower = t.to_ascii_lowercase();
        if lower == "torus" {
            return Ok(StandardName::Torus);
        }
        if lower == "genus3_z1" {
            return Ok(StandardName::Genus3Z1);
        }
        if lower == "genus3_z2" || lower == "genus3_z2_as_dual" {
            return Ok(StandardName::Genus3Z2);
        }
        for (prefix, mk) in [
            ("split", StandardName::Split as fn(usize) -> StandardName),
            ("antipodal", StandardName::Antipodal as fn(usize) -> StandardName),
        ] {
            if let Some(rest) = lower.strip_prefix(prefix) {
                let digits = rest.trim_matches(|c| c == '(' || c == ')');
                if let Ok(k) = digits.parse::<usize>() {
                    if k == 0 {
                        return Err(Error::UnknownName(s.into()));
                    }
                    return Ok(mk(k));
                }
            }
        }
        Err(Error::UnknownName(s.into()))
    }
}

/// The standard circles used throughout: the unique genus-1 circle, split and
/// antipodal circles of any genus, and the genus-3 dual pair.
pub fn standard(name: &StandardName) -> PointedMatchedCircle {
    match name {
        StandardName::Torus => PointedMatchedCircle::new(1, &[(1, 3), (2, 4)]).unwrap(),
        StandardName::Split(k) => {
            let pairs: Vec<(usize, usize)> = (0..*k)
                .flat_map(|j| [(4 * j + 1, 4 * j + 3), (4 * j + 2, 4 * j + 4)])
                .collect();
            PointedMatchedCircle::new(*k, &pairs).unwrap()
        }
        StandardName::Antipodal(k) => {
            let pairs: Vec<(usize, usize)> = (1..=2 * k).map(|i| (i, i + 2 * k)).collect();
            PointedMatchedCircle::new(*k, &pairs).unwrap()
        }
        StandardName::Genus3Z1 => {
            PointedMatchedCircle::new(3, &[(1, 7), (2, 9), (3, 5), (4, 6), (8, 11), (10, 12)])
                .unwrap()
        }
        StandardName::Genus3Z2 => {
            PointedMatchedCircle::new(3, &[(1, 10), (2, 4), (3, 12), (5, 11), (6, 8), (7, 9)])
                .unwrap()
        }
    }
}

pub fn standard_by_name(name: &str) -> Result<PointedMatchedCircle> {
    Ok(standard(&StandardName::parse(name)?))
}

/// Table-driven dual circles (no combinatorial formula for Z* is known to us;
/// the Koszul symmetry check is the general tool).
pub fn dual_of(name: &StandardName) -> Option<StandardName> {
    match name {
        StandardName::Torus => Some(StandardName::Torus),
        StandardName::Genus3Z1 => Some(StandardName::Genus3Z2),
        StandardName::Genus3Z2 => Some(StandardName::Genus3Z1),
        _ => None,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn torus_is_valid_and_unique_reverse() {
        let torus = standard(&StandardName::Torus);
        assert_eq!(torus.matching(), &[(1, 3), (2, 4)]);
        assert_eq!(torus.reverse(), torus);
    }

    #[test]
    fn adjacent_matching_disconnects() {
        match PointedMatchedCircle::new(1, &[(1, 2), (3, 4)]) {
            Err(Error::DisconnectedSurgery) => {}
            other => panic!("expected DisconnectedSurgery, got {other:?}"),
        }
    }

    #[test]
    fn malformed_matchings_rejected() {
        assert!(matches!(
            PointedMatchedCircle::new(1, &[(1, 3), (2, 3)]),
            Err(Error::MalformedMatching(_))
        ));
        assert!(matches!(
            PointedMatchedCircle::new(1, &[(1, 3), (2, 5)]),
            Err(Error::MalformedMatching(_))
        ));
        assert!(matches!(
            PointedMatchedCircle::new(1, &[(1, 3)]),
            Err(Error::MalformedMatching(_))
        ));
    }

    #[test]
    fn genus3_circles_valid() {
        let z1 = standard(&StandardName::Genus3Z1);
        let z2 = standard(&StandardName::Genus3Z2);
        assert_eq!(z1.genus(), 3);
        assert_eq!(z2.matching(), &[(1, 10), (2, 4), (3, 12), (5, 11), (6, 8), (7, 9)]);
    }

    #[test]
    fn reverse_is_involution_on_zoo() {
        for name in [
            StandardName::Torus,
            StandardName::Split(2),
            StandardName::Antipodal(2),
            StandardName::Genus3Z1,
            StandardName::Genus3Z2,
        ] {
            let z = standard(&name);
            assert_eq!(z.reverse().reverse(), z);
        }
    }

    #[test]
    fn genus3_z1_reversal_by_relabeling() {
        let z1 = standard(&StandardName::Genus3Z1);
        // i -> 13 - i applied to (1,7),(2,9),(3,5),(4,6),(8,11),(10,12)
        let expected =
            PointedMatchedCircle::new(3, &[(6, 12), (4, 11), (8, 10), (7, 9), (2, 5), (1, 3)])
                .unwrap();
        assert_eq!(z1.reverse(), expected);
    }

    #[test]
    fn split_and_antipodal_conventions() {
        assert_eq!(
            standard(&StandardName::Split(2)).matching(),
            &[(1, 3), (2, 4), (5, 7), (6, 8)]
        );
        assert_eq!(
            standard(&StandardName::Antipodal(2)).matching(),
            &[(1, 5), (2, 6), (3, 7), (4, 8)]
        );
    }

    #[test]
    fn torus_chords() {
        let torus = standard(&StandardName::Torus);
        let chords = torus.chords();
        assert_eq!(chords.len(), 6);
        assert!(chords.iter().all(|c| c.start < c.end));
        assert_eq!(chords[0], Chord::new(1, 2));
    }

    #[test]
    fn chord_count_is_binomial() {
        for k in 1..=3 {
            let z = standard(&StandardName::Antipodal(k));
            let n = 4 * k;
            assert_eq!(z.chords().len(), n * (n - 1) / 2);
        }
    }

    #[test]
    fn name_parsing() {
        assert_eq!(StandardName::parse("split(2)").unwrap(), StandardName::Split(2));
        assert_eq!(StandardName::parse("split2").unwrap(), StandardName::Split(2));
        assert_eq!(StandardName::parse("antipodal2").unwrap(), StandardName::Antipodal(2));
        assert!(StandardName::parse("pretzel").is_err());
    }
}
