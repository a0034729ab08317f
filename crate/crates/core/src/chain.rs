//! F2 chain complexes: homology with canonical representatives and
//! deformation retracts by iterated Gaussian cancellation.

use crate::error::{Error, Result};
use crate::f2::{F2Vec, Rref};

/// An ungraded differential F2-module with labeled generators. An optional
/// internal degree is carried along for graded algebras (the differential
/// must preserve it).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ChainComplex {
    labels: Vec<String>,
    diff: Vec<F2Vec>,
    degree: Option<Vec<i64>>,
}

#[derive(Clone, Debug)]
pub struct Homology {
    pub rank: usize,
    /// Cycle representatives of a homology basis, in reduced echelon form
    /// after reduction modulo boundaries; lexicographically canonical for
    /// the fixed generator order.
    pub representatives: Vec<F2Vec>,
}

impl ChainComplex {
    pub fn new(labels: Vec<String>, diff: Vec<F2Vec>) -> Result<Self> {
        Self::with_degrees(labels, diff, None)
    }

    pub fn with_degrees(
        labels: Vec<String>,
        diff: Vec<F2Vec>,
        degree: Option<Vec<i64>>,
    ) -> Result<Self> {
        assert_eq!(labels.len(), diff.len());
        let c = ChainComplex { labels, diff, degree };
        for i in 0..c.dim() as u32 {
            if !c.apply(&c.diff[i as usize]).is_zero() {
                return Err(Error::NotAComplex(format!(
                    "d^2({}) != 0",
                    c.labels[i as usize]
                )));
            }
        }
        Ok(c)
    }

    pub fn dim(&self) -> usize {
        self.labels.len()
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn label(&self, i: u32) -> &str {
        &self.labels[i as usize]
    }

    pub fn d(&self, i: u32) -> &F2Vec {
        &self.diff[i as usize]
    }

    pub fn degrees(&self) -> Option<&[i64]> {
        self.degree.as_deref()
    }

    pub fn apply(&self, x: &F2Vec) -> F2Vec {
        let mut out = F2Vec::zero();
        for i in x.iter() {
            out.add_assign(&self.diff[i as usize]);
        }
        out
    }

    pub fn show(&self, x: &F2Vec) -> String {
        if x.is_zero() {
            return "0".into();
        }
        x.iter().map(|i| self.labels[i as usize].clone()).collect::<Vec<_>>().join(" + ")
    }

    /// Homology rank and canonical representatives.
    pub fn homology(&self) -> Homology {
        // Kernel basis via combination tracking, boundary space alongside.
        // `images` only receives independent columns; combination bits refer
        // to its insertion order, so map them back to generator indices.
        let mut images = Rref::new();
        let mut inserted_gens: Vec<u32> = Vec::new();
        let mut boundaries = Rref::new();
        let mut kernel: Vec<F2Vec> = Vec::new();
        for i in 0..self.dim() as u32 {
            let dv = &self.diff[i as usize];
            boundaries.insert(dv);
            let red = images.reduce(dv);
            if red.residual.is_zero() {
                let mut vec: F2Vec =
                    red.combo.to_f2vec().iter().map(|j| inserted_gens[j as usize]).collect();
                vec.toggle(i);
                debug_assert!(self.apply(&vec).is_zero(), "kernel vector is not a cycle");
                kernel.push(vec);
            } else {
                images.insert(dv);
                inserted_gens.push(i);
            }
        }
        let rank = kernel.len() - boundaries.rank();
        // reduce kernel vectors modulo boundaries, then echelonize
        let mut reduced = Rref::new();
        for v in &kernel {
            let row = boundaries.reduce(v).residual;
            if !row.is_zero() {
                reduced.insert(&row.to_f2vec());
            }
        }
        let representatives: Vec<F2Vec> = reduced.rows().map(|r| r.to_f2vec()).collect();
        debug_assert_eq!(representatives.len(), rank);
        Homology { rank, representatives }
    }

    /// Homology rank per internal degree; requires degrees.
    pub fn homology_by_degree(&self) -> Result<Vec<(i64, usize)>> {
        let degs = self
            .degree
            .as_ref()
            .ok_or_else(|| Error::ShapeMismatch("complex carries no degrees".into()))?;
        let mut by_deg: std::collections::BTreeMap<i64, Vec<u32>> = Default::default();
        for (i, &d) in degs.iter().enumerate() {
            by_deg.entry(d).or_default().push(i as u32);
        }
        let mut out = Vec::new();
        for (&deg, gens) in &by_deg {
            // differential preserves degree; restrict
            let index: std::collections::HashMap<u32, u32> =
                gens.iter().enumerate().map(|(j, &g)| (g, j as u32)).collect();
            let mut rank_d = 0usize;
            let mut rref = Rref::new();
            for &g in gens {
                for t in self.diff[g as usize].iter() {
                    if degs[t as usize] != deg {
                        return Err(Error::ShapeMismatch(
                            "differential does not preserve degree".into(),
                        ));
                    }
                    let _ = t;
                }
                let local: F2Vec = self.diff[g as usize]
                    .iter()
                    .map(|t| index[&t])
                    .collect();
                if rref.insert(&local) {
                    rank_d += 1;
                }
            }
            out.push((deg, gens.len() - 2 * rank_d));
        }
        Ok(out)
    }
}

/// A special deformation retract of `big` onto `small`: chain maps
/// f: small -> big, g: big -> small and a homotopy T on big with
/// g f = 1, f g + 1 = dT + Td, T f = 0, g T = 0, T T = 0.
#[derive(Clone, Debug)]
pub struct RetractData {
    pub big: ChainComplex,
    pub small: ChainComplex,
    /// Per small generator: image in big.
    pub f: Vec<F2Vec>,
    /// Per big generator: image in small.
    pub g: Vec<F2Vec>,
    /// Per big generator: homotopy image in big.
    pub t: Vec<F2Vec>,
    /// The big-generator index each small generator descends from.
    pub surviving: Vec<u32>,
}

impl RetractData {
    pub fn apply_f(&self, x: &F2Vec) -> F2Vec {
        sum_map(&self.f, x)
    }
    pub fn apply_g(&self, x: &F2Vec) -> F2Vec {
        sum_map(&self.g, x)
    }
    pub fn apply_t(&self, x: &F2Vec) -> F2Vec {
        sum_map(&self.t, x)
    }

    /// The side conditions, checked exhaustively on basis vectors.
    pub fn verify(&self) -> Result<()> {
        let nb = self.big.dim() as u32;
        let ns = self.small.dim() as u32;
        for i in 0..ns {
            let e = F2Vec::singleton(i);
            if self.apply_g(&self.f[i as usize]) != e {
                return Err(Error::ShapeMismatch("g∘f != id".into()));
            }
            // chain map: d_big f = f d_small
            if self.big.apply(&self.f[i as usize]) != self.apply_f(self.small.d(i)) {
                return Err(Error::ShapeMismatch("f is not a chain map".into()));
            }
            if !self.apply_t(&self.f[i as usize]).is_zero() {
                return Err(Error::ShapeMismatch("T∘f != 0".into()));
            }
        }
        for i in 0..nb {
            let e = F2Vec::singleton(i);
            if self.small.apply(&self.g[i as usize]) != self.apply_g(self.big.d(i)) {
                return Err(Error::ShapeMismatch("g is not a chain map".into()));
            }
            let mut lhs = self.apply_f(&self.g[i as usize]);
            lhs.add_assign(&e);
            let mut rhs = self.big.apply(&self.t[i as usize]);
            rhs.add_assign(&self.apply_t(self.big.d(i)));
            if lhs != rhs {
                return Err(Error::ShapeMismatch("fg + 1 != dT + Td".into()));
            }
            if !self.apply_g(&self.t[i as usize]).is_zero() {
                return Err(Error::ShapeMismatch("g∘T != 0".into()));
            }
            if !self.apply_t(&self.t[i as usize]).is_zero() {
                return Err(Error::ShapeMismatch("T∘T != 0".into()));
            }
        }
        Ok(())
    }
}

fn sum_map(map: &[F2Vec], x: &F2Vec) -> F2Vec {
    let mut out = F2Vec::zero();
    for i in x.iter() {
        out.add_assign(&map[i as usize]);
    }
    out
}

/// Reduces a complex to zero differential by cancelling, at every step, the
/// lexicographically least pair (b, a) with a in d(b).
pub fn reduce_retract(big: &ChainComplex) -> Result<RetractData> {
    let n = big.dim() as u32;
    let mut alive: Vec<bool> = vec![true; n as usize];
    let mut d: Vec<F2Vec> = big.diff.clone();
    let mut f: Vec<F2Vec> = (0..n).map(F2Vec::singleton).collect(); // alive -> big
    let mut g: Vec<F2Vec> = (0..n).map(F2Vec::singleton).collect(); // big -> alive
    let mut t: Vec<F2Vec> = vec![F2Vec::zero(); n as usize]; // big -> big

    loop {
        // least (b, a): scan sources in order, take least target
        let mut pair = None;
        for b in 0..n {
            if alive[b as usize] && !d[b as usize].is_zero() {
                let a = d[b as usize].iter().next().unwrap();
                pair = Some((b, a));
                break;
            }
        }
        let Some((b, a)) = pair else { break };
        if a == b {
            return Err(Error::NotAComplex("differential self-loop".into()));
        }
        let db = d[b as usize].clone();
        let mut r = db.clone();
        r.toggle(a);
        let fb = f[b as usize].clone();
        // T_new = T_old + f∘T1∘g_old, where T1(a) = b
        for y in 0..n {
            if g[y as usize].contains(a) {
                t[y as usize].add_assign(&fb);
            }
        }
        // g1: a -> r, b -> 0
        for y in 0..n {
            let gy = &mut g[y as usize];
            if gy.contains(a) {
                gy.toggle(a);
                gy.add_assign(&r);
            }
            if gy.contains(b) {
                gy.toggle(b);
            }
        }
        // f1: x -> x + <dx, a> b, then d update
        alive[a as usize] = false;
        alive[b as usize] = false;
        for x in 0..n {
            if !alive[x as usize] {
                continue;
            }
            if d[x as usize].contains(a) {
                f[x as usize].add_assign(&fb);
                let mut dx = d[x as usize].clone();
                dx.add_assign(&db);
                d[x as usize] = dx;
            }
            if d[x as usize].contains(b) {
                d[x as usize].toggle(b);
            }
        }
        d[a as usize] = F2Vec::zero();
        d[b as usize] = F2Vec::zero();
    }

    let surviving: Vec<u32> = (0..n).filter(|&i| alive[i as usize]).collect();
    let index_of: std::collections::HashMap<u32, u32> =
        surviving.iter().enumerate().map(|(j, &i)| (i, j as u32)).collect();
    let relabel = |v: &F2Vec| -> F2Vec { v.iter().map(|i| index_of[&i]).collect() };
    let small = ChainComplex::with_degrees(
        surviving.iter().map(|&i| big.labels[i as usize].clone()).collect(),
        surviving.iter().map(|&i| relabel(&d[i as usize])).collect(),
        big.degree
            .as_ref()
            .map(|degs| surviving.iter().map(|&i| degs[i as usize]).collect()),
    )?;
    debug_assert!(small.diff.iter().all(|v| v.is_zero()), "retract left a differential");
    let retract = RetractData {
        big: big.clone(),
        small,
        f: surviving.iter().map(|&i| f[i as usize].clone()).collect(),
        g: (0..n).map(|y| relabel(&g[y as usize])).collect(),
        t,
        surviving,
    };
    retract.verify()?;
    Ok(retract)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn complex(labels: &[&str], diff: &[&[u32]]) -> ChainComplex {
        ChainComplex::new(
            labels.iter().map(|s| s.to_string()).collect(),
            diff.iter().map(|d| F2Vec::from_support_mod2(d.to_vec())).collect(),
        )
        .unwrap()
    }

    #[test]
    fn acyclic_two_generator() {
        let c = complex(&["a", "b"], &[&[1], &[]]);
        let h = c.homology();
        assert_eq!(h.rank, 0);
        let r = reduce_retract(&c).unwrap();
        assert_eq!(r.small.dim(), 0);
    }

    #[test]
    fn cfd_zero_module_shape() {
        // t, rho2 t, rho12 t with d(t) = rho12 t
        let c = complex(&["t", "r2t", "r12t"], &[&[2], &[], &[]]);
        let h = c.homology();
        assert_eq!(h.rank, 1);
        assert_eq!(h.representatives, vec![F2Vec::singleton(1)]);
        let r = reduce_retract(&c).unwrap();
        assert_eq!(r.small.dim(), 1);
        assert_eq!(r.small.label(0), "r2t");
    }

    #[test]
    fn zero_differential_retract_is_identity() {
        let c = complex(&["a", "b"], &[&[], &[]]);
        let r = reduce_retract(&c).unwrap();
        assert_eq!(r.small.dim(), 2);
        assert!(r.t.iter().all(|v| v.is_zero()));
        assert_eq!(r.f, vec![F2Vec::singleton(0), F2Vec::singleton(1)]);
    }

    #[test]
    fn retract_invariants_on_a_chain_of_squares() {
        // a square complex: d(p) = x + y, d(q) = x + y
        let c = complex(&["p", "q", "x", "y"], &[&[2, 3], &[2, 3], &[], &[]]);
        let h = c.homology();
        assert_eq!(h.rank, 2);
        let r = reduce_retract(&c).unwrap();
        assert_eq!(r.small.dim(), 2);
    }

    #[test]
    fn rank_invariant_under_permutation() {
        let c1 = complex(&["a", "b", "c"], &[&[1], &[], &[]]);
        let c2 = complex(&["c", "a", "b"], &[&[], &[2], &[]]);
        assert_eq!(c1.homology().rank, c2.homology().rank);
    }
}
