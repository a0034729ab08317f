//! Morphism complexes and Ext for type D structures and DD bimodules,
//! Hochschild cohomology, quasi-inverses, Koszul and Serre checks.

use std::sync::Arc;

use crate::algebra::DgAlgebra;
use crate::chain::{ChainComplex, Homology};
use crate::error::{Error, Result};
use crate::f2::{F2Vec, Rref};
use crate::module::{
    box_tensor, regular_bimodule, AInfObject, Flavor, Side,
};

/// A basis morphism x -> a_1 ⊗ y (⊗ a_2 on the other side for DD inputs).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MorGenerator {
    pub src: u32,
    pub elems: Vec<u32>,
    pub tgt: u32,
}

/// The chain complex of module maps, with structured generators.
/// Labels follow the box-route convention `a*x*y` so the model complex
/// dual(M) ⊠ A ⊠ N is label-compatible.
#[derive(Clone, Debug)]
pub struct MorComplex {
    pub complex: ChainComplex,
    pub gens: Vec<MorGenerator>,
    src_names: Vec<String>,
    tgt_names: Vec<String>,
    alg_names: Vec<Vec<String>>,
}

impl MorComplex {
    /// Renders a morphism-space element as `x -> a y, ...`.
    pub fn show(&self, v: &F2Vec) -> String {
        if v.is_zero() {
            return "0".into();
        }
        v.iter()
            .map(|i| {
                let _g = &self.gens[i as usize];
                let elems = self.alg_names[i as usize].join("|");
                format!("{} -> {} {}", self.src_names[i as usize], elems, self.tgt_names[i as usize])
            })
            .collect::<Vec<_>>()
            .join(" + ")
    }

    pub fn homology(&self) -> Homology {
        self.complex.homology()
    }
}

fn require_type_d(m: &AInfObject) -> Result<Arc<DgAlgebra>> {
    if m.slots().len() != 1
        || m.slots()[0].flavor != Flavor::D
        || m.slots()[0].side != Side::Left
    {
        return Err(Error::SlotMismatch(format!(
            "{} is not a left type D structure",
            m.name
        )));
    }
    Ok(m.slots()[0].algebra.clone())
}

/// Mor^A(M, N) for left type D structures over the same algebra.
pub fn mor_type_d(m: &AInfObject, n: &AInfObject) -> Result<MorComplex> {
    let alg = require_type_d(m)?;
    let alg_n = require_type_d(n)?;
    if !m.slots()[0].same_algebra(&n.slots()[0]) {
        return Err(Error::AlgebraMismatch(
            alg.name().to_string(),
            alg_n.name().to_string(),
        ));
    }
    // generators: (x, a, y) with a in i(x) A i(y)
    let mut gens = Vec::new();
    for (xi, x) in m.gens().iter().enumerate() {
        for (yi, y) in n.gens().iter().enumerate() {
            for a in 0..alg.dim() as u32 {
                if alg.left_idem(a) == x.idem[0] && alg.right_idem(a) == y.idem[0] {
                    gens.push(MorGenerator { src: xi as u32, elems: vec![a], tgt: yi as u32 });
                }
            }
        }
    }
    let index = |src: u32, a: u32, tgt: u32| -> u32 {
        gens.iter()
            .position(|g| g.src == src && g.elems[0] == a && g.tgt == tgt)
            .expect("morphism generator missing") as u32
    };
    let mut diff: Vec<Vec<u32>> = vec![Vec::new(); gens.len()];
    for (gi, g) in gens.iter().enumerate() {
        let a = g.elems[0];
        let push_terms = |src: u32, elem: &F2Vec, tgt: u32, out: &mut Vec<u32>| {
            for t in elem.iter() {
                out.push(index(src, t, tgt));
            }
        };
        // d_A on the coefficient
        push_terms(g.src, &alg.d(a).clone(), g.tgt, &mut diff[gi]);
        // post-compose with delta_N
        for e in n.ops() {
            if e.source == g.tgt {
                let prod = alg.mul(a, e.outputs[0]).clone();
                push_terms(g.src, &prod, e.target, &mut diff[gi]);
            }
        }
        // pre-compose with delta_M
        for e in m.ops() {
            if e.target == g.src {
                let prod = alg.mul(e.outputs[0], a).clone();
                push_terms(e.source, &prod, g.tgt, &mut diff[gi]);
            }
        }
    }
    let labels: Vec<String> = gens
        .iter()
        .map(|g| {
            format!(
                "{}*{}*{}",
                alg.label(g.elems[0]),
                m.gens()[g.src as usize].name,
                n.gens()[g.tgt as usize].name
            )
        })
        .collect();
    let complex = ChainComplex::new(
        labels,
        diff.into_iter().map(F2Vec::from_support_mod2).collect(),
    )?;
    Ok(MorComplex {
        src_names: gens.iter().map(|g| m.gens()[g.src as usize].name.clone()).collect(),
        tgt_names: gens.iter().map(|g| n.gens()[g.tgt as usize].name.clone()).collect(),
        alg_names: gens.iter().map(|g| vec![alg.label(g.elems[0]).to_string()]).collect(),
        complex,
        gens,
    })
}

/// Ext^*(M, N) = H_*(Mor^A(M, N)).
pub fn ext_type_d(m: &AInfObject, n: &AInfObject) -> Result<(usize, MorComplex, Homology)> {
    let mor = mor_type_d(m, n)?;
    let h = mor.homology();
    Ok((h.rank, mor, h))
}

fn require_dd(m: &AInfObject) -> Result<(Arc<DgAlgebra>, Arc<DgAlgebra>)> {
    let s = m.slots();
    if s.len() != 2
        || s[0].flavor != Flavor::D
        || s[1].flavor != Flavor::D
        || s[0].side != Side::Left
        || s[1].side != Side::Right
    {
        return Err(Error::SlotMismatch(format!("{} is not a DD structure", m.name)));
    }
    Ok((s[0].algebra.clone(), s[1].algebra.clone()))
}

/// Mor over both actions for DD structures: generators x -> a ⊗ y ⊗ b.
pub fn mor_dd(m: &AInfObject, n: &AInfObject) -> Result<MorComplex> {
    let (alg_a, alg_b) = require_dd(m)?;
    let (na, nb) = require_dd(n)?;
    if alg_a.name() != na.name() || alg_b.name() != nb.name() {
        return Err(Error::AlgebraMismatch(alg_a.name().into(), na.name().into()));
    }
    let mut gens = Vec::new();
    for (xi, x) in m.gens().iter().enumerate() {
        for (yi, y) in n.gens().iter().enumerate() {
            for a in 0..alg_a.dim() as u32 {
                if alg_a.left_idem(a) != x.idem[0] || alg_a.right_idem(a) != y.idem[0] {
                    continue;
                }
                for b in 0..alg_b.dim() as u32 {
                    if alg_b.left_idem(b) == y.idem[1] && alg_b.right_idem(b) == x.idem[1] {
                        gens.push(MorGenerator {
                            src: xi as u32,
                            elems: vec![a, b],
                            tgt: yi as u32,
                        });
                    }
                }
            }
        }
    }
    let index = |src: u32, a: u32, b: u32, tgt: u32| -> u32 {
        gens.iter()
            .position(|g| g.src == src && g.elems == [a, b] && g.tgt == tgt)
            .expect("morphism generator missing") as u32
    };
    let mut diff: Vec<Vec<u32>> = vec![Vec::new(); gens.len()];
    for (gi, g) in gens.iter().enumerate() {
        let (a, b) = (g.elems[0], g.elems[1]);
        for t in alg_a.d(a).iter() {
            diff[gi].push(index(g.src, t, b, g.tgt));
        }
        for t in alg_b.d(b).iter() {
            diff[gi].push(index(g.src, a, t, g.tgt));
        }
        for e in n.ops() {
            if e.source == g.tgt {
                for t1 in alg_a.mul(a, e.outputs[0]).iter() {
                    for t2 in alg_b.mul(e.outputs[1], b).iter() {
                        diff[gi].push(index(g.src, t1, t2, e.target));
                    }
                }
            }
        }
        for e in m.ops() {
            if e.target == g.src {
                for t1 in alg_a.mul(e.outputs[0], a).iter() {
                    for t2 in alg_b.mul(b, e.outputs[1]).iter() {
                        diff[gi].push(index(e.source, t1, t2, g.tgt));
                    }
                }
            }
        }
    }
    let labels: Vec<String> = gens
        .iter()
        .map(|g| {
            format!(
                "<{}({}),{}>",
                alg_a.label(g.elems[0]),
                alg_b.label(g.elems[1]),
                m.gens()[g.src as usize].name,
            )
        })
        .collect();
    let complex = ChainComplex::new(
        labels,
        diff.into_iter().map(F2Vec::from_support_mod2).collect(),
    )?;
    Ok(MorComplex {
        src_names: gens.iter().map(|g| m.gens()[g.src as usize].name.clone()).collect(),
        tgt_names: gens.iter().map(|g| n.gens()[g.tgt as usize].name.clone()).collect(),
        alg_names: gens
            .iter()
            .map(|g| {
                vec![
                    alg_a.label(g.elems[0]).to_string(),
                    alg_b.label(g.elems[1]).to_string(),
                ]
            })
            .collect(),
        complex,
        gens,
    })
}

/// Composition h1 ∘ h2 in Mor(K, K) for DD morphisms: h2 first.
fn compose_dd(
    alg_a: &DgAlgebra,
    alg_b: &DgAlgebra,
    gens: &[MorGenerator],
    h1: &F2Vec,
    h2: &F2Vec,
) -> F2Vec {
    let mut terms: Vec<u32> = Vec::new();
    for i2 in h2.iter() {
        let g2 = &gens[i2 as usize];
        for i1 in h1.iter() {
            let g1 = &gens[i1 as usize];
            if g1.src != g2.tgt {
                continue;
            }
            for a in alg_a.mul(g2.elems[0], g1.elems[0]).iter() {
                for b in alg_b.mul(g1.elems[1], g2.elems[1]).iter() {
                    if let Some(pos) = gens.iter().position(|g| {
                        g.src == g2.src && g.elems == [a, b] && g.tgt == g1.tgt
                    }) {
                        terms.push(pos as u32);
                    }
                }
            }
        }
    }
    F2Vec::from_support_mod2(terms)
}

/// Hochschild cohomology of the identity DD bimodule with itself:
/// rank, representatives and the composition product on homology.
pub struct HochschildReport {
    pub mor: MorComplex,
    pub rank: usize,
    pub representatives: Vec<F2Vec>,
    /// ring_table[i][j] = class of rep_i ∘ rep_j in the homology basis.
    pub ring_table: Vec<Vec<F2Vec>>,
    /// Homology-basis expression of the identity morphism.
    pub unit_class: F2Vec,
    algs: (Arc<DgAlgebra>, Arc<DgAlgebra>),
    /// Boundaries followed by representatives, for expressing classes.
    space: Rref,
    rep_offset: usize,
}

impl HochschildReport {
    /// Expresses a cycle in the homology basis.
    pub fn class_of_morphism(&self, v: &F2Vec) -> Result<F2Vec> {
        let red = self.space.reduce(v);
        if !red.residual.is_zero() {
            return Err(Error::ShapeMismatch("element is not a cycle".into()));
        }
        Ok(red
            .combo
            .to_f2vec()
            .iter()
            .filter(|&i| (i as usize) >= self.rep_offset)
            .map(|i| (i as usize - self.rep_offset) as u32)
            .collect())
    }

    /// A cycle representing a homology-basis combination.
    pub fn morphism_from_class(&self, class: &F2Vec) -> F2Vec {
        let mut out = F2Vec::zero();
        for i in class.iter() {
            out.add_assign(&self.representatives[i as usize]);
        }
        out
    }

    /// Composition of morphism-space elements (the second applied first).
    pub fn compose(&self, h1: &F2Vec, h2: &F2Vec) -> F2Vec {
        compose_dd(&self.algs.0, &self.algs.1, &self.mor.gens, h1, h2)
    }
}

pub fn hochschild_cohomology(k: &AInfObject) -> Result<HochschildReport> {
    let (alg_a, alg_b) = require_dd(k)?;
    let mor = mor_dd(k, k)?;
    let h = mor.homology();
    // express cycles in homology basis: boundaries first, then representatives
    let mut space = Rref::new();
    for i in 0..mor.complex.dim() as u32 {
        space.insert(mor.complex.d(i));
    }
    let rep_offset = space.inserted();
    for rep in &h.representatives {
        let fresh = space.insert(rep);
        debug_assert!(fresh, "representative dependent on boundaries");
    }
    // identity morphism: sum over generators of (x, i(x), i(x), x)
    let mut unit_terms = Vec::new();
    for (xi, x) in k.gens().iter().enumerate() {
        let a = alg_a.idem_elem(x.idem[0]);
        let b = alg_b.idem_elem(x.idem[1]);
        let pos = mor
            .gens
            .iter()
            .position(|g| g.src == xi as u32 && g.elems == [a, b] && g.tgt == xi as u32)
            .expect("identity morphism generator missing");
        unit_terms.push(pos as u32);
    }
    let unit = F2Vec::from_support_mod2(unit_terms);
    let mut report = HochschildReport {
        rank: h.rank,
        representatives: h.representatives,
        ring_table: Vec::new(),
        unit_class: F2Vec::zero(),
        algs: (alg_a, alg_b),
        space,
        rep_offset,
        mor,
    };
    let mut ring_table = Vec::with_capacity(report.rank);
    for r1 in &report.representatives {
        let mut row = Vec::with_capacity(report.rank);
        for r2 in &report.representatives {
            let comp = report.compose(r1, r2);
            row.push(report.class_of_morphism(&comp)?);
        }
        ring_table.push(row);
    }
    report.ring_table = ring_table;
    report.unit_class = report.class_of_morphism(&unit)?;
    Ok(report)
}

/// The quasi-inverse model dual(B) ⊠ dual(K) ⊠ A for a DD bimodule K over
/// (A, B); an AA bimodule with a right A-slot and a left B-slot.
pub fn quasi_inverse(k: &AInfObject) -> Result<AInfObject> {
    let (alg_a, alg_b) = require_dd(k)?;
    let b_dual = regular_bimodule(alg_b.clone()).dual(); // [(B,R,A),(B,L,A)]
    let k_dual = k.dual(); // [(A,R,D),(B,L,D)]
    let step1 = box_tensor(&b_dual, &k_dual, 0, 1)?; // [(B,L,A),(A,R,D)]
    let a_bim = regular_bimodule(alg_a.clone()); // [(A,L,A),(A,R,A)]
    let step2 = box_tensor(&a_bim, &step1, 0, 1)?; // [(A,R,A),(B,L,A)]
    Ok(step2)
}

#[derive(Debug, Clone)]
pub struct KoszulReport {
    pub rank_one: bool,
    pub reduced_image: bool,
    /// (homology dimension, expected = number of idempotents), left and right.
    pub resolution_left: (usize, usize),
    pub resolution_right: (usize, usize),
}

impl KoszulReport {
    pub fn pass(&self) -> bool {
        self.rank_one
            && self.reduced_image
            && self.resolution_left.0 == self.resolution_left.1
            && self.resolution_right.0 == self.resolution_right.1
    }
}

/// The three Koszul dualizing-bimodule conditions for a DD structure K over
/// (A, B): rank one, delta image in A+ ⊗ K ⊗ B+, and the resolution test
/// H(A ⊠ K ⊠ dual(B)) ≅ Ground on both sides.
pub fn koszul_check(k: &AInfObject) -> Result<KoszulReport> {
    let (alg_a, alg_b) = require_dd(k)?;
    // (1) one generator per idempotent pair
    let mut idems: Vec<&[u32]> = k.gens().iter().map(|g| g.idem.as_slice()).collect();
    idems.sort();
    let before = idems.len();
    idems.dedup();
    let rank_one = idems.len() == before;
    // (2) image of delta in A+ ⊗ K ⊗ B+
    let reduced_image = k
        .ops()
        .iter()
        .all(|e| !alg_a.is_idem(e.outputs[0]) && !alg_b.is_idem(e.outputs[1]));
    // (3) resolution test on both sides
    let resolution = |kk: &AInfObject, alg_a: &Arc<DgAlgebra>, alg_b: &Arc<DgAlgebra>| -> Result<usize> {
        let a_bim = regular_bimodule(alg_a.clone());
        let step1 = box_tensor(&a_bim, kk, 1, 0)?; // [(A,L,A),(B,R,D)]
        let b_dual = regular_bimodule(alg_b.clone()).dual(); // [(B,R,A),(B,L,A)]
        let step2 = box_tensor(&b_dual, &step1, 1, 1)?; // [(B,R,A),(A,L,A)]
        let complex = step2.underlying_complex()?;
        Ok(complex.homology().rank)
    };
    let left_dim = resolution(k, &alg_a, &alg_b)?;
    // symmetric side: the dual of K, re-housed as a DD structure over (B, A)
    let k_op = k.dual().reorder_slots(&[1, 0]); // [(B,L,D),(A,R,D)]
    let right_dim = resolution(&k_op, &alg_b, &alg_a)?;
    Ok(KoszulReport {
        rank_one,
        reduced_image,
        resolution_left: (left_dim, alg_a.num_idem() as usize),
        resolution_right: (right_dim, alg_b.num_idem() as usize),
    })
}

/// The Serre kernel S = bar ⊠ dual(A): a bimodule with a right A-slot and a
/// left D-slot.
pub fn serre_kernel(bar: &AInfObject, algebra: &Arc<DgAlgebra>) -> Result<AInfObject> {
    let a_dual = regular_bimodule(algebra.clone()).dual(); // [(A,R,A),(A,L,A)]
    box_tensor(&a_dual, bar, 1, 0) // pair (A,L,A) with bar's (A,R,D) -> [(A,R,A),(A,L,D)]
}

/// dim Ext(M, N) == dim H(Mor(N, M ⊠ S)) for the Serre kernel S.
pub fn serre_check(m: &AInfObject, n: &AInfObject, bar: &AInfObject) -> Result<(bool, usize, usize)> {
    let alg = require_type_d(m)?;
    let s = serre_kernel(bar, &alg)?;
    let ms = box_tensor(&s, m, 0, 0)?; // [(A,L,D)]
    let (ext_mn, _, _) = ext_type_d(m, n)?;
    let (ext_serre, _, _) = ext_type_d(n, &ms)?;
    Ok((ext_mn == ext_serre, ext_mn, ext_serre))
}

/// Ext of finite right A-infinity modules through the finite bar model:
/// H(N ⊠ dual(bar) ⊠ dual(M)).
pub fn ext_ainf(m: &AInfObject, n: &AInfObject, bar: &AInfObject) -> Result<usize> {
    for obj in [m, n] {
        if obj.slots().len() != 1
            || obj.slots()[0].flavor != Flavor::A
            || obj.slots()[0].side != Side::Right
        {
            return Err(Error::SlotMismatch(format!(
                "{} is not a right A-infinity module",
                obj.name
            )));
        }
    }
    if m.gens().is_empty() || n.gens().is_empty() {
        // Mor into or out of the zero module
        return Ok(0);
    }
    let dual_bar = bar.dual(); // [(A,L,D),(A,R,D)]
    let step1 = box_tensor(n, &dual_bar, 0, 0)?; // [(A,R,D)]
    let m_dual = m.dual(); // [(A,L,A)]
    let step2 = box_tensor(&m_dual, &step1, 0, 0)?; // slot-free
    Ok(step2.underlying_complex()?.homology().rank)
}

/// A finite-dimensional dg algebra as a free right module over itself.
pub fn free_right_module(algebra: Arc<DgAlgebra>) -> AInfObject {
    use crate::module::{Generator, OpEntry, Slot};
    let slots = vec![Slot::new(algebra.clone(), Side::Right, Flavor::A)];
    let gens: Vec<Generator> = (0..algebra.dim() as u32)
        .map(|i| Generator {
            name: algebra.label(i).to_string(),
            idem: vec![algebra.right_idem(i)],
            degree: algebra.degree(i).unwrap_or(0),
        })
        .collect();
    let mut ops = Vec::new();
    for x in 0..algebra.dim() as u32 {
        for t in algebra.d(x).iter() {
            ops.push(OpEntry { source: x, words: vec![Vec::new()], target: t, outputs: Vec::new() });
        }
        for b in algebra.a_plus() {
            for t in algebra.mul(x, b).iter() {
                ops.push(OpEntry { source: x, words: vec![vec![b]], target: t, outputs: Vec::new() });
            }
        }
    }
    AInfObject::new(format!("free({})", algebra.name()), slots, gens, ops)
        .expect("free module is valid")
}
