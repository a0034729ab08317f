//! Finite-dimensional dg algebras over F2 with a fixed idempotent basis:
//! the raw strands algebra A(n, k) and the pointed-matched-circle summands
//! A(Z, i), built generatively as the span closure of idempotents and chord
//! elements inside the ambient strands algebra.

use std::collections::{BTreeMap, HashMap};
use std::fmt::Write as _;
use std::sync::Arc;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::f2::{F2Vec, Rref};
use crate::pmc::{Chord, PointedMatchedCircle};
use crate::poly::LaurentPoly;
use crate::strands::{enumerate_diagrams, StrandDiagram};

/// Construction limits. The defaults cover every computation in the test
/// suite; genus-3 middle summands stay far below the basis cap.
#[derive(Clone, Copy, Debug)]
pub struct AlgebraCaps {
    /// Hard cap on the basis dimension of one summand.
    pub max_dim: usize,
    /// Product tables (and the full pairwise validation) are only built when
    /// the dimension is at most this.
    pub product_dim: usize,
    /// Associativity is checked on all basis triples only up to this
    /// dimension; beyond it a seeded sample of triples is used.
    pub full_assoc_dim: usize,
}

impl Default for AlgebraCaps {
    fn default() -> Self {
        AlgebraCaps { max_dim: 2_000_000, product_dim: 1500, full_assoc_dim: 120 }
    }
}

#[derive(Clone, Debug)]
struct Block {
    /// Lexicographically sorted column diagrams.
    diagrams: Vec<StrandDiagram>,
    index: HashMap<StrandDiagram, u32>,
    /// Global basis ids living in this block, in insertion order.
    basis_ids: Vec<u32>,
    /// Expression machinery: combo bit j refers to `basis_ids[j]`.
    expr: Rref,
}

#[derive(Clone, Debug)]
struct StrandData {
    pmc: PointedMatchedCircle,
    weight: i64,
    blocks: BTreeMap<(u32, u32), Block>,
    /// Idempotent id -> pair mask.
    idem_masks: Vec<u32>,
    /// Per basis id: (block key, support over the block's sorted columns).
    rows: Vec<((u32, u32), F2Vec)>,
}

/// A finite-dimensional dg algebra with basis, product, differential,
/// orthogonal primitive idempotents and augmentation onto their span.
#[derive(Clone, Debug)]
pub struct DgAlgebra {
    name: String,
    labels: Vec<String>,
    label_index: HashMap<String, u32>,
    left_idem: Vec<u32>,
    right_idem: Vec<u32>,
    num_idem: u32,
    /// Idempotent id -> basis index.
    idem_elems: Vec<u32>,
    diff: Vec<F2Vec>,
    prod: Option<HashMap<(u32, u32), F2Vec>>,
    degree: Option<Vec<i64>>,
    strand_data: Option<StrandData>,
}

static ZERO: F2Vec = F2Vec::zero_const();

impl DgAlgebra {
    #[allow(clippy::too_many_arguments)]
    pub fn from_table(
        name: impl Into<String>,
        labels: Vec<String>,
        left_idem: Vec<u32>,
        right_idem: Vec<u32>,
        num_idem: u32,
        idem_elems: Vec<u32>,
        diff: Vec<F2Vec>,
        prod: HashMap<(u32, u32), F2Vec>,
        degree: Option<Vec<i64>>,
    ) -> Result<DgAlgebra> {
        let label_index = labels
            .iter()
            .enumerate()
            .map(|(i, l)| (l.clone(), i as u32))
            .collect();
        let alg = DgAlgebra {
            name: name.into(),
            labels,
            label_index,
            left_idem,
            right_idem,
            num_idem,
            idem_elems,
            diff,
            prod: Some(prod),
            degree,
            strand_data: None,
        };
        alg.validate(&AlgebraCaps::default())?;
        Ok(alg)
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn dim(&self) -> usize {
        self.labels.len()
    }

    pub fn num_idem(&self) -> u32 {
        self.num_idem
    }

    pub fn idem_elem(&self, id: u32) -> u32 {
        self.idem_elems[id as usize]
    }

    pub fn is_idem(&self, basis: u32) -> bool {
        self.idem_elems.binary_search(&basis).is_ok()
    }

    /// The idempotent id of a basis element that is a primitive idempotent.
    pub fn idem_id_of(&self, basis: u32) -> Option<u32> {
        self.idem_elems.binary_search(&basis).ok().map(|i| i as u32)
    }

    pub fn left_idem(&self, basis: u32) -> u32 {
        self.left_idem[basis as usize]
    }

    pub fn right_idem(&self, basis: u32) -> u32 {
        self.right_idem[basis as usize]
    }

    pub fn label(&self, basis: u32) -> &str {
        &self.labels[basis as usize]
    }

    pub fn by_label(&self, label: &str) -> Option<u32> {
        self.label_index.get(label).copied()
    }

    pub fn degree(&self, basis: u32) -> Option<i64> {
        self.degree.as_ref().map(|d| d[basis as usize])
    }

    pub fn has_products(&self) -> bool {
        self.prod.is_some()
    }

    /// Basis elements outside the idempotent span (a basis of the
    /// augmentation ideal).
    pub fn a_plus(&self) -> impl Iterator<Item = u32> + '_ {
        (0..self.dim() as u32).filter(|&i| !self.is_idem(i))
    }

    pub fn d(&self, basis: u32) -> &F2Vec {
        &self.diff[basis as usize]
    }

    pub fn d_elem(&self, x: &F2Vec) -> F2Vec {
        let mut out = F2Vec::zero();
        for i in x.iter() {
            out.add_assign(self.d(i));
        }
        out
    }

    pub fn mul(&self, a: u32, b: u32) -> &F2Vec {
        let table = self.prod.as_ref().expect("product table not built for this algebra");
        table.get(&(a, b)).unwrap_or(&ZERO)
    }

    pub fn mul_elem(&self, x: &F2Vec, y: &F2Vec) -> F2Vec {
        let mut support = Vec::new();
        for a in x.iter() {
            for b in y.iter() {
                support.extend(self.mul(a, b).iter());
            }
        }
        F2Vec::from_support_mod2(support)
    }

    pub fn unit(&self) -> F2Vec {
        F2Vec::from_support_mod2(self.idem_elems.clone())
    }

    /// Augmentation: projection onto the idempotent span.
    pub fn aug(&self, x: &F2Vec) -> F2Vec {
        F2Vec::from_support_mod2(x.iter().filter(|&i| self.is_idem(i)).collect())
    }

    pub fn show_elem(&self, x: &F2Vec) -> String {
        if x.is_zero() {
            return "0".into();
        }
        let mut out = String::new();
        for (n, i) in x.iter().enumerate() {
            if n > 0 {
                out.push_str(" + ");
            }
            out.push_str(self.label(i));
        }
        out
    }

    /// The underlying pointed matched circle, for algebras built from one.
    pub fn pmc(&self) -> Option<&PointedMatchedCircle> {
        self.strand_data.as_ref().map(|d| &d.pmc)
    }

    pub fn weight(&self) -> Option<i64> {
        self.strand_data.as_ref().map(|d| d.weight)
    }

    /// Strand-diagram description of a basis element, for diagnostics.
    pub fn describe(&self, basis: u32) -> String {
        match &self.strand_data {
            None => self.label(basis).to_string(),
            Some(data) => {
                let (key, support) = &data.rows[basis as usize];
                let block = &data.blocks[key];
                let mut out = String::new();
                for (n, col) in support.iter().enumerate() {
                    if n > 0 {
                        out.push_str(" + ");
                    }
                    let _ = write!(out, "{}", block.diagrams[col as usize]);
                }
                out
            }
        }
    }

    /// Express a formal sum of ambient strand diagrams in this algebra's
    /// basis. Errors when the sum is not in the span.
    pub fn express(&self, diagrams: &[StrandDiagram]) -> Result<F2Vec> {
        let data = self
            .strand_data
            .as_ref()
            .ok_or_else(|| Error::ShapeMismatch("not a strand algebra".into()))?;
        let mut per_block: BTreeMap<(u32, u32), Vec<u32>> = BTreeMap::new();
        // mod-2 collect
        let mut counted: BTreeMap<&StrandDiagram, usize> = BTreeMap::new();
        for d in diagrams {
            *counted.entry(d).or_insert(0) += 1;
        }
        for (d, count) in counted {
            if count % 2 == 0 {
                continue;
            }
            let key = block_key_of(&data.pmc, d);
            let block = data
                .blocks
                .get(&key)
                .ok_or_else(|| Error::ClosureViolation(format!("diagram {d} outside the span")))?;
            let col = *block
                .index
                .get(d)
                .ok_or_else(|| Error::ClosureViolation(format!("diagram {d} outside the span")))?;
            per_block.entry(key).or_default().push(col);
        }
        let mut out = Vec::new();
        for (key, cols) in per_block {
            let block = &data.blocks[&key];
            let v = F2Vec::from_support_mod2(cols);
            let red = block.expr.reduce(&v);
            if !red.residual.is_zero() {
                return Err(Error::ClosureViolation("vector outside the span".into()));
            }
            for j in red.combo.to_f2vec().iter() {
                out.push(block.basis_ids[j as usize]);
            }
        }
        Ok(F2Vec::from_support_mod2(out))
    }

    /// The chord element a(xi), expressed in this algebra's basis.
    /// Zero when no admissible completion exists.
    pub fn chord_elem(&self, chord: Chord) -> Result<F2Vec> {
        let data = self
            .strand_data
            .as_ref()
            .ok_or_else(|| Error::ShapeMismatch("not a strand algebra".into()))?;
        let n = data.pmc.num_points();
        if chord.start == 0 || chord.end > n {
            return Err(Error::ChordOutOfRange(chord.start, chord.end));
        }
        let diagrams = chord_diagrams(&data.pmc, data.weight, chord);
        self.express(&diagrams)
    }

    /// The primitive idempotent I(s) for a set of matched pairs, as a basis
    /// index.
    pub fn idempotent(&self, pairs: &[usize]) -> Result<u32> {
        let data = self
            .strand_data
            .as_ref()
            .ok_or_else(|| Error::ShapeMismatch("not a strand algebra".into()))?;
        let k = data.pmc.genus() as i64;
        let need = (k + data.weight) as usize;
        if pairs.len() != need {
            return Err(Error::WrongSize { got: pairs.len(), need });
        }
        let mut mask = 0u32;
        for &p in pairs {
            mask |= 1 << p;
        }
        let id = data
            .idem_masks
            .iter()
            .position(|&m| m == mask)
            .ok_or_else(|| Error::ShapeMismatch("no such idempotent".into()))?;
        Ok(self.idem_elems[id])
    }

    pub fn idem_mask(&self, id: u32) -> Option<u32> {
        self.strand_data.as_ref().map(|d| d.idem_masks[id as usize])
    }

    /// The same algebra with fresh basis labels.
    pub fn relabeled(&self, name: impl Into<String>, labels: Vec<String>) -> Result<DgAlgebra> {
        if labels.len() != self.dim() {
            return Err(Error::ShapeMismatch("label count differs from dimension".into()));
        }
        let mut out = self.clone();
        out.name = name.into();
        out.label_index =
            labels.iter().enumerate().map(|(i, l)| (l.clone(), i as u32)).collect();
        if out.label_index.len() != labels.len() {
            return Err(Error::ShapeMismatch("labels collide".into()));
        }
        out.labels = labels;
        Ok(out)
    }

    /// Same basis, transposed product. Left and right idempotents swap.
    pub fn opposite(&self) -> Result<DgAlgebra> {
        let table = self
            .prod
            .as_ref()
            .ok_or_else(|| Error::SizeLimit("opposite needs a product table".into()))?;
        let mut op_table = HashMap::with_capacity(table.len());
        for (&(a, b), v) in table {
            op_table.insert((b, a), v.clone());
        }
        DgAlgebra::from_table(
            format!("op({})", self.name),
            self.labels.clone(),
            self.right_idem.clone(),
            self.left_idem.clone(),
            self.num_idem,
            self.idem_elems.clone(),
            self.diff.clone(),
            op_table,
            self.degree.clone(),
        )
    }

    /// dim H_*(A, d) over F2.
    pub fn homology_dim(&self) -> usize {
        let rank = crate::f2::rank_of(self.diff.iter().cloned());
        self.dim() - 2 * rank
    }

    /// Structural validation: d^2 = 0, Leibniz, associativity, idempotent
    /// laws, augmentation multiplicativity and the differential ideal
    /// property of ker(eps).
    pub fn validate(&self, caps: &AlgebraCaps) -> Result<()> {
        let dim = self.dim() as u32;
        for i in 0..dim {
            if !self.d_elem(self.d(i)).is_zero() {
                return Err(Error::NotAComplex(format!("d^2({}) != 0", self.label(i))));
            }
            if self.is_idem(i) && !self.d(i).is_zero() {
                return Err(Error::NotAComplex(format!(
                    "differential of idempotent {}",
                    self.label(i)
                )));
            }
            for t in self.d(i).iter() {
                if self.is_idem(t) {
                    return Err(Error::ClosureViolation(format!(
                        "d({}) leaves the augmentation ideal",
                        self.label(i)
                    )));
                }
                if self.left_idem(t) != self.left_idem(i) || self.right_idem(t) != self.right_idem(i)
                {
                    return Err(Error::ClosureViolation(format!(
                        "d({}) not idempotent-homogeneous",
                        self.label(i)
                    )));
                }
            }
        }
        let Some(table) = self.prod.as_ref() else {
            return Ok(());
        };
        // idempotent compression and block structure
        for i in 0..dim {
            for j in 0..dim {
                let p = self.mul(i, j);
                if self.right_idem(i) != self.left_idem(j) && !p.is_zero() {
                    return Err(Error::ClosureViolation(format!(
                        "{}*{} nonzero across mismatched idempotents",
                        self.label(i),
                        self.label(j)
                    )));
                }
                for t in p.iter() {
                    if self.left_idem(t) != self.left_idem(i) || self.right_idem(t) != self.right_idem(j)
                    {
                        return Err(Error::ClosureViolation("product block mismatch".into()));
                    }
                    // augmentation multiplicativity: ker(eps) is an ideal
                    if self.is_idem(t) && !(self.is_idem(i) && self.is_idem(j)) {
                        return Err(Error::ClosureViolation(format!(
                            "{}*{} leaves the augmentation ideal",
                            self.label(i),
                            self.label(j)
                        )));
                    }
                }
            }
            let li = self.idem_elems[self.left_idem(i) as usize];
            let ri = self.idem_elems[self.right_idem(i) as usize];
            if self.mul(li, i) != &F2Vec::singleton(i) || self.mul(i, ri) != &F2Vec::singleton(i) {
                return Err(Error::ClosureViolation(format!(
                    "idempotent compression fails on {}",
                    self.label(i)
                )));
            }
        }
        for (a, &ea) in self.idem_elems.iter().enumerate() {
            for (b, &eb) in self.idem_elems.iter().enumerate() {
                let expected =
                    if a == b { F2Vec::singleton(ea) } else { F2Vec::zero() };
                if self.mul(ea, eb) != &expected {
                    return Err(Error::ClosureViolation("idempotents not orthogonal".into()));
                }
            }
        }
        // Leibniz on all pairs
        for i in 0..dim {
            for j in 0..dim {
                let lhs = self.d_elem(self.mul(i, j));
                let mut rhs = self.mul_elem(self.d(i), &F2Vec::singleton(j));
                rhs.add_assign(&self.mul_elem(&F2Vec::singleton(i), self.d(j)));
                if lhs != rhs {
                    return Err(Error::NotAComplex(format!(
                        "Leibniz fails on {} * {}",
                        self.label(i),
                        self.label(j)
                    )));
                }
            }
        }
        // Associativity: full up to the cap, sampled beyond.
        let check_triple = |a: u32, b: u32, c: u32| -> Result<()> {
            let left = self.mul_elem(self.mul(a, b), &F2Vec::singleton(c));
            let right = self.mul_elem(&F2Vec::singleton(a), self.mul(b, c));
            if left != right {
                return Err(Error::ClosureViolation(format!(
                    "associativity fails on ({}, {}, {})",
                    self.label(a),
                    self.label(b),
                    self.label(c)
                )));
            }
            Ok(())
        };
        if (dim as usize) <= caps.full_assoc_dim {
            for a in 0..dim {
                for b in 0..dim {
                    if self.right_idem(a) != self.left_idem(b) {
                        continue;
                    }
                    for c in 0..dim {
                        if self.right_idem(b) != self.left_idem(c) {
                            continue;
                        }
                        check_triple(a, b, c)?;
                    }
                }
            }
        } else {
            // deterministic LCG sample
            let mut state = 0x9e3779b97f4a7c15u64;
            let mut next = move || {
                state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
                (state >> 33) as u32
            };
            for _ in 0..5000 {
                let a = next() % dim;
                let b = next() % dim;
                let c = next() % dim;
                check_triple(a, b, c)?;
            }
        }
        let _ = table;
        Ok(())
    }
}

fn block_key_of(pmc: &PointedMatchedCircle, d: &StrandDiagram) -> (u32, u32) {
    let mut s = 0u32;
    let mut t = 0u32;
    for &(a, b) in d.strands() {
        s |= 1 << pmc.pair_of(a as usize);
        t |= 1 << pmc.pair_of(b as usize);
    }
    (s, t)
}

/// The diagrams of a(xi): one strand start->end plus a horizontal section of
/// size (k+i-1) avoiding the endpoint pairs.
fn chord_diagrams(pmc: &PointedMatchedCircle, weight: i64, chord: Chord) -> Vec<StrandDiagram> {
    let k = pmc.genus() as i64;
    let strands = k + weight;
    if strands < 1 {
        return Vec::new();
    }
    let horiz = (strands - 1) as usize;
    let p = chord.start;
    let q = chord.end;
    let banned: Vec<usize> = {
        let mut b = vec![pmc.pair_of(p)];
        let qp = pmc.pair_of(q);
        if !b.contains(&qp) {
            b.push(qp);
        }
        b
    };
    let free_pairs: Vec<usize> =
        (0..pmc.num_pairs()).filter(|i| !banned.contains(i)).collect();
    let mut out = Vec::new();
    let mut chosen = Vec::new();
    fn rec(
        pmc: &PointedMatchedCircle,
        free: &[usize],
        from: usize,
        left: usize,
        chosen: &mut Vec<usize>,
        p: usize,
        q: usize,
        out: &mut Vec<StrandDiagram>,
    ) {
        if left == 0 {
            // one point from each chosen pair
            let mut pts = vec![0u8; chosen.len()];
            fn pick(
                pmc: &PointedMatchedCircle,
                chosen: &[usize],
                idx: usize,
                pts: &mut Vec<u8>,
                p: usize,
                q: usize,
                out: &mut Vec<StrandDiagram>,
            ) {
                if idx == chosen.len() {
                    let mut strands: Vec<(u8, u8)> =
                        pts.iter().map(|&x| (x, x)).collect();
                    strands.push((p as u8, q as u8));
                    out.push(StrandDiagram::new(strands));
                    return;
                }
                let (a, b) = pmc.matching()[chosen[idx]];
                for point in [a, b] {
                    pts[idx] = point as u8;
                    pick(pmc, chosen, idx + 1, pts, p, q, out);
                }
            }
            pick(pmc, chosen, 0, &mut pts, p, q, out);
            return;
        }
        for (pos, &pair) in free.iter().enumerate().skip(from) {
            chosen.push(pair);
            rec(pmc, free, pos + 1, left - 1, chosen, p, q, out);
            chosen.pop();
        }
    }
    rec(pmc, &free_pairs, 0, horiz, &mut chosen, p, q, &mut out);
    out
}

fn section_identities(pmc: &PointedMatchedCircle, mask: u32) -> Vec<StrandDiagram> {
    let pairs: Vec<usize> = (0..pmc.num_pairs()).filter(|i| mask >> i & 1 == 1).collect();
    let mut out = Vec::new();
    let mut pts = vec![0u8; pairs.len()];
    fn rec(
        pmc: &PointedMatchedCircle,
        pairs: &[usize],
        idx: usize,
        pts: &mut Vec<u8>,
        out: &mut Vec<StrandDiagram>,
    ) {
        if idx == pairs.len() {
            out.push(StrandDiagram::identity(pts));
            return;
        }
        let (a, b) = pmc.matching()[pairs[idx]];
        for point in [a, b] {
            pts[idx] = point as u8;
            rec(pmc, pairs, idx + 1, pts, out);
        }
    }
    rec(pmc, &pairs, 0, &mut pts, &mut out);
    out
}

#[derive(Default)]
struct BlockBuild {
    diagrams: Vec<StrandDiagram>,
    index: HashMap<StrandDiagram, u32>,
    rref: Rref,
    vectors: Vec<Vec<StrandDiagram>>,
}

impl BlockBuild {
    fn intern(&mut self, d: &StrandDiagram) -> u32 {
        if let Some(&i) = self.index.get(d) {
            return i;
        }
        let i = self.diagrams.len() as u32;
        self.diagrams.push(d.clone());
        self.index.insert(d.clone(), i);
        i
    }

    /// Returns true when the vector enlarged the span.
    fn insert(&mut self, diagrams: Vec<StrandDiagram>) -> bool {
        let cols: Vec<u32> = diagrams.iter().map(|d| self.intern(d)).collect();
        let v = F2Vec::from_support_mod2(cols);
        if v.is_zero() {
            return false;
        }
        if self.rref.insert(&v) {
            // store the mod-2 reduced support
            let kept: Vec<StrandDiagram> =
                v.iter().map(|c| self.diagrams[c as usize].clone()).collect();
            self.vectors.push(kept);
            true
        } else {
            false
        }
    }
}

/// Multiplies two diagram sums in the ambient strands algebra.
fn mul_sums(x: &[StrandDiagram], y: &[StrandDiagram]) -> Vec<StrandDiagram> {
    let mut out = Vec::new();
    for a in x {
        for b in y {
            if let Some(c) = a.compose(b) {
                out.push(c);
            }
        }
    }
    out
}

fn diff_sum(x: &[StrandDiagram]) -> Vec<StrandDiagram> {
    x.iter().flat_map(|d| d.differential()).collect()
}

/// The summand A(Z, i): span closure of the idempotents and compressed chord
/// elements under product and differential.
pub fn strand_algebra_summand(
    pmc: &PointedMatchedCircle,
    weight: i64,
    caps: &AlgebraCaps,
) -> Result<Arc<DgAlgebra>> {
    let k = pmc.genus() as i64;
    if weight < -k || weight > k {
        return Err(Error::ShapeMismatch(format!(
            "summand weight {weight} outside [-{k}, {k}]"
        )));
    }
    let occupied = (k + weight) as usize;
    let np = pmc.num_pairs();

    // --- seeds ---
    let mut masks: Vec<u32> = (0u32..1 << np).filter(|m| m.count_ones() as usize == occupied).collect();
    masks.sort_unstable();
    let mut seeds: Vec<Vec<StrandDiagram>> = Vec::new();
    for &mask in &masks {
        seeds.push(section_identities(pmc, mask));
    }
    for chord in pmc.chords() {
        let all = chord_diagrams(pmc, weight, chord);
        // split by block: each block piece is exactly I(s) a(xi) I(t)
        let mut by_block: BTreeMap<(u32, u32), Vec<StrandDiagram>> = BTreeMap::new();
        for d in all {
            by_block.entry(block_key_of(pmc, &d)).or_default().push(d);
        }
        for (_, piece) in by_block {
            seeds.push(piece);
        }
    }

    // --- worklist closure under mu and d ---
    let mut blocks: BTreeMap<(u32, u32), BlockBuild> = BTreeMap::new();
    let mut queue: Vec<((u32, u32), usize)> = Vec::new();
    let mut total = 0usize;
    let push = |blocks: &mut BTreeMap<(u32, u32), BlockBuild>,
                    queue: &mut Vec<((u32, u32), usize)>,
                    total: &mut usize,
                    diagrams: Vec<StrandDiagram>|
     -> Result<()> {
        if diagrams.is_empty() {
            return Ok(());
        }
        let key = block_key_of(pmc, &diagrams[0]);
        debug_assert!(diagrams.iter().all(|d| block_key_of(pmc, d) == key));
        let block = blocks.entry(key).or_default();
        if block.insert(diagrams) {
            *total += 1;
            if *total > caps.max_dim {
                return Err(Error::SizeLimit(format!("basis exceeds {}", caps.max_dim)));
            }
            queue.push((key, block.vectors.len() - 1));
        }
        Ok(())
    };
    // seeds grouped by their block sides for fast lookup
    let mut seeds_by_left: BTreeMap<u32, Vec<usize>> = BTreeMap::new();
    let mut seeds_by_right: BTreeMap<u32, Vec<usize>> = BTreeMap::new();
    let mut seed_keys: Vec<(u32, u32)> = Vec::new();
    for (i, s) in seeds.iter().enumerate() {
        let key = block_key_of(pmc, &s[0]);
        seed_keys.push(key);
        seeds_by_left.entry(key.0).or_default().push(i);
        seeds_by_right.entry(key.1).or_default().push(i);
    }
    for s in &seeds {
        push(&mut blocks, &mut queue, &mut total, s.clone())?;
    }
    while let Some((key, vi)) = queue.pop() {
        let v = blocks[&key].vectors[vi].clone();
        push(&mut blocks, &mut queue, &mut total, diff_sum(&v))?;
        if let Some(right_seeds) = seeds_by_left.get(&key.1) {
            for &si in right_seeds {
                push(&mut blocks, &mut queue, &mut total, mul_sums(&v, &seeds[si]))?;
            }
        }
        if let Some(left_seeds) = seeds_by_right.get(&key.0) {
            for &si in left_seeds {
                push(&mut blocks, &mut queue, &mut total, mul_sums(&seeds[si], &v))?;
            }
        }
    }

    // --- canonicalize: sorted columns, RREF per block, kernel-of-eps bases ---
    let mut final_blocks: BTreeMap<(u32, u32), Block> = BTreeMap::new();
    // (block key, row support over sorted columns); idempotents first.
    let mut idem_rows: Vec<((u32, u32), F2Vec)> = Vec::new();
    let mut other_rows: Vec<((u32, u32), F2Vec)> = Vec::new();
    for (&key, build) in &blocks {
        let mut diagrams = build.diagrams.clone();
        diagrams.sort();
        let index: HashMap<StrandDiagram, u32> =
            diagrams.iter().enumerate().map(|(i, d)| (d.clone(), i as u32)).collect();
        let to_vec = |sum: &[StrandDiagram]| -> F2Vec {
            F2Vec::from_support_mod2(sum.iter().map(|d| index[d]).collect())
        };
        let mut rref = Rref::new();
        let mut rows: Vec<F2Vec> = Vec::new();
        for sum in &build.vectors {
            rref.insert(&to_vec(sum));
        }
        let rref_rows: Vec<F2Vec> = rref.rows().map(|r| r.to_f2vec()).collect();
        if key.0 == key.1 {
            // diagonal block: separate I(s) from the kernel of the augmentation
            let id_cols: Vec<u32> = diagrams
                .iter()
                .enumerate()
                .filter(|(_, d)| d.is_identity())
                .map(|(i, _)| i as u32)
                .collect();
            let full = F2Vec::from_sorted(id_cols.clone());
            let pi_id = |v: &F2Vec| -> F2Vec {
                F2Vec::from_support_mod2(
                    v.iter().filter(|c| id_cols.binary_search(c).is_ok()).collect(),
                )
            };
            let mut full_rows = Vec::new();
            let mut zero_rows = Vec::new();
            for r in &rref_rows {
                let p = pi_id(r);
                if p.is_zero() {
                    zero_rows.push(r.clone());
                } else if p == full {
                    full_rows.push(r.clone());
                } else {
                    return Err(Error::ClosureViolation(
                        "augmentation does not land in the idempotent span".into(),
                    ));
                }
            }
            if full_rows.is_empty() {
                return Err(Error::ClosureViolation("I(s) missing from its block".into()));
            }
            let mut kernel_gens = zero_rows;
            for r in &full_rows[1..] {
                kernel_gens.push(r.add(&full_rows[0]));
            }
            kernel_gens.push(full_rows[0].add(&full));
            let mut kernel = Rref::new();
            for g in &kernel_gens {
                kernel.insert(g);
            }
            idem_rows.push((key, full));
            rows.extend(kernel.rows().map(|r| r.to_f2vec()));
        } else {
            rows = rref_rows;
        }
        other_rows.extend(rows.into_iter().map(|r| (key, r)));
        final_blocks.insert(
            key,
            Block { diagrams, index, basis_ids: Vec::new(), expr: Rref::new() },
        );
    }

    // --- global basis assembly ---
    let mut all_rows = idem_rows;
    let num_idem = all_rows.len() as u32;
    all_rows.extend(other_rows);
    let dim = all_rows.len();
    let mut labels = Vec::with_capacity(dim);
    let mut left_idem = Vec::with_capacity(dim);
    let mut right_idem = Vec::with_capacity(dim);
    let idem_masks: Vec<u32> = masks;
    let idem_id_of_mask = |m: u32| -> u32 {
        idem_masks.binary_search(&m).expect("unknown idempotent mask") as u32
    };
    for (gid, (key, row)) in all_rows.iter().enumerate() {
        let gid = gid as u32;
        left_idem.push(idem_id_of_mask(key.0));
        right_idem.push(idem_id_of_mask(key.1));
        if gid < num_idem {
            labels.push(format!("i{gid}"));
        } else {
            labels.push(format!("e{gid}"));
        }
        let block = final_blocks.get_mut(key).unwrap();
        block.basis_ids.push(gid);
        let fresh = block.expr.insert(row);
        debug_assert!(fresh, "basis row dependent");
    }
    let idem_elems: Vec<u32> = (0..num_idem).collect();

    // --- differential and products in the canonical basis ---
    let data = StrandData {
        pmc: pmc.clone(),
        weight,
        blocks: final_blocks,
        idem_masks,
        rows: all_rows,
    };
    let row_sum = |gid: u32| -> Vec<StrandDiagram> {
        let (key, support) = &data.rows[gid as usize];
        let block = &data.blocks[key];
        support.iter().map(|c| block.diagrams[c as usize].clone()).collect()
    };
    let express_in = |data: &StrandData, diagrams: &[StrandDiagram]| -> Result<F2Vec> {
        // mirror of DgAlgebra::express, before the struct exists
        let mut counted: BTreeMap<&StrandDiagram, usize> = BTreeMap::new();
        for d in diagrams {
            *counted.entry(d).or_insert(0) += 1;
        }
        let mut per_block: BTreeMap<(u32, u32), Vec<u32>> = BTreeMap::new();
        for (d, c) in counted {
            if c % 2 == 0 {
                continue;
            }
            let key = block_key_of(&data.pmc, d);
            let block = data
                .blocks
                .get(&key)
                .ok_or_else(|| Error::ClosureViolation(format!("product escapes span at {d}")))?;
            let col = *block
                .index
                .get(d)
                .ok_or_else(|| Error::ClosureViolation(format!("product escapes span at {d}")))?;
            per_block.entry(key).or_default().push(col);
        }
        let mut out = Vec::new();
        for (key, cols) in per_block {
            let block = &data.blocks[&key];
            let red = block.expr.reduce(&F2Vec::from_support_mod2(cols));
            if !red.residual.is_zero() {
                return Err(Error::ClosureViolation("product escapes the span".into()));
            }
            for j in red.combo.to_f2vec().iter() {
                out.push(block.basis_ids[j as usize]);
            }
        }
        Ok(F2Vec::from_support_mod2(out))
    };

    let mut diff = Vec::with_capacity(dim);
    for gid in 0..dim as u32 {
        diff.push(express_in(&data, &diff_sum(&row_sum(gid)))?);
    }
    let prod = if dim <= caps.product_dim {
        let mut table = HashMap::new();
        let by_block: Vec<(u32, u32, Vec<u32>)> = data
            .blocks
            .iter()
            .map(|(&k, b)| (k.0, k.1, b.basis_ids.clone()))
            .collect();
        let mut pairs: Vec<(u32, u32)> = Vec::new();
        for (s1, t1, ids1) in &by_block {
            for (s2, _t2, ids2) in &by_block {
                if t1 != s2 {
                    continue;
                }
                let _ = s1;
                for &a in ids1 {
                    for &b in ids2 {
                        pairs.push((a, b));
                    }
                }
            }
        }
        let computed: Vec<((u32, u32), F2Vec)> = pairs
            .par_iter()
            .map(|&(a, b)| {
                let p = mul_sums(&row_sum(a), &row_sum(b));
                express_in(&data, &p).map(|v| ((a, b), v))
            })
            .collect::<Result<Vec<_>>>()?;
        for (key, v) in computed {
            if !v.is_zero() {
                table.insert(key, v);
            }
        }
        Some(table)
    } else {
        None
    };

    let label_index = labels.iter().enumerate().map(|(i, l)| (l.clone(), i as u32)).collect();
    let alg = DgAlgebra {
        name: format!("A({},{})", pmc_name(pmc), weight),
        labels,
        label_index,
        left_idem,
        right_idem,
        num_idem,
        idem_elems,
        diff,
        prod,
        degree: None,
        strand_data: Some(data),
    };
    alg.validate(caps)?;
    Ok(Arc::new(alg))
}

fn pmc_name(pmc: &PointedMatchedCircle) -> String {
    let pairs: Vec<String> =
        pmc.matching().iter().map(|&(a, b)| format!("{a}.{b}")).collect();
    format!("Z[{}]", pairs.join(","))
}

/// The raw ambient strands algebra A(n, k) with its full tables.
pub fn strands_algebra(n: usize, k: usize, caps: &AlgebraCaps) -> Result<Arc<DgAlgebra>> {
    if k > n {
        return Err(Error::ShapeMismatch(format!("k={k} exceeds n={n}")));
    }
    let diagrams = enumerate_diagrams(n, k);
    if diagrams.len() > caps.max_dim {
        return Err(Error::SizeLimit(format!("basis exceeds {}", caps.max_dim)));
    }
    let index: HashMap<StrandDiagram, u32> =
        diagrams.iter().enumerate().map(|(i, d)| (d.clone(), i as u32)).collect();
    // Idempotents: identity diagrams, one per source set. In A(n, k) the
    // ground ring is spanned by all identity diagrams.
    let idem_elems: Vec<u32> = diagrams
        .iter()
        .enumerate()
        .filter(|(_, d)| d.is_identity())
        .map(|(i, _)| i as u32)
        .collect();
    let idem_of_points = |pts: &[u8]| -> u32 {
        let d = StrandDiagram::identity(pts);
        let basis = index[&d];
        idem_elems.binary_search(&basis).unwrap() as u32
    };
    let mut left_idem = Vec::with_capacity(diagrams.len());
    let mut right_idem = Vec::with_capacity(diagrams.len());
    let mut labels = Vec::with_capacity(diagrams.len());
    for d in &diagrams {
        let sources: Vec<u8> = d.sources().collect();
        left_idem.push(idem_of_points(&sources));
        right_idem.push(idem_of_points(&d.targets()));
        labels.push(d.to_string());
    }
    let mut diff = Vec::with_capacity(diagrams.len());
    for d in &diagrams {
        diff.push(F2Vec::from_support_mod2(
            d.differential().iter().map(|t| index[t]).collect(),
        ));
    }
    let mut prod = HashMap::new();
    for (i, a) in diagrams.iter().enumerate() {
        for (j, b) in diagrams.iter().enumerate() {
            if let Some(c) = a.compose(b) {
                prod.insert((i as u32, j as u32), F2Vec::singleton(index[&c]));
            }
        }
    }
    let alg = DgAlgebra::from_table(
        format!("Strands({n},{k})"),
        labels,
        left_idem,
        right_idem,
        idem_elems.len() as u32,
        idem_elems,
        diff,
        prod,
        None,
    )?;
    Ok(Arc::new(alg))
}

/// The Poincaré polynomial sum_i dim H_*(A(Z,i)) T^i, summands built in
/// parallel.
pub fn algebra_homology(pmc: &PointedMatchedCircle, caps: &AlgebraCaps) -> Result<LaurentPoly> {
    let k = pmc.genus() as i64;
    let weights: Vec<i64> = (-k..=k).collect();
    let dims: Vec<(i64, usize)> = weights
        .par_iter()
        .map(|&i| strand_algebra_summand(pmc, i, caps).map(|a| (i, a.homology_dim())))
        .collect::<Result<Vec<_>>>()?;
    let mut poly = LaurentPoly::new();
    for (i, d) in dims {
        poly.set(i, d as u64);
    }
    Ok(poly)
}

/// Verifies that `opposite(algebra(Z, i))` is isomorphic to
/// `algebra(reverse(Z), i)` through the point relabeling p -> 4k+1-p.
pub fn verify_opposite_iso(alg: &DgAlgebra, caps: &AlgebraCaps) -> Result<()> {
    let data = alg
        .strand_data
        .as_ref()
        .ok_or_else(|| Error::ShapeMismatch("not a strand algebra".into()))?;
    let rev = strand_algebra_summand(&data.pmc.reverse(), data.weight, caps)?;
    let op = alg.opposite()?;
    if rev.dim() != op.dim() {
        return Err(Error::ClosureViolation("dimension mismatch with reversed algebra".into()));
    }
    let n = data.pmc.num_points() as u8;
    // image of each basis element of A under the relabeling, in rev's basis
    let mut image: Vec<F2Vec> = Vec::with_capacity(alg.dim());
    for gid in 0..alg.dim() as u32 {
        let (key, support) = &data.rows[gid as usize];
        let block = &data.blocks[key];
        let relabeled: Vec<StrandDiagram> = support
            .iter()
            .map(|c| {
                let d = &block.diagrams[c as usize];
                StrandDiagram::new(
                    d.strands().iter().map(|&(s, t)| (n + 1 - t, n + 1 - s)).collect(),
                )
            })
            .collect();
        image.push(rev.express(&relabeled)?);
    }
    if crate::f2::rank_of(image.iter().cloned()) != alg.dim() {
        return Err(Error::ClosureViolation("relabeling map is not a bijection".into()));
    }
    let phi = |x: &F2Vec| -> F2Vec {
        let mut out = F2Vec::zero();
        for i in x.iter() {
            out.add_assign(&image[i as usize]);
        }
        out
    };
    for a in 0..alg.dim() as u32 {
        if phi(alg.d(a)) != rev.d_elem(&image[a as usize]) {
            return Err(Error::ClosureViolation("relabeling map is not a chain map".into()));
        }
        for b in 0..alg.dim() as u32 {
            let lhs = phi(op.mul(a, b));
            let rhs = rev.mul_elem(&image[a as usize], &image[b as usize]);
            if lhs != rhs {
                return Err(Error::ClosureViolation(format!(
                    "relabeling map fails multiplicativity on ({}, {})",
                    alg.label(a),
                    alg.label(b)
                )));
            }
        }
    }
    Ok(())
}
