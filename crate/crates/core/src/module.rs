//! Type D structures, A-infinity (bi)modules and their common slot system.
//!
//! An object carries an ordered list of slots; each slot names an algebra, a
//! side and a flavor (D emits algebra factors, A consumes them). Structure
//! maps are stored as multilinear entries over the algebra bases, with
//! A-inputs restricted to the augmentation ideal (strict unitality) and
//! written module-adjacent-first.
//!
//! Composition conventions, fixed once here and used by the structure
//! equation, box tensor, modulification and transfer alike:
//!   - on a Left D slot two consecutive outputs compose as first*second;
//!     on a Right D slot as second*first;
//!   - on a Right A slot adjacent inputs contract as inner*outer; on a Left
//!     A slot as outer*inner;
//!   - idempotent compatibility per slot: on a Left D slot an output u
//!     lies in i(src)·A·i(tgt), on a Right D slot in i(tgt)·A·i(src);
//!     A-slot words chain i(src) to i(tgt) through their left/right
//!     idempotents, mirrored by side.

use std::collections::{BTreeSet, HashMap};
use std::sync::Arc;

use crate::algebra::DgAlgebra;
use crate::chain::{ChainComplex, RetractData};
use crate::error::{Error, Result};
use crate::f2::F2Vec;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Side {
    Left,
    Right,
}

impl Side {
    pub fn flip(self) -> Side {
        match self {
            Side::Left => Side::Right,
            Side::Right => Side::Left,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Flavor {
    D,
    A,
}

#[derive(Clone)]
pub struct Slot {
    pub algebra: Arc<DgAlgebra>,
    pub side: Side,
    pub flavor: Flavor,
}

impl std::fmt::Debug for Slot {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "({}, {:?}, {:?})", self.algebra.name(), self.side, self.flavor)
    }
}

impl Slot {
    pub fn new(algebra: Arc<DgAlgebra>, side: Side, flavor: Flavor) -> Self {
        Slot { algebra, side, flavor }
    }

    pub fn same_algebra(&self, other: &Slot) -> bool {
        Arc::ptr_eq(&self.algebra, &other.algebra)
            || (self.algebra.name() == other.algebra.name()
                && self.algebra.dim() == other.algebra.dim())
    }
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct Generator {
    pub name: String,
    /// One idempotent id per slot.
    pub idem: Vec<u32>,
    /// Internal degree, carried for graded algebras; 0 elsewhere.
    pub degree: i64,
}

/// One structure-map entry. `words` is parallel to the A-slots (in slot
/// order), `outputs` to the D-slots.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct OpEntry {
    pub source: u32,
    pub words: Vec<Vec<u32>>,
    pub target: u32,
    pub outputs: Vec<u32>,
}

impl OpEntry {
    pub fn arity(&self) -> usize {
        self.words.iter().map(|w| w.len()).sum()
    }
}

#[derive(Clone)]
pub struct AInfObject {
    pub name: String,
    slots: Vec<Slot>,
    gens: Vec<Generator>,
    ops: Vec<OpEntry>,
    a_slots: Vec<usize>,
    d_slots: Vec<usize>,
    ops_index: HashMap<(u32, Vec<Vec<u32>>), Vec<usize>>,
    ops_by_source: HashMap<u32, Vec<usize>>,
    /// When set, operations were only computed up to this total word length.
    pub truncation: Option<usize>,
}

impl std::fmt::Debug for AInfObject {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(
            f,
            "AInfObject({}, slots={:?}, {} gens, {} ops)",
            self.name,
            self.slots,
            self.gens.len(),
            self.ops.len()
        )
    }
}

/// A single failing term of a structure equation, rendered symbolically.
#[derive(Clone, Debug)]
pub struct Violation {
    pub source: String,
    pub words: Vec<Vec<String>>,
    pub residual: Vec<String>,
}

impl std::fmt::Display for Violation {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let words: Vec<String> = self
            .words
            .iter()
            .map(|w| format!("({})", w.join(",")))
            .collect();
        write!(
            f,
            "at {} with inputs {}: residual {}",
            self.source,
            words.join(" "),
            self.residual.join(" + ")
        )
    }
}

#[derive(Clone, Debug, Default)]
pub struct StructureReport {
    pub violations: Vec<Violation>,
}

impl StructureReport {
    pub fn ok(&self) -> bool {
        self.violations.is_empty()
    }
}

fn cancel_mod2<T: Ord>(mut terms: Vec<T>) -> Vec<T> {
    terms.sort();
    let mut out: Vec<T> = Vec::with_capacity(terms.len());
    for t in terms {
        if out.last() == Some(&t) {
            out.pop();
        } else {
            out.push(t);
        }
    }
    out
}

impl AInfObject {
    pub fn new(
        name: impl Into<String>,
        slots: Vec<Slot>,
        gens: Vec<Generator>,
        ops: Vec<OpEntry>,
    ) -> Result<Self> {
        let name = name.into();
        let a_slots: Vec<usize> =
            slots.iter().enumerate().filter(|(_, s)| s.flavor == Flavor::A).map(|(i, _)| i).collect();
        let d_slots: Vec<usize> =
            slots.iter().enumerate().filter(|(_, s)| s.flavor == Flavor::D).map(|(i, _)| i).collect();
        for g in &gens {
            if g.idem.len() != slots.len() {
                return Err(Error::ShapeMismatch(format!(
                    "generator {} has {} idempotents for {} slots",
                    g.name,
                    g.idem.len(),
                    slots.len()
                )));
            }
            for (s, &id) in slots.iter().zip(&g.idem) {
                if id >= s.algebra.num_idem() {
                    return Err(Error::ShapeMismatch(format!(
                        "generator {}: idempotent {} out of range",
                        g.name, id
                    )));
                }
            }
        }
        let mut obj = AInfObject {
            name,
            slots,
            gens,
            ops: Vec::new(),
            a_slots,
            d_slots,
            ops_index: HashMap::new(),
            ops_by_source: HashMap::new(),
            truncation: None,
        };
        let ops = cancel_mod2(ops);
        for e in &ops {
            obj.validate_entry(e)?;
        }
        obj.ops = ops;
        obj.rebuild_index();
        Ok(obj)
    }

    fn rebuild_index(&mut self) {
        self.ops_index.clear();
        self.ops_by_source.clear();
        for (i, e) in self.ops.iter().enumerate() {
            self.ops_index.entry((e.source, e.words.clone())).or_default().push(i);
            self.ops_by_source.entry(e.source).or_default().push(i);
        }
    }

    fn validate_entry(&self, e: &OpEntry) -> Result<()> {
        let bad = |msg: String| Err(Error::ShapeMismatch(format!("op {:?}: {}", e, msg)));
        if e.source as usize >= self.gens.len() || e.target as usize >= self.gens.len() {
            return bad("generator out of range".into());
        }
        if e.words.len() != self.a_slots.len() || e.outputs.len() != self.d_slots.len() {
            return bad("wrong slot shape".into());
        }
        let src = &self.gens[e.source as usize];
        let tgt = &self.gens[e.target as usize];
        for (wi, &si) in self.a_slots.iter().enumerate() {
            let slot = &self.slots[si];
            let alg = &slot.algebra;
            let word = &e.words[wi];
            for &a in word {
                if a as usize >= alg.dim() {
                    return bad("input out of range".into());
                }
                if alg.is_idem(a) {
                    return bad("idempotent used as an A-input".into());
                }
            }
            // idempotent chain, module-adjacent-first
            let (mut cur, end) = (src.idem[si], tgt.idem[si]);
            for &a in word {
                let (near, far) = match slot.side {
                    Side::Right => (alg.left_idem(a), alg.right_idem(a)),
                    Side::Left => (alg.right_idem(a), alg.left_idem(a)),
                };
                if near != cur {
                    return bad(format!("idempotent chain breaks at {}", alg.label(a)));
                }
                cur = far;
            }
            if cur != end {
                return bad("idempotent chain does not reach the target".into());
            }
        }
        for (oi, &si) in self.d_slots.iter().enumerate() {
            let slot = &self.slots[si];
            let alg = &slot.algebra;
            let u = e.outputs[oi];
            if u as usize >= alg.dim() {
                return bad("output out of range".into());
            }
            let (need_l, need_r) = match slot.side {
                Side::Left => (src.idem[si], tgt.idem[si]),
                Side::Right => (tgt.idem[si], src.idem[si]),
            };
            if alg.left_idem(u) != need_l || alg.right_idem(u) != need_r {
                return bad(format!("output {} breaks idempotents", alg.label(u)));
            }
        }
        Ok(())
    }

    pub fn slots(&self) -> &[Slot] {
        &self.slots
    }

    pub fn gens(&self) -> &[Generator] {
        &self.gens
    }

    pub fn ops(&self) -> &[OpEntry] {
        &self.ops
    }

    pub fn a_slots(&self) -> &[usize] {
        &self.a_slots
    }

    pub fn d_slots(&self) -> &[usize] {
        &self.d_slots
    }

    pub fn gen_index(&self, name: &str) -> Option<u32> {
        self.gens.iter().position(|g| g.name == name).map(|i| i as u32)
    }

    fn ops_at(&self, source: u32, words: &[Vec<u32>]) -> &[usize] {
        // cheap probe without cloning in the common miss case
        match self.ops_index.get(&(source, words.to_vec())) {
            Some(v) => v,
            None => &[],
        }
    }

    fn a_ordinal(&self, slot: usize) -> usize {
        self.a_slots.iter().position(|&s| s == slot).expect("not an A slot")
    }

    fn d_ordinal(&self, slot: usize) -> usize {
        self.d_slots.iter().position(|&s| s == slot).expect("not a D slot")
    }

    /// Renders an operation entry for diagnostics.
    pub fn show_entry(&self, e: &OpEntry) -> String {
        let words: Vec<String> = self
            .a_slots
            .iter()
            .zip(&e.words)
            .map(|(&si, w)| {
                let alg = &self.slots[si].algebra;
                format!("({})", w.iter().map(|&a| alg.label(a).to_string()).collect::<Vec<_>>().join(","))
            })
            .collect();
        let outs: Vec<String> = self
            .d_slots
            .iter()
            .zip(&e.outputs)
            .map(|(&si, &u)| self.slots[si].algebra.label(u).to_string())
            .collect();
        format!(
            "{} {} -> {} ⊗ {}",
            self.gens[e.source as usize].name,
            words.join(""),
            outs.join("|"),
            self.gens[e.target as usize].name
        )
    }

    // ----- structure equation -----

    /// All terms of the structure equation at (x, words), cancelled mod 2.
    /// Empty iff the equation holds there.
    fn equation_at(&self, x: u32, words: &[Vec<u32>]) -> Vec<(u32, Vec<u32>)> {
        let mut terms: Vec<(u32, Vec<u32>)> = Vec::new();

        // two-stage compositions over all slotwise splittings
        let cuts: Vec<usize> = words.iter().map(|w| w.len() + 1).collect();
        let mut cut = vec![0usize; words.len()];
        loop {
            let first: Vec<Vec<u32>> =
                words.iter().zip(&cut).map(|(w, &c)| w[..c].to_vec()).collect();
            let second: Vec<Vec<u32>> =
                words.iter().zip(&cut).map(|(w, &c)| w[c..].to_vec()).collect();
            for &i1 in self.ops_at(x, &first) {
                let e1 = &self.ops[i1];
                for &i2 in self.ops_at(e1.target, &second) {
                    let e2 = &self.ops[i2];
                    // cross-expand composed outputs
                    let mut partial: Vec<Vec<u32>> = vec![Vec::new()];
                    for (oi, &si) in self.d_slots.iter().enumerate() {
                        let alg = &self.slots[si].algebra;
                        let prod = match self.slots[si].side {
                            Side::Left => alg.mul(e1.outputs[oi], e2.outputs[oi]),
                            Side::Right => alg.mul(e2.outputs[oi], e1.outputs[oi]),
                        };
                        let mut next = Vec::new();
                        for p in &partial {
                            for t in prod.iter() {
                                let mut q = p.clone();
                                q.push(t);
                                next.push(q);
                            }
                        }
                        partial = next;
                        if partial.is_empty() {
                            break;
                        }
                    }
                    for outs in partial {
                        terms.push((e2.target, outs));
                    }
                }
            }
            // odometer
            let mut pos = 0;
            loop {
                if pos == cut.len() {
                    break;
                }
                cut[pos] += 1;
                if cut[pos] < cuts[pos] {
                    break;
                }
                cut[pos] = 0;
                pos += 1;
            }
            if pos == cut.len() {
                break;
            }
            if cut.iter().all(|&c| c == 0) {
                break;
            }
        }

        // differential on outputs
        for &i in self.ops_at(x, words) {
            let e = &self.ops[i];
            for (oi, &si) in self.d_slots.iter().enumerate() {
                let alg = &self.slots[si].algebra;
                for t in alg.d(e.outputs[oi]).iter() {
                    let mut outs = e.outputs.clone();
                    outs[oi] = t;
                    terms.push((e.target, outs));
                }
            }
        }

        // differential on inputs
        for (wi, &si) in self.a_slots.iter().enumerate() {
            let alg = self.slots[si].algebra.clone();
            for p in 0..words[wi].len() {
                for b in alg.d(words[wi][p]).iter() {
                    let mut w2 = words.to_vec();
                    w2[wi][p] = b;
                    for &i in self.ops_at(x, &w2) {
                        let e = &self.ops[i];
                        terms.push((e.target, e.outputs.clone()));
                    }
                }
            }
        }

        // contraction of adjacent inputs
        for (wi, &si) in self.a_slots.iter().enumerate() {
            let slot = &self.slots[si];
            let alg = slot.algebra.clone();
            let w = &words[wi];
            for p in 0..w.len().saturating_sub(1) {
                let prod = match slot.side {
                    Side::Right => alg.mul(w[p], w[p + 1]),
                    Side::Left => alg.mul(w[p + 1], w[p]),
                };
                for b in prod.iter() {
                    let mut w2 = words.to_vec();
                    w2[wi].remove(p + 1);
                    w2[wi][p] = b;
                    for &i in self.ops_at(x, &w2) {
                        let e = &self.ops[i];
                        terms.push((e.target, e.outputs.clone()));
                    }
                }
            }
        }

        cancel_mod2(terms)
    }

    /// The candidate words at which the structure equation could possibly be
    /// nonzero: entry words, slotwise concatenations of composable pairs,
    /// and differential/product expansions of entry words.
    fn candidate_words(&self) -> BTreeSet<(u32, Vec<Vec<u32>>)> {
        let mut set: BTreeSet<(u32, Vec<Vec<u32>>)> = BTreeSet::new();
        let keep = |set: &mut BTreeSet<(u32, Vec<Vec<u32>>)>, x: u32, w: Vec<Vec<u32>>| {
            if let Some(max) = self.truncation {
                if w.iter().map(|v| v.len()).sum::<usize>() > max {
                    return;
                }
            }
            set.insert((x, w));
        };
        for e in &self.ops {
            keep(&mut set, e.source, e.words.clone());
        }
        for e1 in &self.ops {
            if let Some(list) = self.ops_by_source.get(&e1.target) {
                for &i2 in list {
                    let e2 = &self.ops[i2];
                    let combined: Vec<Vec<u32>> = e1
                        .words
                        .iter()
                        .zip(&e2.words)
                        .map(|(a, b)| {
                            let mut w = a.clone();
                            w.extend_from_slice(b);
                            w
                        })
                        .collect();
                    keep(&mut set, e1.source, combined);
                }
            }
        }
        // preimage expansions
        let mut d_pre: HashMap<usize, HashMap<u32, Vec<u32>>> = HashMap::new();
        let mut mu_pre: HashMap<usize, HashMap<u32, Vec<(u32, u32)>>> = HashMap::new();
        for &si in &self.a_slots {
            let alg = &self.slots[si].algebra;
            d_pre.entry(si).or_insert_with(|| {
                let mut m: HashMap<u32, Vec<u32>> = HashMap::new();
                for a in alg.a_plus() {
                    for t in alg.d(a).iter() {
                        m.entry(t).or_default().push(a);
                    }
                }
                m
            });
            mu_pre.entry(si).or_insert_with(|| {
                let mut m: HashMap<u32, Vec<(u32, u32)>> = HashMap::new();
                let aps: Vec<u32> = alg.a_plus().collect();
                for &a in &aps {
                    for &b in &aps {
                        if alg.right_idem(a) != alg.left_idem(b) {
                            continue;
                        }
                        for t in alg.mul(a, b).iter() {
                            m.entry(t).or_default().push((a, b));
                        }
                    }
                }
                m
            });
        }
        let base: Vec<(u32, Vec<Vec<u32>>)> =
            self.ops.iter().map(|e| (e.source, e.words.clone())).collect();
        for (x, words) in base {
            for (wi, &si) in self.a_slots.iter().enumerate() {
                let slot_side = self.slots[si].side;
                for p in 0..words[wi].len() {
                    let c = words[wi][p];
                    if let Some(pres) = d_pre[&si].get(&c) {
                        for &b in pres {
                            let mut w2 = words.clone();
                            w2[wi][p] = b;
                            keep(&mut set, x, w2);
                        }
                    }
                    if let Some(pairs) = mu_pre[&si].get(&c) {
                        for &(u, v) in pairs {
                            let mut w2 = words.clone();
                            let (first, second) = match slot_side {
                                Side::Right => (u, v),
                                Side::Left => (v, u),
                            };
                            w2[wi][p] = first;
                            w2[wi].insert(p + 1, second);
                            keep(&mut set, x, w2);
                        }
                    }
                }
            }
        }
        set
    }

    /// Expands the structure equation everywhere it could fail and reports
    /// the surviving terms.
    pub fn check_structure(&self) -> StructureReport {
        self.check_structure_filtered(|_| true)
    }

    /// Structure check restricted to input words accepted by `keep`; used
    /// for truncated models whose equations are only exact within a degree
    /// budget.
    pub fn check_structure_filtered(
        &self,
        keep: impl Fn(&[Vec<u32>]) -> bool,
    ) -> StructureReport {
        let mut report = StructureReport::default();
        for (x, words) in self.candidate_words() {
            if !keep(&words) {
                continue;
            }
            let residual = self.equation_at(x, &words);
            if !residual.is_empty() {
                let rendered: Vec<String> = residual
                    .iter()
                    .take(6)
                    .map(|(y, outs)| {
                        let parts: Vec<String> = self
                            .d_slots
                            .iter()
                            .zip(outs)
                            .map(|(&si, &u)| self.slots[si].algebra.label(u).to_string())
                            .collect();
                        if parts.is_empty() {
                            self.gens[*y as usize].name.clone()
                        } else {
                            format!("{}⊗{}", parts.join("⊗"), self.gens[*y as usize].name)
                        }
                    })
                    .collect();
                report.violations.push(Violation {
                    source: self.gens[x as usize].name.clone(),
                    words: self
                        .a_slots
                        .iter()
                        .zip(&words)
                        .map(|(&si, w)| {
                            w.iter()
                                .map(|&a| self.slots[si].algebra.label(a).to_string())
                                .collect()
                        })
                        .collect(),
                    residual: rendered,
                });
            }
        }
        report
    }

    pub fn assert_structure(&self) -> Result<()> {
        let report = self.check_structure();
        if report.ok() {
            Ok(())
        } else {
            Err(Error::ShapeMismatch(format!(
                "{}: structure equation fails: {}",
                self.name, report.violations[0]
            )))
        }
    }

    // ----- duals, side conversion, slot order -----

    /// Transposes all structure maps and flips every slot's side. Input
    /// words reverse: the transpose of an iterated action consumes its
    /// inputs outermost-first.
    pub fn dual(&self) -> AInfObject {
        let slots: Vec<Slot> = self
            .slots
            .iter()
            .map(|s| Slot::new(s.algebra.clone(), s.side.flip(), s.flavor))
            .collect();
        let ops: Vec<OpEntry> = self
            .ops
            .iter()
            .map(|e| OpEntry {
                source: e.target,
                words: e.words.iter().map(|w| w.iter().rev().copied().collect()).collect(),
                target: e.source,
                outputs: e.outputs.clone(),
            })
            .collect();
        let gens: Vec<Generator> = self
            .gens
            .iter()
            .map(|g| Generator { name: g.name.clone(), idem: g.idem.clone(), degree: -g.degree })
            .collect();
        AInfObject::new(format!("dual({})", self.name), slots, gens, ops)
            .expect("dual of a valid object is valid")
    }

    /// Re-houses the object over the opposite algebras: each slot's side
    /// flips and its algebra is replaced by the opposite; data unchanged.
    pub fn to_opposite_side(&self) -> Result<AInfObject> {
        let mut slots = Vec::with_capacity(self.slots.len());
        for s in &self.slots {
            slots.push(Slot::new(Arc::new(s.algebra.opposite()?), s.side.flip(), s.flavor));
        }
        AInfObject::new(format!("opp({})", self.name), slots, self.gens.clone(), self.ops.clone())
    }

    /// Reorders slots by the given permutation (`perm[new] = old`).
    pub fn reorder_slots(&self, perm: &[usize]) -> AInfObject {
        assert_eq!(perm.len(), self.slots.len());
        let slots: Vec<Slot> = perm.iter().map(|&o| self.slots[o].clone()).collect();
        let gens: Vec<Generator> = self
            .gens
            .iter()
            .map(|g| Generator {
                name: g.name.clone(),
                idem: perm.iter().map(|&o| g.idem[o]).collect(),
                degree: g.degree,
            })
            .collect();
        let new_a: Vec<usize> = slots
            .iter()
            .enumerate()
            .filter(|(_, s)| s.flavor == Flavor::A)
            .map(|(i, _)| i)
            .collect();
        let new_d: Vec<usize> = slots
            .iter()
            .enumerate()
            .filter(|(_, s)| s.flavor == Flavor::D)
            .map(|(i, _)| i)
            .collect();
        let ops: Vec<OpEntry> = self
            .ops
            .iter()
            .map(|e| OpEntry {
                source: e.source,
                words: new_a
                    .iter()
                    .map(|&ni| e.words[self.a_ordinal(perm[ni])].clone())
                    .collect(),
                target: e.target,
                outputs: new_d
                    .iter()
                    .map(|&ni| e.outputs[self.d_ordinal(perm[ni])])
                    .collect(),
            })
            .collect();
        let mut obj = AInfObject::new(self.name.clone(), slots, gens, ops)
            .expect("slot reorder preserves validity");
        obj.truncation = self.truncation;
        obj
    }

    /// Canonical slot order: D slots before A slots, Left before Right,
    /// ties broken by algebra name then original position.
    pub fn canonical_slot_order(&self) -> AInfObject {
        let mut order: Vec<usize> = (0..self.slots.len()).collect();
        order.sort_by_key(|&i| {
            let s = &self.slots[i];
            (
                match s.flavor {
                    Flavor::D => 0,
                    Flavor::A => 1,
                },
                match s.side {
                    Side::Left => 0,
                    Side::Right => 1,
                },
                s.algebra.name().to_string(),
                i,
            )
        });
        self.reorder_slots(&order)
    }

    // ----- modulification -----

    fn coefficient_choices(&self, gen: &Generator) -> Vec<Vec<u32>> {
        // one coefficient per D slot
        let mut choices: Vec<Vec<u32>> = vec![Vec::new()];
        for &si in &self.d_slots {
            let slot = &self.slots[si];
            let alg = &slot.algebra;
            let want = gen.idem[si];
            let fits: Vec<u32> = (0..alg.dim() as u32)
                .filter(|&c| match slot.side {
                    Side::Left => alg.right_idem(c) == want,
                    Side::Right => alg.left_idem(c) == want,
                })
                .collect();
            let mut next = Vec::new();
            for base in &choices {
                for &c in &fits {
                    let mut b = base.clone();
                    b.push(c);
                    next.push(b);
                }
            }
            choices = next;
        }
        choices
    }

    fn modulified_name(&self, coeffs: &[u32], gen: &Generator) -> String {
        let mut parts: Vec<String> = Vec::new();
        for (oi, &si) in self.d_slots.iter().enumerate() {
            let alg = &self.slots[si].algebra;
            if !alg.is_idem(coeffs[oi]) {
                parts.push(alg.label(coeffs[oi]).to_string());
            }
        }
        parts.push(gen.name.clone());
        parts.join("*")
    }

    /// The associated module: every D slot is expanded against its algebra
    /// and becomes an A slot carrying the free action.
    pub fn modulify_object(&self) -> Result<AInfObject> {
        let slots: Vec<Slot> = self
            .slots
            .iter()
            .map(|s| Slot::new(s.algebra.clone(), s.side, Flavor::A))
            .collect();
        // generator list
        let mut gens: Vec<Generator> = Vec::new();
        let mut gen_ids: HashMap<(Vec<u32>, u32), u32> = HashMap::new();
        for (gi, g) in self.gens.iter().enumerate() {
            for coeffs in self.coefficient_choices(g) {
                let mut idem = g.idem.clone();
                for (oi, &si) in self.d_slots.iter().enumerate() {
                    let alg = &self.slots[si].algebra;
                    idem[si] = match self.slots[si].side {
                        Side::Left => alg.left_idem(coeffs[oi]),
                        Side::Right => alg.right_idem(coeffs[oi]),
                    };
                }
                let id = gens.len() as u32;
                gen_ids.insert((coeffs.clone(), gi as u32), id);
                let degree = g.degree
                    + self
                        .d_slots
                        .iter()
                        .enumerate()
                        .map(|(oi, &si)| self.slots[si].algebra.degree(coeffs[oi]).unwrap_or(0))
                        .sum::<i64>();
                gens.push(Generator { name: self.modulified_name(&coeffs, g), idem, degree });
            }
        }
        let mut ops: Vec<OpEntry> = Vec::new();
        // coefficient differentials
        for ((coeffs, gi), &id) in &gen_ids {
            for (oi, &si) in self.d_slots.iter().enumerate() {
                let alg = &self.slots[si].algebra;
                for t in alg.d(coeffs[oi]).iter() {
                    let mut c2 = coeffs.clone();
                    c2[oi] = t;
                    let tid = gen_ids[&(c2, *gi)];
                    ops.push(OpEntry {
                        source: id,
                        words: vec![Vec::new(); self.slots.len()],
                        target: tid,
                        outputs: Vec::new(),
                    });
                }
            }
        }
        // free actions on the expanded slots
        for ((coeffs, gi), &id) in &gen_ids {
            for (oi, &si) in self.d_slots.iter().enumerate() {
                let slot = &self.slots[si];
                let alg = &slot.algebra;
                for b in alg.a_plus() {
                    let prod = match slot.side {
                        Side::Left => alg.mul(b, coeffs[oi]),
                        Side::Right => alg.mul(coeffs[oi], b),
                    };
                    for t in prod.iter() {
                        let mut c2 = coeffs.clone();
                        c2[oi] = t;
                        let tid = gen_ids[&(c2, *gi)];
                        let mut words = vec![Vec::new(); self.slots.len()];
                        words[si] = vec![b];
                        ops.push(OpEntry { source: id, words, target: tid, outputs: Vec::new() });
                    }
                }
            }
        }
        // structure entries, coefficients absorbing the outputs
        for e in &self.ops {
            for ((coeffs, gi), &id) in &gen_ids {
                if *gi != e.source {
                    continue;
                }
                // multiply outputs into coefficients, slotwise
                let mut partial: Vec<Vec<u32>> = vec![Vec::new()];
                for (oi, &si) in self.d_slots.iter().enumerate() {
                    let slot = &self.slots[si];
                    let alg = &slot.algebra;
                    let prod = match slot.side {
                        Side::Left => alg.mul(coeffs[oi], e.outputs[oi]),
                        Side::Right => alg.mul(e.outputs[oi], coeffs[oi]),
                    };
                    let mut next = Vec::new();
                    for base in &partial {
                        for t in prod.iter() {
                            let mut b = base.clone();
                            b.push(t);
                            next.push(b);
                        }
                    }
                    partial = next;
                    if partial.is_empty() {
                        break;
                    }
                }
                for c2 in partial {
                    let tid = gen_ids[&(c2, e.target)];
                    let mut words = vec![Vec::new(); self.slots.len()];
                    for (wi, &si) in self.a_slots.iter().enumerate() {
                        words[si] = e.words[wi].clone();
                    }
                    ops.push(OpEntry { source: id, words, target: tid, outputs: Vec::new() });
                }
            }
        }
        // re-number words to the new all-A slot layout
        let slots_len = self.slots.len();
        let ops: Vec<OpEntry> = ops
            .into_iter()
            .map(|e| OpEntry {
                source: e.source,
                words: (0..slots_len).map(|si| e.words[si].clone()).collect(),
                target: e.target,
                outputs: Vec::new(),
            })
            .collect();
        AInfObject::new(format!("mod({})", self.name), slots, gens, ops)
    }

    /// The underlying chain complex of the modulification (differential =
    /// coefficient differentials plus input-free structure entries).
    pub fn modulify_complex(&self) -> Result<ChainComplex> {
        let obj = self.modulify_object()?;
        obj.underlying_complex()
    }

    /// Generators with the input-free entries as differential. For objects
    /// with D slots this is only a complex after modulification; here all
    /// outputs of input-free entries must be idempotents (the internal
    /// differential) or the call fails.
    pub fn underlying_complex(&self) -> Result<ChainComplex> {
        let labels: Vec<String> = self.gens.iter().map(|g| g.name.clone()).collect();
        let mut diff: Vec<Vec<u32>> = vec![Vec::new(); self.gens.len()];
        for e in &self.ops {
            if e.words.iter().all(|w| w.is_empty()) {
                let internal = e
                    .outputs
                    .iter()
                    .zip(&self.d_slots)
                    .all(|(&u, &si)| self.slots[si].algebra.is_idem(u));
                if !internal {
                    return Err(Error::ShapeMismatch(format!(
                        "{}: input-free entry emits algebra factors; modulify first",
                        self.name
                    )));
                }
                diff[e.source as usize].push(e.target);
            }
        }
        let degrees: Vec<i64> = self.gens.iter().map(|g| g.degree).collect();
        ChainComplex::with_degrees(
            labels,
            diff.into_iter().map(F2Vec::from_support_mod2).collect(),
            Some(degrees),
        )
    }

    /// The internal differential: input-free entries whose outputs are all
    /// idempotents.
    pub fn internal_differential(&self) -> Vec<F2Vec> {
        let mut diff: Vec<Vec<u32>> = vec![Vec::new(); self.gens.len()];
        for e in &self.ops {
            if e.words.iter().all(|w| w.is_empty())
                && e.outputs
                    .iter()
                    .zip(&self.d_slots)
                    .all(|(&u, &si)| self.slots[si].algebra.is_idem(u))
            {
                diff[e.source as usize].push(e.target);
            }
        }
        diff.into_iter().map(F2Vec::from_support_mod2).collect()
    }

    /// For objects without A slots: the least k with delta^k = 0, within the
    /// cap. `None` means no such k was found (the object may be unbounded).
    pub fn delta_nilpotency(&self, cap: usize) -> Option<usize> {
        if !self.a_slots.is_empty() {
            return None;
        }
        // terms: (src, tgt, outputs expanded to basis tuples)
        let mut current: Vec<(u32, u32, Vec<u32>)> = cancel_mod2(
            self.ops
                .iter()
                .map(|e| (e.source, e.target, e.outputs.clone()))
                .collect(),
        );
        for k in 1..=cap {
            if current.is_empty() {
                return Some(k);
            }
            let mut next: Vec<(u32, u32, Vec<u32>)> = Vec::new();
            for (src, mid, outs) in &current {
                if let Some(list) = self.ops_by_source.get(mid) {
                    for &i in list {
                        let e = &self.ops[i];
                        let mut partial: Vec<Vec<u32>> = vec![Vec::new()];
                        for (oi, &si) in self.d_slots.iter().enumerate() {
                            let slot = &self.slots[si];
                            let alg = &slot.algebra;
                            let prod = match slot.side {
                                Side::Left => alg.mul(outs[oi], e.outputs[oi]),
                                Side::Right => alg.mul(e.outputs[oi], outs[oi]),
                            };
                            let mut n2 = Vec::new();
                            for base in &partial {
                                for t in prod.iter() {
                                    let mut b = base.clone();
                                    b.push(t);
                                    n2.push(b);
                                }
                            }
                            partial = n2;
                            if partial.is_empty() {
                                break;
                            }
                        }
                        for p in partial {
                            next.push((*src, e.target, p));
                        }
                    }
                }
            }
            current = cancel_mod2(next);
        }
        if current.is_empty() {
            Some(cap + 1)
        } else {
            None
        }
    }
}

// ----- constructors -----

/// A type D structure from triples (source, algebra element, target).
pub fn type_d(
    name: impl Into<String>,
    algebra: Arc<DgAlgebra>,
    side: Side,
    gens: Vec<(String, u32)>,
    delta: &[(usize, F2Vec, usize)],
) -> Result<AInfObject> {
    let slots = vec![Slot::new(algebra, side, Flavor::D)];
    let generators: Vec<Generator> = gens
        .into_iter()
        .map(|(name, idem)| Generator { name, idem: vec![idem], degree: 0 })
        .collect();
    let mut ops = Vec::new();
    for (src, elem, tgt) in delta {
        for u in elem.iter() {
            ops.push(OpEntry {
                source: *src as u32,
                words: Vec::new(),
                target: *tgt as u32,
                outputs: vec![u],
            });
        }
    }
    let obj = AInfObject::new(name, slots, generators, ops)?;
    obj.assert_structure()?;
    Ok(obj)
}

/// A type DD structure from quadruples; slot 1 is (A, Left), slot 2 is
/// (B, Right), matching the convention d(a⊗x⊗b) = da⊗x⊗b + a⊗x⊗db
/// + (a a')⊗y⊗(b' b).
pub fn type_dd(
    name: impl Into<String>,
    left: Arc<DgAlgebra>,
    right: Arc<DgAlgebra>,
    gens: Vec<(String, u32, u32)>,
    delta: &[(usize, F2Vec, F2Vec, usize)],
) -> Result<AInfObject> {
    let slots = vec![
        Slot::new(left, Side::Left, Flavor::D),
        Slot::new(right, Side::Right, Flavor::D),
    ];
    let generators: Vec<Generator> = gens
        .into_iter()
        .map(|(name, i1, i2)| Generator { name, idem: vec![i1, i2], degree: 0 })
        .collect();
    let mut ops = Vec::new();
    for (src, a, b, tgt) in delta {
        for u in a.iter() {
            for v in b.iter() {
                ops.push(OpEntry {
                    source: *src as u32,
                    words: Vec::new(),
                    target: *tgt as u32,
                    outputs: vec![u, v],
                });
            }
        }
    }
    let obj = AInfObject::new(name, slots, generators, ops)?;
    obj.assert_structure()?;
    Ok(obj)
}

/// The DA identity bimodule [Id]: one generator per primitive idempotent,
/// delta_2(x, a) = a ⊗ x', nothing else.
pub fn identity_da(algebra: Arc<DgAlgebra>) -> AInfObject {
    let slots = vec![
        Slot::new(algebra.clone(), Side::Left, Flavor::D),
        Slot::new(algebra.clone(), Side::Right, Flavor::A),
    ];
    let gens: Vec<Generator> = (0..algebra.num_idem())
        .map(|i| Generator { name: format!("id{}", i), idem: vec![i, i], degree: 0 })
        .collect();
    let mut ops = Vec::new();
    for a in algebra.a_plus() {
        ops.push(OpEntry {
            source: algebra.left_idem(a),
            words: vec![vec![a]],
            target: algebra.right_idem(a),
            outputs: vec![a],
        });
    }
    let obj = AInfObject::new(format!("[Id]({})", algebra.name()), slots, gens, ops)
        .expect("identity bimodule is valid");
    debug_assert!(obj.check_structure().ok());
    obj
}

/// The algebra as a dg bimodule over itself.
pub fn regular_bimodule(algebra: Arc<DgAlgebra>) -> AInfObject {
    let slots = vec![
        Slot::new(algebra.clone(), Side::Left, Flavor::A),
        Slot::new(algebra.clone(), Side::Right, Flavor::A),
    ];
    let gens: Vec<Generator> = (0..algebra.dim() as u32)
        .map(|i| Generator {
            name: algebra.label(i).to_string(),
            idem: vec![algebra.left_idem(i), algebra.right_idem(i)],
            degree: algebra.degree(i).unwrap_or(0),
        })
        .collect();
    let mut ops = Vec::new();
    for x in 0..algebra.dim() as u32 {
        for t in algebra.d(x).iter() {
            ops.push(OpEntry {
                source: x,
                words: vec![Vec::new(), Vec::new()],
                target: t,
                outputs: Vec::new(),
            });
        }
        for b in algebra.a_plus() {
            for t in algebra.mul(b, x).iter() {
                ops.push(OpEntry {
                    source: x,
                    words: vec![vec![b], Vec::new()],
                    target: t,
                    outputs: Vec::new(),
                });
            }
            for t in algebra.mul(x, b).iter() {
                ops.push(OpEntry {
                    source: x,
                    words: vec![Vec::new(), vec![b]],
                    target: t,
                    outputs: Vec::new(),
                });
            }
        }
    }
    let obj = AInfObject::new(format!("bimod({})", algebra.name()), slots, gens, ops)
        .expect("regular bimodule is valid");
    debug_assert!(obj.check_structure().ok());
    obj
}

/// The finite bar model on the dual basis of A = A(Z, i), with
/// `delta(phi) = 1⊗d*(phi)⊗1 + sum_xi a(xi)⊗(a(xi)·phi)⊗1 +
/// sum_xi 1⊗(phi·a(xi))⊗a(xi)`, where a·phi and phi·a are the actions
/// dual to multiplication ((a·phi_c) = sum of phi_u over a·u containing c,
/// and mirrored) and the emitted a(xi) factors are compressed by the
/// complementary idempotents, so they live in the complementary summand
/// B = A(Z, -i). The result is a type DD bimodule over (B, B) with slots
/// [(B, Right, D), (B, Left, D)] and phi_c carrying the complements of
/// (left(c), right(c)).
///
/// This is the same bimodule as dual(K) ⊠ dual(A-bimodule) ⊠ K for the
/// identity DD bimodule K (checked in the tests), which is how the
/// divided-action reading was pinned down.
pub fn bar_small(algebra: Arc<DgAlgebra>, complement: Arc<DgAlgebra>) -> Result<AInfObject> {
    let pmc = algebra
        .pmc()
        .ok_or_else(|| Error::ShapeMismatch("bar model needs a strand algebra".into()))?
        .clone();
    if complement.pmc() != Some(&pmc)
        || complement.weight().zip(algebra.weight()).map(|(a, b)| a + b) != Some(0)
    {
        return Err(Error::ShapeMismatch(
            "bar model needs the complementary-weight summand of the same circle".into(),
        ));
    }
    let full_mask: u32 = (1 << pmc.num_pairs()) - 1;
    let compl = |id: u32| -> u32 {
        let mask = algebra.idem_mask(id).expect("strand idempotent");
        (0..complement.num_idem())
            .find(|&j| complement.idem_mask(j) == Some(full_mask & !mask))
            .expect("complementary idempotent")
    };
    let slots = vec![
        Slot::new(complement.clone(), Side::Right, Flavor::D),
        Slot::new(complement.clone(), Side::Left, Flavor::D),
    ];
    let gens: Vec<Generator> = (0..algebra.dim() as u32)
        .map(|c| Generator {
            name: format!("{}^", algebra.label(c)),
            idem: vec![compl(algebra.left_idem(c)), compl(algebra.right_idem(c))],
            degree: -algebra.degree(c).unwrap_or(0),
        })
        .collect();
    let mut ops: Vec<OpEntry> = Vec::new();
    let dim = algebra.dim() as u32;
    // dual differential: phi_c -> phi_{c'} for d(c') ∋ c
    for c in 0..dim {
        for cp in 0..dim {
            if algebra.d(cp).contains(c) {
                ops.push(OpEntry {
                    source: c,
                    words: Vec::new(),
                    target: cp,
                    outputs: vec![
                        complement.idem_elem(compl(algebra.left_idem(c))),
                        complement.idem_elem(compl(algebra.right_idem(c))),
                    ],
                });
            }
        }
    }
    for chord in pmc.chords() {
        let act = algebra.chord_elem(chord)?;
        let out = complement.chord_elem(chord)?;
        if act.is_zero() || out.is_zero() {
            continue;
        }
        for c in 0..dim {
            // first displayed sum: a(xi) ⊗ (a(xi)·phi_c) ⊗ 1 with
            // (a·phi_c) = sum of phi_u over c in a·u
            for u in 0..dim {
                let act_count = act
                    .iter()
                    .filter(|&b| {
                        algebra.right_idem(b) == algebra.left_idem(u)
                            && algebra.mul(b, u).contains(c)
                    })
                    .count();
                if act_count % 2 == 1 {
                    for b_out in out.iter() {
                        // slot 0 (Right): b ∈ i(tgt) B i(src)
                        if complement.left_idem(b_out) == compl(algebra.left_idem(u))
                            && complement.right_idem(b_out) == compl(algebra.left_idem(c))
                        {
                            ops.push(OpEntry {
                                source: c,
                                words: Vec::new(),
                                target: u,
                                outputs: vec![
                                    b_out,
                                    complement.idem_elem(compl(algebra.right_idem(c))),
                                ],
                            });
                        }
                    }
                }
                // second displayed sum: 1 ⊗ (phi_c·a(xi)) ⊗ a(xi) with
                // (phi_c·a) = sum of phi_u over c in u·a
                let act_count = act
                    .iter()
                    .filter(|&b| {
                        algebra.left_idem(b) == algebra.right_idem(u)
                            && algebra.mul(u, b).contains(c)
                    })
                    .count();
                if act_count % 2 == 1 {
                    for b_out in out.iter() {
                        // slot 1 (Left): b ∈ i(src) B i(tgt)
                        if complement.left_idem(b_out) == compl(algebra.right_idem(c))
                            && complement.right_idem(b_out) == compl(algebra.right_idem(u))
                        {
                            ops.push(OpEntry {
                                source: c,
                                words: Vec::new(),
                                target: u,
                                outputs: vec![
                                    complement.idem_elem(compl(algebra.left_idem(c))),
                                    b_out,
                                ],
                            });
                        }
                    }
                }
            }
        }
    }
    let obj = AInfObject::new(format!("bar({})", algebra.name()), slots, gens, ops)?;
    obj.assert_structure()?;
    Ok(obj)
}

// ----- box tensor -----

/// The box tensor product, pairing the A-flavored slot `p_slot` of `p` with
/// the D-flavored slot `q_slot` of `q` (opposite sides, same algebra).
/// Result slots: p's remaining slots then q's remaining slots.
pub fn box_tensor(
    p: &AInfObject,
    q: &AInfObject,
    p_slot: usize,
    q_slot: usize,
) -> Result<AInfObject> {
    let ps = &p.slots[p_slot];
    let qs = &q.slots[q_slot];
    if ps.flavor != Flavor::A || qs.flavor != Flavor::D {
        return Err(Error::SlotMismatch("box needs an A slot against a D slot".into()));
    }
    if ps.side == qs.side {
        return Err(Error::SlotMismatch("box pairs slots on opposite sides".into()));
    }
    if !ps.same_algebra(qs) {
        return Err(Error::AlgebraMismatch(
            ps.algebra.name().to_string(),
            qs.algebra.name().to_string(),
        ));
    }
    if p.truncation.is_some() || q.truncation.is_some() {
        return Err(Error::ConvergenceRisk(
            "boxing truncated operation tables is not supported".into(),
        ));
    }
    let _alg = &ps.algebra;
    let p_paired_ord = p.a_ordinal(p_slot);
    let q_paired_ord = q.d_ordinal(q_slot);

    // maximum arity p feeds on the paired slot
    let max_k = p.ops.iter().map(|e| e.words[p_paired_ord].len()).max().unwrap_or(0);

    // result slots and generator numbering
    let p_rest: Vec<usize> = (0..p.slots.len()).filter(|&i| i != p_slot).collect();
    let q_rest: Vec<usize> = (0..q.slots.len()).filter(|&i| i != q_slot).collect();
    let mut slots: Vec<Slot> = p_rest.iter().map(|&i| p.slots[i].clone()).collect();
    slots.extend(q_rest.iter().map(|&i| q.slots[i].clone()));
    let mut gens: Vec<Generator> = Vec::new();
    let mut gen_ids: HashMap<(u32, u32), u32> = HashMap::new();
    for (pi, pg) in p.gens.iter().enumerate() {
        for (qi, qg) in q.gens.iter().enumerate() {
            if pg.idem[p_slot] != qg.idem[q_slot] {
                continue;
            }
            let mut idem: Vec<u32> = p_rest.iter().map(|&i| pg.idem[i]).collect();
            idem.extend(q_rest.iter().map(|&i| qg.idem[i]));
            let id = gens.len() as u32;
            gen_ids.insert((pi as u32, qi as u32), id);
            gens.push(Generator {
                name: format!("{}*{}", pg.name, qg.name),
                idem,
                degree: pg.degree + qg.degree,
            });
        }
    }

    let result_a: Vec<usize> = slots
        .iter()
        .enumerate()
        .filter(|(_, s)| s.flavor == Flavor::A)
        .map(|(i, _)| i)
        .collect();
    let result_d: Vec<usize> = slots
        .iter()
        .enumerate()
        .filter(|(_, s)| s.flavor == Flavor::D)
        .map(|(i, _)| i)
        .collect();
    // map: result a-ordinal sources: from p (a-ordinal in p) or q
    enum From {
        P(usize),
        Q(usize),
    }
    let a_from: Vec<From> = result_a
        .iter()
        .map(|&ri| {
            if ri < p_rest.len() {
                From::P(p.a_ordinal(p_rest[ri]))
            } else {
                From::Q(q.a_ordinal(q_rest[ri - p_rest.len()]))
            }
        })
        .collect();
    let d_from: Vec<From> = result_d
        .iter()
        .map(|&ri| {
            if ri < p_rest.len() {
                From::P(p.d_ordinal(p_rest[ri]))
            } else {
                From::Q(q.d_ordinal(q_rest[ri - p_rest.len()]))
            }
        })
        .collect();

    let mut ops: Vec<OpEntry> = Vec::new();
    let emit = |pi: u32,
                    qi: u32,
                    p_entry: Option<&OpEntry>,
                    q_words: &[Vec<u32>],
                    q_outs: &[F2Vec],
                    p_target: u32,
                    q_target: u32,
                    ops: &mut Vec<OpEntry>| {
        let Some(&src) = gen_ids.get(&(pi, qi)) else { return };
        let Some(&tgt) = gen_ids.get(&(p_target, q_target)) else { return };
        let words: Vec<Vec<u32>> = a_from
            .iter()
            .map(|f| match f {
                From::P(ord) => p_entry.map(|e| e.words[*ord].clone()).unwrap_or_default(),
                From::Q(ord) => q_words[*ord].clone(),
            })
            .collect();
        // cross-expand q outputs
        let mut outs: Vec<Vec<u32>> = vec![Vec::new()];
        for f in &d_from {
            let choices: Vec<u32> = match f {
                From::P(ord) => match p_entry {
                    Some(e) => vec![e.outputs[*ord]],
                    None => {
                        // p idle: idempotent of the p generator
                        let pg = &p.gens[pi as usize];
                        let si = p.d_slots[*ord];
                        vec![p.slots[si].algebra.idem_elem(pg.idem[si])]
                    }
                },
                From::Q(ord) => q_outs[*ord].iter().collect(),
            };
            let mut next = Vec::new();
            for base in &outs {
                for &c in &choices {
                    let mut b = base.clone();
                    b.push(c);
                    next.push(b);
                }
            }
            outs = next;
            if outs.is_empty() {
                return;
            }
        }
        for o in outs {
            ops.push(OpEntry { source: src, words: words.clone(), target: tgt, outputs: o });
        }
    };

    // k = 0: p acts alone with an empty paired word
    for e in &p.ops {
        if !e.words[p_paired_ord].is_empty() {
            continue;
        }
        for (qi, _qg) in q.gens.iter().enumerate() {
            let q_words: Vec<Vec<u32>> = vec![Vec::new(); q.a_slots.len()];
            let q_outs: Vec<F2Vec> = q
                .d_slots
                .iter()
                .enumerate()
                .filter(|(_, &si)| si != q_slot)
                .map(|(oi, &si)| {
                    let _ = oi;
                    F2Vec::singleton(q.slots[si].algebra.idem_elem(q.gens[qi].idem[si]))
                })
                .collect();
            // q_outs here indexed by q's d-ordinals EXCLUDING paired; rebuild full-length below
            let mut full_outs: Vec<F2Vec> = Vec::with_capacity(q.d_slots.len());
            let mut it = q_outs.into_iter();
            for &si in &q.d_slots {
                if si == q_slot {
                    full_outs.push(F2Vec::zero()); // unused
                } else {
                    full_outs.push(it.next().unwrap());
                }
            }
            emit(e.source, qi as u32, Some(e), &q_words, &full_outs, e.target, qi as u32, &mut ops);
        }
    }

    // pass-through: a single q entry with an idempotent paired output
    for e in &q.ops {
        let u = e.outputs[q_paired_ord];
        if !alg_is_idem(&qs.algebra, u) {
            continue;
        }
        for (pi, _pg) in p.gens.iter().enumerate() {
            let q_outs: Vec<F2Vec> =
                e.outputs.iter().map(|&o| F2Vec::singleton(o)).collect();
            emit(pi as u32, e.source, None, &e.words, &q_outs, pi as u32, e.target, &mut ops);
        }
    }

    // k >= 1 sequences of q entries, all paired outputs in the augmentation
    // ideal, feeding a p entry whose paired word matches
    struct DfsState {
        q_gen: u32,
        paired_word: Vec<u32>,
        q_words: Vec<Vec<u32>>,
        q_outs: Vec<F2Vec>,
    }
    for (q0, _) in q.gens.iter().enumerate() {
        let init = DfsState {
            q_gen: q0 as u32,
            paired_word: Vec::new(),
            q_words: vec![Vec::new(); q.a_slots.len()],
            q_outs: q
                .d_slots
                .iter()
                .map(|&si| {
                    F2Vec::singleton(q.slots[si].algebra.idem_elem(q.gens[q0].idem[si]))
                })
                .collect(),
        };
        let mut stack = vec![init];
        while let Some(state) = stack.pop() {
            if state.paired_word.len() >= 1 {
                // try to feed p
                for (pi, _) in p.gens.iter().enumerate() {
                    if p.gens[pi].idem[p_slot] != q.gens[q0].idem[q_slot] {
                        continue;
                    }
                    let key_ops = p.ops_by_source.get(&(pi as u32));
                    if let Some(list) = key_ops {
                        for &ei in list {
                            let e = &p.ops[ei];
                            if e.words[p_paired_ord] != state.paired_word {
                                continue;
                            }
                            emit(
                                pi as u32,
                                q0 as u32,
                                Some(e),
                                &state.q_words,
                                &state.q_outs,
                                e.target,
                                state.q_gen,
                                &mut ops,
                            );
                        }
                    }
                }
            }
            if state.paired_word.len() >= max_k {
                continue;
            }
            if let Some(list) = q.ops_by_source.get(&state.q_gen) {
                for &ei in list {
                    let e = &q.ops[ei];
                    let u = e.outputs[q_paired_ord];
                    if alg_is_idem(&qs.algebra, u) {
                        continue; // strict unitality kills longer sequences
                    }
                    let mut q_outs = Vec::with_capacity(state.q_outs.len());
                    let mut dead = false;
                    for (oi, &si) in q.d_slots.iter().enumerate() {
                        if si == q_slot {
                            q_outs.push(F2Vec::zero());
                            continue;
                        }
                        let slot = &q.slots[si];
                        let acc = &state.q_outs[oi];
                        let mut next = F2Vec::zero();
                        for c in acc.iter() {
                            let prod = match slot.side {
                                Side::Left => slot.algebra.mul(c, e.outputs[oi]),
                                Side::Right => slot.algebra.mul(e.outputs[oi], c),
                            };
                            next.add_assign(prod);
                        }
                        if next.is_zero() {
                            dead = true;
                            break;
                        }
                        q_outs.push(next);
                    }
                    if dead {
                        continue;
                    }
                    let mut paired_word = state.paired_word.clone();
                    paired_word.push(u);
                    let q_words: Vec<Vec<u32>> = state
                        .q_words
                        .iter()
                        .zip(&e.words)
                        .map(|(acc, w)| {
                            let mut v = acc.clone();
                            v.extend_from_slice(w);
                            v
                        })
                        .collect();
                    stack.push(DfsState { q_gen: e.target, paired_word, q_words, q_outs });
                }
            }
        }
    }

    let obj = AInfObject::new(format!("{}⊠{}", p.name, q.name), slots, gens, ops)?;
    obj.assert_structure()?;
    Ok(obj)
}

fn alg_is_idem(alg: &Arc<DgAlgebra>, basis: u32) -> bool {
    alg.is_idem(basis)
}

/// Finds the unique valid pairing between an A slot of `p` and a D slot of
/// `q` and boxes along it; errors when none or several exist.
pub fn box_auto(p: &AInfObject, q: &AInfObject) -> Result<AInfObject> {
    let mut found = Vec::new();
    for (i, ps) in p.slots.iter().enumerate() {
        for (j, qs) in q.slots.iter().enumerate() {
            if ps.flavor == Flavor::A
                && qs.flavor == Flavor::D
                && ps.side != qs.side
                && ps.same_algebra(qs)
            {
                found.push((i, j));
            }
        }
    }
    match found.as_slice() {
        [] => Err(Error::SlotMismatch(format!(
            "no A/D slot pairing between {} and {}",
            p.name, q.name
        ))),
        [(i, j)] => box_tensor(p, q, *i, *j),
        _ => Err(Error::SlotMismatch(format!(
            "ambiguous slot pairing between {} and {}; specify slots",
            p.name, q.name
        ))),
    }
}

// ----- homotopy transfer -----

/// Transfer of the operations along a retract of the internal differential.
/// Returns the induced structure on the small complex together with the
/// quasi-isomorphism data F (entries targeting big generators).
pub fn transfer(
    obj: &AInfObject,
    retract: &RetractData,
    max_word_len: usize,
) -> Result<(AInfObject, Vec<OpEntry>)> {
    if retract.big.dim() != obj.gens.len() {
        return Err(Error::ShapeMismatch("retract does not match the object".into()));
    }
    let d0 = obj.internal_differential();
    for i in 0..obj.gens.len() as u32 {
        if retract.big.d(i) != &d0[i as usize] {
            return Err(Error::ShapeMismatch(
                "retract differential differs from the object's internal differential".into(),
            ));
        }
    }
    // perturbation entries: everything that is not internal differential
    let perturbation: Vec<&OpEntry> = obj
        .ops
        .iter()
        .filter(|e| {
            !(e.words.iter().all(|w| w.is_empty())
                && e.outputs
                    .iter()
                    .zip(&obj.d_slots)
                    .all(|(&u, &si)| obj.slots[si].algebra.is_idem(u)))
        })
        .collect();
    let mut pert_by_source: HashMap<u32, Vec<&OpEntry>> = HashMap::new();
    for e in &perturbation {
        pert_by_source.entry(e.source).or_default().push(e);
    }

    let small_gens: Vec<Generator> = retract
        .surviving
        .iter()
        .map(|&i| obj.gens[i as usize].clone())
        .collect();

    #[derive(Clone)]
    struct Path {
        gen: u32,
        words: Vec<Vec<u32>>,
        outs: Vec<F2Vec>,
        stages: usize,
    }

    let mut ops: Vec<OpEntry> = Vec::new();
    let mut f_entries: Vec<OpEntry> = Vec::new();
    const STAGE_CAP: usize = 64;

    for (xs, f_img) in retract.f.iter().enumerate() {
        // arity-0 part of F: the retract inclusion with idempotent outputs
        for b in f_img.iter() {
            f_entries.push(OpEntry {
                source: xs as u32,
                words: vec![Vec::new(); obj.a_slots.len()],
                target: b,
                outputs: obj
                    .d_slots
                    .iter()
                    .map(|&si| obj.slots[si].algebra.idem_elem(obj.gens[b as usize].idem[si]))
                    .collect(),
            });
        }
        let mut stack: Vec<Path> = f_img
            .iter()
            .map(|b| Path {
                gen: b,
                words: vec![Vec::new(); obj.a_slots.len()],
                outs: obj
                    .d_slots
                    .iter()
                    .map(|&si| {
                        F2Vec::singleton(
                            obj.slots[si].algebra.idem_elem(obj.gens[b as usize].idem[si]),
                        )
                    })
                    .collect(),
                stages: 0,
            })
            .collect();
        while let Some(path) = stack.pop() {
            if path.stages > STAGE_CAP {
                return Err(Error::SizeLimit("transfer zigzag exceeds stage cap".into()));
            }
            let Some(entries) = pert_by_source.get(&path.gen) else { continue };
            for e in entries {
                let total: usize = path.words.iter().map(|w| w.len()).sum::<usize>() + e.arity();
                if total > max_word_len {
                    continue;
                }
                let words: Vec<Vec<u32>> = path
                    .words
                    .iter()
                    .zip(&e.words)
                    .map(|(acc, w)| {
                        let mut v = acc.clone();
                        v.extend_from_slice(w);
                        v
                    })
                    .collect();
                let mut outs: Vec<F2Vec> = Vec::with_capacity(path.outs.len());
                let mut dead = false;
                for (oi, &si) in obj.d_slots.iter().enumerate() {
                    let slot = &obj.slots[si];
                    let mut next = F2Vec::zero();
                    for c in path.outs[oi].iter() {
                        let prod = match slot.side {
                            Side::Left => slot.algebra.mul(c, e.outputs[oi]),
                            Side::Right => slot.algebra.mul(e.outputs[oi], c),
                        };
                        next.add_assign(prod);
                    }
                    if next.is_zero() {
                        dead = true;
                        break;
                    }
                    outs.push(next);
                }
                if dead {
                    continue;
                }
                // end with g: transferred operation
                for y in retract.g[e.target as usize].iter() {
                    let mut expanded: Vec<Vec<u32>> = vec![Vec::new()];
                    for acc in &outs {
                        let mut next = Vec::new();
                        for base in &expanded {
                            for c in acc.iter() {
                                let mut b = base.clone();
                                b.push(c);
                                next.push(b);
                            }
                        }
                        expanded = next;
                    }
                    for o in expanded {
                        ops.push(OpEntry {
                            source: xs as u32,
                            words: words.clone(),
                            target: y,
                            outputs: o,
                        });
                    }
                }
                // end with T: part of the quasi-isomorphism F
                for y in retract.t[e.target as usize].iter() {
                    let mut expanded: Vec<Vec<u32>> = vec![Vec::new()];
                    for acc in &outs {
                        let mut next = Vec::new();
                        for base in &expanded {
                            for c in acc.iter() {
                                let mut b = base.clone();
                                b.push(c);
                                next.push(b);
                            }
                        }
                        expanded = next;
                    }
                    for o in expanded {
                        f_entries.push(OpEntry {
                            source: xs as u32,
                            words: words.clone(),
                            target: y,
                            outputs: o,
                        });
                    }
                }
                // continue through T
                for y in retract.t[e.target as usize].iter() {
                    stack.push(Path {
                        gen: y,
                        words: words.clone(),
                        outs: outs.clone(),
                        stages: path.stages + 1,
                    });
                }
            }
        }
    }

    let ops = cancel_mod2(ops);
    let truncated = ops.iter().any(|e| e.arity() == max_word_len);
    let mut small = AInfObject::new(format!("transfer({})", obj.name), obj.slots.clone(), small_gens, ops)?;
    if truncated {
        small.truncation = Some(max_word_len);
    }
    small.assert_structure()?;
    Ok((small, cancel_mod2(f_entries)))
}

/// Shorthand: reduce the internal differential of `obj` and transfer.
pub fn reduce_object(obj: &AInfObject, max_word_len: usize) -> Result<(AInfObject, Vec<OpEntry>)> {
    let complex = ChainComplex::new(
        obj.gens.iter().map(|g| g.name.clone()).collect(),
        obj.internal_differential(),
    )?;
    let retract = crate::chain::reduce_retract(&complex)?;
    transfer(obj, &retract, max_word_len)
}

/// Structural equality modulo the generator bijection induced by matching
/// idempotent vectors; both objects must have at most one generator per
/// idempotent vector and identical slot shapes.
pub fn equal_via_idem_bijection(a: &AInfObject, b: &AInfObject) -> bool {
    if a.slots.len() != b.slots.len() || a.gens.len() != b.gens.len() {
        return false;
    }
    for (x, y) in a.slots.iter().zip(&b.slots) {
        if x.side != y.side || x.flavor != y.flavor || !x.same_algebra(y) {
            return false;
        }
    }
    let mut map: HashMap<&[u32], u32> = HashMap::new();
    for (i, g) in b.gens.iter().enumerate() {
        if map.insert(&g.idem, i as u32).is_some() {
            return false;
        }
    }
    let mut translated: Vec<OpEntry> = Vec::new();
    for e in &a.ops {
        let Some(&src) = map.get(a.gens[e.source as usize].idem.as_slice()) else {
            return false;
        };
        let Some(&tgt) = map.get(a.gens[e.target as usize].idem.as_slice()) else {
            return false;
        };
        translated.push(OpEntry {
            source: src,
            words: e.words.clone(),
            target: tgt,
            outputs: e.outputs.clone(),
        });
    }
    cancel_mod2(translated) == b.ops
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::AlgebraCaps;
    use crate::pmc::{standard, StandardName};

    fn torus_alg() -> Arc<DgAlgebra> {
        crate::algebra::strand_algebra_summand(
            &standard(&StandardName::Torus),
            0,
            &AlgebraCaps::default(),
        )
        .unwrap()
    }

    #[test]
    fn identity_da_is_valid_and_boxes_trivially() {
        let alg = torus_alg();
        let id = identity_da(alg.clone());
        assert!(id.check_structure().ok());
        // a one-generator type D structure: delta(s) = a(2,4-chord) s
        let a24 = alg.chord_elem(crate::pmc::Chord::new(2, 4)).unwrap();
        let i1 = alg.idem_id_of(alg.idempotent(&[1]).unwrap()).unwrap();
        let m = type_d(
            "cfd-inf",
            alg.clone(),
            Side::Left,
            vec![("s".into(), i1)],
            &[(0, a24, 0)],
        )
        .unwrap();
        let boxed = box_auto(&id, &m).unwrap();
        assert!(equal_via_idem_bijection(&boxed, &m));
    }

    #[test]
    fn regular_bimodule_modulifies_to_the_algebra() {
        let alg = torus_alg();
        let bim = regular_bimodule(alg.clone());
        assert!(bim.check_structure().ok());
        let c = bim.underlying_complex().unwrap();
        assert_eq!(c.dim(), alg.dim());
    }

    #[test]
    fn dual_is_an_involution() {
        let alg = torus_alg();
        let a24 = alg.chord_elem(crate::pmc::Chord::new(2, 4)).unwrap();
        let i1 = alg.idem_id_of(alg.idempotent(&[1]).unwrap()).unwrap();
        let m = type_d("m", alg, Side::Left, vec![("s".into(), i1)], &[(0, a24, 0)]).unwrap();
        let dd = m.dual().dual();
        assert!(equal_via_idem_bijection(&dd, &m));
        assert_eq!(m.dual().slots()[0].side, Side::Right);
    }
}
