//! Packaged algebras, modules and bimodules with the exact data used in the
//! computations: the torus algebra with its eight-element basis, solid-torus
//! type D structures, the -2-framed trefoil complement, identity and
//! half-identity DD bimodules, and quadratic/cobar Koszul examples.

use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use crate::algebra::{strand_algebra_summand, AlgebraCaps, DgAlgebra};
use crate::error::{Error, Result};
use crate::f2::{F2Vec, Rref};
use crate::module::{type_d, type_dd, AInfObject, Flavor, Generator, OpEntry, Side, Slot};
use crate::pmc::{standard, Chord, PointedMatchedCircle, StandardName};

fn algebra_cache() -> &'static Mutex<HashMap<(Vec<(usize, usize)>, i64), Arc<DgAlgebra>>> {
    static CACHE: OnceLock<Mutex<HashMap<(Vec<(usize, usize)>, i64), Arc<DgAlgebra>>>> =
        OnceLock::new();
    CACHE.get_or_init(|| Mutex::new(HashMap::new()))
}

/// The summand A(Z, i), cached; the torus summand A(T^2, 0) comes back with
/// its standard labels iota0, iota1, rho1, ..., rho123.
pub fn algebra(pmc: &PointedMatchedCircle, i: i64) -> Result<Arc<DgAlgebra>> {
    let key = (pmc.matching().to_vec(), i);
    if let Some(hit) = algebra_cache().lock().unwrap().get(&key) {
        return Ok(hit.clone());
    }
    let torus = standard(&StandardName::Torus);
    let alg = if *pmc == torus && i == 0 {
        torus_algebra()
    } else {
        strand_algebra_summand(pmc, i, &AlgebraCaps::default())?
    };
    algebra_cache().lock().unwrap().insert(key, alg.clone());
    Ok(alg)
}

/// A(T^2, 0) with the eight-element labeled basis. Built generatively and
/// relabeled through the canonical identification a([1,2]) -> rho1,
/// a([2,3]) -> rho2, a([3,4]) -> rho3; the full multiplication table is
/// verified against the displayed relations at construction.
pub fn torus_algebra() -> Arc<DgAlgebra> {
    static TORUS: OnceLock<Arc<DgAlgebra>> = OnceLock::new();
    TORUS
        .get_or_init(|| {
            let torus = standard(&StandardName::Torus);
            let alg = strand_algebra_summand(&torus, 0, &AlgebraCaps::default())
                .expect("torus algebra construction");
            relabel_torus(&alg).expect("torus relabeling")
        })
        .clone()
}

fn single(v: &F2Vec) -> Result<u32> {
    if v.len() == 1 {
        Ok(v.iter().next().unwrap())
    } else {
        Err(Error::ShapeMismatch("expected a single basis element".into()))
    }
}

fn relabel_torus(alg: &Arc<DgAlgebra>) -> Result<Arc<DgAlgebra>> {
    if alg.dim() != 8 {
        return Err(Error::ShapeMismatch(format!(
            "torus algebra has dimension {}, expected 8",
            alg.dim()
        )));
    }
    let chord = |p, q| -> Result<u32> { single(&alg.chord_elem(Chord::new(p, q))?) };
    let iota0 = alg.idempotent(&[0])?;
    let iota1 = alg.idempotent(&[1])?;
    let named: [(u32, &str); 8] = [
        (iota0, "iota0"),
        (iota1, "iota1"),
        (chord(1, 2)?, "rho1"),
        (chord(2, 3)?, "rho2"),
        (chord(3, 4)?, "rho3"),
        (chord(1, 3)?, "rho12"),
        (chord(2, 4)?, "rho23"),
        (chord(1, 4)?, "rho123"),
    ];
    let mut labels: Vec<Option<String>> = vec![None; 8];
    for (idx, name) in named {
        if labels[idx as usize].replace(name.to_string()).is_some() {
            return Err(Error::ShapeMismatch("torus labels collide".into()));
        }
    }
    let labels: Vec<String> = labels.into_iter().map(|l| l.expect("torus label")).collect();
    let relabeled = Arc::new(alg.relabeled("A(T2,0)", labels)?);
    verify_torus_table(&relabeled)?;
    Ok(relabeled)
}

/// The displayed relations and the full induced multiplication table.
fn verify_torus_table(alg: &Arc<DgAlgebra>) -> Result<()> {
    let by = |l: &str| alg.by_label(l).expect("torus label");
    let e = |l: &str| F2Vec::singleton(by(l));
    let check = |a: &str, b: &str, want: &F2Vec| -> Result<()> {
        if &alg.mul_elem(&e(a), &e(b)) != want {
            return Err(Error::ShapeMismatch(format!("torus relation {a}*{b} fails")));
        }
        Ok(())
    };
    // the nine displayed relations
    check("iota0", "rho1", &e("rho1"))?;
    check("rho1", "iota1", &e("rho1"))?;
    check("iota1", "rho2", &e("rho2"))?;
    check("rho2", "iota0", &e("rho2"))?;
    check("iota0", "rho3", &e("rho3"))?;
    check("rho3", "iota1", &e("rho3"))?;
    check("rho1", "rho2", &e("rho12"))?;
    check("rho2", "rho3", &e("rho23"))?;
    check("rho1", "rho23", &e("rho123"))?;
    check("rho12", "rho3", &e("rho123"))?;
    check("rho3", "rho2", &F2Vec::zero())?;
    check("rho2", "rho1", &F2Vec::zero())?;
    // orthogonal idempotents
    check("iota0", "iota1", &F2Vec::zero())?;
    check("iota1", "iota0", &F2Vec::zero())?;
    check("iota0", "iota0", &e("iota0"))?;
    check("iota1", "iota1", &e("iota1"))?;
    // no differential anywhere
    for i in 0..8 {
        if !alg.d(i).is_zero() {
            return Err(Error::ShapeMismatch("torus algebra has a differential".into()));
        }
    }
    // the full table: every product not forced above vanishes
    let nonzero: HashMap<(u32, u32), F2Vec> = [
        (("rho1", "rho2"), e("rho12")),
        (("rho2", "rho3"), e("rho23")),
        (("rho1", "rho23"), e("rho123")),
        (("rho12", "rho3"), e("rho123")),
    ]
    .into_iter()
    .map(|((a, b), v)| ((by(a), by(b)), v))
    .collect();
    for a in 0..8u32 {
        for b in 0..8u32 {
            let got = alg.mul(a, b).clone();
            let want = if alg.is_idem(a) {
                if alg.left_idem(b) == alg.idem_id_of(a).unwrap() {
                    F2Vec::singleton(b)
                } else {
                    F2Vec::zero()
                }
            } else if alg.is_idem(b) {
                if alg.right_idem(a) == alg.idem_id_of(b).unwrap() {
                    F2Vec::singleton(a)
                } else {
                    F2Vec::zero()
                }
            } else {
                nonzero.get(&(a, b)).cloned().unwrap_or_default()
            };
            if got != want {
                return Err(Error::ShapeMismatch(format!(
                    "torus table mismatch at {}*{}",
                    alg.label(a),
                    alg.label(b)
                )));
            }
        }
    }
    Ok(())
}

/// Re-runs the relabeling isomorphism and the full table verification on a
/// freshly built generative torus algebra.
pub fn verify_generative_torus(alg: &Arc<DgAlgebra>) -> Result<()> {
    relabel_torus(alg).map(|_| ())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Framing {
    Infinity,
    Zero,
}

/// CFD of the infinity- or zero-framed solid torus.
pub fn cfd_solid_torus(framing: Framing) -> AInfObject {
    let alg = torus_algebra();
    let (name, gen, idem, rho) = match framing {
        Framing::Infinity => ("cfd.inf", "s", "iota1", "rho23"),
        Framing::Zero => ("cfd.zero", "t", "iota0", "rho12"),
    };
    let idem_id = alg.idem_id_of(alg.by_label(idem).unwrap()).unwrap();
    let out = F2Vec::singleton(alg.by_label(rho).unwrap());
    type_d(name, alg, Side::Left, vec![(gen.into(), idem_id)], &[(0, out, 0)])
        .expect("solid torus module")
}

/// CFD of the -2-framed left-handed trefoil complement.
pub fn cfd_trefoil_m2() -> AInfObject {
    let alg = torus_algebra();
    let i0 = alg.idem_id_of(alg.by_label("iota0").unwrap()).unwrap();
    let i1 = alg.idem_id_of(alg.by_label("iota1").unwrap()).unwrap();
    let e = |l: &str| F2Vec::singleton(alg.by_label(l).unwrap());
    // generators: x1, x2, x3 over iota0; y1, y2 over iota1
    let gens = vec![
        ("x1".to_string(), i0),
        ("x2".to_string(), i0),
        ("x3".to_string(), i0),
        ("y1".to_string(), i1),
        ("y2".to_string(), i1),
    ];
    let delta = [
        (2, e("rho1"), 4),   // x3 -> rho1 y2
        (1, e("rho123"), 4), // x2 -> rho123 y2
        (3, e("rho2"), 1),   // y1 -> rho2 x2
        (0, e("rho3"), 3),   // x1 -> rho3 y1
        (0, e("rho12"), 2),  // x1 -> rho12 x3
    ];
    type_d("cfd.trefoil-2", alg, Side::Left, gens, &delta).expect("trefoil module")
}

fn idem_id_by_mask(alg: &Arc<DgAlgebra>, mask: u32) -> u32 {
    (0..alg.num_idem())
        .find(|&id| alg.idem_mask(id) == Some(mask))
        .expect("idempotent mask")
}

/// The identity DD bimodule in weight i: one generator per complementary
/// idempotent pair, delta(1) = sum over chords of a(xi) ⊗ 1 ⊗ a(xi).
pub fn dd_identity(pmc: &PointedMatchedCircle, i: i64) -> Result<AInfObject> {
    let k = pmc.genus() as i64;
    let alg_l = algebra(pmc, i)?;
    let alg_r = algebra(pmc, -i)?;
    let np = pmc.num_pairs();
    let full: u32 = (1 << np) - 1;
    let occupied = (k + i) as usize;
    let masks: Vec<u32> =
        (0u32..=full).filter(|m| m.count_ones() as usize == occupied).collect();
    let torus_names = masks.len() == 2 && np == 2;
    let gens: Vec<(String, u32, u32)> = masks
        .iter()
        .enumerate()
        .map(|(n, &m)| {
            let name = if torus_names {
                if n == 0 { "x".into() } else { "y".into() }
            } else {
                format!("k{}", n)
            };
            (name, idem_id_by_mask(&alg_l, m), idem_id_by_mask(&alg_r, full & !m))
        })
        .collect();
    let mut delta: Vec<(usize, F2Vec, F2Vec, usize)> = Vec::new();
    for chord in pmc.chords() {
        let a_l = alg_l.chord_elem(chord)?;
        let a_r = alg_r.chord_elem(chord)?;
        for (si, _) in masks.iter().enumerate() {
            for (ti, _) in masks.iter().enumerate() {
                let (sl, _sr) = (gens[si].1, gens[si].2);
                let (tl, _tr) = (gens[ti].1, gens[ti].2);
                let v1: F2Vec = a_l
                    .iter()
                    .filter(|&b| alg_l.left_idem(b) == sl && alg_l.right_idem(b) == tl)
                    .collect();
                if v1.is_zero() {
                    continue;
                }
                let v2: F2Vec = a_r
                    .iter()
                    .filter(|&b| {
                        alg_r.left_idem(b) == gens[ti].2 && alg_r.right_idem(b) == gens[si].2
                    })
                    .collect();
                if v2.is_zero() {
                    continue;
                }
                delta.push((si, v1, v2, ti));
            }
        }
    }
    type_dd(format!("dd.id({},{})", alg_l.name(), i), alg_l, alg_r, gens, &delta)
}

/// The identity DD bimodule of the torus in the middle weight.
pub fn dd_identity_torus() -> AInfObject {
    dd_identity(&standard(&StandardName::Torus), 0).expect("torus identity bimodule")
}

/// The half-identity DD bimodule of the torus:
/// delta(1) = rho1 ⊗ 1 ⊗ rho1 + rho2 ⊗ 1 ⊗ rho2 + rho3 ⊗ 1 ⊗ rho3.
pub fn dd_half_identity_torus() -> AInfObject {
    let alg = torus_algebra();
    let i0 = alg.idem_id_of(alg.by_label("iota0").unwrap()).unwrap();
    let i1 = alg.idem_id_of(alg.by_label("iota1").unwrap()).unwrap();
    let e = |l: &str| F2Vec::singleton(alg.by_label(l).unwrap());
    let gens = vec![("x".to_string(), i0, i1), ("y".to_string(), i1, i0)];
    let delta = [
        (0, e("rho1"), e("rho1"), 1),
        (0, e("rho3"), e("rho3"), 1),
        (1, e("rho2"), e("rho2"), 0),
    ];
    type_dd("dd.halfid.torus", alg.clone(), alg, gens, &delta).expect("half identity bimodule")
}

/// The finite bar model over A(Z, i); a DD bimodule over the
/// complementary-weight summand.
pub fn bar(pmc: &PointedMatchedCircle, i: i64) -> Result<AInfObject> {
    crate::module::bar_small(algebra(pmc, i)?, algebra(pmc, -i)?)
}

/// The packaged torus-scale objects, generated from the displayed formulas.
pub fn fixture_objects() -> Result<Vec<(&'static str, AInfObject)>> {
    let torus = standard(&StandardName::Torus);
    Ok(vec![
        ("cfd.inf", cfd_solid_torus(Framing::Infinity)),
        ("cfd.zero", cfd_solid_torus(Framing::Zero)),
        ("cfd.trefoil-2", cfd_trefoil_m2()),
        ("dd.id.torus", dd_identity_torus()),
        ("dd.halfid.torus", dd_half_identity_torus()),
        ("bar.torus", bar(&torus, 0)?),
    ])
}

/// Regenerates the fixture files; the fixture test diffs against these.
pub fn write_fixtures(dir: &std::path::Path) -> Result<()> {
    std::fs::create_dir_all(dir)?;
    for (name, obj) in fixture_objects()? {
        std::fs::write(
            dir.join(format!("{name}.json")),
            crate::serialize::object_to_json(&obj)?,
        )?;
    }
    Ok(())
}

// ----- quadratic Koszul duality -----

/// A quadratic presentation: degree-1 generators with idempotent
/// decorations and relations in V ⊗ V, with a truncation bound.
#[derive(Clone, Debug)]
pub struct QuadraticPresentation {
    pub num_idem: u32,
    /// (name, left idempotent, right idempotent)
    pub gens: Vec<(String, u32, u32)>,
    /// Each relation is an F2 sum of composable generator pairs.
    pub relations: Vec<Vec<(usize, usize)>>,
    pub degree_bound: usize,
}

impl QuadraticPresentation {
    /// The dual-numbers presentation F2[x]/(x^2).
    pub fn dual_numbers(degree_bound: usize) -> Self {
        QuadraticPresentation {
            num_idem: 1,
            gens: vec![("x".into(), 0, 0)],
            relations: vec![vec![(0, 0)]],
            degree_bound,
        }
    }
}

/// A truncated path algebra on generator words modulo a span of relation
/// words per degree. Degrees are stored as `sign * length`.
fn word_algebra(
    name: &str,
    num_idem: u32,
    gens: &[(String, u32, u32)],
    relations: &[Vec<(usize, usize)>],
    bound: usize,
    degree_sign: i64,
) -> Result<Arc<DgAlgebra>> {
    type Word = Vec<usize>;
    // words by degree, lexicographically ordered; the degree-0 entry is the
    // empty word, used as context when embedding relations
    let mut words: Vec<Vec<Word>> = vec![vec![Vec::new()]];
    let mut degree1: Vec<Word> = (0..gens.len()).map(|i| vec![i]).collect();
    degree1.sort();
    words.push(degree1);
    for d in 2..=bound {
        let mut next: Vec<Word> = Vec::new();
        for w in &words[d - 1] {
            let last = *w.last().unwrap();
            for (g, (_, l, _)) in gens.iter().enumerate() {
                if gens[last].2 == *l {
                    let mut w2 = w.clone();
                    w2.push(g);
                    next.push(w2);
                }
            }
        }
        next.sort();
        words.push(next);
    }
    // relation span per degree, echelonized over the word list
    let mut pivots: Vec<Rref> = vec![Rref::new(), Rref::new()];
    let mut basis_words: Vec<(usize, Word)> = Vec::new(); // (degree, word)
    for d in 0..=1usize {
        if d == 0 {
            continue;
        }
        for w in &words[1] {
            basis_words.push((1, w.clone()));
        }
    }
    for d in 2..=bound {
        let index: HashMap<&Word, u32> =
            words[d].iter().enumerate().map(|(i, w)| (w, i as u32)).collect();
        let mut rref = Rref::new();
        for pos in 0..=(d - 2) {
            // u (len pos) ++ relation pair ++ w (len d-2-pos)
            for u in &words[pos] {
                for r in relations {
                    let mut support = Vec::new();
                    for &(g1, g2) in r {
                        if let Some(last) = u.last() {
                            if gens[*last].2 != gens[g1].1 {
                                continue;
                            }
                        }
                        // try all right completions
                        let mut stem = u.clone();
                        stem.push(g1);
                        stem.push(g2);
                        for w in &words[d - 2 - pos] {
                            if let Some(first) = w.first() {
                                if gens[g2].2 != gens[*first].1 {
                                    continue;
                                }
                            }
                            let mut full = stem.clone();
                            full.extend_from_slice(w);
                            if let Some(&col) = index.get(&full) {
                                support.push((w.clone(), col));
                            }
                        }
                        let _ = &support;
                    }
                    // group the relation embedding by the right completion
                    let mut by_right: HashMap<Word, Vec<u32>> = HashMap::new();
                    for (w, col) in support {
                        by_right.entry(w).or_default().push(col);
                    }
                    for (_, cols) in by_right {
                        let v = F2Vec::from_support_mod2(cols);
                        if !v.is_zero() {
                            rref.insert(&v);
                        }
                    }
                }
            }
        }
        let pivot_cols: std::collections::BTreeSet<u32> =
            rref.rows().map(|r| r.leading().unwrap() as u32).collect();
        for (i, w) in words[d].iter().enumerate() {
            if !pivot_cols.contains(&(i as u32)) {
                basis_words.push((d, w.clone()));
            }
        }
        pivots.push(rref);
    }
    if bound < 2 && !relations.is_empty() {
        return Err(Error::DegreeBoundTooSmall(
            "relations live in degree 2; raise the bound".into(),
        ));
    }
    // assemble the algebra: idempotents first, then basis words
    let word_label = |w: &Word| -> String {
        w.iter().map(|&g| gens[g].0.clone()).collect::<Vec<_>>().join(".")
    };
    let mut labels: Vec<String> = (0..num_idem).map(|i| format!("1_{i}")).collect();
    let mut left_idem: Vec<u32> = (0..num_idem).collect();
    let mut right_idem: Vec<u32> = (0..num_idem).collect();
    let mut degree: Vec<i64> = vec![0; num_idem as usize];
    let mut word_ids: HashMap<Word, u32> = HashMap::new();
    for (d, w) in &basis_words {
        let id = labels.len() as u32;
        word_ids.insert(w.clone(), id);
        labels.push(word_label(w));
        left_idem.push(gens[w[0]].1);
        right_idem.push(gens[*w.last().unwrap()].2);
        degree.push(degree_sign * *d as i64);
    }
    // normal form of an arbitrary word
    let normal_form = |w: &Word| -> F2Vec {
        let d = w.len();
        if d == 0 || d > bound {
            return F2Vec::zero();
        }
        // idempotent chaining must hold by construction of products
        let index: HashMap<&Word, u32> =
            words[d].iter().enumerate().map(|(i, ww)| (ww, i as u32)).collect();
        let Some(&col) = index.get(w) else { return F2Vec::zero() };
        let reduced = if d >= 2 {
            pivots[d].reduce(&F2Vec::singleton(col)).residual.to_f2vec()
        } else {
            F2Vec::singleton(col)
        };
        reduced
            .iter()
            .map(|c| word_ids[&words[d][c as usize]])
            .collect()
    };
    let dim = labels.len();
    let mut prod: HashMap<(u32, u32), F2Vec> = HashMap::new();
    let mut word_of: Vec<Option<Word>> = vec![None; dim];
    for (_, w) in &basis_words {
        word_of[word_ids[w] as usize] = Some(w.clone());
    }
    let id_of = |b: u32| -> Option<Word> { word_of[b as usize].clone() };
    for a in 0..dim as u32 {
        for b in 0..dim as u32 {
            let v = if a < num_idem && b < num_idem {
                if a == b {
                    F2Vec::singleton(a)
                } else {
                    F2Vec::zero()
                }
            } else if a < num_idem {
                if left_idem[b as usize] == a {
                    F2Vec::singleton(b)
                } else {
                    F2Vec::zero()
                }
            } else if b < num_idem {
                if right_idem[a as usize] == b {
                    F2Vec::singleton(a)
                } else {
                    F2Vec::zero()
                }
            } else {
                let (wa, wb) = (id_of(a).unwrap(), id_of(b).unwrap());
                if gens[*wa.last().unwrap()].2 != gens[wb[0]].1 {
                    F2Vec::zero()
                } else {
                    let mut w = wa.clone();
                    w.extend_from_slice(&wb);
                    normal_form(&w)
                }
            };
            if !v.is_zero() {
                prod.insert((a, b), v);
            }
        }
    }
    let diff = vec![F2Vec::zero(); dim];
    Ok(Arc::new(DgAlgebra::from_table(
        name,
        labels,
        left_idem,
        right_idem,
        num_idem,
        (0..num_idem).collect(),
        diff,
        prod,
        Some(degree),
    )?))
}

/// The quadratic algebra, its quadratic dual and the rank-1 dualizing DD
/// bimodule delta(1) = sum_i v_i ⊗ 1 ⊗ v_i^.
pub fn quadratic_koszul(
    p: &QuadraticPresentation,
) -> Result<(Arc<DgAlgebra>, Arc<DgAlgebra>, AInfObject)> {
    if p.degree_bound < 2 {
        return Err(Error::DegreeBoundTooSmall("need degree bound >= 2".into()));
    }
    for r in &p.relations {
        for &(g1, g2) in r {
            if p.gens[g1].2 != p.gens[g2].1 {
                return Err(Error::ShapeMismatch(
                    "relation pair does not chain idempotents".into(),
                ));
            }
        }
    }
    let a = word_algebra("A(quad)", p.num_idem, &p.gens, &p.relations, p.degree_bound, 1)?;
    // dual generators with reversed idempotents
    let dual_gens: Vec<(String, u32, u32)> = p
        .gens
        .iter()
        .map(|(n, l, r)| (format!("{n}^"), *r, *l))
        .collect();
    // R-perp inside V* ⊗ V*: <u^ ⊗ w^, v_i ⊗ v_j> = [u = j][w = i]
    let dual_pairs: Vec<(usize, usize)> = {
        let mut out = Vec::new();
        for (u, du) in dual_gens.iter().enumerate() {
            for (w, dw) in dual_gens.iter().enumerate() {
                if du.2 == dw.1 {
                    out.push((u, w));
                }
            }
        }
        out
    };
    let pair_index: HashMap<(usize, usize), usize> =
        dual_pairs.iter().enumerate().map(|(i, &p)| (p, i)).collect();
    // kernel of lambda -> (<lambda, r>)_r
    let mut constraint = Rref::new();
    let mut kernel: Vec<Vec<(usize, usize)>> = Vec::new();
    let mut inserted: Vec<(usize, usize)> = Vec::new();
    for &(u, w) in &dual_pairs {
        // lambda = e_{(u,w)} pairs with relation entries (w, u)
        let image: F2Vec = p
            .relations
            .iter()
            .enumerate()
            .filter(|(_, r)| r.iter().filter(|&&(i, j)| i == w && j == u).count() % 2 == 1)
            .map(|(ri, _)| ri as u32)
            .collect();
        let red = constraint.reduce(&image);
        if red.residual.is_zero() {
            let mut rel: Vec<(usize, usize)> = red
                .combo
                .to_f2vec()
                .iter()
                .map(|i| inserted[i as usize])
                .collect();
            rel.push((u, w));
            kernel.push(rel);
        } else {
            constraint.insert(&image);
            inserted.push((u, w));
        }
    }
    let _ = pair_index;
    let a_dual = word_algebra("A!(quad)", p.num_idem, &dual_gens, &kernel, p.degree_bound, -1)?;
    // K: generators x_iota, delta(x_iota) = sum_i v_i ⊗ x ⊗ v_i^
    let gens: Vec<(String, u32, u32)> =
        (0..p.num_idem).map(|i| (format!("k{i}"), i, i)).collect();
    let mut delta = Vec::new();
    for (gi, (name, _, _)) in p.gens.iter().enumerate() {
        let va = a.by_label(name).ok_or_else(|| {
            Error::DegreeBoundTooSmall(format!("generator {name} dies in the truncation"))
        })?;
        let vd = a_dual
            .by_label(&format!("{name}^"))
            .ok_or_else(|| Error::DegreeBoundTooSmall("dual generator missing".into()))?;
        let (l, _r) = (p.gens[gi].1, p.gens[gi].2);
        let src = l as usize;
        let tgt = p.gens[gi].2 as usize;
        delta.push((src, F2Vec::singleton(va), F2Vec::singleton(vd), tgt));
    }
    let k = type_dd("K(quad)", a.clone(), a_dual.clone(), gens, &delta)?;
    Ok((a, a_dual, k))
}

// ----- cobar Koszul duality -----

/// The truncated cobar algebra of A, the dualizing bimodule K and the
/// quasi-inverse AA bimodule L.
pub fn cobar_koszul(
    algebra: &Arc<DgAlgebra>,
    length_bound: usize,
) -> Result<(Arc<DgAlgebra>, AInfObject, AInfObject)> {
    type Word = Vec<u32>;
    let num_idem = algebra.num_idem();
    // basis words of A+* letters; letter idempotents are reversed
    let letters: Vec<u32> = algebra.a_plus().collect();
    let letter_left = |b: u32| algebra.right_idem(b);
    let letter_right = |b: u32| algebra.left_idem(b);
    let mut words: Vec<Word> = Vec::new();
    let mut frontier: Vec<Word> = letters.iter().map(|&b| vec![b]).collect();
    frontier.sort();
    for _len in 1..=length_bound {
        words.extend(frontier.iter().cloned());
        let mut next = Vec::new();
        for w in &frontier {
            for &b in &letters {
                if letter_right(*w.last().unwrap()) == letter_left(b) {
                    let mut w2 = w.clone();
                    w2.push(b);
                    next.push(w2);
                }
            }
        }
        next.sort();
        frontier = next;
    }
    let mut labels: Vec<String> = (0..num_idem).map(|i| format!("<{i}>")).collect();
    let mut left_idem: Vec<u32> = (0..num_idem).collect();
    let mut right_idem: Vec<u32> = (0..num_idem).collect();
    let word_label = |w: &Word| -> String {
        format!(
            "<{}>",
            w.iter().map(|&b| format!("{}^", algebra.label(b))).collect::<Vec<_>>().join("|")
        )
    };
    let mut word_ids: HashMap<Word, u32> = HashMap::new();
    for w in &words {
        let id = labels.len() as u32;
        word_ids.insert(w.clone(), id);
        labels.push(word_label(w));
        left_idem.push(letter_left(w[0]));
        right_idem.push(letter_right(*w.last().unwrap()));
    }
    let dim = labels.len();
    // differential on letters: d1 + d2
    let letter_diff = |c: u32| -> Vec<Word> {
        let mut out = Vec::new();
        for b in algebra.a_plus() {
            if algebra.d(b).contains(c) {
                out.push(vec![b]);
            }
        }
        for &u in &letters {
            for &v in &letters {
                if algebra.right_idem(u) == algebra.left_idem(v) && algebra.mul(u, v).contains(c) {
                    out.push(vec![v, u]); // factor swap
                }
            }
        }
        out
    };
    let mut diff: Vec<F2Vec> = vec![F2Vec::zero(); dim];
    for (w, &id) in &word_ids {
        let mut terms: Vec<u32> = Vec::new();
        for (i, &c) in w.iter().enumerate() {
            for repl in letter_diff(c) {
                let mut w2: Word = w[..i].to_vec();
                w2.extend_from_slice(&repl);
                w2.extend_from_slice(&w[i + 1..]);
                if w2.len() > length_bound {
                    continue;
                }
                // idempotent chaining may fail for swapped factors; skip then
                let chained = w2
                    .windows(2)
                    .all(|pair| letter_right(pair[0]) == letter_left(pair[1]));
                if chained {
                    if let Some(&tid) = word_ids.get(&w2) {
                        terms.push(tid);
                    }
                }
            }
        }
        diff[id as usize] = F2Vec::from_support_mod2(terms);
    }
    let mut prod: HashMap<(u32, u32), F2Vec> = HashMap::new();
    for a in 0..dim as u32 {
        for b in 0..dim as u32 {
            let v = if a < num_idem && b < num_idem {
                if a == b {
                    F2Vec::singleton(a)
                } else {
                    F2Vec::zero()
                }
            } else if a < num_idem {
                if left_idem[b as usize] == a {
                    F2Vec::singleton(b)
                } else {
                    F2Vec::zero()
                }
            } else if b < num_idem {
                if right_idem[a as usize] == b {
                    F2Vec::singleton(a)
                } else {
                    F2Vec::zero()
                }
            } else if right_idem[a as usize] != left_idem[b as usize] {
                F2Vec::zero()
            } else {
                let wa = words.iter().find(|w| word_ids[*w] == a).unwrap();
                let wb = words.iter().find(|w| word_ids[*w] == b).unwrap();
                let mut w = wa.clone();
                w.extend_from_slice(wb);
                if w.len() > length_bound {
                    F2Vec::zero()
                } else {
                    F2Vec::singleton(word_ids[&w])
                }
            };
            if !v.is_zero() {
                prod.insert((a, b), v);
            }
        }
    }
    let mut degrees: Vec<i64> = vec![0; num_idem as usize];
    degrees.extend(words.iter().map(|w| -(w.len() as i64)));
    let cob = Arc::new(DgAlgebra::from_table(
        format!("Cob({})", algebra.name()),
        labels,
        left_idem,
        right_idem,
        num_idem,
        (0..num_idem).collect(),
        diff,
        prod,
        Some(degrees),
    )?);

    // K: delta(x_iota) = sum over A+ basis a of a ⊗ x ⊗ <a^>
    let gens: Vec<(String, u32, u32)> =
        (0..num_idem).map(|i| (format!("k{i}"), i, i)).collect();
    let mut delta = Vec::new();
    for &a in &letters {
        let src = algebra.left_idem(a) as usize;
        let tgt = algebra.right_idem(a) as usize;
        let cid = word_ids[&vec![a]];
        delta.push((src, F2Vec::singleton(a), F2Vec::singleton(cid), tgt));
    }
    let k = type_dd(
        format!("K(cobar {})", algebra.name()),
        algebra.clone(),
        cob.clone(),
        gens,
        &delta,
    )?;

    // L: m(<b1|...|bn>, 1, a1, ..., an) = b1(an) ... bn(a1) 1
    let slots = vec![
        Slot::new(cob.clone(), Side::Left, Flavor::A),
        Slot::new(algebra.clone(), Side::Right, Flavor::A),
    ];
    let l_gens: Vec<Generator> = (0..num_idem)
        .map(|i| Generator { name: format!("l{i}"), idem: vec![i, i], degree: 0 })
        .collect();
    let mut ops = Vec::new();
    for w in &words {
        let cid = word_ids[w];
        let src = letter_right(*w.last().unwrap());
        let tgt = letter_left(w[0]);
        // right word, inner-first: (b_m, ..., b_1)
        let right_word: Vec<u32> = w.iter().rev().copied().collect();
        ops.push(OpEntry {
            source: src,
            words: vec![vec![cid], right_word],
            target: tgt,
            outputs: Vec::new(),
        });
    }
    let l = AInfObject::new(format!("L(cobar {})", algebra.name()), slots, l_gens, ops)?;
    // The truncated model is exact only strictly inside the length bound:
    // the cobar differential raises word length by one, so equations at
    // total length == bound lose their cancellation partner to the cutoff.
    let cob_for_filter = cob.clone();
    let report = l.check_structure_filtered(|words| {
        let total: i64 = words[0]
            .iter()
            .map(|&w| -cob_for_filter.degree(w).unwrap_or(0))
            .sum();
        total < length_bound as i64
    });
    if !report.ok() {
        return Err(Error::ShapeMismatch(format!(
            "cobar quasi-inverse violates its structure equation within the bound: {}",
            report.violations[0]
        )));
    }
    Ok((cob, k, l))
}
