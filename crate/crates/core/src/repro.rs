//! The acceptance suite: every reproduced table and check, one report per
//! criterion. Used by the `repro` CLI subcommand and by the integration
//! tests.


use crate::algebra::{strand_algebra_summand, AlgebraCaps};
use crate::error::{Error, Result};
use crate::f2::{F2Vec, Rref};
use crate::module::{
    box_tensor, equal_via_idem_bijection, identity_da, reduce_object, regular_bimodule,
    AInfObject, Flavor, Generator, OpEntry, Side, Slot,
};
use crate::morph::{
    ext_ainf, ext_type_d, hochschild_cohomology, koszul_check, mor_type_d, serre_check,
};
use crate::pmc::{standard, StandardName};
use crate::poly::LaurentPoly;
use crate::zoo::{self, Framing};

#[derive(Clone, Debug)]
pub struct CriterionReport {
    pub id: usize,
    pub name: String,
    pub pass: bool,
    pub details: String,
}

fn report(id: usize, name: &str, result: Result<String>) -> CriterionReport {
    match result {
        Ok(details) => CriterionReport { id, name: name.into(), pass: true, details },
        Err(e) => CriterionReport { id, name: name.into(), pass: false, details: e.to_string() },
    }
}

fn ensure(cond: bool, msg: &str) -> Result<()> {
    if cond {
        Ok(())
    } else {
        Err(Error::ShapeMismatch(msg.to_string()))
    }
}

/// Criterion 1: the torus algebra has 8 basis elements, satisfies the nine
/// displayed relations, and the generative construction is isomorphic to
/// the hand-coded table.
pub fn criterion_1() -> CriterionReport {
    report(1, "torus algebra", (|| {
        let alg = zoo::torus_algebra();
        ensure(alg.dim() == 8, "dimension 8")?;
        // re-run the generative construction and the relabeling isomorphism
        let fresh = strand_algebra_summand(
            &standard(&StandardName::Torus),
            0,
            &AlgebraCaps::default(),
        )?;
        zoo::verify_generative_torus(&fresh)?;
        Ok("8 basis elements; all relations and the generative isomorphism verified".into())
    })())
}

/// Criterion 2: dim A(Z,-k) = 1 and dim A(Z,-k+1) = 8k^2 for the zoo.
pub fn criterion_2() -> CriterionReport {
    report(2, "dimension laws", (|| {
        let mut lines = Vec::new();
        for name in zoo_names() {
            let z = standard(&name);
            let k = z.genus() as i64;
            let bottom = zoo::algebra(&z, -k)?;
            let next = zoo::algebra(&z, -k + 1)?;
            ensure(bottom.dim() == 1, &format!("dim A({name:?},-k) = 1"))?;
            ensure(
                next.dim() == 8 * (k * k) as usize,
                &format!("dim A({name:?},-k+1) = 8k^2"),
            )?;
            lines.push(format!("{name:?}: 1, {}", next.dim()));
        }
        Ok(lines.join("; "))
    })())
}

fn zoo_names() -> Vec<StandardName> {
    vec![
        StandardName::Torus,
        StandardName::Split(2),
        StandardName::Antipodal(2),
        StandardName::Genus3Z1,
        StandardName::Genus3Z2,
    ]
}

pub fn expected_poincare(name: &StandardName) -> Option<LaurentPoly> {
    match name {
        StandardName::Torus => Some(LaurentPoly::from_terms(&[(-1, 1), (0, 8), (1, 1)])),
        StandardName::Split(2) => Some(LaurentPoly::from_terms(&[
            (-2, 1),
            (-1, 32),
            (0, 98),
            (1, 32),
            (2, 1),
        ])),
        StandardName::Antipodal(2) => Some(LaurentPoly::from_terms(&[
            (-2, 1),
            (-1, 32),
            (0, 70),
            (1, 32),
            (2, 1),
        ])),
        StandardName::Genus3Z1 => Some(LaurentPoly::from_terms(&[
            (-3, 1),
            (-2, 72),
            (-1, 600),
            (0, 1224),
            (1, 616),
            (2, 72),
            (3, 1),
        ])),
        StandardName::Genus3Z2 => Some(LaurentPoly::from_terms(&[
            (-3, 1),
            (-2, 72),
            (-1, 616),
            (0, 1224),
            (1, 600),
            (2, 72),
            (3, 1),
        ])),
        _ => None,
    }
}

fn computed_poincare(name: &StandardName) -> Result<LaurentPoly> {
    use std::collections::HashMap;
    use std::sync::{Mutex, OnceLock};
    static CACHE: OnceLock<Mutex<HashMap<String, LaurentPoly>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    let key = format!("{name:?}");
    if let Some(hit) = cache.lock().unwrap().get(&key) {
        return Ok(hit.clone());
    }
    let poly = crate::algebra::algebra_homology(&standard(name), &AlgebraCaps::default())?;
    cache.lock().unwrap().insert(key, poly.clone());
    Ok(poly)
}

/// Criterion 3: the Poincaré polynomials, exact match.
pub fn criterion_3() -> CriterionReport {
    report(3, "Poincaré polynomials", (|| {
        let mut lines = Vec::new();
        for name in [
            StandardName::Split(2),
            StandardName::Antipodal(2),
            StandardName::Genus3Z1,
            StandardName::Genus3Z2,
        ] {
            let got = computed_poincare(&name)?;
            let want = expected_poincare(&name).unwrap();
            ensure(got == want, &format!("{name:?}: got {got}, want {want}"))?;
            lines.push(format!("{name:?}: {got}"));
        }
        Ok(lines.join("; "))
    })())
}

/// Criterion 4: Koszul symmetry of the homology polynomials.
pub fn criterion_4() -> CriterionReport {
    report(4, "Koszul symmetry", (|| {
        for name in [StandardName::Torus, StandardName::Split(2), StandardName::Antipodal(2)] {
            let p = computed_poincare(&name)?;
            ensure(p.is_palindromic(), &format!("{name:?} polynomial palindromic"))?;
        }
        let p1 = computed_poincare(&StandardName::Genus3Z1)?;
        let p2 = computed_poincare(&StandardName::Genus3Z2)?;
        ensure(p1 == p2.mirrored(), "dim H(A(Z1,i)) = dim H(A(Z2,-i))")?;
        Ok("palindromic for self-dual circles; Z1/Z2 mirror".into())
    })())
}

/// Criterion 5: the solid-torus Ext table with the exact Mor listings.
pub fn criterion_5() -> CriterionReport {
    report(5, "solid-torus Ext table", (|| {
        let inf = zoo::cfd_solid_torus(Framing::Infinity);
        let zero = zoo::cfd_solid_torus(Framing::Zero);
        let table = [
            (&inf, &inf, 2usize),
            (&zero, &inf, 1),
            (&zero, &zero, 2),
            (&inf, &zero, 1),
        ];
        for (m, n, want) in table {
            let (rank, _, _) = ext_type_d(m, n)?;
            ensure(rank == want, &format!("Ext({},{}) = {}", m.name, n.name, want))?;
        }
        // exact listing for Mor(zero, inf): generators t -> rho1 s, rho3 s,
        // rho123 s; d(rho1) = d(rho3) = rho123, d(rho123) = 0
        let mor = mor_type_d(&zero, &inf)?;
        ensure(mor.complex.dim() == 3, "Mor(H0,Hinf) has 3 generators")?;
        let alg = zoo::torus_algebra();
        let label_of = |l: &str| format!("{}*t*s", l);
        let idx = |l: &str| -> Result<u32> {
            mor.complex
                .labels()
                .iter()
                .position(|x| x == &label_of(l))
                .map(|i| i as u32)
                .ok_or_else(|| Error::ShapeMismatch(format!("missing generator {l}")))
        };
        let _ = alg;
        let (g1, g3, g123) = (idx("rho1")?, idx("rho3")?, idx("rho123")?);
        ensure(mor.complex.d(g1) == &F2Vec::singleton(g123), "d(t->rho1 s) = t->rho123 s")?;
        ensure(mor.complex.d(g3) == &F2Vec::singleton(g123), "d(t->rho3 s) = t->rho123 s")?;
        ensure(mor.complex.d(g123).is_zero(), "t->rho123 s is a cycle")?;
        // and Mor(inf, inf): s -> s and s -> rho23 s, both cycles
        let mor2 = mor_type_d(&inf, &inf)?;
        ensure(mor2.complex.dim() == 2, "Mor(Hinf,Hinf) has 2 generators")?;
        ensure(
            (0..2).all(|i| mor2.complex.d(i).is_zero()),
            "both generators are cycles",
        )?;
        Ok("Ext = 2,1,2,1 with the displayed Mor listings".into())
    })())
}

/// Criterion 6: homological perturbation of the modulified zero-framed
/// solid torus.
pub fn criterion_6() -> CriterionReport {
    report(6, "A-infinity transfer", (|| {
        let zero = zoo::cfd_solid_torus(Framing::Zero);
        let module = zero.modulify_object()?;
        let (small, _f) = reduce_object(&module, 7)?;
        ensure(small.gens().len() == 1, "rank-1 homology")?;
        ensure(small.gens()[0].name == "rho2*t", "representative rho2*t")?;
        let alg = zoo::torus_algebra();
        let rho1 = alg.by_label("rho1").unwrap();
        let rho2 = alg.by_label("rho2").unwrap();
        let rho12 = alg.by_label("rho12").unwrap();
        // expected: m_{3+j}(rho2, rho12^j, rho1, x) = x, inner-first word
        // [rho1, rho12^j, rho2], total word length up to 7
        let mut expected: Vec<OpEntry> = Vec::new();
        for j in 0..=5usize {
            let mut word = vec![rho1];
            word.extend(std::iter::repeat(rho12).take(j));
            word.push(rho2);
            expected.push(OpEntry { source: 0, words: vec![word], target: 0, outputs: Vec::new() });
        }
        expected.sort();
        ensure(
            small.ops() == expected.as_slice(),
            &format!(
                "transferred operations match m3, m4, ..., m8 exactly; got {:?}",
                small.ops().len()
            ),
        )?;
        Ok("m_(3+j)(rho2, rho12^j, rho1, x) = x for j = 0..5, nothing else up to arity 8".into())
    })())
}

/// Criterion 7: the modulified identity DD bimodule of the torus.
pub fn criterion_7() -> CriterionReport {
    report(7, "CFDD(Id) torus", (|| {
        let ddid = zoo::dd_identity_torus();
        let complex = ddid.modulify_complex()?;
        ensure(complex.dim() == 34, &format!("34 generators, got {}", complex.dim()))?;
        let h = complex.homology();
        ensure(h.rank == 16, &format!("homology dimension 16, got {}", h.rank))?;
        Ok("34 generators, homology dimension 16".into())
    })())
}

/// Criterion 8: Hochschild cohomology of the torus algebra.
pub fn criterion_8() -> CriterionReport {
    report(8, "Hochschild cohomology", (|| {
        let ddid = zoo::dd_identity_torus();
        let hh = hochschild_cohomology(&ddid)?;
        ensure(hh.mor.complex.dim() == 18, &format!("18 generators, got {}", hh.mor.complex.dim()))?;
        // exactly the seven listed differentials
        let gen = |elem1: &str, elem2: &str, src: &str| -> Result<u32> {
            hh.mor
                .gens
                .iter()
                .position(|g| {
                    let alg = zoo::torus_algebra();
                    let names: Vec<&str> =
                        g.elems.iter().map(|&e| alg.label(e)).collect();
                    names == [elem1, elem2]
                        && ddid.gens()[g.src as usize].name == src
                })
                .map(|i| i as u32)
                .ok_or_else(|| Error::ShapeMismatch(format!("missing <{elem1},{elem2}> at {src}")))
        };
        // morphisms out of y = iota1 x iota0; out of x = iota0 x iota1
        let d = |i: u32| hh.mor.complex.d(i).clone();
        let sum = |ids: &[u32]| F2Vec::from_support_mod2(ids.to_vec());
        let quad = sum(&[
            gen("rho2", "rho2", "y")?,
            gen("rho1", "rho1", "x")?,
            gen("rho123", "rho123", "x")?,
            gen("rho3", "rho3", "x")?,
        ]);
        // the seven displayed differentials, plus the mirror partner of
        // d<rho1,rho3> that the displayed list drops: without
        // d<rho3,rho1> = <rho23,rho12> the image has rank 6 and the
        // homology would be 6-dimensional, not 4
        let expected: Vec<(u32, F2Vec)> = vec![
            (gen("iota1", "iota0", "y")?, quad.clone()),
            (gen("rho23", "iota0", "y")?, sum(&[gen("rho123", "rho1", "x")?])),
            (gen("iota1", "rho12", "y")?, sum(&[gen("rho3", "rho123", "x")?])),
            (gen("iota0", "iota1", "x")?, quad),
            (gen("rho12", "iota1", "x")?, sum(&[gen("rho123", "rho3", "x")?])),
            (gen("iota0", "rho23", "x")?, sum(&[gen("rho1", "rho123", "x")?])),
            (gen("rho1", "rho3", "x")?, sum(&[gen("rho12", "rho23", "x")?])),
            (gen("rho3", "rho1", "x")?, sum(&[gen("rho23", "rho12", "y")?])),
        ];
        let mut nonzero = 0;
        for i in 0..hh.mor.complex.dim() as u32 {
            if !d(i).is_zero() {
                nonzero += 1;
            }
        }
        ensure(
            nonzero == expected.len(),
            &format!("8 nonzero differentials, got {nonzero}"),
        )?;
        for (i, want) in &expected {
            ensure(&d(*i) == want, &format!("differential of generator {i} matches"))?;
        }
        ensure(hh.rank == 4, &format!("homology rank 4, got {}", hh.rank))?;
        // ring structure: the idempotent-pair sum is a unit, w+x+y+z = 0,
        // and all products of {w,x,y,z} vanish
        let unit = hh.class_of_morphism(&sum(&[gen("iota1", "iota0", "y")?, gen("iota0", "iota1", "x")?]))?;
        let w = sum(&[gen("rho2", "rho2", "y")?]);
        let xx = sum(&[gen("rho1", "rho1", "x")?]);
        let y = sum(&[gen("rho3", "rho3", "x")?]);
        let z = sum(&[gen("rho123", "rho123", "x")?]);
        let rel = hh.class_of_morphism(&w.add(&xx).add(&y).add(&z))?;
        ensure(rel.is_zero(), "w + x + y + z = 0 in homology")?;
        for a in [&w, &xx, &y, &z] {
            for b in [&w, &xx, &y, &z] {
                let prod = hh.compose(a, b);
                ensure(
                    hh.class_of_morphism(&prod)?.is_zero(),
                    "products of w, x, y, z vanish",
                )?;
            }
            // unit acts as identity
            let unit_rep = hh.morphism_from_class(&unit);
            let left = hh.class_of_morphism(&hh.compose(&unit_rep, a))?;
            let right = hh.class_of_morphism(&hh.compose(a, &unit_rep))?;
            let ca = hh.class_of_morphism(a)?;
            ensure(left == ca && right == ca, "identity class is a unit")?;
        }
        Ok("18 generators, the displayed differentials, rank 4, unit and vanishing products verified"
            .into())
    })())
}

/// Criterion 9: Ext(CFD(H0), CFD(trefoil,-2)) with the stated
/// representatives.
pub fn criterion_9() -> CriterionReport {
    report(9, "trefoil surgery", (|| {
        let zero = zoo::cfd_solid_torus(Framing::Zero);
        let trefoil = zoo::cfd_trefoil_m2();
        let mor = mor_type_d(&zero, &trefoil)?;
        ensure(mor.complex.dim() == 12, &format!("12 generators, got {}", mor.complex.dim()))?;
        let h = mor.complex.homology();
        ensure(h.rank == 2, &format!("Ext rank 2, got {}", h.rank))?;
        let find = |a: &str, tgt: &str| -> Result<u32> {
            mor.complex
                .labels()
                .iter()
                .position(|l| l == &format!("{a}*t*{tgt}"))
                .map(|i| i as u32)
                .ok_or_else(|| Error::ShapeMismatch(format!("missing generator {a}*t*{tgt}")))
        };
        let rep1 = F2Vec::singleton(find("rho1", "y2")?);
        let rep2 = F2Vec::from_support_mod2(vec![
            find("rho1", "y1")?,
            find("iota0", "x2")?,
            find("rho3", "y2")?,
        ]);
        // both are cycles, and they span the homology
        ensure(mor.complex.apply(&rep1).is_zero(), "t -> rho1 y2 is a cycle")?;
        ensure(mor.complex.apply(&rep2).is_zero(), "t -> rho1 y1 + x2 + rho3 y2 is a cycle")?;
        let mut space = Rref::new();
        for i in 0..mor.complex.dim() as u32 {
            space.insert(mor.complex.d(i));
        }
        let b_rank = space.rank();
        space.insert(&rep1);
        space.insert(&rep2);
        ensure(
            space.rank() == b_rank + 2,
            "the stated representatives are independent modulo boundaries",
        )?;
        Ok("Ext = 2, generated by t->rho1 y2 and t->rho1 y1 + x2 + rho3 y2".into())
    })())
}

/// Criterion 10: Koszul checks for the identity and half-identity
/// bimodules.
pub fn criterion_10() -> CriterionReport {
    report(10, "Koszul checks", (|| {
        let mut lines = Vec::new();
        let cases: Vec<(String, AInfObject)> = vec![
            ("dd.id(torus)".into(), zoo::dd_identity_torus()),
            ("dd.id(split2)".into(), zoo::dd_identity(&standard(&StandardName::Split(2)), 0)?),
            ("dd.halfid.torus".into(), zoo::dd_half_identity_torus()),
        ];
        for (name, k) in cases {
            let rep = koszul_check(&k)?;
            ensure(rep.pass(), &format!("{name}: {rep:?}"))?;
            lines.push(format!(
                "{name}: rank-one, reduced, resolutions {}={} and {}={}",
                rep.resolution_left.0,
                rep.resolution_left.1,
                rep.resolution_right.0,
                rep.resolution_right.1
            ));
        }
        Ok(lines.join("; "))
    })())
}

/// Criterion 11: bar-model identities.
pub fn criterion_11() -> CriterionReport {
    report(11, "bar-model identities", (|| {
        let alg = zoo::torus_algebra();
        let bar = zoo::bar(&standard(&StandardName::Torus), 0)?;
        ensure(
            bar.delta_nilpotency(64).is_some(),
            "the bar bimodule is bounded",
        )?;
        let a_bim = regular_bimodule(alg.clone());
        let composite = box_tensor(&a_bim, &bar, 0, 0)?;
        let (reduced, _) = reduce_object(&composite, 6)?;
        let reduced = reduced.canonical_slot_order();
        let id = identity_da(alg.clone()).canonical_slot_order();
        ensure(
            equal_via_idem_bijection(&reduced, &id),
            "bar ⊠ A reduces to the identity DA bimodule",
        )?;
        // ext_ainf agrees with ext_typeD on the solid-torus pairs
        let inf = zoo::cfd_solid_torus(Framing::Infinity);
        let zero = zoo::cfd_solid_torus(Framing::Zero);
        let to_right_module = |m: &AInfObject| -> Result<AInfObject> {
            let module = m.modulify_object()?;
            let (small, _) = reduce_object(&module, 8)?;
            Ok(small.dual())
        };
        let pairs = [(&inf, &inf), (&zero, &inf), (&zero, &zero), (&inf, &zero)];
        let mut dims = Vec::new();
        for (m, n) in pairs {
            let (want, _, _) = ext_type_d(m, n)?;
            let got = ext_ainf(&to_right_module(n)?, &to_right_module(m)?, &bar)?;
            ensure(
                got == want,
                &format!("ext_ainf({},{}) = {} vs ext_typeD = {}", m.name, n.name, got, want),
            )?;
            dims.push(got);
        }
        Ok(format!("bar ⊠ A ≃ [Id]; ext_ainf = ext_typeD = {:?}", dims))
    })())
}

/// Criterion 12: the Serre property on the solid-torus pairs.
pub fn criterion_12() -> CriterionReport {
    report(12, "Serre property", (|| {
        let bar = zoo::bar(&standard(&StandardName::Torus), 0)?;
        let inf = zoo::cfd_solid_torus(Framing::Infinity);
        let zero = zoo::cfd_solid_torus(Framing::Zero);
        let mut dims = Vec::new();
        for (m, n) in [(&inf, &inf), (&zero, &inf), (&zero, &zero), (&inf, &zero)] {
            let (ok, a, b) = serre_check(m, n, &bar)?;
            ensure(ok, &format!("serre({},{}): {} vs {}", m.name, n.name, a, b))?;
            dims.push((a, b));
        }
        Ok(format!("all four ordered pairs agree: {:?}", dims))
    })())
}

/// Criterion 13: the A-infinity automorphism from the half-identity
/// bimodule.
pub fn criterion_13() -> CriterionReport {
    report(13, "half-identity automorphism", (|| {
        let halfid = zoo::dd_half_identity_torus();
        let quasi = crate::morph::quasi_inverse(&halfid)?; // [(A,R,A),(A,L,A)]
        let ddid = zoo::dd_identity_torus(); // [(A,L,D),(A,R,D)]
        let composite = box_tensor(&quasi, &ddid, 1, 1)?;
        let (reduced, _) = reduce_object(&composite, 6)?;
        let reduced = reduced.canonical_slot_order(); // [(A,L,D),(A,R,A)]
        let alg = zoo::torus_algebra();
        ensure(reduced.gens().len() == 2, "rank one (two idempotents)")?;
        let id = identity_da(alg.clone()).canonical_slot_order();
        // f1 = identity: the arity-1 entries match [Id]; one extra arity-3
        // entry f3 with output rho123
        let arity1: Vec<&OpEntry> = reduced.ops().iter().filter(|e| e.arity() == 1).collect();
        let higher: Vec<&OpEntry> = reduced.ops().iter().filter(|e| e.arity() != 1).collect();
        let translated = AInfObject::new(
            "f1-part",
            reduced.slots().to_vec(),
            reduced.gens().to_vec(),
            arity1.iter().map(|e| (*e).clone()).collect(),
        )?;
        ensure(
            equal_via_idem_bijection(&translated, &id),
            "f1 is the identity on the eight basis elements",
        )?;
        ensure(higher.len() == 1, &format!("exactly one higher term, got {}", higher.len()))?;
        let f3 = higher[0];
        let rho = |l: &str| alg.by_label(l).unwrap();
        ensure(
            f3.words == vec![vec![rho("rho3"), rho("rho2"), rho("rho1")]],
            "f3 consumes (rho3, rho2, rho1), module-adjacent first",
        )?;
        ensure(f3.outputs == vec![rho("rho123")], "f3 outputs rho123")?;
        let word_labels: Vec<&str> =
            f3.words[0].iter().map(|&a| alg.label(a)).collect();
        Ok(format!(
            "f1 = id and a single higher term f3 with inputs {:?} (inner-first) and output rho123",
            word_labels
        ))
    })())
}

/// Criterion 14: property suites (randomized structure checks, dual-of-dual,
/// box unit law, the Mor model isomorphism, determinism across thread
/// counts).
pub fn criterion_14() -> CriterionReport {
    report(14, "property suites", (|| {
        random_structure_suite(500)?;
        // dual of dual on the zoo
        for obj in [
            zoo::cfd_solid_torus(Framing::Infinity),
            zoo::cfd_solid_torus(Framing::Zero),
            zoo::cfd_trefoil_m2(),
            zoo::dd_identity_torus(),
            zoo::dd_half_identity_torus(),
        ] {
            ensure(
                equal_via_idem_bijection(&obj.dual().dual(), &obj)
                    || obj.dual().dual().ops() == obj.ops(),
                &format!("dual(dual({})) = {}", obj.name, obj.name),
            )?;
        }
        // box unit law, compared through the canonical generator bijection
        // id_i * g  <->  g
        let alg = zoo::torus_algebra();
        let id = identity_da(alg.clone());
        for m in [
            zoo::cfd_solid_torus(Framing::Infinity),
            zoo::cfd_solid_torus(Framing::Zero),
            zoo::cfd_trefoil_m2(),
        ] {
            let boxed = box_tensor(&id, &m, 1, 0)?;
            ensure(boxed.gens().len() == m.gens().len(), "unit law generator count")?;
            let map: Vec<u32> = boxed
                .gens()
                .iter()
                .map(|g| {
                    let (_, rest) = g.name.split_once('*').expect("boxed generator name");
                    m.gen_index(rest).expect("unit law generator bijection")
                })
                .collect();
            let mut translated: Vec<OpEntry> = boxed
                .ops()
                .iter()
                .map(|e| OpEntry {
                    source: map[e.source as usize],
                    words: e.words.clone(),
                    target: map[e.target as usize],
                    outputs: e.outputs.clone(),
                })
                .collect();
            translated.sort();
            ensure(
                translated == m.ops(),
                &format!("[Id] ⊠ {} = {}", m.name, m.name),
            )?;
        }
        // Mor model isomorphism at torus scale
        mor_model_isomorphism()?;
        // determinism across thread counts
        let p1 = {
            let pool = rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap();
            pool.install(|| computed_poincare(&StandardName::Split(2)))?
        };
        let p4 = {
            let pool = rayon::ThreadPoolBuilder::new().num_threads(4).build().unwrap();
            pool.install(|| computed_poincare(&StandardName::Split(2)))?
        };
        ensure(p1 == p4, "identical output under 1 and 4 threads")?;
        Ok("500 randomized checks, dual-of-dual, unit law, Mor model, determinism".into())
    })())
}

/// 500 randomized structure-equation checks: valid layered deltas must
/// pass, perturbed ones must fail.
fn random_structure_suite(count: usize) -> Result<()> {
    let alg = zoo::torus_algebra();
    let mut state = 0x853c49e6748fea9bu64;
    let mut next = move || {
        state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
        (state >> 33) as u32
    };
    let slots = vec![Slot::new(alg.clone(), Side::Left, Flavor::D)];
    let a_plus: Vec<u32> = alg.a_plus().collect();
    for case in 0..count {
        let lower = 2 + (next() % 3) as usize;
        let upper = 2 + (next() % 3) as usize;
        let mut gens = Vec::new();
        for i in 0..lower + upper {
            gens.push(Generator {
                name: format!("g{i}"),
                idem: vec![next() % alg.num_idem()],
                degree: 0,
            });
        }
        // layered delta: arrows only from the lower block to the upper block
        let mut ops = Vec::new();
        for src in 0..lower as u32 {
            for tgt in lower as u32..(lower + upper) as u32 {
                if next() % 3 != 0 {
                    continue;
                }
                let candidates: Vec<u32> = a_plus
                    .iter()
                    .copied()
                    .filter(|&a| {
                        alg.left_idem(a) == gens[src as usize].idem[0]
                            && alg.right_idem(a) == gens[tgt as usize].idem[0]
                    })
                    .collect();
                if candidates.is_empty() {
                    continue;
                }
                let a = candidates[next() as usize % candidates.len()];
                ops.push(OpEntry { source: src, words: Vec::new(), target: tgt, outputs: vec![a] });
            }
        }
        let obj = AInfObject::new(format!("rand{case}"), slots.clone(), gens.clone(), ops.clone())?;
        ensure(obj.check_structure().ok(), "layered delta satisfies the structure equation")?;
        if case % 2 == 1 {
            // perturb: force a two-step path with nonzero product
            let i0 = 0u32;
            let i1 = alg.idem_id_of(alg.by_label("iota1").unwrap()).unwrap();
            let i0id = alg.idem_id_of(alg.by_label("iota0").unwrap()).unwrap();
            let mut gens2 = gens.clone();
            gens2[0].idem = vec![i0id];
            gens2[lower].idem = vec![i1];
            gens2[1].idem = vec![i0id];
            let rho1 = alg.by_label("rho1").unwrap();
            let rho2 = alg.by_label("rho2").unwrap();
            let mut ops2: Vec<OpEntry> = ops
                .iter()
                .filter(|e| {
                    // keep only entries that stay idempotent-compatible and
                    // do not collide with the forced path (a duplicate would
                    // cancel mod 2)
                    let src = &gens2[e.source as usize];
                    let tgt = &gens2[e.target as usize];
                    !(e.source == i0 && e.target == lower as u32)
                        && alg.left_idem(e.outputs[0]) == src.idem[0]
                        && alg.right_idem(e.outputs[0]) == tgt.idem[0]
                })
                .cloned()
                .collect();
            ops2.push(OpEntry {
                source: i0,
                words: Vec::new(),
                target: lower as u32,
                outputs: vec![rho1],
            });
            // the illegal back-arrow creating rho1*rho2 = rho12
            ops2.push(OpEntry {
                source: lower as u32,
                words: Vec::new(),
                target: 1,
                outputs: vec![rho2],
            });
            let bad = AInfObject::new(format!("bad{case}"), slots.clone(), gens2, ops2)?;
            ensure(
                !bad.check_structure().ok(),
                "perturbed delta violates the structure equation",
            )?;
        }
    }
    Ok(())
}

/// Mor^A(M, N) vs the model dual(M) ⊠ A ⊠ N, as an isomorphism of complexes
/// through the canonical generator identification.
fn mor_model_isomorphism() -> Result<()> {
    let alg = zoo::torus_algebra();
    let modules = [
        zoo::cfd_solid_torus(Framing::Infinity),
        zoo::cfd_solid_torus(Framing::Zero),
        zoo::cfd_trefoil_m2(),
    ];
    for m in &modules {
        for n in &modules {
            let mor = mor_type_d(m, n)?;
            let a_bim = regular_bimodule(alg.clone());
            let step1 = box_tensor(&a_bim, &m.dual(), 0, 0)?; // [(A,R,A)]
            let step2 = box_tensor(&step1, n, 0, 0)?; // slot-free
            let model = step2.underlying_complex()?;
            ensure(model.dim() == mor.complex.dim(), "model complex dimension")?;
            let index: std::collections::HashMap<&String, u32> = model
                .labels()
                .iter()
                .enumerate()
                .map(|(i, l)| (l, i as u32))
                .collect();
            for (i, label) in mor.complex.labels().iter().enumerate() {
                let Some(&j) = index.get(label) else {
                    return Err(Error::ShapeMismatch(format!("model misses generator {label}")));
                };
                let mapped: F2Vec = mor
                    .complex
                    .d(i as u32)
                    .iter()
                    .map(|t| index[&mor.complex.labels()[t as usize]])
                    .collect();
                ensure(
                    &mapped == model.d(j),
                    &format!("differentials agree at {label}"),
                )?;
            }
        }
    }
    Ok(())
}

/// All criteria in order. Criterion 3 carries the genus-3 computations and
/// dominates the runtime.
pub fn run_all() -> Vec<CriterionReport> {
    vec![
        criterion_1(),
        criterion_2(),
        criterion_3(),
        criterion_4(),
        criterion_5(),
        criterion_6(),
        criterion_7(),
        criterion_8(),
        criterion_9(),
        criterion_10(),
        criterion_11(),
        criterion_12(),
        criterion_13(),
        criterion_14(),
    ]
}

/// Renders the pass/fail table with one line per criterion.
pub fn render(reports: &[CriterionReport]) -> String {
    let mut out = String::new();
    for r in reports {
        out.push_str(&format!(
            "[{}] criterion {:>2} {:<28} {}\n",
            if r.pass { "PASS" } else { "FAIL" },
            r.id,
            r.name,
            r.details
        ));
    }
    let passed = reports.iter().filter(|r| r.pass).count();
    out.push_str(&format!("{passed}/{} criteria passed\n", reports.len()));
    out
}
