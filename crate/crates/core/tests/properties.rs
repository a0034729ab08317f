//! Property tests: random matchings against an independent union-find
//! surgery oracle, involution and canonicalization invariants, and
//! serialization round trips.

use proptest::prelude::*;
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use strandhf::f2::F2Vec;
use strandhf::pmc::PointedMatchedCircle;
use strandhf::serialize;
use strandhf::zoo::{self, Framing};

/// Independent oracle: surgery components via union-find over arc ends.
fn surgery_components_union_find(k: usize, matching: &[(usize, usize)]) -> usize {
    let n = 4 * k;
    // arc i runs from point i+1 to point i+2 (mod n)
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(parent: &mut Vec<usize>, x: usize) -> usize {
        if parent[x] != x {
            let root = find(parent, parent[x]);
            parent[x] = root;
        }
        parent[x]
    }
    let mut union = |parent: &mut Vec<usize>, a: usize, b: usize| {
        let (ra, rb) = (find(parent, a), find(parent, b));
        if ra != rb {
            parent[ra] = rb;
        }
    };
    let arc_ending_at = |p: usize| (p + n - 2) % n;
    let arc_starting_at = |p: usize| p - 1;
    for &(p, q) in matching {
        union(&mut parent, arc_ending_at(p), arc_starting_at(q));
        union(&mut parent, arc_ending_at(q), arc_starting_at(p));
    }
    let mut roots: Vec<usize> = (0..n).map(|x| find(&mut parent, x)).collect();
    roots.sort_unstable();
    roots.dedup();
    roots.len()
}

fn random_matching(rng: &mut ChaCha8Rng, k: usize) -> Vec<(usize, usize)> {
    let mut points: Vec<usize> = (1..=4 * k).collect();
    points.shuffle(rng);
    points.chunks(2).map(|c| (c[0], c[1])).collect()
}

#[test]
fn random_matchings_agree_with_union_find_oracle() {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
    let mut valid = 0;
    for case in 0..400 {
        let k = 1 + case % 3;
        let matching = random_matching(&mut rng, k);
        let construction = PointedMatchedCircle::new(k, &matching);
        let oracle = surgery_components_union_find(k, &matching);
        match construction {
            Ok(_) => {
                assert_eq!(oracle, 1, "constructor accepted a disconnected surgery");
                valid += 1;
            }
            Err(strandhf::Error::DisconnectedSurgery) => {
                assert!(oracle > 1, "constructor rejected a connected surgery")
            }
            Err(e) => panic!("unexpected error {e}"),
        }
    }
    assert!(valid > 20, "the random sample should contain valid circles");
}

proptest! {
    #[test]
    fn f2vec_addition_is_commutative_and_cancels(a in proptest::collection::vec(0u32..64, 0..12),
                                                 b in proptest::collection::vec(0u32..64, 0..12)) {
        let va = F2Vec::from_support_mod2(a);
        let vb = F2Vec::from_support_mod2(b);
        prop_assert_eq!(va.add(&vb), vb.add(&va));
        prop_assert!(va.add(&va).is_zero());
        prop_assert_eq!(va.add(&vb).add(&vb), va);
    }

    #[test]
    fn reverse_is_an_involution_on_random_valid_circles(seed in 0u64..500) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let k = 1 + (seed % 3) as usize;
        let matching = random_matching(&mut rng, k);
        if let Ok(z) = PointedMatchedCircle::new(k, &matching) {
            prop_assert_eq!(z.reverse().reverse(), z);
        }
    }
}

#[test]
fn canonicalization_is_idempotent() {
    // shuffled pair order and swapped endpoints canonicalize identically
    let a = PointedMatchedCircle::new(2, &[(1, 3), (2, 4), (5, 7), (6, 8)]).unwrap();
    let b = PointedMatchedCircle::new(2, &[(8, 6), (3, 1), (7, 5), (4, 2)]).unwrap();
    assert_eq!(a, b);
}

#[test]
fn zoo_objects_round_trip_through_json() {
    for (name, obj) in zoo::fixture_objects().unwrap() {
        let text = serialize::object_to_json(&obj).unwrap();
        let back = serialize::object_from_json(&text).unwrap();
        assert_eq!(back.gens().len(), obj.gens().len(), "{name}: generator count");
        assert_eq!(back.ops(), obj.ops(), "{name}: operations");
        assert!(back.check_structure().ok(), "{name}: structure after round trip");
    }
}

#[test]
fn fixtures_match_the_generated_objects() {
    let dir = std::path::Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures");
    for (name, obj) in zoo::fixture_objects().unwrap() {
        let path = dir.join(format!("{name}.json"));
        let stored = std::fs::read_to_string(&path)
            .unwrap_or_else(|_| panic!("fixture {} missing; run `strandhf fixtures`", path.display()));
        let generated = serialize::object_to_json(&obj).unwrap();
        assert_eq!(stored, generated, "fixture {name} drifted from the generating formula");
    }
}

#[test]
fn type_d_files_accept_the_documented_shape() {
    let text = r#"{
        "name": "cfd.inf",
        "algebra": "torus",
        "generators": [{"name": "s", "idem": ["iota1"]}],
        "delta": [["s", "rho23", "s"]]
    }"#;
    let obj = serialize::object_from_json(text).unwrap();
    assert!(obj.check_structure().ok());
    let zoo_obj = zoo::cfd_solid_torus(Framing::Infinity);
    assert_eq!(obj.ops(), zoo_obj.ops());
}

#[test]
fn pmc_files_round_trip() {
    let z = strandhf::pmc::standard_by_name("genus3_Z1").unwrap();
    let text = serialize::pmc_to_json(&z);
    assert_eq!(serialize::pmc_from_json(&text).unwrap(), z);
    assert!(text.contains("\"k\": 3"));
}
