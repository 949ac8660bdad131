//! Fidelity, subject reduction and safety on the corpus and on random
//! typable instances; the analyses against literal path recursion.

use std::collections::BTreeSet;

use mpst_testkit::harness::{safety, theorem_walk};
use mpst_testkit::oracle::{literal_depth, literal_weight};
use mpst_testkit::{corpus_instances, random_tree, random_typable, Instance};
use partial_mpst::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn random_instances(seed: u64, n: usize) -> Vec<Instance> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n).map(|_| random_typable(&mut rng, 500).expect("generator finds typable instances")).collect()
}

#[test]
fn corpus_satisfies_the_theorems() {
    for inst in corpus_instances() {
        let n =
            theorem_walk(&inst.set, &inst.gtype, &inst.session, 16).unwrap_or_else(|e| panic!("{}: {e}", inst.name));
        assert!(n > 0);
        safety(&inst.set, &inst.session, Bounds::new(40, 2)).unwrap_or_else(|e| panic!("{}: {e}", inst.name));
    }
}

#[test]
fn random_instances_satisfy_the_theorems() {
    let instances = random_instances(7, 40);
    let distinct: BTreeSet<String> = instances.iter().map(|i| i.name.clone()).collect();
    assert!(distinct.len() > 10, "generator is too repetitive");
    for inst in &instances {
        theorem_walk(&inst.set, &inst.gtype, &inst.session, 10).unwrap_or_else(|e| panic!("{}: {e}", inst.name));
        safety(&inst.set, &inst.session, Bounds::new(24, 3)).unwrap_or_else(|e| panic!("{}: {e}", inst.name));
    }
}

#[test]
fn analyses_match_path_recursion_on_trees() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for _ in 0..60 {
        let g = random_tree(&mut rng, 6);
        for p in ["p", "q", "r", "s", "t"].map(Participant::new) {
            assert_eq!(depth(&g, &p), literal_depth(&g, &p), "{g:?} {p}");
        }
        for (s, r) in [("p", "q"), ("q", "p"), ("r", "s"), ("s", "p")] {
            for l in ["a", "b", "c"] {
                let m = Message::new(Participant::new(s), Label::new(l), Participant::new(r));
                assert_eq!(weight(&m, &g), literal_weight(&m, &g), "{g:?} {m}");
            }
        }
    }
}
