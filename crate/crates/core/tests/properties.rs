//! Property tests over random terms, queues and typable instances.

use mpst_testkit::{random_tree, random_typable, Instance};
use partial_mpst::syntax::SessionDef;
use partial_mpst::*;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn instance(seed: u64) -> Instance {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    random_typable(&mut rng, 500).expect("typable instance")
}

fn subset(set: &ParticipantSet, mask: u32) -> ParticipantSet {
    set.iter().enumerate().filter(|(i, _)| mask & (1 << i) != 0).map(|(_, p)| p.clone()).collect()
}

fn message() -> impl Strategy<Value = Message> {
    (0..3usize, 0..3usize, 0..2usize).prop_filter_map("no self messages", |(s, r, l)| {
        let names = ["p", "q", "r"];
        (s != r)
            .then(|| Message::new(Participant::new(names[s]), Label::new(["a", "b"][l]), Participant::new(names[r])))
    })
}

fn small_bounds() -> Bounds {
    Bounds::new(16, 2)
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 48, ..ProptestConfig::default() })]

    #[test]
    fn modules_round_trip(seed in 0u64..10_000, tree_seed in 0u64..10_000) {
        let inst = instance(seed);
        let tree = random_tree(&mut ChaCha8Rng::seed_from_u64(tree_seed), 5);
        let mut m = SourceModule::default();
        m.globals.insert("G".into(), inst.gtype.clone());
        m.globals.insert("T".into(), tree);
        m.networks.insert("N".into(), inst.session.network.clone());
        m.queues.insert("M".into(), inst.session.queue.clone());
        m.sessions.insert(
            "S".into(),
            SessionDef { network: "N".into(), queue: "M".into(), session: inst.session.clone() },
        );
        m.sets.insert("P".into(), inst.set.clone());
        let text = render_module(&m);
        let again = parse_module(&text).unwrap_or_else(|e| panic!("{e}\n{text}"));
        prop_assert_eq!(&m.globals, &again.globals);
        prop_assert_eq!(&m.networks, &again.networks);
        prop_assert_eq!(&m.queues, &again.queues);
        prop_assert_eq!(&m.sets, &again.sets);
        prop_assert_eq!(&m.sessions["S"].session, &again.sessions["S"].session);
    }

    #[test]
    fn queue_order_only_matters_per_channel(msgs in prop::collection::vec(message(), 0..8), i in 0usize..8) {
        let q = Queue::from_messages(msgs.clone());
        prop_assert_eq!(q.len(), msgs.len());
        if i + 1 < msgs.len() {
            let mut swapped = msgs.clone();
            swapped.swap(i, i + 1);
            let q2 = Queue::from_messages(swapped);
            let same_channel = msgs[i].channel() == msgs[i + 1].channel();
            if !same_channel || msgs[i] == msgs[i + 1] {
                prop_assert_eq!(&q, &q2);
            } else {
                prop_assert_ne!(&q, &q2);
            }
        }
    }

    #[test]
    fn typing_is_deterministic(seed in 0u64..10_000) {
        let inst = instance(seed);
        let a = typecheck(&inst.set, &inst.gtype, &inst.session).unwrap();
        let b = typecheck(&inst.set, &inst.gtype, &inst.session).unwrap();
        prop_assert_eq!(a, b);
    }

    #[test]
    fn accepted_judgements_hold_at_the_root(seed in 0u64..10_000) {
        let inst = instance(seed);
        let plays = inst.gtype.players();
        for p in inst.session.network.players() {
            prop_assert!(!inst.set.contains(&p) || plays.contains(&p), "{} leaks", p);
        }
        let c = TypeConfiguration::new(inst.gtype.clone(), inst.session.queue.clone());
        prop_assert!(p_sound(&c, &inst.set));
    }

    #[test]
    fn smaller_sets_are_still_accepted(seed in 0u64..10_000, mask in any::<u32>()) {
        let inst = instance(seed);
        let smaller = subset(&inst.set, mask);
        let r = typecheck(&smaller, &inst.gtype, &inst.session);
        prop_assert!(r.is_ok(), "{}: {:?}", inst.name, r.err());
    }

    #[test]
    fn soundness_is_antitone_in_the_set(seed in 0u64..10_000, msgs in prop::collection::vec(message(), 0..4), mask in any::<u32>()) {
        let g = random_tree(&mut ChaCha8Rng::seed_from_u64(seed), 5);
        let c = TypeConfiguration::new(g, Queue::from_messages(msgs));
        let all = participants(["p", "q", "r"]);
        if p_sound(&c, &all) {
            prop_assert!(p_sound(&c, &subset(&all, mask)));
        }
    }

    #[test]
    fn verdicts_are_monotone_and_replayable(seed in 0u64..10_000, drop in 0usize..4, mask in any::<u32>()) {
        // Removing a participant from a typable network usually breaks it.
        let inst = instance(seed);
        let players: Vec<Participant> = inst.session.network.participants().into_iter().collect();
        let network = inst.session.network.without(&players[drop % players.len()]);
        let s = Session::new(network, inst.session.queue.clone());
        let all = inst.session.network.participants();
        let part = subset(&all, mask);
        for property in [Property::Lock, Property::Deadlock, Property::Omf] {
            let v = verify::check(property, &s, &all, small_bounds());
            if v.status == Status::Holds {
                prop_assert_eq!(verify::check(property, &s, &part, small_bounds()).status, Status::Holds);
            }
            if let Some(w) = &v.witness {
                prop_assert_eq!(&session_run(&s, &w.trace).unwrap(), &w.state);
            }
            prop_assert_eq!(v.status == Status::Violated, v.witness.is_some());
            prop_assert!(v.status != Status::HoldsWithinBounds || v.truncated);
            let again = verify::check(property, &s, &all, small_bounds());
            prop_assert_eq!(&v, &again);
        }
        let lock = check_p_lock_free(&s, &part, small_bounds());
        if lock.status == Status::Holds {
            prop_assert_eq!(check_p_deadlock_free(&s, &part, small_bounds()).status, Status::Holds);
        }
    }
}
