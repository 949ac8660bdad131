//! Golden checks against the hand-written corpus.

use std::fs;
use std::path::PathBuf;

use partial_mpst::analysis::{bounded, depth_table};
use partial_mpst::typing::SideConditions;
use partial_mpst::*;

fn corpus(name: &str) -> String {
    let path = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../corpus").join(name);
    fs::read_to_string(&path).unwrap_or_else(|e| panic!("{}: {e}", path.display()))
}

fn module(names: &[&str]) -> SourceModule {
    let text: Vec<String> = names.iter().map(|n| corpus(n)).collect();
    parse_module(&text.join("\n")).unwrap()
}

fn session(m: &SourceModule, name: &str) -> Session {
    m.sessions[name].session.clone()
}

/// Builds a derivation from the indented `rule session global` listing.
fn transcribed(m: &SourceModule, listing: &str) -> Derivation {
    let rows: Vec<(usize, Rule, Session, GlobalType)> = listing
        .lines()
        .filter(|l| !l.trim().is_empty() && !l.trim_start().starts_with('#'))
        .map(|l| {
            let indent = l.len() - l.trim_start().len();
            let parts: Vec<&str> = l.split_whitespace().collect();
            let rule = match parts[0] {
                "Out" => Rule::Out,
                "In" => Rule::In,
                "End" => Rule::End,
                "Cycle" => Rule::Cycle,
                other => panic!("unknown rule {other}"),
            };
            (indent / 2, rule, session(m, parts[1]), m.globals[parts[2]].clone())
        })
        .collect();
    fn build(rows: &[(usize, Rule, Session, GlobalType)], at: &mut usize) -> Derivation {
        let (level, rule, session, gtype) = rows[*at].clone();
        *at += 1;
        let mut children = Vec::new();
        while *at < rows.len() && rows[*at].0 == level + 1 {
            children.push(build(rows, at));
        }
        Derivation {
            rule,
            session,
            gtype,
            history_size: level,
            history_fingerprint: String::new(),
            conditions: SideConditions::default(),
            children,
        }
    }
    let mut at = 0;
    let d = build(&rows, &mut at);
    assert_eq!(at, rows.len(), "listing has a single root");
    d
}

#[test]
fn social_media_parses_with_three_players() {
    let m = module(&["social_media.mps"]);
    let s = session(&m, "Smex");
    assert_eq!(s.network.players(), participants(["u1", "u2", "s"]));
    assert!(s.well_formed().is_empty());
    assert_eq!(m.processes["U1"].plays(), participants(["u2", "s"]));
    assert_eq!(m.globals["G"].players(), participants(["u1", "u2", "s"]));
    assert!(is_bounded(&m.globals["G"]));
}

#[test]
fn social_media_checks_for_the_users() {
    let m = module(&["social_media.mps"]);
    let (g, s) = (&m.globals["G"], session(&m, "Smex"));
    let d = typecheck(&m.sets["Users"], g, &s).unwrap();
    assert_eq!(d.rule, Rule::Out);
    assert_eq!(d.children.len(), 2);
    // Following go all the way round closes on the root judgement.
    let mut n = &d.children[0];
    while !n.children.is_empty() {
        n = &n.children[0];
    }
    assert_eq!(n.rule, Rule::Cycle);
    assert_eq!(n.conditions.revisited, Some(0));
    let ends: Vec<&Derivation> = d.nodes().into_iter().filter(|n| n.rule == Rule::End).collect();
    assert!(ends
        .iter()
        .any(|e| e.session.queue.to_string() == "[u1->s:req]" && e.session.network.players() == participants(["s"])));
    assert!(derivation_valid(&d, &m.sets["Users"], g, &s));
}

#[test]
fn hand_transcribed_derivation_matches_and_validates() {
    let m = module(&["social_media.mps", "social_media_derivation.mps"]);
    let expected = transcribed(&m, &corpus("social_media.derivation"));
    let (g, s, set) = (&m.globals["G"], session(&m, "Smex"), &m.sets["Users"]);
    assert!(derivation_valid(&expected, set, g, &s));
    let got = typecheck(set, g, &s).unwrap();
    let (a, b) = (got.nodes(), expected.nodes());
    assert_eq!(a.len(), b.len());
    for (x, y) in a.iter().zip(&b) {
        assert_eq!((x.rule, &x.session, &x.gtype, x.history_size), (y.rule, &y.session, &y.gtype, y.history_size));
    }
}

#[test]
fn social_media_rejected_when_the_service_counts() {
    let m = module(&["social_media.mps"]);
    let s = session(&m, "Smex");
    for set in ["All", "Service", "U1Service"] {
        assert!(typecheck(&m.sets[set], &m.globals["G"], &s).is_err(), "{set}");
    }
    let f = typecheck(&m.sets["All"], &m.globals["G"], &s).unwrap_err();
    assert!(!f.trail.is_empty() || f.reason.kind() == "PlayersLeak", "{f}");
}

#[test]
fn remark_counterexample() {
    let m = module(&["remark.mps"]);
    let (g, s) = (&m.globals["G"], session(&m, "Remark"));
    let f = typecheck(&m.sets["PQ"], g, &s).unwrap_err();
    match &f.reason {
        FailureReason::NotSound { offender, .. } => assert_eq!(offender.to_string(), "q->p:lam"),
        other => panic!("{other:?}"),
    }
    let d = typecheck(&m.sets["Nobody"], g, &s).unwrap();
    assert_eq!(d.skeleton(), "Out(In(Cycle))");
}

#[test]
fn boundedness_example_depths() {
    let m = module(&["boundedness.mps"]);
    let (g, gp) = (&m.globals["G"], &m.globals["Gp"]);
    let d = |t: &GlobalType, p: &str| depth(t, &Participant::new(p));
    assert_eq!(
        [d(g, "p"), d(g, "q"), d(g, "r"), d(gp, "p"), d(gp, "q"), d(gp, "r")],
        [
            ExtNat::Finite(3),
            ExtNat::Finite(2),
            ExtNat::Finite(1),
            ExtNat::Finite(1),
            ExtNat::Finite(2),
            ExtNat::Infinite
        ]
    );
    let w = bounded(g).unwrap_err();
    assert_eq!(w.participant.as_str(), "r");
    assert_eq!(&w.subterm(g), gp);
    assert!(!depth_table(g).is_empty());
}

#[test]
fn ping_pong_is_typable_for_everyone() {
    let m = module(&["ping_pong.mps"]);
    let s = session(&m, "Start");
    for set in ["Everyone", "Pair"] {
        let d = typecheck(&m.sets[set], &m.globals["Loop"], &s).unwrap();
        assert!(derivation_valid(&d, &m.sets[set], &m.globals["Loop"], &s));
    }
}

#[test]
fn corpus_round_trips() {
    for name in ["social_media.mps", "boundedness.mps", "remark.mps", "ping_pong.mps", "orphan.mps"] {
        let m = module(&[name]);
        let again = parse_module(&render_module(&m)).unwrap();
        assert_eq!(m.processes, again.processes, "{name}");
        assert_eq!(m.globals, again.globals, "{name}");
        assert_eq!(m.networks, again.networks, "{name}");
        assert_eq!(m.queues, again.queues, "{name}");
        assert_eq!(m.sets, again.sets, "{name}");
        for (k, v) in &m.sessions {
            assert_eq!(v.session, again.sessions[k].session, "{name}");
        }
    }
}

#[test]
fn social_media_partial_properties() {
    let m = module(&["social_media.mps"]);
    let s = session(&m, "Smex");
    let b = Bounds::new(40, 2);
    let lock_s = check_p_lock_free(&s, &m.sets["Service"], b);
    assert_eq!(lock_s.status, Status::Violated);
    let w = lock_s.witness.unwrap();
    assert_eq!(session_run(&s, &w.trace).unwrap(), w.state);
    assert_eq!(check_p_deadlock_free(&s, &m.sets["Service"], b).status, Status::Violated);
    assert_ne!(check_p_lock_free(&s, &m.sets["Users"], b).status, Status::Violated);
    assert_ne!(check_p_deadlock_free(&s, &m.sets["Users"], b).status, Status::Violated);
    assert_ne!(check_p_omf(&s, &m.sets["Users"], b).status, Status::Violated);
    let omf = check_p_omf(&s, &m.sets["U1Service"], b);
    assert_eq!(omf.status, Status::Violated);
    let w = omf.witness.unwrap();
    assert_eq!(w.message.unwrap().to_string(), "u1->s:req");
    assert!(w.state.queue.messages().any(|msg| msg.to_string() == "u1->s:req"));
}

#[test]
fn stop_stop_trace_reaches_the_service_lock() {
    let m = module(&["social_media.mps"]);
    let s = session(&m, "Smex");
    let t = Trace::parse_text("u1>u2!stop u2>u1!stop u1<u2?stop u2<u1?stop").unwrap();
    let end = session_run(&s, &t).unwrap();
    assert_eq!(end.network.players(), participants(["s"]));
    assert!(end.queue.is_empty());
    assert!(session_enabled(&end).is_empty());
    let g = explore(&s, Bounds::new(40, 2));
    assert!(g.find(&end).is_some());
}
