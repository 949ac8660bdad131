//! Depth, boundedness, weight, and soundness of global types, computed on
//! the finite graph of the type.

mod extnat;
mod longest;
mod paths;

use std::collections::BTreeMap;

use serde::Serialize;

pub use extnat::ExtNat;
pub use longest::Blocker;
pub use paths::{paths_sample, Path, PathEnd};

use crate::dynamics::TypeConfiguration;
use crate::global::{GlobalHead, GlobalType};
use crate::name::{Participant, ParticipantSet};
use crate::queue::{Channel, Message};
use crate::regular::Regular;
use longest::{longest, longest_in, Measure, Step};

/// Players of every node's subterm, indexed by node.
pub fn node_players(g: &GlobalType) -> Vec<ParticipantSet> {
    let term = g.term();
    (0..term.len())
        .map(|i| {
            let mut seen = vec![false; term.len()];
            let mut stack = vec![i];
            let mut set = ParticipantSet::new();
            while let Some(j) = stack.pop() {
                if std::mem::replace(&mut seen[j], true) {
                    continue;
                }
                if let Some(p) = term.node(j).head.player() {
                    set.insert(p.clone());
                }
                stack.extend(term.node(j).children.iter().copied());
            }
            set
        })
        .collect()
}

fn depth_measures(term: &Regular<GlobalHead>, p: &Participant) -> Vec<Measure> {
    longest(term, |i| match &term.node(i).head {
        GlobalHead::End => Step::Block,
        head if head.player() == Some(p) => Step::Stop(1),
        _ => Step::Continue,
    })
}

fn obligation_measures(term: &Regular<GlobalHead>, p: &Participant) -> Vec<Measure> {
    longest(term, |i| match &term.node(i).head {
        GlobalHead::End => Step::Stop(0),
        head if head.player() == Some(p) => Step::Stop(1),
        _ => Step::Continue,
    })
}

/// Supremum over all paths of the first (1-based) position played by `p`;
/// 0 when `p` plays nowhere in `g`.
pub fn depth(g: &GlobalType, p: &Participant) -> ExtNat {
    if !g.players().contains(p) {
        return ExtNat::ZERO;
    }
    depth_measures(g.term(), p)[0].value
}

/// Like [`depth`], except that a path ending in `End` before `p` plays
/// puts no obligation on `p`: only infinite avoiding paths make it
/// infinite. A path that terminates first contributes nothing beyond the
/// positions it has.
pub fn obligation_depth(g: &GlobalType, p: &Participant) -> ExtNat {
    if !g.players().contains(p) {
        return ExtNat::ZERO;
    }
    obligation_measures(g.term(), p)[0].value
}

/// `depth(subterm, p)` for every node and every player of `g`.
pub fn depth_table(g: &GlobalType) -> BTreeMap<(usize, Participant), ExtNat> {
    table_of(g, depth_measures)
}

/// `obligation_depth(subterm, p)` for every node and every player of `g`.
pub fn obligation_table(g: &GlobalType) -> BTreeMap<(usize, Participant), ExtNat> {
    table_of(g, obligation_measures)
}

fn table_of(
    g: &GlobalType,
    measure: fn(&Regular<GlobalHead>, &Participant) -> Vec<Measure>,
) -> BTreeMap<(usize, Participant), ExtNat> {
    let players = node_players(g);
    let mut table = BTreeMap::new();
    for p in g.players() {
        let measures = measure(g.term(), &p);
        for (i, m) in measures.iter().enumerate() {
            let v = if players[i].contains(&p) { m.value } else { ExtNat::ZERO };
            table.insert((i, p.clone()), v);
        }
    }
    table
}

/// A node of the type and a player of that node with infinite depth.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct UnboundedWitness {
    pub node: usize,
    pub participant: Participant,
}

impl UnboundedWitness {
    pub fn subterm(&self, g: &GlobalType) -> GlobalType {
        GlobalType::from_term(g.term().subterm(self.node))
    }
}

/// `Ok(())` when every player of every subterm has finite obligation depth
/// there, i.e. cannot be avoided along an infinite path.
///
/// When a failure is caused by a cycle that the participant can avoid, the
/// witness is a node on that cycle rather than an ancestor that merely
/// leads to it.
pub fn bounded(g: &GlobalType) -> Result<(), UnboundedWitness> {
    let players = node_players(g);
    let mut tables: BTreeMap<Participant, Vec<Measure>> = BTreeMap::new();
    for i in 0..g.term().len() {
        for p in &players[i] {
            let m = tables.entry(p.clone()).or_insert_with(|| obligation_measures(g.term(), p))[i];
            if m.value.is_finite() {
                continue;
            }
            let node = match m.blocker {
                Some(Blocker::Cycle(c)) if players[c].contains(p) => c,
                _ => i,
            };
            return Err(UnboundedWitness { node, participant: p.clone() });
        }
    }
    Ok(())
}

pub fn is_bounded(g: &GlobalType) -> bool {
    bounded(g).is_ok()
}

/// Weight of a message with its diagnostic: when infinite, the reachable
/// blocking node or cycle responsible.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct Weight {
    pub value: ExtNat,
    pub blocker: Option<Blocker>,
}

/// Distance over all paths to the input reading `m`. Infinite if some path
/// reaches `End`, or an input on the same channel with another label, or
/// loops forever first.
pub fn weight_of(m: &Message, g: &GlobalType) -> Weight {
    let term = g.term();
    let measures = longest(term, |i| match &term.node(i).head {
        GlobalHead::End => Step::Block,
        GlobalHead::In { reader, sender, label } if *reader == m.receiver && *sender == m.sender => {
            if *label == m.label {
                Step::Stop(0)
            } else {
                Step::Block
            }
        }
        _ => Step::Continue,
    });
    Weight { value: measures[0].value, blocker: measures[0].blocker }
}

pub fn weight(m: &Message, g: &GlobalType) -> ExtNat {
    weight_of(m, g).value
}

/// Weight of the `k`-th message (from 1) on the channel of `m`: every path
/// must reach a `k`-th input on that channel, and that input must read the
/// label of `m`. The first `k - 1` inputs consume the messages ahead of it.
/// For `k = 1` this is [`weight_of`].
pub fn occurrence_weight(m: &Message, k: usize, g: &GlobalType) -> Weight {
    assert!(k >= 1, "occurrences are numbered from 1");
    let term = g.term();
    let n = term.len();
    // Node `(j - 1) * n + i` is node `i` with `j` inputs still to pass.
    let on_channel = |i: usize| {
        matches!(&term.node(i).head, GlobalHead::In { reader, sender, .. }
            if *reader == m.receiver && *sender == m.sender)
    };
    let measures = longest_in(
        n * k,
        |x| {
            let (i, j) = (x % n, x / n + 1);
            let next = if on_channel(i) { j - 1 } else { j };
            term.node(i).children.iter().map(|c| (next - 1) * n + c).collect()
        },
        |x| {
            let (i, j) = (x % n, x / n + 1);
            match &term.node(i).head {
                GlobalHead::End => Step::Block,
                GlobalHead::In { label, .. } if j == 1 && on_channel(i) => {
                    if *label == m.label {
                        Step::Stop(0)
                    } else {
                        Step::Block
                    }
                }
                _ => Step::Continue,
            }
        },
    );
    let root = (k - 1) * n;
    let blocker = measures[root].blocker.map(|b| match b {
        Blocker::Node(x) => Blocker::Node(x % n),
        Blocker::Cycle(x) => Blocker::Cycle(x % n),
    });
    Weight { value: measures[root].value, blocker }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Soundness {
    /// First message (in canonical queue order) with both ends in the set
    /// and infinite weight.
    pub offender: Option<Message>,
    pub blocker: Option<Blocker>,
    /// Channels holding several messages whose ends are both in the set.
    /// The `k`-th of these is weighed against the `k`-th input on the
    /// channel; see [`occurrence_weight`].
    pub shared_channels: Vec<Channel>,
}

impl Soundness {
    pub fn is_sound(&self) -> bool {
        self.offender.is_none()
    }
}

/// Checks that every message occurrence between members of `set` has
/// finite weight at its position on its channel.
pub fn p_sound_report(c: &TypeConfiguration, set: &ParticipantSet) -> Soundness {
    let mut report = Soundness { offender: None, blocker: None, shared_channels: Vec::new() };
    let mut cache: BTreeMap<(Message, usize), Weight> = BTreeMap::new();
    for (ch, labels) in c.queue.canonical() {
        if !(set.contains(&ch.sender) && set.contains(&ch.receiver)) {
            continue;
        }
        if labels.len() > 1 {
            report.shared_channels.push(ch.clone());
        }
        for (k, l) in labels.iter().enumerate() {
            let m = Message::new(ch.sender.clone(), l.clone(), ch.receiver.clone());
            let w = *cache.entry((m.clone(), k + 1)).or_insert_with(|| occurrence_weight(&m, k + 1, &c.gtype));
            if !w.value.is_finite() && report.offender.is_none() {
                report.offender = Some(m);
                report.blocker = w.blocker;
            }
        }
    }
    report
}

pub fn p_sound(c: &TypeConfiguration, set: &ParticipantSet) -> bool {
    p_sound_report(c, set).is_sound()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::name::participants;
    use crate::queue::Queue;
    use crate::syntax::parse_module;

    fn p(s: &str) -> Participant {
        Participant::new(s)
    }

    const BOUNDEDNESS: &str = "
        global G = r->q!lam. q<-r?lam. Gp
        global Gp = p->q!{l1. q<-p?l1. q->r!l3. r<-q?l3. End, l2. q<-p?l2. Gp}
    ";

    #[test]
    fn depths_of_the_unbounded_example() {
        let m = parse_module(BOUNDEDNESS).unwrap();
        let (g, gp) = (&m.globals["G"], &m.globals["Gp"]);
        assert_eq!(depth(g, &p("p")), ExtNat::Finite(3));
        assert_eq!(depth(g, &p("q")), ExtNat::Finite(2));
        assert_eq!(depth(g, &p("r")), ExtNat::Finite(1));
        assert_eq!(depth(gp, &p("p")), ExtNat::Finite(1));
        assert_eq!(depth(gp, &p("q")), ExtNat::Finite(2));
        assert_eq!(depth(gp, &p("r")), ExtNat::Infinite);
        let w = bounded(g).unwrap_err();
        assert_eq!(w.subterm(g), *gp);
        assert_eq!(w.participant, p("r"));
    }

    #[test]
    fn depth_zero_iff_not_a_player() {
        let m = parse_module(BOUNDEDNESS).unwrap();
        assert_eq!(depth(&m.globals["G"], &p("z")), ExtNat::ZERO);
        assert_eq!(depth(&GlobalType::end(), &p("p")), ExtNat::ZERO);
        assert!(is_bounded(&GlobalType::end()));
    }

    #[test]
    fn terminated_paths_put_no_obligation() {
        let m = parse_module("global G = p->q!{a. q<-p?a. q->r!b. r<-q?b.End, c. q<-p?c.End}").unwrap();
        let g = &m.globals["G"];
        assert_eq!(depth(g, &p("r")), ExtNat::Infinite);
        assert_eq!(obligation_depth(g, &p("r")), ExtNat::Finite(4));
        assert!(is_bounded(g));
    }

    #[test]
    fn weights() {
        let m = parse_module("global A = q<-p?lam.End\nglobal R = p->q!lam. q<-p?lam. R").unwrap();
        let msg = |s: &str, l: &str, r: &str| Message::new(p(s), l.into(), p(r));
        assert_eq!(weight(&msg("p", "lam", "q"), &m.globals["A"]), ExtNat::ZERO);
        assert_eq!(weight(&msg("p", "lam", "q"), &GlobalType::end()), ExtNat::Infinite);
        assert_eq!(weight(&msg("p", "other", "q"), &m.globals["A"]), ExtNat::Infinite);
        let w = weight_of(&msg("q", "lam", "p"), &m.globals["R"]);
        assert_eq!(w.value, ExtNat::Infinite);
        assert!(matches!(w.blocker, Some(Blocker::Cycle(_))));
        assert_eq!(weight(&msg("p", "lam", "q"), &m.globals["R"]), ExtNat::Finite(1));
    }

    #[test]
    fn later_occurrences_skip_earlier_inputs() {
        let m = parse_module("global G = q<-p?a. q<-p?b. End").unwrap();
        let g = &m.globals["G"];
        let b = Message::new(p("p"), "b".into(), p("q"));
        assert_eq!(weight(&b, g), ExtNat::Infinite);
        assert_eq!(occurrence_weight(&b, 2, g).value, ExtNat::Finite(1));
        assert_eq!(occurrence_weight(&b, 1, g).value, ExtNat::Infinite);
        assert_eq!(occurrence_weight(&b, 3, g).value, ExtNat::Infinite);
        let q = Queue::from_messages([Message::new(p("p"), "a".into(), p("q")), b.clone()]);
        let r = p_sound_report(&TypeConfiguration::new(g.clone(), q), &participants(["p", "q"]));
        assert!(r.is_sound());
        assert_eq!(r.shared_channels.len(), 1);
    }

    #[test]
    fn occurrence_weight_through_a_loop() {
        let m = parse_module("global G = p->q!{a. q<-p?a. G, b. q<-p?b. End}").unwrap();
        let g = &m.globals["G"];
        let a = Message::new(p("p"), "a".into(), p("q"));
        assert_eq!(occurrence_weight(&a, 1, g).value, ExtNat::Infinite);
        let c = Message::new(p("q"), "a".into(), p("p"));
        assert!(matches!(occurrence_weight(&c, 2, g).blocker, Some(Blocker::Cycle(_)) | Some(Blocker::Node(_))));
    }

    #[test]
    fn soundness_of_the_cyclic_counterexample() {
        let m = parse_module("global G = p->q!lam. q<-p?lam. G").unwrap();
        let q = Queue::from_messages([Message::new(p("q"), "lam".into(), p("p"))]);
        let c = TypeConfiguration::new(m.globals["G"].clone(), q);
        let r = p_sound_report(&c, &participants(["p", "q"]));
        assert_eq!(r.offender.unwrap().to_string(), "q->p:lam");
        assert!(p_sound(&c, &ParticipantSet::new()));
        assert!(p_sound(&TypeConfiguration::new(m.globals["G"].clone(), Queue::new()), &participants(["p", "q"])));
    }
}
