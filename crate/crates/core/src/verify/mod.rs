//! Bounded verification of partial lock-freedom, deadlock-freedom and
//! orphan-message-freedom on the explored state graph.

mod explore;

use std::fmt;

use serde::Serialize;

pub use explore::{explore, Bounds, StateGraph};

use crate::comm::{CommKind, Trace};
use crate::name::{Participant, ParticipantSet};
use crate::network::Session;
use crate::queue::{Channel, Message};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Status {
    Holds,
    Violated,
    HoldsWithinBounds,
}

impl fmt::Display for Status {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Status::Holds => "Holds",
            Status::Violated => "Violated",
            Status::HoldsWithinBounds => "HoldsWithinBounds",
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Property {
    Deadlock,
    Lock,
    Omf,
}

impl fmt::Display for Property {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Property::Deadlock => "deadlock",
            Property::Lock => "lock",
            Property::Omf => "omf",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Witness {
    pub trace: Trace,
    pub state: Session,
    /// The participant that is stuck or locked out.
    pub participant: Option<Participant>,
    /// For orphan messages, the message never read.
    pub message: Option<Message>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Verdict {
    pub property: Property,
    pub status: Status,
    pub witness: Option<Witness>,
    pub states_explored: usize,
    pub truncated: bool,
}

impl Verdict {
    fn new(property: Property, g: &StateGraph, witness: Option<Witness>, inconclusive: bool) -> Self {
        let truncated = g.frontier_truncated();
        let status = match (&witness, inconclusive || truncated) {
            (Some(_), _) => Status::Violated,
            (None, true) => Status::HoldsWithinBounds,
            (None, false) => Status::Holds,
        };
        Verdict { property, status, witness, states_explored: g.len(), truncated }
    }
}

fn witness(g: &StateGraph, i: usize, participant: Option<Participant>, message: Option<Message>) -> Witness {
    Witness { trace: g.trace_to(i), state: g.states[i].clone(), participant, message }
}

/// Violated when some reachable stuck state keeps a member of `set` active.
pub fn check_p_deadlock_free(s: &Session, set: &ParticipantSet, b: Bounds) -> Verdict {
    deadlock_on(&explore(s, b), set)
}

pub fn deadlock_on(g: &StateGraph, set: &ParticipantSet) -> Verdict {
    let found = (0..g.len()).find_map(|i| {
        if !g.enabled[i].is_empty() {
            return None;
        }
        let p = g.states[i].network.players().into_iter().find(|p| set.contains(p))?;
        Some(witness(g, i, Some(p), None))
    });
    Verdict::new(Property::Deadlock, g, found, false)
}

/// Violated when a reachable state keeps some `p` in `set` active but no
/// continuation lets `p` play. States whose future the bounds cut off can
/// only weaken the verdict to `HoldsWithinBounds`.
pub fn check_p_lock_free(s: &Session, set: &ParticipantSet, b: Bounds) -> Verdict {
    lock_on(&explore(s, b), set)
}

pub fn lock_on(g: &StateGraph, set: &ParticipantSet) -> Verdict {
    let open = g.may_be_truncated();
    let mut inconclusive = false;
    for p in set {
        let live = g.can_reach(|i| g.enabled[i].iter().any(|beta| beta.player == *p));
        for i in 0..g.len() {
            if live[i] || g.states[i].network.get(p).is_none() {
                continue;
            }
            if open[i] {
                inconclusive = true;
            } else {
                return Verdict::new(Property::Lock, g, Some(witness(g, i, Some(p.clone()), None)), false);
            }
        }
    }
    Verdict::new(Property::Lock, g, None, inconclusive)
}

/// Violated when a reachable state holds a message between members of
/// `set` that no continuation reads. The first read on a channel takes its
/// head, so reaching a state where the receiver can read from the channel
/// is exactly reading that occurrence.
pub fn check_p_omf(s: &Session, set: &ParticipantSet, b: Bounds) -> Verdict {
    omf_on(&explore(s, b), set)
}

pub fn omf_on(g: &StateGraph, set: &ParticipantSet) -> Verdict {
    let open = g.may_be_truncated();
    let mut inconclusive = false;
    for p in set {
        for q in set {
            if p == q {
                continue;
            }
            let ch = Channel::new(p.clone(), q.clone());
            let readable = g.can_reach(|i| {
                g.enabled[i].iter().any(|beta| beta.kind == CommKind::Receive && beta.player == *q && beta.peer == *p)
            });
            for i in 0..g.len() {
                let Some(label) = g.states[i].queue.head(&ch) else { continue };
                if readable[i] {
                    continue;
                }
                if open[i] {
                    inconclusive = true;
                } else {
                    let m = Message::new(p.clone(), label.clone(), q.clone());
                    return Verdict::new(Property::Omf, g, Some(witness(g, i, Some(q.clone()), Some(m))), false);
                }
            }
        }
    }
    Verdict::new(Property::Omf, g, None, inconclusive)
}

pub fn check(property: Property, s: &Session, set: &ParticipantSet, b: Bounds) -> Verdict {
    let g = explore(s, b);
    match property {
        Property::Deadlock => deadlock_on(&g, set),
        Property::Lock => lock_on(&g, set),
        Property::Omf => omf_on(&g, set),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dynamics::session_run;
    use crate::name::participants;
    use crate::syntax::parse_module;

    const SMALL: &str = "
        network Lone = p[q!a.end]
        network Shake = p[q!a.end] | q[p?a.end]
        process P = q!a. P
        network Loop = p[P]
        network Idle = p[end]
    ";

    fn session(name: &str) -> Session {
        let m = parse_module(SMALL).unwrap();
        Session::new(m.networks[name].clone(), Default::default())
    }

    #[test]
    fn handshake_graph() {
        let g = explore(&session("Shake"), Bounds::new(10, 2));
        assert_eq!(g.len(), 3);
        assert!(!g.frontier_truncated());
        let pq = participants(["p", "q"]);
        assert_eq!(lock_on(&g, &pq).status, Status::Holds);
        assert_eq!(omf_on(&g, &pq).status, Status::Holds);
        assert_eq!(deadlock_on(&g, &pq).status, Status::Holds);
    }

    #[test]
    fn queue_bound_prunes_sends() {
        let g = explore(&session("Loop"), Bounds::new(10, 1));
        assert_eq!(g.len(), 2);
        assert!(g.frontier_truncated());
    }

    #[test]
    fn trace_bound_truncates() {
        let g = explore(&session("Loop"), Bounds::new(2, 10));
        assert_eq!(g.len(), 3);
        assert!(g.incomplete[2]);
        assert_eq!(
            check_p_lock_free(&session("Loop"), &participants(["p"]), Bounds::new(2, 10)).status,
            Status::HoldsWithinBounds
        );
    }

    #[test]
    fn orphan_after_send() {
        let s = session("Lone");
        let v = check_p_omf(&s, &participants(["p", "q"]), Bounds::new(10, 2));
        assert_eq!(v.status, Status::Violated);
        let w = v.witness.unwrap();
        assert_eq!(w.message.unwrap().to_string(), "p->q:a");
        assert_eq!(session_run(&s, &w.trace).unwrap(), w.state);
        // Only p is constrained, and p's message is not between members.
        assert_eq!(check_p_omf(&s, &participants(["p"]), Bounds::new(10, 2)).status, Status::Holds);
    }

    #[test]
    fn inactive_network_holds() {
        let s = session("Idle");
        let set = participants(["p", "q"]);
        for prop in [Property::Deadlock, Property::Lock, Property::Omf] {
            assert_eq!(check(prop, &s, &set, Bounds::default()).status, Status::Holds);
        }
    }
}
