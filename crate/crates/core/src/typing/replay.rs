//! Independent replay of a derivation. Nothing recorded in the tree is
//! trusted except the rule names and the shape; every judgement is
//! recomputed from its parent and every side condition re-checked.

use thiserror::Error;

use super::{CheckOptions, CycleMode, Derivation, Rule};
use crate::analysis::{is_bounded, occurrence_weight};
use crate::global::{GlobalHead, GlobalType};
use crate::name::ParticipantSet;
use crate::network::Session;
use crate::process::Polarity;
use crate::queue::{Channel, Message, Queue};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("invalid derivation at {path}: {reason}")]
pub struct InvalidDerivation {
    /// Child indices from the root, e.g. `root.0.1`.
    pub path: String,
    pub reason: String,
}

struct Replay<'a> {
    set: &'a ParticipantSet,
    options: CheckOptions,
    history: Vec<(Session, GlobalType)>,
}

fn sound(set: &ParticipantSet, g: &GlobalType, m: &Queue) -> bool {
    m.canonical().iter().filter(|(ch, _)| set.contains(&ch.sender) && set.contains(&ch.receiver)).all(|(ch, labels)| {
        labels.iter().enumerate().all(|(k, l)| {
            let msg = Message::new(ch.sender.clone(), l.clone(), ch.receiver.clone());
            occurrence_weight(&msg, k + 1, g).value.is_finite()
        })
    })
}

impl Replay<'_> {
    fn bad(path: &str, reason: impl Into<String>) -> Result<(), InvalidDerivation> {
        Err(InvalidDerivation { path: path.to_string(), reason: reason.into() })
    }

    fn leak_free(&self, s: &Session, player: &crate::name::Participant, g: &GlobalType) -> bool {
        let plays_g = g.players();
        s.network.players().into_iter().filter(|p| p != player).all(|p| plays_g.contains(&p) || !self.set.contains(&p))
    }

    fn seen_ignoring_queue(&self, s: &Session, g: &GlobalType) -> bool {
        self.history.iter().any(|(h, hg)| h.network == s.network && hg == g)
    }

    fn replay(&mut self, d: &Derivation, s: &Session, g: &GlobalType, path: &str) -> Result<(), InvalidDerivation> {
        if d.session != *s || d.gtype != *g {
            return Self::bad(path, "recorded judgement differs from the replayed one");
        }
        if d.history_size != self.history.len() {
            return Self::bad(path, "recorded history size differs");
        }
        let soundness_on = self.options.cycle_mode == CycleMode::Standard;
        match d.rule {
            Rule::Cycle => {
                if !d.children.is_empty() {
                    return Self::bad(path, "Cycle has premises");
                }
                if !self.history.iter().any(|(h, hg)| h == s && hg == g) {
                    return Self::bad(path, "Cycle without a matching history entry");
                }
                if !soundness_on && !s.queue.is_empty() {
                    return Self::bad(path, "Cycle with a nonempty queue");
                }
                Ok(())
            }
            Rule::End => {
                if !d.children.is_empty() || !g.is_end() {
                    return Self::bad(path, "End must be a leaf typed by End");
                }
                if s.network.players().iter().any(|p| self.set.contains(p)) {
                    return Self::bad(path, "End with an active member of the set");
                }
                if !sound(self.set, g, &s.queue) {
                    return Self::bad(path, "End configuration is not sound");
                }
                Ok(())
            }
            Rule::Out => {
                let GlobalHead::Out { sender, receiver, labels } = g.head() else {
                    return Self::bad(path, "Out on a type that is not an output");
                };
                let proc = s.network.process(sender);
                if proc.prefix() != Some((Polarity::Send, receiver)) || proc.labels() != labels.as_slice() {
                    return Self::bad(path, "process output does not match the type");
                }
                if self.seen_ignoring_queue(s, g) {
                    return Self::bad(path, "network and type already in the history");
                }
                if !self.leak_free(s, sender, g) {
                    return Self::bad(path, "active member of the set missing from the type");
                }
                if soundness_on && !sound(self.set, g, &s.queue) {
                    return Self::bad(path, "configuration is not sound");
                }
                if d.children.len() != labels.len() {
                    return Self::bad(path, "wrong number of premises");
                }
                self.history.push((s.clone(), g.clone()));
                for (i, l) in labels.iter().enumerate() {
                    let mut queue = s.queue.clone();
                    queue.push(Message::new(sender.clone(), l.clone(), receiver.clone()));
                    let cont = proc.continuation(l).expect("label of the process");
                    let next = Session::new(s.network.rebind(sender, cont), queue);
                    let r = self.replay(&d.children[i], &next, &g.child(i), &format!("{path}.{i}"));
                    if r.is_err() {
                        self.history.pop();
                        return r;
                    }
                }
                self.history.pop();
                Ok(())
            }
            Rule::In => {
                let GlobalHead::In { reader, sender, label } = g.head() else {
                    return Self::bad(path, "In on a type that is not an input");
                };
                let proc = s.network.process(reader);
                if proc.prefix() != Some((Polarity::Receive, sender)) {
                    return Self::bad(path, "process input does not match the type");
                }
                let Some(cont) = proc.continuation(label) else {
                    return Self::bad(path, "process does not accept the label");
                };
                let ch = Channel::new(sender.clone(), reader.clone());
                if s.queue.head(&ch) != Some(label) {
                    return Self::bad(path, "queue does not start with the message");
                }
                let mut rest = s.queue.clone();
                rest.pop_head(&ch);
                if self.seen_ignoring_queue(s, g) {
                    return Self::bad(path, "network and type already in the history");
                }
                if !self.leak_free(s, reader, g) {
                    return Self::bad(path, "active member of the set missing from the type");
                }
                let g2 = g.child(0);
                if soundness_on && !sound(self.set, &g2, &rest) {
                    return Self::bad(path, "continuation configuration is not sound");
                }
                if d.children.len() != 1 {
                    return Self::bad(path, "wrong number of premises");
                }
                let next = Session::new(s.network.rebind(reader, cont), rest);
                self.history.push((s.clone(), g.clone()));
                let r = self.replay(&d.children[0], &next, &g2, &format!("{path}.0"));
                self.history.pop();
                r
            }
        }
    }
}

/// Replays `d` as a derivation of the judgement for `set`, `g`, `s` with
/// empty history.
pub fn derivation_validate(
    d: &Derivation,
    set: &ParticipantSet,
    g: &GlobalType,
    s: &Session,
    options: CheckOptions,
) -> Result<(), InvalidDerivation> {
    if !is_bounded(g) {
        return Err(InvalidDerivation { path: "root".into(), reason: "global type is not bounded".into() });
    }
    Replay { set, options, history: Vec::new() }.replay(d, s, g, "root")
}

pub fn derivation_valid(d: &Derivation, set: &ParticipantSet, g: &GlobalType, s: &Session) -> bool {
    derivation_validate(d, set, g, s, CheckOptions::default()).is_ok()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::name::participants;
    use crate::syntax::parse_module;
    use crate::typing::typecheck;

    #[test]
    fn tampered_end_queue_is_rejected() {
        let src = "
            global G = p->q!a. q<-p?a.End
            network N = p[q!a.end] | q[p?a.end]
        ";
        let m = parse_module(src).unwrap();
        let s = Session::new(m.networks["N"].clone(), Queue::new());
        let set = participants(["p", "q"]);
        let g = &m.globals["G"];
        let mut d = typecheck(&set, g, &s).unwrap();
        assert!(derivation_valid(&d, &set, g, &s));
        let leaf = &mut d.children[0].children[0];
        assert_eq!(leaf.rule, Rule::End);
        leaf.session.queue.push(Message::new("p".into(), "a".into(), "q".into()));
        assert!(!derivation_valid(&d, &set, g, &s));
    }

    #[test]
    fn wrong_rule_is_rejected() {
        let m = parse_module("global G = p->q!a.End\nnetwork N = p[q!a.end]").unwrap();
        let s = Session::new(m.networks["N"].clone(), Queue::new());
        let g = &m.globals["G"];
        let mut d = typecheck(&ParticipantSet::new(), g, &s).unwrap();
        d.rule = Rule::In;
        let err = derivation_validate(&d, &ParticipantSet::new(), g, &s, CheckOptions::default()).unwrap_err();
        assert_eq!(err.path, "root");
    }
}
