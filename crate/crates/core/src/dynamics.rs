//! Transition systems of sessions and of type configurations.

use std::collections::BTreeSet;
use std::fmt;

use thiserror::Error;

use crate::analysis::{bounded, node_players, UnboundedWitness};
use crate::comm::{CommKind, Communication, Trace};
use crate::global::{GlobalHead, GlobalType};
use crate::name::ParticipantSet;
use crate::network::Session;
use crate::process::Polarity;
use crate::queue::{Message, Queue};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum StepError {
    #[error("{0} is not enabled")]
    NotEnabled(Communication),
    #[error("global type is not bounded: node {} has infinite depth for {}", .0.node, .0.participant)]
    UnboundedType(UnboundedWitness),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("step {index} ({comm}) is not enabled")]
pub struct RunError {
    pub index: usize,
    pub comm: Communication,
    /// The session reached before the failing step.
    pub reached: Session,
}

/// All transitions of `s`: players in order, then labels in order.
pub fn session_enabled(s: &Session) -> Vec<(Communication, Session)> {
    let mut out = Vec::new();
    for (p, proc) in s.network.bindings() {
        let Some((polarity, peer)) = proc.prefix() else { continue };
        match polarity {
            Polarity::Send => {
                for (l, cont) in proc.branches() {
                    let mut queue = s.queue.clone();
                    queue.push(Message::new(p.clone(), l.clone(), peer.clone()));
                    let network = s.network.rebind(p, cont);
                    out.push((Communication::send(p.clone(), peer.clone(), l), Session::new(network, queue)));
                }
            }
            Polarity::Receive => {
                let ch = crate::queue::Channel::new(peer.clone(), p.clone());
                let Some(head) = s.queue.head(&ch) else { continue };
                let Some(cont) = proc.continuation(head) else { continue };
                let comm = Communication::receive(p.clone(), peer.clone(), head.clone());
                let mut queue = s.queue.clone();
                queue.pop_head(&ch);
                out.push((comm, Session::new(s.network.rebind(p, cont), queue)));
            }
        }
    }
    out
}

pub fn session_step(s: &Session, beta: &Communication) -> Result<Session, StepError> {
    let not_enabled = || StepError::NotEnabled(beta.clone());
    let proc = s.network.get(&beta.player).ok_or_else(not_enabled)?;
    let (polarity, peer) = proc.prefix().ok_or_else(not_enabled)?;
    let expected = match beta.kind {
        CommKind::Send => Polarity::Send,
        CommKind::Receive => Polarity::Receive,
    };
    if polarity != expected || *peer != beta.peer {
        return Err(not_enabled());
    }
    let cont = proc.continuation(&beta.label).ok_or_else(not_enabled)?;
    let mut queue = s.queue.clone();
    match beta.kind {
        CommKind::Send => queue.push(beta.message()),
        CommKind::Receive => {
            let ch = beta.channel();
            if queue.head(&ch) != Some(&beta.label) {
                return Err(not_enabled());
            }
            queue.pop_head(&ch);
        }
    }
    Ok(Session::new(s.network.rebind(&beta.player, cont), queue))
}

pub fn session_run(s: &Session, trace: &Trace) -> Result<Session, RunError> {
    let mut cur = s.clone();
    for (index, beta) in trace.iter().enumerate() {
        cur = match session_step(&cur, beta) {
            Ok(next) => next,
            Err(_) => return Err(RunError { index, comm: beta.clone(), reached: cur }),
        };
    }
    Ok(cur)
}

/// A global type running alongside a queue.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct TypeConfiguration {
    pub gtype: GlobalType,
    pub queue: Queue,
}

impl TypeConfiguration {
    pub fn new(gtype: GlobalType, queue: Queue) -> Self {
        Self { gtype, queue }
    }
}

impl fmt::Display for TypeConfiguration {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} || {}", crate::syntax::render_global(&self.gtype), self.queue)
    }
}

struct Stepper<'a> {
    g: &'a GlobalType,
    players: Vec<ParticipantSet>,
    beta: &'a Communication,
}

impl Stepper<'_> {
    fn sub(&self, node: usize) -> GlobalType {
        GlobalType::from_term(self.g.term().subterm(node))
    }

    /// The step from `node` with queue `m`, if a rule applies.
    fn step(&self, node: usize, m: &Queue) -> Option<(GlobalType, Queue)> {
        let beta = self.beta;
        if !self.players[node].contains(&beta.player) {
            return None;
        }
        let n = self.g.term().node(node);
        match &n.head {
            GlobalHead::End => None,
            GlobalHead::Out { sender, receiver, labels } if *sender == beta.player => {
                // Top-Out
                if beta.kind != CommKind::Send || *receiver != beta.peer {
                    return None;
                }
                let i = labels.binary_search(&beta.label).ok()?;
                let mut q = m.clone();
                q.push(beta.message());
                Some((self.sub(n.children[i]), q))
            }
            GlobalHead::In { reader, sender, label } if *reader == beta.player => {
                // Top-In
                if beta.kind != CommKind::Receive || *sender != beta.peer || *label != beta.label {
                    return None;
                }
                let ch = beta.channel();
                if m.head(&ch) != Some(label) {
                    return None;
                }
                let mut q = m.clone();
                q.pop_head(&ch);
                Some((self.sub(n.children[0]), q))
            }
            GlobalHead::Out { sender, receiver, labels } => {
                // Inside-Out: the same step in every branch, leaving the
                // branch message last on its channel and the rest equal.
                let mut children = Vec::with_capacity(labels.len());
                let mut common: Option<Queue> = None;
                for (l, &child) in labels.iter().zip(&n.children) {
                    let msg = Message::new(sender.clone(), l.clone(), receiver.clone());
                    let mut q = m.clone();
                    q.push(msg.clone());
                    let (g2, mut q2) = self.step(child, &q)?;
                    let ch = msg.channel();
                    if q2.last(&ch) != Some(l) {
                        return None;
                    }
                    q2.pop_last(&ch);
                    match &common {
                        None => common = Some(q2),
                        Some(c) if *c == q2 => {}
                        Some(_) => return None,
                    }
                    children.push(g2);
                }
                Some((self.sub(node).with_children(&children), common?))
            }
            GlobalHead::In { reader, sender, label } => {
                // Inside-In
                let msg = Message::new(sender.clone(), label.clone(), reader.clone());
                let ch = msg.channel();
                if m.head(&ch) != Some(label) {
                    return None;
                }
                let mut q = m.clone();
                q.pop_head(&ch);
                let (g2, mut q2) = self.step(n.children[0], &q)?;
                q2.push_front(msg);
                Some((self.sub(node).with_children(&[g2]), q2))
            }
        }
    }
}

/// One step of a configuration. The type must be bounded, which makes the
/// descent past nodes not played by `beta`'s player finite.
pub fn config_step(c: &TypeConfiguration, beta: &Communication) -> Result<TypeConfiguration, StepError> {
    bounded(&c.gtype).map_err(StepError::UnboundedType)?;
    step_bounded(c, beta, node_players(&c.gtype))
}

fn step_bounded(
    c: &TypeConfiguration,
    beta: &Communication,
    players: Vec<ParticipantSet>,
) -> Result<TypeConfiguration, StepError> {
    let stepper = Stepper { g: &c.gtype, players, beta };
    stepper
        .step(0, &c.queue)
        .map(|(gtype, queue)| TypeConfiguration { gtype, queue })
        .ok_or_else(|| StepError::NotEnabled(beta.clone()))
}

/// Every step of a configuration, in communication order. Candidates are
/// the root communications of all subterms.
pub fn config_enabled(c: &TypeConfiguration) -> Result<Vec<(Communication, TypeConfiguration)>, StepError> {
    bounded(&c.gtype).map_err(StepError::UnboundedType)?;
    let players = node_players(&c.gtype);
    let candidates: BTreeSet<Communication> =
        c.gtype.term().nodes().iter().flat_map(|n| n.head.communications()).collect();
    let mut out = Vec::new();
    for beta in candidates {
        if let Ok(next) = step_bounded(c, &beta, players.clone()) {
            out.push((beta, next));
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::network::Network;
    use crate::syntax::parse_module;

    fn comm(s: &str) -> Communication {
        s.parse().unwrap()
    }

    #[test]
    fn receive_consumes_the_head() {
        let m = parse_module("network N = p[q?a.end]\nqueue A = [q->p:a]\nqueue B = [q->p:b]").unwrap();
        let s = Session::new(m.networks["N"].clone(), m.queues["A"].clone());
        let steps = session_enabled(&s);
        assert_eq!(steps.len(), 1);
        assert_eq!(steps[0].0, comm("p<q?a"));
        assert_eq!(steps[0].1, Session::default());
        let s = Session::new(m.networks["N"].clone(), m.queues["B"].clone());
        assert!(session_enabled(&s).is_empty());
        assert!(matches!(session_step(&s, &comm("p<q?b")), Err(StepError::NotEnabled(_))));
    }

    #[test]
    fn run_reports_failing_index() {
        let m = parse_module("network N = p[q!a.end]").unwrap();
        let s = Session::new(m.networks["N"].clone(), Queue::new());
        let err = session_run(&s, &Trace::parse_text("p>q!a p>q!a").unwrap()).unwrap_err();
        assert_eq!(err.index, 1);
        assert_eq!(session_run(&s, &Trace::new()).unwrap(), s);
    }

    #[test]
    fn top_rules() {
        let m = parse_module("global O = p->q!a.End\nglobal I = p<-q?a.End\nqueue Q = [q->p:a]").unwrap();
        let c = TypeConfiguration::new(m.globals["O"].clone(), Queue::new());
        let next = config_step(&c, &comm("p>q!a")).unwrap();
        assert!(next.gtype.is_end());
        assert_eq!(next.queue.to_string(), "[p->q:a]");
        let c = TypeConfiguration::new(m.globals["I"].clone(), m.queues["Q"].clone());
        let next = config_step(&c, &comm("p<q?a")).unwrap();
        assert_eq!(next, TypeConfiguration::new(GlobalType::end(), Queue::new()));
        let all = config_enabled(&TypeConfiguration::new(m.globals["O"].clone(), Queue::new())).unwrap();
        assert_eq!(all.len(), 1);
        assert!(config_enabled(&TypeConfiguration::new(GlobalType::end(), Queue::new())).unwrap().is_empty());
    }

    #[test]
    fn inside_in_needs_the_head() {
        let m = parse_module("global G = q<-p?a. r->s!b.End\nqueue Q = [p->q:a]").unwrap();
        let g = m.globals["G"].clone();
        assert!(config_step(&TypeConfiguration::new(g.clone(), Queue::new()), &comm("r>s!b")).is_err());
        let next = config_step(&TypeConfiguration::new(g, m.queues["Q"].clone()), &comm("r>s!b")).unwrap();
        assert_eq!(next.queue.len(), 2);
        assert!(matches!(next.gtype.head(), GlobalHead::In { .. }));
    }

    #[test]
    fn unbounded_type_is_reported() {
        let m = parse_module(
            "global G = r->q!lam. q<-r?lam. Gp
             global Gp = p->q!{l1. q<-p?l1. q->r!l3. r<-q?l3. End, l2. q<-p?l2. Gp}",
        )
        .unwrap();
        let c = TypeConfiguration::new(m.globals["G"].clone(), Queue::new());
        assert!(matches!(config_step(&c, &comm("r>q!lam")), Err(StepError::UnboundedType(_))));
    }

    #[test]
    fn empty_network_is_stuck() {
        assert!(session_enabled(&Session::new(Network::empty(), Queue::new())).is_empty());
    }
}
