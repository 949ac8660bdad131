//! Checking of typing judgements with histories.
//!
//! A judgement types a session against a global type for a set of
//! participants whose behaviour matters. Checking reconstructs a
//! derivation bottom-up; every branch ends in an `End` axiom, a `Cycle`
//! axiom on an exact revisit, or fails.

// Failures carry the failing judgement by value; they are built once per
// check, so their size does not matter.
#![allow(clippy::result_large_err)]

mod replay;
mod report;

use std::collections::HashMap;
use std::fmt;

use serde::Serialize;
use sha2::{Digest, Sha256};

pub use replay::{derivation_valid, derivation_validate, InvalidDerivation};
pub use report::{CheckReport, FailureView, JudgementView, NodeReport, DERIVATION_SCHEMA};

use crate::analysis::{bounded, p_sound_report, Blocker, UnboundedWitness};
use crate::comm::{Communication, Trace};
use crate::dynamics::TypeConfiguration;
use crate::global::{GlobalHead, GlobalType};
use crate::name::{Label, ParticipantSet};
use crate::network::{Network, Session};
use crate::process::Polarity;
use crate::queue::{Channel, Message, Queue};

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum CycleMode {
    /// Cycle on any exact revisit; `Out` and `In` check soundness.
    #[default]
    Standard,
    /// Cycle only on revisits with an empty queue; `Out` and `In` skip the
    /// soundness check, which the empty queue makes redundant.
    EmptyQueueCycle,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct CheckOptions {
    pub cycle_mode: CycleMode,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Rule {
    End,
    Cycle,
    Out,
    In,
}

impl fmt::Display for Rule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Rule::End => "End",
            Rule::Cycle => "Cycle",
            Rule::Out => "Out",
            Rule::In => "In",
        })
    }
}

/// What a rule application checked.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct SideConditions {
    /// For `End`, the active participants. For `Out`/`In`, the active
    /// participants other than the player that do not play in the type.
    /// Either way, disjoint from the set.
    pub checked_players: ParticipantSet,
    /// The configuration whose soundness was checked, if any.
    pub soundness: Option<TypeConfiguration>,
    /// For `Cycle`, the position in the history of the revisited entry.
    pub revisited: Option<usize>,
}

/// A derivation tree. `Out` nodes have one child per branch in label
/// order, `In` nodes one child, axioms none.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Derivation {
    pub rule: Rule,
    pub session: Session,
    pub gtype: GlobalType,
    pub history_size: usize,
    pub history_fingerprint: String,
    pub conditions: SideConditions,
    pub children: Vec<Derivation>,
}

impl Derivation {
    /// Nodes in preorder.
    pub fn nodes(&self) -> Vec<&Derivation> {
        let mut out = Vec::new();
        let mut stack = vec![self];
        while let Some(d) = stack.pop() {
            out.push(d);
            stack.extend(d.children.iter().rev());
        }
        out
    }

    /// Length of the longest root-to-leaf branch, counted in nodes.
    pub fn depth(&self) -> usize {
        1 + self.children.iter().map(Derivation::depth).max().unwrap_or(0)
    }

    /// The rule skeleton, e.g. `Out(In(Cycle), End)`.
    pub fn skeleton(&self) -> String {
        if self.children.is_empty() {
            return self.rule.to_string();
        }
        let kids: Vec<String> = self.children.iter().map(Derivation::skeleton).collect();
        format!("{}({})", self.rule, kids.join(", "))
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum FailureReason {
    UnboundedType {
        witness: UnboundedWitness,
    },
    /// Active participants in the set that the type never lets play.
    PlayersLeak {
        participants: ParticipantSet,
    },
    NotSound {
        offender: Message,
        blocker: Option<Blocker>,
    },
    /// The same network and type were seen earlier on this branch with a
    /// different queue.
    QueueMismatchOnRevisit {
        previous: Queue,
    },
    ShapeMismatch {
        expected: String,
        found: String,
    },
    HeadMessageMismatch {
        channel: Channel,
        expected: Label,
        found: Option<Label>,
    },
    EndWithActive {
        participants: ParticipantSet,
    },
    /// Only in [`CycleMode::EmptyQueueCycle`]: a revisit with a nonempty
    /// queue.
    CycleWithQueue {
        queue: Queue,
    },
}

impl FailureReason {
    pub fn kind(&self) -> &'static str {
        match self {
            FailureReason::UnboundedType { .. } => "UnboundedType",
            FailureReason::PlayersLeak { .. } => "PlayersLeak",
            FailureReason::NotSound { .. } => "NotSound",
            FailureReason::QueueMismatchOnRevisit { .. } => "QueueMismatchOnRevisit",
            FailureReason::ShapeMismatch { .. } => "ShapeMismatch",
            FailureReason::HeadMessageMismatch { .. } => "HeadMessageMismatch",
            FailureReason::EndWithActive { .. } => "EndWithActive",
            FailureReason::CycleWithQueue { .. } => "CycleWithQueue",
        }
    }
}

fn names(set: &ParticipantSet) -> String {
    set.iter().map(|p| p.as_str()).collect::<Vec<_>>().join(", ")
}

impl fmt::Display for FailureReason {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FailureReason::UnboundedType { witness } => write!(
                f,
                "global type is not bounded: {} can be avoided forever from node {}",
                witness.participant, witness.node
            ),
            FailureReason::PlayersLeak { participants } => {
                write!(f, "active participants {{{}}} never play in the global type", names(participants))
            }
            FailureReason::NotSound { offender, .. } => write!(f, "not sound: message {offender} may never be read"),
            FailureReason::QueueMismatchOnRevisit { previous } => {
                write!(f, "network and global type revisited with a different queue (earlier {previous})")
            }
            FailureReason::ShapeMismatch { expected, found } => write!(f, "expected process {expected}, found {found}"),
            FailureReason::HeadMessageMismatch { channel, expected, found } => match found {
                Some(l) => write!(f, "channel {channel} starts with {l}, expected {expected}"),
                None => write!(f, "channel {channel} is empty, expected {expected}"),
            },
            FailureReason::EndWithActive { participants } => {
                write!(f, "End reached with active participants {{{}}}", names(participants))
            }
            FailureReason::CycleWithQueue { queue } => write!(f, "revisit with nonempty queue {queue}"),
        }
    }
}

/// Why checking failed, at which judgement, and the communications leading
/// there from the root.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TypeFailure {
    pub session: Session,
    pub gtype: GlobalType,
    pub reason: FailureReason,
    pub trail: Trace,
}

impl fmt::Display for TypeFailure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.reason)?;
        if !self.trail.is_empty() {
            write!(f, " (after {})", self.trail)?;
        }
        Ok(())
    }
}

impl std::error::Error for TypeFailure {}

/// First 16 hex digits of the SHA-256 of `text`.
pub fn fingerprint(text: &str) -> String {
    let digest = Sha256::digest(text.as_bytes());
    hex::encode(&digest[..8])
}

fn encode_term<H: crate::regular::Head + fmt::Debug>(out: &mut String, t: &crate::regular::Regular<H>) {
    use fmt::Write;
    for n in t.nodes() {
        let _ = write!(out, "{:?}{:?};", n.head, n.children);
    }
}

fn judgement_digest(n: &Network, m: &Queue, g: &GlobalType) -> [u8; 32] {
    // Terms are canonical graphs, so their node lists are canonical too.
    let mut text = String::new();
    for (p, proc) in n.bindings() {
        text.push_str(p.as_str());
        text.push('=');
        encode_term(&mut text, proc.term());
    }
    text.push('\n');
    text.push_str(&m.to_string());
    text.push('\n');
    encode_term(&mut text, g.term());
    Sha256::digest(text.as_bytes()).into()
}

/// Fingerprint of a judgement's session and type.
pub fn judgement_fingerprint(n: &Network, m: &Queue, g: &GlobalType) -> String {
    hex::encode(&judgement_digest(n, m, g)[..8])
}

/// Entries on a branch are pairwise distinct, so the XOR of their digests
/// identifies the set.
fn history_fingerprint(xor: &[u8; 32], len: usize) -> String {
    fingerprint(&format!("{len}:{}", hex::encode(xor)))
}

struct Checker<'a> {
    set: &'a ParticipantSet,
    options: CheckOptions,
    /// Entries along the current branch.
    entries: Vec<(Network, Queue, GlobalType)>,
    digests: Vec<[u8; 32]>,
    xor: [u8; 32],
    /// Queue-blind index: each (network, type) occurs at most once on a
    /// branch, so it maps to the queue it was seen with and its position.
    index: HashMap<(Network, GlobalType), (Queue, usize)>,
    trail: Vec<Communication>,
}

impl Checker<'_> {
    fn fail(&self, s: &Session, g: &GlobalType, reason: FailureReason) -> TypeFailure {
        TypeFailure { session: s.clone(), gtype: g.clone(), reason, trail: Trace(self.trail.clone()) }
    }

    fn node(
        &self,
        rule: Rule,
        s: &Session,
        g: &GlobalType,
        conditions: SideConditions,
        children: Vec<Derivation>,
    ) -> Derivation {
        Derivation {
            rule,
            session: s.clone(),
            gtype: g.clone(),
            history_size: self.entries.len(),
            history_fingerprint: history_fingerprint(&self.xor, self.digests.len()),
            conditions,
            children,
        }
    }

    fn soundness(
        &self,
        s: &Session,
        g: &GlobalType,
        c: TypeConfiguration,
    ) -> Result<Option<TypeConfiguration>, TypeFailure> {
        if self.options.cycle_mode == CycleMode::EmptyQueueCycle {
            return Ok(None);
        }
        let report = p_sound_report(&c, self.set);
        match report.offender {
            Some(offender) => Err(self.fail(s, g, FailureReason::NotSound { offender, blocker: report.blocker })),
            None => Ok(Some(c)),
        }
    }

    /// Active participants besides `player` that never play in `g` and
    /// belong to the set.
    fn leak(&self, n: &Network, player: &crate::name::Participant, g: &GlobalType) -> (ParticipantSet, ParticipantSet) {
        let plays_g = g.players();
        let unrecorded: ParticipantSet = n.without(player).players().difference(&plays_g).cloned().collect();
        let leaked = unrecorded.intersection(self.set).cloned().collect();
        (unrecorded, leaked)
    }

    fn push(&mut self, s: &Session, g: &GlobalType) {
        let pos = self.entries.len();
        self.index.insert((s.network.clone(), g.clone()), (s.queue.clone(), pos));
        let d = judgement_digest(&s.network, &s.queue, g);
        self.xor.iter_mut().zip(d).for_each(|(x, b)| *x ^= b);
        self.digests.push(d);
        self.entries.push((s.network.clone(), s.queue.clone(), g.clone()));
    }

    fn pop(&mut self) {
        let (n, _, g) = self.entries.pop().expect("history entry");
        let d = self.digests.pop().expect("history digest");
        self.xor.iter_mut().zip(d).for_each(|(x, b)| *x ^= b);
        self.index.remove(&(n, g));
    }

    fn check(&mut self, s: &Session, g: &GlobalType) -> Result<Derivation, TypeFailure> {
        let key = (s.network.clone(), g.clone());
        if let Some((queue, pos)) = self.index.get(&key) {
            if *queue == s.queue {
                if self.options.cycle_mode == CycleMode::EmptyQueueCycle && !queue.is_empty() {
                    return Err(self.fail(s, g, FailureReason::CycleWithQueue { queue: queue.clone() }));
                }
                let conditions = SideConditions { revisited: Some(*pos), ..Default::default() };
                return Ok(self.node(Rule::Cycle, s, g, conditions, Vec::new()));
            }
        }
        match g.head() {
            GlobalHead::End => {
                let active = s.network.players();
                let clash: ParticipantSet = active.intersection(self.set).cloned().collect();
                if !clash.is_empty() {
                    return Err(self.fail(s, g, FailureReason::EndWithActive { participants: clash }));
                }
                let c = TypeConfiguration::new(g.clone(), s.queue.clone());
                let report = p_sound_report(&c, self.set);
                if let Some(offender) = report.offender {
                    return Err(self.fail(s, g, FailureReason::NotSound { offender, blocker: report.blocker }));
                }
                let conditions = SideConditions { checked_players: active, soundness: Some(c), revisited: None };
                Ok(self.node(Rule::End, s, g, conditions, Vec::new()))
            }
            GlobalHead::Out { sender, receiver, labels } => {
                let proc = s.network.process(sender);
                let shape_ok = proc.prefix() == Some((Polarity::Send, receiver)) && proc.labels() == labels.as_slice();
                if !shape_ok {
                    let expected = format!("{receiver}!{{{}}}", label_list(labels));
                    return Err(self.fail(s, g, FailureReason::ShapeMismatch { expected, found: describe(&proc) }));
                }
                self.revisit_free(s, g, &key)?;
                let (unrecorded, leaked) = self.leak(&s.network, sender, g);
                if !leaked.is_empty() {
                    return Err(self.fail(s, g, FailureReason::PlayersLeak { participants: leaked }));
                }
                let soundness = self.soundness(s, g, TypeConfiguration::new(g.clone(), s.queue.clone()))?;
                self.push(s, g);
                let mut children = Vec::new();
                for ((l, cont), (comm, g_i)) in proc.branches().into_iter().zip(g.branches()) {
                    let mut queue = s.queue.clone();
                    queue.push(Message::new(sender.clone(), l, receiver.clone()));
                    let next = Session::new(s.network.rebind(sender, cont), queue);
                    self.trail.push(comm);
                    let child = self.check(&next, &g_i);
                    self.trail.pop();
                    match child {
                        Ok(d) => children.push(d),
                        Err(e) => {
                            self.pop();
                            return Err(e);
                        }
                    }
                }
                self.pop();
                let conditions = SideConditions { checked_players: unrecorded, soundness, revisited: None };
                Ok(self.node(Rule::Out, s, g, conditions, children))
            }
            GlobalHead::In { reader, sender, label } => {
                let proc = s.network.process(reader);
                let shape_ok = proc.prefix() == Some((Polarity::Receive, sender)) && proc.labels().contains(label);
                if !shape_ok {
                    let expected = format!("{sender}?{{{label}, ...}}");
                    return Err(self.fail(s, g, FailureReason::ShapeMismatch { expected, found: describe(&proc) }));
                }
                let channel = Channel::new(sender.clone(), reader.clone());
                let head = s.queue.head(&channel);
                if head != Some(label) {
                    let reason =
                        FailureReason::HeadMessageMismatch { channel, expected: label.clone(), found: head.cloned() };
                    return Err(self.fail(s, g, reason));
                }
                let mut rest = s.queue.clone();
                rest.pop_head(&channel);
                self.revisit_free(s, g, &key)?;
                let (unrecorded, leaked) = self.leak(&s.network, reader, g);
                if !leaked.is_empty() {
                    return Err(self.fail(s, g, FailureReason::PlayersLeak { participants: leaked }));
                }
                let cont_type = g.child(0);
                let soundness = self.soundness(s, g, TypeConfiguration::new(cont_type.clone(), rest.clone()))?;
                let cont = proc.continuation(label).expect("label offered");
                let next = Session::new(s.network.rebind(reader, cont), rest);
                self.push(s, g);
                self.trail.push(Communication::receive(reader.clone(), sender.clone(), label.clone()));
                let child = self.check(&next, &cont_type);
                self.trail.pop();
                self.pop();
                let conditions = SideConditions { checked_players: unrecorded, soundness, revisited: None };
                Ok(self.node(Rule::In, s, g, conditions, vec![child?]))
            }
        }
    }

    fn revisit_free(&self, s: &Session, g: &GlobalType, key: &(Network, GlobalType)) -> Result<(), TypeFailure> {
        match self.index.get(key) {
            Some((previous, _)) => {
                Err(self.fail(s, g, FailureReason::QueueMismatchOnRevisit { previous: previous.clone() }))
            }
            None => Ok(()),
        }
    }
}

fn label_list(labels: &[Label]) -> String {
    labels.iter().map(Label::as_str).collect::<Vec<_>>().join(", ")
}

fn describe(proc: &crate::process::Process) -> String {
    match proc.prefix() {
        None => "0".to_string(),
        Some((Polarity::Send, peer)) => format!("{peer}!{{{}}}", label_list(proc.labels())),
        Some((Polarity::Receive, peer)) => format!("{peer}?{{{}}}", label_list(proc.labels())),
    }
}

/// Checks the judgement with empty history under the default options.
pub fn typecheck(set: &ParticipantSet, g: &GlobalType, s: &Session) -> Result<Derivation, TypeFailure> {
    typecheck_with(set, g, s, CheckOptions::default())
}

pub fn typecheck_with(
    set: &ParticipantSet,
    g: &GlobalType,
    s: &Session,
    options: CheckOptions,
) -> Result<Derivation, TypeFailure> {
    if let Err(witness) = bounded(g) {
        return Err(TypeFailure {
            session: s.clone(),
            gtype: g.clone(),
            reason: FailureReason::UnboundedType { witness },
            trail: Trace::new(),
        });
    }
    let mut checker = Checker {
        set,
        options,
        entries: Vec::new(),
        digests: Vec::new(),
        xor: [0; 32],
        index: HashMap::new(),
        trail: Vec::new(),
    };
    checker.check(s, g)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::name::participants;
    use crate::syntax::parse_module;

    const REMARK: &str = "
        process P = q!lam.P
        process Q = p?lam.Q
        global G = p->q!lam. q<-p?lam. G
        network N = p[P] | q[Q]
        queue M = [q->p:lam]
        session S = N with M
    ";

    #[test]
    fn remark_counterexample_is_not_sound() {
        let m = parse_module(REMARK).unwrap();
        let s = &m.sessions["S"].session;
        let err = typecheck(&participants(["p", "q"]), &m.globals["G"], s).unwrap_err();
        match &err.reason {
            FailureReason::NotSound { offender, .. } => assert_eq!(offender.to_string(), "q->p:lam"),
            other => panic!("{other}"),
        }
        assert!(err.trail.is_empty());
    }

    #[test]
    fn remark_counterexample_with_empty_set_closes_by_cycle() {
        let m = parse_module(REMARK).unwrap();
        let s = &m.sessions["S"].session;
        let d = typecheck(&ParticipantSet::new(), &m.globals["G"], s).unwrap();
        assert_eq!(d.skeleton(), "Out(In(Cycle))");
        assert_eq!(d.children[0].children[0].conditions.revisited, Some(0));
        assert!(derivation_valid(&d, &ParticipantSet::new(), &m.globals["G"], s));
    }

    #[test]
    fn alternative_cycle_mode_rejects_nonempty_revisit() {
        let m = parse_module(REMARK).unwrap();
        let s = &m.sessions["S"].session;
        let opts = CheckOptions { cycle_mode: CycleMode::EmptyQueueCycle };
        let err = typecheck_with(&participants(["p", "q"]), &m.globals["G"], s, opts).unwrap_err();
        assert_eq!(err.reason.kind(), "CycleWithQueue");
    }

    #[test]
    fn end_with_active_member() {
        let m = parse_module("network N = p[q!a.end]").unwrap();
        let s = Session::new(m.networks["N"].clone(), Queue::new());
        let err = typecheck(&participants(["p"]), &GlobalType::end(), &s).unwrap_err();
        assert_eq!(err.reason.kind(), "EndWithActive");
        assert!(typecheck(&ParticipantSet::new(), &GlobalType::end(), &s).is_ok());
    }

    #[test]
    fn input_allows_extra_process_labels_but_output_does_not() {
        let src = "
            global G = p->q!a. q<-p?a.End
            network Wide = p[q!a.end] | q[p?{a.end, b.end}]
            network Narrow = p[q!{a.end, b.end}] | q[p?{a.end, b.end}]
        ";
        let m = parse_module(src).unwrap();
        let set = participants(["p", "q"]);
        let wide = Session::new(m.networks["Wide"].clone(), Queue::new());
        assert_eq!(typecheck(&set, &m.globals["G"], &wide).unwrap().skeleton(), "Out(In(End))");
        let narrow = Session::new(m.networks["Narrow"].clone(), Queue::new());
        assert_eq!(typecheck(&set, &m.globals["G"], &narrow).unwrap_err().reason.kind(), "ShapeMismatch");
    }

    #[test]
    fn players_leak() {
        let src = "
            global G = p->q!a. q<-p?a.End
            network N = p[q!a.end] | q[p?a.end] | r[p!z.end]
        ";
        let m = parse_module(src).unwrap();
        let s = Session::new(m.networks["N"].clone(), Queue::new());
        let err = typecheck(&participants(["r"]), &m.globals["G"], &s).unwrap_err();
        assert_eq!(err.reason.kind(), "PlayersLeak");
        assert!(typecheck(&participants(["p", "q"]), &m.globals["G"], &s).is_ok());
    }

    #[test]
    fn head_mismatch() {
        let src = "
            global G = q<-p?a.End
            network N = q[p?{a.end, b.end}]
            queue M = [p->q:b]
        ";
        let m = parse_module(src).unwrap();
        let s = Session::new(m.networks["N"].clone(), m.queues["M"].clone());
        let err = typecheck(&ParticipantSet::new(), &m.globals["G"], &s).unwrap_err();
        assert_eq!(err.reason.kind(), "HeadMessageMismatch");
    }

    #[test]
    fn revisit_with_growing_queue() {
        // p keeps sending, nobody reads: the queue grows on every lap.
        let src = "
            process P = q!a.P
            global G = p->q!a.G
            network N = p[P]
        ";
        let m = parse_module(src).unwrap();
        let s = Session::new(m.networks["N"].clone(), Queue::new());
        let err = typecheck(&ParticipantSet::new(), &m.globals["G"], &s).unwrap_err();
        assert_eq!(err.reason.kind(), "QueueMismatchOnRevisit");
        assert_eq!(err.trail.to_string(), "p>q!a");
    }

    #[test]
    fn fingerprints_are_short_hex() {
        let f = fingerprint("x");
        assert_eq!(f.len(), 16);
        assert!(f.chars().all(|c| c.is_ascii_hexdigit()));
    }
}
