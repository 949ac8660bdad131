//! Processes: regular terms of internal and external choices.

use std::fmt;

use crate::name::{Label, Participant, ParticipantSet};
use crate::regular::{Graph, Head, NodeId, Regular};
use crate::validate::{ValidationReport, Violation, ViolationKind};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Polarity {
    /// Internal choice `q!{...}`: the process picks a label and sends it.
    Send,
    /// External choice `q?{...}`: the process waits for one of the labels.
    Receive,
}

/// Head of a process node. Labels are sorted and distinct; the i-th child is
/// the continuation after the i-th label.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum ProcHead {
    Inactive,
    Choice { polarity: Polarity, peer: Participant, labels: Vec<Label> },
}

impl Head for ProcHead {
    fn arity(&self) -> usize {
        match self {
            ProcHead::Inactive => 0,
            ProcHead::Choice { labels, .. } => labels.len(),
        }
    }
}

/// A regular process term. Equality is bisimilarity.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Process(Regular<ProcHead>);

impl Process {
    pub fn inactive() -> Self {
        Process(Regular::leaf(ProcHead::Inactive))
    }

    /// `peer!{l1.P1, ...}`. Fails on an empty or duplicated label set.
    pub fn send(peer: Participant, branches: Vec<(Label, Process)>) -> Result<Self, ValidationReport> {
        Self::choice(Polarity::Send, peer, branches)
    }

    /// `peer?{l1.P1, ...}`. Fails on an empty or duplicated label set.
    pub fn receive(peer: Participant, branches: Vec<(Label, Process)>) -> Result<Self, ValidationReport> {
        Self::choice(Polarity::Receive, peer, branches)
    }

    fn choice(
        polarity: Polarity,
        peer: Participant,
        branches: Vec<(Label, Process)>,
    ) -> Result<Self, ValidationReport> {
        let mut graph = ProcessGraph::new();
        let ids = branches.into_iter().map(|(l, p)| (l, graph.embed(&p))).collect();
        let root = graph.add(ProcessNode::Choice { polarity, peer, branches: ids });
        graph.build(root)
    }

    pub fn term(&self) -> &Regular<ProcHead> {
        &self.0
    }

    pub fn from_term(term: Regular<ProcHead>) -> Self {
        Process(term)
    }

    pub fn is_inactive(&self) -> bool {
        matches!(self.0.head(), ProcHead::Inactive)
    }

    /// Polarity and peer of the root choice, if any.
    pub fn prefix(&self) -> Option<(Polarity, &Participant)> {
        match self.0.head() {
            ProcHead::Inactive => None,
            ProcHead::Choice { polarity, peer, .. } => Some((*polarity, peer)),
        }
    }

    /// Labels of the root choice in lexicographic order.
    pub fn labels(&self) -> &[Label] {
        match self.0.head() {
            ProcHead::Inactive => &[],
            ProcHead::Choice { labels, .. } => labels,
        }
    }

    pub fn continuation(&self, label: &Label) -> Option<Process> {
        let i = self.labels().binary_search(label).ok()?;
        Some(Process(self.0.child(i)))
    }

    pub fn branches(&self) -> Vec<(Label, Process)> {
        self.labels().iter().enumerate().map(|(i, l)| (l.clone(), Process(self.0.child(i)))).collect()
    }

    /// Participants mentioned anywhere in the process.
    pub fn plays(&self) -> ParticipantSet {
        self.0
            .nodes()
            .iter()
            .filter_map(|n| match &n.head {
                ProcHead::Choice { peer, .. } => Some(peer.clone()),
                ProcHead::Inactive => None,
            })
            .collect()
    }
}

impl fmt::Debug for Process {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Process({})", crate::syntax::render_process(self))
    }
}

/// One node of a [`ProcessGraph`], before validation.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ProcessNode {
    Inactive,
    Choice { polarity: Polarity, peer: Participant, branches: Vec<(Label, NodeId)> },
}

/// Builder for possibly cyclic processes. Branch lists are kept as written
/// until [`ProcessGraph::build`] validates and canonicalises them.
#[derive(Clone, Debug, Default)]
pub struct ProcessGraph {
    nodes: Vec<Option<ProcessNode>>,
    names: Vec<Option<String>>,
}

impl ProcessGraph {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn reserve(&mut self) -> NodeId {
        self.nodes.push(None);
        self.names.push(None);
        NodeId(self.nodes.len() - 1)
    }

    pub fn define(&mut self, id: NodeId, node: ProcessNode) {
        self.nodes[id.0] = Some(node);
    }

    pub fn add(&mut self, node: ProcessNode) -> NodeId {
        let id = self.reserve();
        self.define(id, node);
        id
    }

    /// Attaches a human-readable name used in diagnostics.
    pub fn name(&mut self, id: NodeId, name: impl Into<String>) {
        self.names[id.0] = Some(name.into());
    }

    pub fn embed(&mut self, process: &Process) -> NodeId {
        let base = self.nodes.len();
        for node in process.term().nodes() {
            let converted = match &node.head {
                ProcHead::Inactive => ProcessNode::Inactive,
                ProcHead::Choice { polarity, peer, labels } => ProcessNode::Choice {
                    polarity: *polarity,
                    peer: peer.clone(),
                    branches: labels.iter().cloned().zip(node.children.iter().map(|c| NodeId(c + base))).collect(),
                },
            };
            self.nodes.push(Some(converted));
            self.names.push(None);
        }
        NodeId(base)
    }

    pub fn node(&self, id: NodeId) -> Option<&ProcessNode> {
        self.nodes.get(id.0).and_then(Option::as_ref)
    }

    pub fn describe(&self, id: NodeId) -> String {
        match &self.names[id.0] {
            Some(name) => format!("process node {} ({name})", id.0),
            None => format!("process node {}", id.0),
        }
    }

    /// Checks the side conditions on every node reachable from `roots`:
    /// nonempty branch sets, pairwise distinct labels, and defined targets.
    pub fn well_formed(&self, roots: &[NodeId]) -> ValidationReport {
        let mut report = ValidationReport::default();
        let mut seen = vec![false; self.nodes.len()];
        let mut stack: Vec<NodeId> = roots.to_vec();
        while let Some(id) = stack.pop() {
            if id.0 >= self.nodes.len() {
                report.push(Violation::new(format!("process node {}", id.0), ViolationKind::Undefined));
                continue;
            }
            if std::mem::replace(&mut seen[id.0], true) {
                continue;
            }
            match &self.nodes[id.0] {
                None => report.push(Violation::new(self.describe(id), ViolationKind::Undefined)),
                Some(ProcessNode::Inactive) => {}
                Some(ProcessNode::Choice { branches, .. }) => {
                    if branches.is_empty() {
                        report.push(Violation::new(self.describe(id), ViolationKind::EmptyChoice));
                    }
                    let mut labels: Vec<&Label> = branches.iter().map(|(l, _)| l).collect();
                    labels.sort();
                    for pair in labels.windows(2) {
                        if pair[0] == pair[1] {
                            report.push(Violation::new(
                                self.describe(id),
                                ViolationKind::DuplicateLabel(pair[0].clone()),
                            ));
                        }
                    }
                    stack.extend(branches.iter().map(|(_, c)| *c));
                }
            }
        }
        report
    }

    /// Validates and canonicalises the process rooted at `root`.
    pub fn build(&self, root: NodeId) -> Result<Process, ValidationReport> {
        let report = self.well_formed(&[root]);
        if !report.is_empty() {
            return Err(report);
        }
        let mut graph: Graph<ProcHead> = Graph::new();
        let ids: Vec<NodeId> = (0..self.nodes.len()).map(|_| graph.reserve()).collect();
        for (i, node) in self.nodes.iter().enumerate() {
            let Some(node) = node else { continue };
            match node {
                ProcessNode::Inactive => graph.define(ids[i], ProcHead::Inactive, vec![]),
                ProcessNode::Choice { polarity, peer, branches } => {
                    let mut sorted = branches.clone();
                    sorted.sort_by(|a, b| a.0.cmp(&b.0));
                    let (labels, children): (Vec<Label>, Vec<NodeId>) =
                        sorted.into_iter().map(|(l, c)| (l, ids[c.0])).unzip();
                    graph.define(
                        ids[i],
                        ProcHead::Choice { polarity: *polarity, peer: peer.clone(), labels },
                        children,
                    );
                }
            }
        }
        let term = graph.term(ids[root.0]).map_err(|e| {
            ValidationReport::single(Violation::new(self.describe(root), ViolationKind::Graph(e.to_string())))
        })?;
        Ok(Process(term))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::name::participants;

    fn p(s: &str) -> Participant {
        Participant::new(s)
    }
    fn l(s: &str) -> Label {
        Label::new(s)
    }

    #[test]
    fn plays_of_inactive_is_empty() {
        assert!(Process::inactive().plays().is_empty());
    }

    #[test]
    fn plays_of_self_loop() {
        // P = q!{lam}.P
        let mut g = ProcessGraph::new();
        let root = g.reserve();
        g.define(
            root,
            ProcessNode::Choice { polarity: Polarity::Send, peer: p("q"), branches: vec![(l("lam"), root)] },
        );
        let proc = g.build(root).unwrap();
        assert_eq!(proc.plays(), participants(["q"]));
        assert_eq!(proc.term().len(), 1);
        assert_eq!(proc.continuation(&l("lam")), Some(proc.clone()));
    }

    #[test]
    fn branch_order_does_not_matter() {
        let a = Process::send(p("q"), vec![(l("a"), Process::inactive()), (l("b"), Process::inactive())]).unwrap();
        let b = Process::send(p("q"), vec![(l("b"), Process::inactive()), (l("a"), Process::inactive())]).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.labels(), &[l("a"), l("b")]);
    }

    #[test]
    fn duplicate_labels_are_rejected() {
        let err =
            Process::send(p("q"), vec![(l("a"), Process::inactive()), (l("a"), Process::inactive())]).unwrap_err();
        assert!(err.violations().iter().any(|v| matches!(v.kind, ViolationKind::DuplicateLabel(_))));
    }

    #[test]
    fn empty_choice_is_rejected() {
        let err = Process::receive(p("q"), vec![]).unwrap_err();
        assert!(err.violations().iter().any(|v| v.kind == ViolationKind::EmptyChoice));
    }

    #[test]
    fn send_and_receive_differ() {
        let s = Process::send(p("q"), vec![(l("a"), Process::inactive())]).unwrap();
        let r = Process::receive(p("q"), vec![(l("a"), Process::inactive())]).unwrap();
        assert_ne!(s, r);
    }
}
