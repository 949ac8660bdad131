//! Asynchronous global types.
//!
//! An output node `p->q!{l1.G1, ...}` lets `p` choose a label to put in the
//! queue for `q`. An input node `q<-p?l.G` has `q` read `l` from `p`. The
//! reader is written first, so the player of an input node is its first
//! participant, and inputs carry exactly one label.

use std::fmt;

use crate::comm::Communication;
use crate::name::{Label, Participant, ParticipantSet};
use crate::regular::{Graph, Head, NodeId, Regular};
use crate::validate::{ValidationReport, Violation, ViolationKind};

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum GlobalHead {
    End,
    /// Labels sorted and distinct; child i continues after label i.
    Out {
        sender: Participant,
        receiver: Participant,
        labels: Vec<Label>,
    },
    In {
        reader: Participant,
        sender: Participant,
        label: Label,
    },
}

impl GlobalHead {
    /// The participant performing the root communication.
    pub fn player(&self) -> Option<&Participant> {
        match self {
            GlobalHead::End => None,
            GlobalHead::Out { sender, .. } => Some(sender),
            GlobalHead::In { reader, .. } => Some(reader),
        }
    }

    /// Communications offered at this node, one per child.
    pub fn communications(&self) -> Vec<Communication> {
        match self {
            GlobalHead::End => Vec::new(),
            GlobalHead::Out { sender, receiver, labels } => {
                labels.iter().map(|l| Communication::send(sender.clone(), receiver.clone(), l.clone())).collect()
            }
            GlobalHead::In { reader, sender, label } => {
                vec![Communication::receive(reader.clone(), sender.clone(), label.clone())]
            }
        }
    }
}

impl Head for GlobalHead {
    fn arity(&self) -> usize {
        match self {
            GlobalHead::End => 0,
            GlobalHead::Out { labels, .. } => labels.len(),
            GlobalHead::In { .. } => 1,
        }
    }
}

/// A regular global type. Equality is bisimilarity.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct GlobalType(Regular<GlobalHead>);

impl GlobalType {
    pub fn end() -> Self {
        GlobalType(Regular::leaf(GlobalHead::End))
    }

    /// `sender->receiver!{l1.G1, ...}`
    pub fn output(
        sender: Participant,
        receiver: Participant,
        branches: Vec<(Label, GlobalType)>,
    ) -> Result<Self, ValidationReport> {
        let mut graph = GlobalGraph::new();
        let ids = branches.into_iter().map(|(l, g)| (l, graph.embed(&g))).collect();
        let root = graph.add(GlobalNode::Out { sender, receiver, branches: ids });
        graph.build(root)
    }

    /// `reader<-sender?label.cont`
    pub fn input(
        reader: Participant,
        sender: Participant,
        label: Label,
        cont: GlobalType,
    ) -> Result<Self, ValidationReport> {
        let mut graph = GlobalGraph::new();
        let c = graph.embed(&cont);
        let root = graph.add(GlobalNode::In { reader, sender, label, cont: c });
        graph.build(root)
    }

    pub fn term(&self) -> &Regular<GlobalHead> {
        &self.0
    }

    pub fn from_term(term: Regular<GlobalHead>) -> Self {
        GlobalType(term)
    }

    pub fn head(&self) -> &GlobalHead {
        self.0.head()
    }

    pub fn is_end(&self) -> bool {
        matches!(self.head(), GlobalHead::End)
    }

    pub fn player(&self) -> Option<&Participant> {
        self.head().player()
    }

    /// Children paired with the communication leading to each.
    pub fn branches(&self) -> Vec<(Communication, GlobalType)> {
        self.head().communications().into_iter().enumerate().map(|(i, c)| (c, GlobalType(self.0.child(i)))).collect()
    }

    pub fn child(&self, i: usize) -> GlobalType {
        GlobalType(self.0.child(i))
    }

    /// Rebuilds this node with new children, keeping the head.
    pub fn with_children(&self, children: &[GlobalType]) -> GlobalType {
        let terms: Vec<_> = children.iter().map(|g| g.0.clone()).collect();
        GlobalType(Regular::compose(self.head().clone(), &terms))
    }

    /// Distinct subterms in canonical order; index 0 is `self`.
    pub fn subterms(&self) -> Vec<GlobalType> {
        self.0.subterms().into_iter().map(GlobalType).collect()
    }

    /// Players: senders of outputs and readers of inputs, over all reachable
    /// nodes.
    pub fn players(&self) -> ParticipantSet {
        self.0.nodes().iter().filter_map(|n| n.head.player().cloned()).collect()
    }

    /// Every participant mentioned, players or not.
    pub fn participants(&self) -> ParticipantSet {
        let mut set = ParticipantSet::new();
        for n in self.0.nodes() {
            match &n.head {
                GlobalHead::End => {}
                GlobalHead::Out { sender, receiver, .. } => {
                    set.insert(sender.clone());
                    set.insert(receiver.clone());
                }
                GlobalHead::In { reader, sender, .. } => {
                    set.insert(reader.clone());
                    set.insert(sender.clone());
                }
            }
        }
        set
    }
}

impl fmt::Debug for GlobalType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "GlobalType({})", crate::syntax::render_global(self))
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum GlobalNode {
    End,
    Out { sender: Participant, receiver: Participant, branches: Vec<(Label, NodeId)> },
    In { reader: Participant, sender: Participant, label: Label, cont: NodeId },
}

/// Builder for possibly cyclic global types.
#[derive(Clone, Debug, Default)]
pub struct GlobalGraph {
    nodes: Vec<Option<GlobalNode>>,
    names: Vec<Option<String>>,
}

impl GlobalGraph {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn reserve(&mut self) -> NodeId {
        self.nodes.push(None);
        self.names.push(None);
        NodeId(self.nodes.len() - 1)
    }

    pub fn define(&mut self, id: NodeId, node: GlobalNode) {
        self.nodes[id.0] = Some(node);
    }

    pub fn add(&mut self, node: GlobalNode) -> NodeId {
        let id = self.reserve();
        self.define(id, node);
        id
    }

    pub fn name(&mut self, id: NodeId, name: impl Into<String>) {
        self.names[id.0] = Some(name.into());
    }

    pub fn node(&self, id: NodeId) -> Option<&GlobalNode> {
        self.nodes.get(id.0).and_then(Option::as_ref)
    }

    pub fn embed(&mut self, g: &GlobalType) -> NodeId {
        let base = self.nodes.len();
        for node in g.term().nodes() {
            let converted = match &node.head {
                GlobalHead::End => GlobalNode::End,
                GlobalHead::Out { sender, receiver, labels } => GlobalNode::Out {
                    sender: sender.clone(),
                    receiver: receiver.clone(),
                    branches: labels.iter().cloned().zip(node.children.iter().map(|c| NodeId(c + base))).collect(),
                },
                GlobalHead::In { reader, sender, label } => GlobalNode::In {
                    reader: reader.clone(),
                    sender: sender.clone(),
                    label: label.clone(),
                    cont: NodeId(node.children[0] + base),
                },
            };
            self.nodes.push(Some(converted));
            self.names.push(None);
        }
        NodeId(base)
    }

    pub fn describe(&self, id: NodeId) -> String {
        match &self.names[id.0] {
            Some(name) => format!("global node {} ({name})", id.0),
            None => format!("global node {}", id.0),
        }
    }

    pub fn well_formed(&self, roots: &[NodeId]) -> ValidationReport {
        let mut report = ValidationReport::default();
        let mut seen = vec![false; self.nodes.len()];
        let mut stack: Vec<NodeId> = roots.to_vec();
        while let Some(id) = stack.pop() {
            if id.0 >= self.nodes.len() {
                report.push(Violation::new(format!("global node {}", id.0), ViolationKind::Undefined));
                continue;
            }
            if std::mem::replace(&mut seen[id.0], true) {
                continue;
            }
            match &self.nodes[id.0] {
                None => report.push(Violation::new(self.describe(id), ViolationKind::Undefined)),
                Some(GlobalNode::End) => {}
                Some(GlobalNode::Out { sender, receiver, branches }) => {
                    if sender == receiver {
                        report
                            .push(Violation::new(self.describe(id), ViolationKind::SelfCommunication(sender.clone())));
                    }
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
                Some(GlobalNode::In { reader, sender, cont, .. }) => {
                    if reader == sender {
                        report
                            .push(Violation::new(self.describe(id), ViolationKind::SelfCommunication(reader.clone())));
                    }
                    stack.push(*cont);
                }
            }
        }
        report
    }

    pub fn build(&self, root: NodeId) -> Result<GlobalType, ValidationReport> {
        let report = self.well_formed(&[root]);
        if !report.is_empty() {
            return Err(report);
        }
        let mut graph: Graph<GlobalHead> = Graph::new();
        let ids: Vec<NodeId> = (0..self.nodes.len()).map(|_| graph.reserve()).collect();
        for (i, node) in self.nodes.iter().enumerate() {
            let Some(node) = node else { continue };
            match node {
                GlobalNode::End => graph.define(ids[i], GlobalHead::End, vec![]),
                GlobalNode::Out { sender, receiver, branches } => {
                    let mut sorted = branches.clone();
                    sorted.sort_by(|a, b| a.0.cmp(&b.0));
                    let (labels, children): (Vec<Label>, Vec<NodeId>) =
                        sorted.into_iter().map(|(l, c)| (l, ids[c.0])).unzip();
                    graph.define(
                        ids[i],
                        GlobalHead::Out { sender: sender.clone(), receiver: receiver.clone(), labels },
                        children,
                    );
                }
                GlobalNode::In { reader, sender, label, cont } => graph.define(
                    ids[i],
                    GlobalHead::In { reader: reader.clone(), sender: sender.clone(), label: label.clone() },
                    vec![ids[cont.0]],
                ),
            }
        }
        let term = graph.term(ids[root.0]).map_err(|e| {
            ValidationReport::single(Violation::new(self.describe(root), ViolationKind::Graph(e.to_string())))
        })?;
        Ok(GlobalType(term))
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
    fn players_of_end_are_empty() {
        assert!(GlobalType::end().players().is_empty());
    }

    #[test]
    fn input_player_is_the_reader() {
        let g = GlobalType::input(p("q"), p("p"), l("a"), GlobalType::end()).unwrap();
        assert_eq!(g.players(), participants(["q"]));
        assert_eq!(g.participants(), participants(["p", "q"]));
    }

    #[test]
    fn output_to_self_is_rejected() {
        let err = GlobalType::output(p("p"), p("p"), vec![(l("a"), GlobalType::end())]).unwrap_err();
        assert!(matches!(err.violations()[0].kind, ViolationKind::SelfCommunication(_)));
    }

    #[test]
    fn duplicate_output_labels_are_rejected() {
        let err = GlobalType::output(p("p"), p("q"), vec![(l("a"), GlobalType::end()), (l("a"), GlobalType::end())])
            .unwrap_err();
        assert!(matches!(err.violations()[0].kind, ViolationKind::DuplicateLabel(_)));
    }

    #[test]
    fn cyclic_type_is_finite() {
        // G = p->q!lam. q<-p?lam. G
        let mut g = GlobalGraph::new();
        let root = g.reserve();
        let input = g.add(GlobalNode::In { reader: p("q"), sender: p("p"), label: l("lam"), cont: root });
        g.define(root, GlobalNode::Out { sender: p("p"), receiver: p("q"), branches: vec![(l("lam"), input)] });
        let gt = g.build(root).unwrap();
        assert_eq!(gt.term().len(), 2);
        assert!(gt.term().is_cyclic());
        assert_eq!(gt.players(), participants(["p", "q"]));
        assert_eq!(gt.child(0).child(0), gt);
    }
}
