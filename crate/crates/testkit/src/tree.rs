use partial_mpst::{GlobalGraph, GlobalNode, GlobalType, Label, Participant};
use rand::seq::IndexedRandom;
use rand::Rng;

use partial_mpst::regular::NodeId;

const PARTICIPANTS: [&str; 4] = ["p", "q", "r", "s"];
const LABELS: [&str; 3] = ["a", "b", "c"];

fn pair<R: Rng>(rng: &mut R) -> (Participant, Participant) {
    let picked: Vec<&&str> = PARTICIPANTS.choose_multiple(rng, 2).collect();
    (Participant::new(picked[0]), Participant::new(picked[1]))
}

fn node<R: Rng>(rng: &mut R, g: &mut GlobalGraph, levels: usize) -> NodeId {
    if levels == 0 || rng.random_bool(0.15) {
        return g.add(GlobalNode::End);
    }
    let (p, q) = pair(rng);
    if rng.random_bool(0.5) {
        let n = rng.random_range(1..=2);
        let labels: Vec<&&str> = LABELS.choose_multiple(rng, n).collect();
        let branches = labels.into_iter().map(|l| (Label::new(l), node(rng, g, levels - 1))).collect();
        g.add(GlobalNode::Out { sender: p, receiver: q, branches })
    } else {
        let label = Label::new(LABELS.choose(rng).expect("labels"));
        let cont = node(rng, g, levels - 1);
        g.add(GlobalNode::In { reader: p, sender: q, label, cont })
    }
}

/// A random finite (acyclic) global type with at most `levels` nested
/// communications on any path.
pub fn random_tree<R: Rng>(rng: &mut R, levels: usize) -> GlobalType {
    let mut g = GlobalGraph::new();
    let root = node(rng, &mut g, levels);
    g.build(root).expect("generated type is well formed")
}
