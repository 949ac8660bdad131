//! Random protocols written as choreographies, turned into a global type
//! and a session by projection. Only instances the checker accepts are
//! returned.

use std::collections::BTreeMap;

use partial_mpst::regular::NodeId;
use partial_mpst::{
    typecheck, GlobalGraph, GlobalNode, GlobalType, Label, Network, Participant, ParticipantSet, Polarity,
    ProcessGraph, ProcessNode, Queue, Session,
};
use rand::seq::IndexedRandom;
use rand::Rng;

#[derive(Clone, Debug)]
pub struct Instance {
    pub name: String,
    pub set: ParticipantSet,
    pub gtype: GlobalType,
    pub session: Session,
}

type Msg = (Participant, Participant, Label);

#[derive(Clone, Debug)]
enum Choreo {
    End,
    /// Back to the start of the protocol.
    Loop,
    /// `p` chooses a label for `q`, which reads it straight away.
    Choice {
        from: Participant,
        to: Participant,
        branches: Vec<(Label, Choreo)>,
    },
    /// Two sends, then the two matching reads.
    Pipeline {
        first: Msg,
        second: Msg,
        cont: Box<Choreo>,
    },
}

const NAMES: [&str; 4] = ["a", "b", "c", "d"];
const LABELS: [&str; 3] = ["x", "y", "z"];

struct Gen<'a, R> {
    rng: &'a mut R,
    names: Vec<Participant>,
    loops: bool,
}

impl<R: Rng> Gen<'_, R> {
    fn pair(&mut self) -> (Participant, Participant) {
        let picked: Vec<&Participant> = self.names.choose_multiple(self.rng, 2).collect();
        (picked[0].clone(), picked[1].clone())
    }

    fn label(&mut self) -> Label {
        Label::new(LABELS.choose(self.rng).expect("labels"))
    }

    fn choreo(&mut self, budget: usize, top: bool) -> Choreo {
        if budget == 0 || (!top && self.rng.random_bool(0.15)) {
            return if self.loops && !top && self.rng.random_bool(0.5) { Choreo::Loop } else { Choreo::End };
        }
        if self.rng.random_bool(0.7) {
            let (from, to) = self.pair();
            let n = self.rng.random_range(1..=2);
            let labels: Vec<&&str> = LABELS.choose_multiple(self.rng, n).collect();
            let branches = labels.into_iter().map(|l| (Label::new(l), self.choreo(budget - 1, false))).collect();
            Choreo::Choice { from, to, branches }
        } else {
            let (p, q) = self.pair();
            let (r, s) = self.pair();
            let (l, m) = (self.label(), self.label());
            let cont = Box::new(self.choreo(budget - 1, false));
            Choreo::Pipeline { first: (p, q, l), second: (r, s, m), cont }
        }
    }
}

fn global(c: &Choreo, g: &mut GlobalGraph, root: NodeId) -> GlobalNode {
    let add = |c: &Choreo, g: &mut GlobalGraph| -> NodeId {
        match c {
            Choreo::Loop => root,
            other => {
                let node = global(other, g, root);
                g.add(node)
            }
        }
    };
    match c {
        Choreo::End => GlobalNode::End,
        Choreo::Loop => unreachable!("a loop is never the root"),
        Choreo::Choice { from, to, branches } => GlobalNode::Out {
            sender: from.clone(),
            receiver: to.clone(),
            branches: branches
                .iter()
                .map(|(l, k)| {
                    let cont = add(k, g);
                    let read =
                        g.add(GlobalNode::In { reader: to.clone(), sender: from.clone(), label: l.clone(), cont });
                    (l.clone(), read)
                })
                .collect(),
        },
        Choreo::Pipeline { first: (p, q, l), second: (r, s, m), cont } => {
            let k = add(cont, g);
            let read2 = g.add(GlobalNode::In { reader: s.clone(), sender: r.clone(), label: m.clone(), cont: k });
            let read1 = g.add(GlobalNode::In { reader: q.clone(), sender: p.clone(), label: l.clone(), cont: read2 });
            let send2 =
                g.add(GlobalNode::Out { sender: r.clone(), receiver: s.clone(), branches: vec![(m.clone(), read1)] });
            GlobalNode::Out { sender: p.clone(), receiver: q.clone(), branches: vec![(l.clone(), send2)] }
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
enum Local {
    End,
    Var,
    Act { polarity: Polarity, peer: Participant, branches: BTreeMap<Label, Local> },
}

fn merge(a: Local, b: Local) -> Option<Local> {
    if a == b {
        return Some(a);
    }
    match (a, b) {
        (
            Local::Act { polarity: Polarity::Receive, peer: p, branches: mut left },
            Local::Act { polarity: Polarity::Receive, peer: q, branches: right },
        ) if p == q => {
            for (l, k) in right {
                let merged = match left.remove(&l) {
                    Some(existing) => merge(existing, k)?,
                    None => k,
                };
                left.insert(l, merged);
            }
            Some(Local::Act { polarity: Polarity::Receive, peer: p, branches: left })
        }
        _ => None,
    }
}

fn act(polarity: Polarity, peer: &Participant, label: &Label, cont: Local) -> Local {
    Local::Act { polarity, peer: peer.clone(), branches: BTreeMap::from([(label.clone(), cont)]) }
}

fn project(c: &Choreo, who: &Participant) -> Option<Local> {
    match c {
        Choreo::End => Some(Local::End),
        Choreo::Loop => Some(Local::Var),
        Choreo::Choice { from, to, branches } => {
            let mut parts = Vec::new();
            for (l, k) in branches {
                parts.push((l.clone(), project(k, who)?));
            }
            if who == from || who == to {
                let (polarity, peer) = if who == from { (Polarity::Send, to) } else { (Polarity::Receive, from) };
                return Some(Local::Act { polarity, peer: peer.clone(), branches: parts.into_iter().collect() });
            }
            parts.into_iter().map(|(_, k)| k).try_fold(None, |acc: Option<Local>, k| match acc {
                None => Some(Some(k)),
                Some(a) => merge(a, k).map(Some),
            })?
        }
        Choreo::Pipeline { first: (p, q, l), second: (r, s, m), cont } => {
            let mut local = project(cont, who)?;
            if who == s {
                local = act(Polarity::Receive, r, m, local);
            }
            if who == q {
                local = act(Polarity::Receive, p, l, local);
            }
            if who == r {
                local = act(Polarity::Send, s, m, local);
            }
            if who == p {
                local = act(Polarity::Send, q, l, local);
            }
            Some(local)
        }
    }
}

fn build_local(l: &Local, g: &mut ProcessGraph, root: NodeId) -> NodeId {
    match l {
        Local::Var => root,
        other => {
            let node = local_node(other, g, root);
            g.add(node)
        }
    }
}

fn local_node(l: &Local, g: &mut ProcessGraph, root: NodeId) -> ProcessNode {
    match l {
        Local::End | Local::Var => ProcessNode::Inactive,
        Local::Act { polarity, peer, branches } => ProcessNode::Choice {
            polarity: *polarity,
            peer: peer.clone(),
            branches: branches.iter().map(|(lab, k)| (lab.clone(), build_local(k, g, root))).collect(),
        },
    }
}

fn realise(c: &Choreo, names: &[Participant]) -> Option<(GlobalType, Session)> {
    let mut g = GlobalGraph::new();
    let root = g.reserve();
    let top = global(c, &mut g, root);
    g.define(root, top);
    let gtype = g.build(root).ok()?;
    let mut bindings = Vec::new();
    for who in names {
        let local = project(c, who)?;
        if matches!(local, Local::End | Local::Var) {
            continue;
        }
        let mut pg = ProcessGraph::new();
        let proot = pg.reserve();
        let node = local_node(&local, &mut pg, proot);
        pg.define(proot, node);
        bindings.push((who.clone(), pg.build(proot).ok()?));
    }
    let network = Network::new(bindings).ok()?;
    Some((gtype, Session::new(network, Queue::new())))
}

/// Draws protocols until one projects and type-checks for a random
/// nonempty subset of its participants (or `attempts` run out).
pub fn random_typable<R: Rng>(rng: &mut R, attempts: usize) -> Option<Instance> {
    for _ in 0..attempts {
        let n = rng.random_range(2..=NAMES.len());
        let names: Vec<Participant> = NAMES[..n].iter().map(Participant::new).collect();
        let loops = rng.random_bool(0.6);
        let budget = rng.random_range(1..=4);
        let c = Gen { rng, names: names.clone(), loops }.choreo(budget, true);
        let Some((gtype, session)) = realise(&c, &names) else { continue };
        let players: Vec<Participant> = session.network.players().into_iter().collect();
        let set: ParticipantSet = if rng.random_bool(0.5) || players.is_empty() {
            players.iter().cloned().collect()
        } else {
            let k = rng.random_range(1..=players.len());
            players.choose_multiple(rng, k).cloned().collect()
        };
        if typecheck(&set, &gtype, &session).is_ok() {
            let name = format!("random:{}", partial_mpst::render_global(&gtype));
            return Some(Instance { name, set, gtype, session });
        }
    }
    None
}
