//! Bounded breadth-first exploration of the session LTS.

use std::collections::{HashMap, VecDeque};

use serde::Serialize;

use crate::comm::{CommKind, Communication, Trace};
use crate::dynamics::session_enabled;
use crate::network::Session;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct Bounds {
    pub max_trace_len: usize,
    pub max_queue_per_channel: usize,
}

impl Bounds {
    pub fn new(max_trace_len: usize, max_queue_per_channel: usize) -> Self {
        Self { max_trace_len, max_queue_per_channel }
    }
}

impl Default for Bounds {
    fn default() -> Self {
        Self::new(64, 4)
    }
}

/// Reachable states, in BFS discovery order, with the explored edges.
#[derive(Clone, Debug)]
pub struct StateGraph {
    pub states: Vec<Session>,
    pub edges: Vec<Vec<(Communication, usize)>>,
    /// Every transition of each state in the real LTS, explored or not.
    pub enabled: Vec<Vec<Communication>>,
    /// States with a transition left out because of a bound.
    pub incomplete: Vec<bool>,
    parent: Vec<Option<(usize, Communication)>>,
    index: HashMap<Session, usize>,
}

impl StateGraph {
    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    pub fn frontier_truncated(&self) -> bool {
        self.incomplete.iter().any(|&b| b)
    }

    pub fn find(&self, s: &Session) -> Option<usize> {
        self.index.get(s).copied()
    }

    /// A shortest trace from the initial state.
    pub fn trace_to(&self, mut i: usize) -> Trace {
        let mut out = Vec::new();
        while let Some((prev, beta)) = &self.parent[i] {
            out.push(beta.clone());
            i = *prev;
        }
        out.reverse();
        Trace(out)
    }

    /// States that can reach some state in `targets` along explored edges.
    pub fn can_reach(&self, targets: impl Fn(usize) -> bool) -> Vec<bool> {
        let n = self.len();
        let mut preds = vec![Vec::new(); n];
        for (i, out) in self.edges.iter().enumerate() {
            for (_, j) in out {
                preds[*j].push(i);
            }
        }
        let mut mark = vec![false; n];
        let mut work: Vec<usize> = (0..n).filter(|&i| targets(i)).collect();
        for &i in &work {
            mark[i] = true;
        }
        while let Some(i) = work.pop() {
            for &p in &preds[i] {
                if !mark[p] {
                    mark[p] = true;
                    work.push(p);
                }
            }
        }
        mark
    }

    /// States from which an incomplete state is reachable: for these the
    /// explored graph may miss behaviour.
    pub fn may_be_truncated(&self) -> Vec<bool> {
        self.can_reach(|i| self.incomplete[i])
    }
}

/// Breadth-first exploration. Sends that would put more than
/// `max_queue_per_channel` messages on a channel are pruned, and states at
/// depth `max_trace_len` only get edges to states already found; both mark
/// the state incomplete.
pub fn explore(s: &Session, b: Bounds) -> StateGraph {
    let mut g = StateGraph {
        states: vec![s.clone()],
        edges: vec![Vec::new()],
        enabled: vec![Vec::new()],
        incomplete: vec![false],
        parent: vec![None],
        index: HashMap::from([(s.clone(), 0)]),
    };
    let mut depth = vec![0usize];
    let mut queue = VecDeque::from([0usize]);
    while let Some(i) = queue.pop_front() {
        let steps = session_enabled(&g.states[i]);
        g.enabled[i] = steps.iter().map(|(beta, _)| beta.clone()).collect();
        for (beta, next) in steps {
            if beta.kind == CommKind::Send && next.queue.channel_len(&beta.channel()) > b.max_queue_per_channel {
                g.incomplete[i] = true;
                continue;
            }
            let j = match g.index.get(&next) {
                Some(&j) => j,
                None if depth[i] < b.max_trace_len => {
                    let j = g.states.len();
                    g.index.insert(next.clone(), j);
                    g.states.push(next);
                    g.edges.push(Vec::new());
                    g.enabled.push(Vec::new());
                    g.incomplete.push(false);
                    g.parent.push(Some((i, beta.clone())));
                    depth.push(depth[i] + 1);
                    queue.push_back(j);
                    j
                }
                None => {
                    g.incomplete[i] = true;
                    continue;
                }
            };
            g.edges[i].push((beta, j));
        }
    }
    g
}
