//! Supremum of path measures over the (infinite) unfolding of a regular
//! term, computed on its finite graph.

use serde::Serialize;

use super::ExtNat;
use crate::regular::{Head, Regular};

pub(crate) enum Step {
    /// The measure stops here with this value.
    Stop(u64),
    /// Some path through here is blocked: the measure is infinite.
    Block,
    /// One plus the maximum over the children.
    Continue,
}

/// Why a measure is infinite.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", content = "node", rename_all = "kebab-case")]
pub enum Blocker {
    /// A reachable blocking node.
    Node(usize),
    /// A reachable cycle through this node never stops.
    Cycle(usize),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub(crate) struct Measure {
    pub value: ExtNat,
    pub blocker: Option<Blocker>,
}

impl Measure {
    fn finite(v: u64) -> Self {
        Measure { value: ExtNat::Finite(v), blocker: None }
    }

    fn infinite(b: Blocker) -> Self {
        Measure { value: ExtNat::Infinite, blocker: Some(b) }
    }

    fn join(&mut self, other: Measure) {
        if self.value.is_finite() && other.value > self.value {
            *self = other;
        }
    }
}

/// Measures every node. A `Continue` node on a cycle of `Continue` nodes is
/// infinite, since the unfolding has an infinite path that never stops.
pub(crate) fn longest<H: Head>(term: &Regular<H>, classify: impl Fn(usize) -> Step) -> Vec<Measure> {
    longest_in(term.len(), |i| term.node(i).children.clone(), classify)
}

/// [`longest`] on any finite graph given by its successor function.
pub(crate) fn longest_in(
    n: usize,
    children: impl Fn(usize) -> Vec<usize>,
    classify: impl Fn(usize) -> Step,
) -> Vec<Measure> {
    const NEW: u8 = 0;
    const OPEN: u8 = 1;
    const DONE: u8 = 2;
    let mut state = vec![NEW; n];
    let mut out = vec![Measure::finite(0); n];
    // Frame: node, next child, running max over children.
    let mut stack: Vec<(usize, usize, Measure)> = Vec::new();

    let enter =
        |i: usize, state: &mut [u8], out: &mut [Measure], stack: &mut Vec<(usize, usize, Measure)>| match classify(i) {
            Step::Stop(v) => {
                state[i] = DONE;
                out[i] = Measure::finite(v);
            }
            Step::Block => {
                state[i] = DONE;
                out[i] = Measure::infinite(Blocker::Node(i));
            }
            Step::Continue => {
                state[i] = OPEN;
                stack.push((i, 0, Measure::finite(0)));
            }
        };

    for start in 0..n {
        if state[start] != NEW {
            continue;
        }
        enter(start, &mut state, &mut out, &mut stack);
        while let Some(frame) = stack.last_mut() {
            let node = frame.0;
            let kids = children(node);
            if frame.1 < kids.len() {
                let c = kids[frame.1];
                frame.1 += 1;
                match state[c] {
                    DONE => frame.2.join(out[c]),
                    OPEN => frame.2.join(Measure::infinite(Blocker::Cycle(c))),
                    _ => {
                        enter(c, &mut state, &mut out, &mut stack);
                        if state[c] == DONE {
                            let parent = stack.last_mut().expect("frame");
                            parent.2.join(out[c]);
                        }
                    }
                }
            } else {
                let (_, _, acc) = stack.pop().expect("frame");
                let m = Measure { value: ExtNat::Finite(1) + acc.value, blocker: acc.blocker };
                out[node] = m;
                state[node] = DONE;
                if let Some(parent) = stack.last_mut() {
                    parent.2.join(m);
                }
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::regular::Graph;

    #[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
    struct H(char, usize);

    impl Head for H {
        fn arity(&self) -> usize {
            self.1
        }
    }

    fn classify(term: &Regular<H>) -> impl Fn(usize) -> Step + '_ {
        move |i| match term.node(i).head.0 {
            's' => Step::Stop(0),
            'b' => Step::Block,
            _ => Step::Continue,
        }
    }

    #[test]
    fn chain_then_stop() {
        let mut g = Graph::new();
        let s = g.add(H('s', 0), vec![]);
        let a = g.add(H('c', 1), vec![s]);
        let b = g.add(H('c', 2), vec![a, s]);
        let t = g.term(b).unwrap();
        let m = longest(&t, classify(&t));
        assert_eq!(m[0].value, ExtNat::Finite(2));
    }

    #[test]
    fn cycle_is_infinite() {
        let mut g = Graph::new();
        let root = g.reserve();
        let s = g.add(H('s', 0), vec![]);
        let a = g.add(H('d', 1), vec![root]);
        g.define(root, H('c', 2), vec![a, s]);
        let t = g.term(root).unwrap();
        let m = longest(&t, classify(&t));
        assert_eq!(m[0].value, ExtNat::Infinite);
        assert!(matches!(m[0].blocker, Some(Blocker::Cycle(_))));
    }

    #[test]
    fn block_names_node() {
        let mut g = Graph::new();
        let b = g.add(H('b', 0), vec![]);
        let root = g.add(H('c', 1), vec![b]);
        let t = g.term(root).unwrap();
        let m = longest(&t, classify(&t));
        assert_eq!(m[0].blocker, Some(Blocker::Node(1)));
    }
}
