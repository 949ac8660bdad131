use std::fmt;

use serde::Serialize;

use crate::comm::Communication;
use crate::global::{GlobalHead, GlobalType};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", content = "at", rename_all = "kebab-case")]
pub enum PathEnd {
    /// The walk reached `End`; the path is complete.
    End,
    /// The next node was already visited after `at` steps; the path goes
    /// on forever by repeating the walk from there.
    Cycle(usize),
    /// Cut at the length limit.
    Truncated,
}

/// A walk from the root. `nodes[i]` is the node at which `steps[i]` is
/// taken.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Path {
    pub steps: Vec<Communication>,
    pub nodes: Vec<usize>,
    pub end: PathEnd,
}

impl fmt::Display for Path {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, c) in self.steps.iter().enumerate() {
            if i > 0 {
                f.write_str(" ")?;
            }
            write!(f, "{c}")?;
        }
        match self.end {
            PathEnd::End => Ok(()),
            PathEnd::Cycle(at) => write!(f, " (cycle to {at})"),
            PathEnd::Truncated => f.write_str(" ..."),
        }
    }
}

/// All maximal walks of at most `max_len` steps, in label order. A walk
/// stops at `End`, at the first revisited node, or at the limit.
pub fn paths_sample(g: &GlobalType, max_len: usize) -> Vec<Path> {
    let term = g.term();
    let mut out = Vec::new();
    let mut steps = Vec::new();
    let mut nodes = Vec::new();
    walk(term, 0, max_len, &mut steps, &mut nodes, &mut out);
    out
}

fn walk(
    term: &crate::regular::Regular<GlobalHead>,
    node: usize,
    max_len: usize,
    steps: &mut Vec<Communication>,
    nodes: &mut Vec<usize>,
    out: &mut Vec<Path>,
) {
    let finish =
        |end, steps: &Vec<Communication>, nodes: &Vec<usize>| Path { steps: steps.clone(), nodes: nodes.clone(), end };
    let head = &term.node(node).head;
    if matches!(head, GlobalHead::End) {
        out.push(finish(PathEnd::End, steps, nodes));
        return;
    }
    if let Some(at) = nodes.iter().position(|&n| n == node) {
        out.push(finish(PathEnd::Cycle(at), steps, nodes));
        return;
    }
    if steps.len() == max_len {
        out.push(finish(PathEnd::Truncated, steps, nodes));
        return;
    }
    for (c, &child) in head.communications().into_iter().zip(&term.node(node).children) {
        steps.push(c);
        nodes.push(node);
        walk(term, child, max_len, steps, nodes, out);
        steps.pop();
        nodes.pop();
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::parse_module;

    #[test]
    fn end_has_the_empty_path() {
        let paths = paths_sample(&GlobalType::end(), 5);
        assert_eq!(paths.len(), 1);
        assert!(paths[0].steps.is_empty());
        assert_eq!(paths[0].end, PathEnd::End);
    }

    #[test]
    fn single_output() {
        let m = parse_module("global G = p->q!a.End").unwrap();
        let paths = paths_sample(&m.globals["G"], 5);
        assert_eq!(paths.len(), 1);
        assert_eq!(paths[0].to_string(), "p>q!a");
    }

    #[test]
    fn cyclic_path_of_the_unbounded_example() {
        let m = parse_module(
            "global G = r->q!lam. q<-r?lam. Gp
             global Gp = p->q!{l1. q<-p?l1. q->r!l3. r<-q?l3. End, l2. q<-p?l2. Gp}",
        )
        .unwrap();
        let paths = paths_sample(&m.globals["G"], 6);
        let texts: Vec<String> = paths.iter().map(ToString::to_string).collect();
        assert!(texts.contains(&"r>q!lam q<r?lam p>q!l2 q<p?l2 (cycle to 2)".to_string()), "{texts:?}");
        assert!(texts.contains(&"r>q!lam q<r?lam p>q!l1 q<p?l1 q>r!l3 r<q?l3".to_string()), "{texts:?}");
    }
}
