//! Regular terms as canonical finite graphs.
//!
//! A regular term is a possibly infinite tree with finitely many distinct
//! subtrees. We store it as the minimal graph that unfolds to the tree, with
//! nodes numbered in depth-first order from the root (children visited in the
//! order fixed by their head). Two terms are bisimilar exactly when their
//! canonical graphs are equal, so `Eq`, `Hash` and `Ord` on [`Regular`] are
//! structural and cheap to use as map keys.
//!
//! Every node carries a head with a fixed arity. Heads are expected to list
//! their children in a deterministic order (for example sorted by label), so
//! the graph is deterministic and minimisation yields a unique result.

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::hash::Hash;
use std::sync::Arc;

/// The non-recursive part of a node.
pub trait Head: Clone + Eq + Ord + Hash + fmt::Debug {
    fn arity(&self) -> usize;
}

/// Index of a node in a [`Graph`] under construction.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct NodeId(pub usize);

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Node<H> {
    pub head: H,
    pub children: Vec<usize>,
}

/// A mutable graph whose nodes can be declared before they are defined, which
/// is how cyclic terms get built.
#[derive(Clone, Debug)]
pub struct Graph<H> {
    nodes: Vec<Option<Node<H>>>,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum GraphError {
    #[error("node {0} is referenced but never defined")]
    Undefined(usize),
    #[error("node {node} expects {expected} children, found {found}")]
    Arity { node: usize, expected: usize, found: usize },
}

impl<H: Head> Default for Graph<H> {
    fn default() -> Self {
        Self { nodes: Vec::new() }
    }
}

impl<H: Head> Graph<H> {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn reserve(&mut self) -> NodeId {
        self.nodes.push(None);
        NodeId(self.nodes.len() - 1)
    }

    pub fn define(&mut self, id: NodeId, head: H, children: Vec<NodeId>) {
        self.nodes[id.0] = Some(Node { head, children: children.into_iter().map(|c| c.0).collect() });
    }

    pub fn add(&mut self, head: H, children: Vec<NodeId>) -> NodeId {
        let id = self.reserve();
        self.define(id, head, children);
        id
    }

    /// Copies `term` into this graph and returns the id of its root.
    pub fn embed(&mut self, term: &Regular<H>) -> NodeId {
        let base = self.nodes.len();
        for node in term.nodes.iter() {
            self.nodes.push(Some(Node {
                head: node.head.clone(),
                children: node.children.iter().map(|c| c + base).collect(),
            }));
        }
        NodeId(base)
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn get(&self, id: NodeId) -> Option<&Node<H>> {
        self.nodes.get(id.0).and_then(Option::as_ref)
    }

    /// Canonical term rooted at `root`. Only nodes reachable from `root` must
    /// be defined.
    pub fn term(&self, root: NodeId) -> Result<Regular<H>, GraphError> {
        let reachable = self.reachable(root)?;
        Ok(canonicalize(&reachable.nodes, 0))
    }

    /// Reachable part of the graph, renumbered in discovery order.
    fn reachable(&self, root: NodeId) -> Result<Dense<H>, GraphError> {
        let mut index: HashMap<usize, usize> = HashMap::new();
        let mut order = vec![root.0];
        index.insert(root.0, 0);
        let mut next = 0;
        while next < order.len() {
            let id = order[next];
            next += 1;
            let node = self.nodes[id].as_ref().ok_or(GraphError::Undefined(id))?;
            if node.children.len() != node.head.arity() {
                return Err(GraphError::Arity { node: id, expected: node.head.arity(), found: node.children.len() });
            }
            for &c in &node.children {
                if c >= self.nodes.len() {
                    return Err(GraphError::Undefined(c));
                }
                if let std::collections::hash_map::Entry::Vacant(e) = index.entry(c) {
                    e.insert(order.len());
                    order.push(c);
                }
            }
        }
        let nodes = order
            .iter()
            .map(|&id| {
                let node = self.nodes[id].as_ref().expect("checked above");
                Node { head: node.head.clone(), children: node.children.iter().map(|c| index[c]).collect() }
            })
            .collect();
        Ok(Dense { nodes })
    }
}

struct Dense<H> {
    nodes: Vec<Node<H>>,
}

/// A regular term in canonical form; the root is node 0.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Regular<H> {
    nodes: Arc<[Node<H>]>,
}

impl<H: Head> Regular<H> {
    /// A term without children. Panics if `head` has a nonzero arity.
    pub fn leaf(head: H) -> Self {
        assert_eq!(head.arity(), 0, "leaf head must have arity 0");
        Self { nodes: Arc::from(vec![Node { head, children: Vec::new() }]) }
    }

    /// A new root over existing terms. Panics on an arity mismatch.
    pub fn compose(head: H, children: &[Regular<H>]) -> Self {
        assert_eq!(head.arity(), children.len(), "arity mismatch in compose");
        let mut graph = Graph::new();
        let root = graph.reserve();
        let ids = children.iter().map(|c| graph.embed(c)).collect();
        graph.define(root, head, ids);
        graph.term(root).expect("composed graph is complete")
    }

    pub fn head(&self) -> &H {
        &self.nodes[0].head
    }

    /// Number of distinct subterms, including the term itself.
    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn nodes(&self) -> &[Node<H>] {
        &self.nodes
    }

    pub fn node(&self, index: usize) -> &Node<H> {
        &self.nodes[index]
    }

    pub fn child(&self, i: usize) -> Self {
        self.subterm(self.nodes[0].children[i])
    }

    pub fn children(&self) -> Vec<Self> {
        (0..self.nodes[0].children.len()).map(|i| self.child(i)).collect()
    }

    /// The subterm rooted at node `index`, re-canonicalised.
    ///
    /// A reachable part of a minimal graph is itself minimal, so only the
    /// numbering has to be recomputed.
    pub fn subterm(&self, index: usize) -> Self {
        if index == 0 {
            return self.clone();
        }
        Self { nodes: Arc::from(number_from(&self.nodes, index)) }
    }

    /// All distinct subterms in canonical node order (the term itself first).
    pub fn subterms(&self) -> Vec<Self> {
        (0..self.len()).map(|i| self.subterm(i)).collect()
    }

    /// True when the graph has a cycle, i.e. the unfolded tree is infinite.
    pub fn is_cyclic(&self) -> bool {
        // Canonical numbering is a DFS preorder, so any edge to a node whose
        // DFS is still open is a back edge. Recompute with explicit colours.
        #[derive(Clone, Copy, PartialEq)]
        enum Mark {
            New,
            Open,
            Done,
        }
        let mut marks = vec![Mark::New; self.len()];
        let mut stack = vec![(0usize, 0usize)];
        marks[0] = Mark::Open;
        while let Some(&mut (node, ref mut next)) = stack.last_mut() {
            if let Some(&child) = self.nodes[node].children.get(*next) {
                *next += 1;
                match marks[child] {
                    Mark::Open => return true,
                    Mark::New => {
                        marks[child] = Mark::Open;
                        stack.push((child, 0));
                    }
                    Mark::Done => {}
                }
            } else {
                marks[node] = Mark::Done;
                stack.pop();
            }
        }
        false
    }
}

impl<H: Head> fmt::Debug for Regular<H> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_map().entries(self.nodes.iter().enumerate()).finish()
    }
}

/// Minimises `nodes` (coarsest bisimulation by partition refinement) and
/// numbers the quotient from `root`.
fn canonicalize<H: Head>(nodes: &[Node<H>], root: usize) -> Regular<H> {
    let classes = coarsest_partition(nodes);
    let count = classes.iter().copied().max().map_or(0, |m| m + 1);
    let mut quotient: Vec<Option<Node<H>>> = vec![None; count];
    for (i, node) in nodes.iter().enumerate() {
        let class = classes[i];
        if quotient[class].is_none() {
            quotient[class] =
                Some(Node { head: node.head.clone(), children: node.children.iter().map(|&c| classes[c]).collect() });
        }
    }
    let quotient: Vec<Node<H>> = quotient.into_iter().map(|n| n.expect("every class has a member")).collect();
    Regular { nodes: Arc::from(number_from(&quotient, classes[root])) }
}

/// Moore-style refinement: start from head equality, split by the classes of
/// children until stable.
fn coarsest_partition<H: Head>(nodes: &[Node<H>]) -> Vec<usize> {
    let mut by_head: BTreeMap<&H, usize> = BTreeMap::new();
    let mut classes: Vec<usize> = nodes
        .iter()
        .map(|n| {
            let next = by_head.len();
            *by_head.entry(&n.head).or_insert(next)
        })
        .collect();
    let mut count = by_head.len();
    loop {
        let mut signatures: HashMap<(usize, Vec<usize>), usize> = HashMap::new();
        let refined: Vec<usize> = nodes
            .iter()
            .enumerate()
            .map(|(i, n)| {
                let sig = (classes[i], n.children.iter().map(|&c| classes[c]).collect());
                let next = signatures.len();
                *signatures.entry(sig).or_insert(next)
            })
            .collect();
        let refined_count = signatures.len();
        classes = refined;
        if refined_count == count {
            return classes;
        }
        count = refined_count;
    }
}

/// Renumbers the part of `nodes` reachable from `root` in DFS preorder,
/// visiting children left to right.
fn number_from<H: Head>(nodes: &[Node<H>], root: usize) -> Vec<Node<H>> {
    let mut index: HashMap<usize, usize> = HashMap::new();
    let mut order = Vec::new();
    let mut stack = vec![root];
    while let Some(id) = stack.pop() {
        if index.contains_key(&id) {
            continue;
        }
        index.insert(id, order.len());
        order.push(id);
        for &c in nodes[id].children.iter().rev() {
            if !index.contains_key(&c) {
                stack.push(c);
            }
        }
    }
    order
        .iter()
        .map(|&id| Node {
            head: nodes[id].head.clone(),
            children: nodes[id].children.iter().map(|c| index[c]).collect(),
        })
        .collect()
}

/// Decides bisimilarity of two nodes of two (not necessarily minimal) graphs
/// by exploring pairs. Used to cross-check canonicalisation.
pub fn bisimilar<H: Head>(left: &Graph<H>, l: NodeId, right: &Graph<H>, r: NodeId) -> bool {
    let mut seen = std::collections::HashSet::new();
    let mut work = vec![(l.0, r.0)];
    while let Some((a, b)) = work.pop() {
        if !seen.insert((a, b)) {
            continue;
        }
        let (Some(x), Some(y)) = (left.get(NodeId(a)), right.get(NodeId(b))) else {
            return false;
        };
        if x.head != y.head || x.children.len() != y.children.len() {
            return false;
        }
        work.extend(x.children.iter().copied().zip(y.children.iter().copied()));
    }
    true
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    /// Toy head: a symbol with a fixed arity.
    #[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
    struct Sym(char, usize);

    impl Head for Sym {
        fn arity(&self) -> usize {
            self.1
        }
    }

    #[test]
    fn unrolled_cycle_minimises_to_one_node() {
        // a -> b -> a -> ... where a and b have the same head
        let mut g = Graph::new();
        let a = g.reserve();
        let b = g.reserve();
        g.define(a, Sym('x', 1), vec![b]);
        g.define(b, Sym('x', 1), vec![a]);
        let t = g.term(a).unwrap();
        assert_eq!(t.len(), 1);
        assert_eq!(t.node(0).children, vec![0]);
        assert!(t.is_cyclic());
    }

    #[test]
    fn distinct_heads_are_kept_apart() {
        let mut g = Graph::new();
        let leaf1 = g.add(Sym('e', 0), vec![]);
        let leaf2 = g.add(Sym('f', 0), vec![]);
        let root = g.add(Sym('n', 2), vec![leaf1, leaf2]);
        let t = g.term(root).unwrap();
        assert_eq!(t.len(), 3);
        assert!(!t.is_cyclic());
        assert_eq!(t.child(0), Regular::leaf(Sym('e', 0)));
        assert_eq!(t.child(1), Regular::leaf(Sym('f', 0)));
    }

    #[test]
    fn shared_subtrees_merge() {
        let mut g = Graph::new();
        let e1 = g.add(Sym('e', 0), vec![]);
        let e2 = g.add(Sym('e', 0), vec![]);
        let root = g.add(Sym('n', 2), vec![e1, e2]);
        let t = g.term(root).unwrap();
        assert_eq!(t.len(), 2);
    }

    #[test]
    fn undefined_reachable_node_is_an_error() {
        let mut g: Graph<Sym> = Graph::new();
        let hole = g.reserve();
        let root = g.add(Sym('n', 1), vec![hole]);
        assert_eq!(g.term(root), Err(GraphError::Undefined(hole.0)));
    }

    #[test]
    fn compose_and_subterm_agree() {
        let e = Regular::leaf(Sym('e', 0));
        let u = Regular::compose(Sym('u', 1), std::slice::from_ref(&e));
        let t = Regular::compose(Sym('n', 2), &[u.clone(), e.clone()]);
        assert_eq!(t.child(0), u);
        assert_eq!(t.child(1), e);
        assert_eq!(t.subterms().len(), 3);
    }

    fn arb_graph() -> impl Strategy<Value = (Vec<(char, Vec<usize>)>, usize)> {
        // node count, then for each node a head symbol and child targets
        (1usize..7).prop_flat_map(|n| {
            let node = (prop::sample::select(vec!['a', 'b']), prop::collection::vec(0..n, 0..3));
            (prop::collection::vec(node, n), 0..n)
        })
    }

    fn build(spec: &[(char, Vec<usize>)]) -> Graph<Sym> {
        let mut g = Graph::new();
        let ids: Vec<_> = spec.iter().map(|_| g.reserve()).collect();
        for (i, (c, kids)) in spec.iter().enumerate() {
            g.define(ids[i], Sym(*c, kids.len()), kids.iter().map(|&k| ids[k]).collect());
        }
        g
    }

    proptest! {
        /// Canonical equality coincides with bisimilarity decided by the
        /// independent pair-exploration check.
        #[test]
        fn canonical_equality_is_bisimilarity(
            (left, lroot) in arb_graph(),
            (right, rroot) in arb_graph(),
        ) {
            let lg = build(&left);
            let rg = build(&right);
            let lt = lg.term(NodeId(lroot)).unwrap();
            let rt = rg.term(NodeId(rroot)).unwrap();
            prop_assert_eq!(lt == rt, bisimilar(&lg, NodeId(lroot), &rg, NodeId(rroot)));
        }

        /// Canonicalisation does not depend on how the input graph is numbered.
        #[test]
        fn renumbering_is_invisible((spec, root) in arb_graph(), seed in any::<u64>()) {
            let n = spec.len();
            let mut perm: Vec<usize> = (0..n).collect();
            let mut s = seed;
            for i in (1..n).rev() {
                s = s.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
                perm.swap(i, (s >> 33) as usize % (i + 1));
            }
            let mut shuffled = vec![('a', vec![]); n];
            for (i, (c, kids)) in spec.iter().enumerate() {
                shuffled[perm[i]] = (*c, kids.iter().map(|&k| perm[k]).collect());
            }
            let a = build(&spec).term(NodeId(root)).unwrap();
            let b = build(&shuffled).term(NodeId(perm[root])).unwrap();
            prop_assert_eq!(a, b);
        }

        #[test]
        fn subterms_are_bisimilar_to_their_nodes((spec, root) in arb_graph()) {
            let g = build(&spec);
            let t = g.term(NodeId(root)).unwrap();
            for (i, sub) in t.subterms().into_iter().enumerate() {
                let mut h = Graph::new();
                let id = h.embed(&t);
                let mut k = Graph::new();
                let sid = k.embed(&sub);
                prop_assert!(bisimilar(&h, NodeId(id.0 + i), &k, sid));
            }
        }
    }
}
