//! Test support: the corpus, random instance generators, literal
//! path-based oracles for the graph analyses, and harnesses for the
//! fidelity, subject reduction and safety statements.

pub mod choreo;
pub mod corpus;
pub mod harness;
pub mod oracle;
pub mod tree;

pub use choreo::{random_typable, Instance};
pub use corpus::{corpus_dir, corpus_instances, load};
pub use tree::random_tree;
