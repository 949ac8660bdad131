//! Literal path recursions, used to cross-check the graph algorithms on
//! finite types. Both take the full path set from `paths_sample`, so they
//! are exact only when every path ends in `End` within the limit.

use partial_mpst::analysis::PathEnd;
use partial_mpst::{paths_sample, CommKind, ExtNat, GlobalType, Message, Participant};

const LIMIT: usize = 256;

fn complete_paths(g: &GlobalType) -> Vec<partial_mpst::analysis::Path> {
    let paths = paths_sample(g, LIMIT);
    assert!(paths.iter().all(|p| p.end == PathEnd::End), "oracle needs a finite type");
    paths
}

/// Supremum over paths of the first 1-based position played by `p`, with
/// the empty infimum infinite; 0 when `p` plays nowhere.
pub fn literal_depth(g: &GlobalType, p: &Participant) -> ExtNat {
    let paths = complete_paths(g);
    let plays = paths.iter().any(|path| path.steps.iter().any(|c| c.player == *p));
    if !plays {
        return ExtNat::ZERO;
    }
    paths
        .iter()
        .map(|path| match path.steps.iter().position(|c| c.player == *p) {
            Some(i) => ExtNat::Finite(i as u64 + 1),
            None => ExtNat::Infinite,
        })
        .max()
        .unwrap_or(ExtNat::ZERO)
}

/// Per path: the number of steps before the input that reads `m`, or
/// infinity when the path first meets `End` or a different label on the
/// same channel read by the same reader.
pub fn literal_weight(m: &Message, g: &GlobalType) -> ExtNat {
    complete_paths(g)
        .iter()
        .map(|path| {
            for (i, c) in path.steps.iter().enumerate() {
                if c.kind == CommKind::Receive && c.player == m.receiver && c.peer == m.sender {
                    return if c.label == m.label { ExtNat::Finite(i as u64) } else { ExtNat::Infinite };
                }
            }
            ExtNat::Infinite
        })
        .max()
        .unwrap_or(ExtNat::Infinite)
}
