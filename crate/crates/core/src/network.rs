//! Networks of named processes and sessions.

use std::collections::BTreeMap;
use std::fmt;

use crate::name::{Participant, ParticipantSet};
use crate::process::Process;
use crate::queue::Queue;
use crate::validate::{ValidationReport, Violation, ViolationKind, WellFormed};

/// Participant-to-process bindings. Inactive bindings are never stored, so
/// two networks are congruent exactly when they are equal.
#[derive(Clone, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Network {
    bindings: BTreeMap<Participant, Process>,
}

impl Network {
    pub fn empty() -> Self {
        Self::default()
    }

    /// Builds a network, rejecting repeated participants and processes that
    /// mention their own participant.
    pub fn new<I>(bindings: I) -> Result<Self, ValidationReport>
    where
        I: IntoIterator<Item = (Participant, Process)>,
    {
        let mut report = ValidationReport::default();
        let mut map = BTreeMap::new();
        let mut seen = ParticipantSet::new();
        for (p, proc) in bindings {
            if !seen.insert(p.clone()) {
                report.push(Violation::new(format!("binding {p}"), ViolationKind::DuplicateParticipant(p.clone())));
                continue;
            }
            if !proc.is_inactive() {
                map.insert(p, proc);
            }
        }
        let net = Network { bindings: map };
        report.extend(net.well_formed());
        if report.is_empty() {
            Ok(net)
        } else {
            Err(report)
        }
    }

    pub fn bindings(&self) -> &BTreeMap<Participant, Process> {
        &self.bindings
    }

    pub fn get(&self, p: &Participant) -> Option<&Process> {
        self.bindings.get(p)
    }

    /// The process of `p`, which is `0` when `p` is not bound.
    pub fn process(&self, p: &Participant) -> Process {
        self.bindings.get(p).cloned().unwrap_or_else(Process::inactive)
    }

    /// Replaces the binding of `p`. The caller guarantees that `p` does not
    /// occur in `proc` (it is always a continuation of `p`'s old process).
    pub fn rebind(&self, p: &Participant, proc: Process) -> Network {
        let mut bindings = self.bindings.clone();
        if proc.is_inactive() {
            bindings.remove(p);
        } else {
            bindings.insert(p.clone(), proc);
        }
        Network { bindings }
    }

    /// The network without `p`.
    pub fn without(&self, p: &Participant) -> Network {
        let mut bindings = self.bindings.clone();
        bindings.remove(p);
        Network { bindings }
    }

    pub fn is_empty(&self) -> bool {
        self.bindings.is_empty()
    }

    /// Active participants.
    pub fn players(&self) -> ParticipantSet {
        self.bindings.keys().cloned().collect()
    }

    /// Participants mentioned by the bound processes.
    pub fn participants(&self) -> ParticipantSet {
        self.bindings.values().flat_map(Process::plays).collect()
    }
}

/// Congruence of networks: permutation, `p[0]` components, and bisimilar
/// processes. With the canonical representation this is plain equality.
pub fn network_equiv(a: &Network, b: &Network) -> bool {
    a == b
}

impl fmt::Display for Network {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.bindings.is_empty() {
            return f.write_str("empty");
        }
        for (i, (p, proc)) in self.bindings.iter().enumerate() {
            if i > 0 {
                f.write_str(" | ")?;
            }
            write!(f, "{p}[{}]", crate::syntax::render_process(proc))?;
        }
        Ok(())
    }
}

impl fmt::Debug for Network {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Network({self})")
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Session {
    pub network: Network,
    pub queue: Queue,
}

impl Session {
    pub fn new(network: Network, queue: Queue) -> Self {
        Self { network, queue }
    }
}

impl fmt::Display for Session {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} || {}", self.network, self.queue)
    }
}
