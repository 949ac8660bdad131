//! Well-formedness reports. Violations are data, not errors.

use std::fmt;

use serde::Serialize;

use crate::global::{GlobalGraph, GlobalType};
use crate::name::{Label, Participant};
use crate::network::{Network, Session};
use crate::process::{Process, ProcessGraph};
use crate::queue::Queue;

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", content = "detail", rename_all = "kebab-case")]
pub enum ViolationKind {
    Undefined,
    EmptyChoice,
    DuplicateLabel(Label),
    SelfCommunication(Participant),
    DuplicateParticipant(Participant),
    Graph(String),
}

impl fmt::Display for ViolationKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ViolationKind::Undefined => f.write_str("undefined node"),
            ViolationKind::EmptyChoice => f.write_str("empty branch set"),
            ViolationKind::DuplicateLabel(l) => write!(f, "duplicate labels: {l}"),
            ViolationKind::SelfCommunication(p) => write!(f, "self-communication: {p}"),
            ViolationKind::DuplicateParticipant(p) => write!(f, "duplicate participant: {p}"),
            ViolationKind::Graph(e) => write!(f, "malformed graph: {e}"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Violation {
    pub location: String,
    pub kind: ViolationKind,
}

impl Violation {
    pub fn new(location: impl Into<String>, kind: ViolationKind) -> Self {
        Self { location: location.into(), kind }
    }
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.location, self.kind)
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
#[serde(transparent)]
pub struct ValidationReport {
    violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn single(v: Violation) -> Self {
        Self { violations: vec![v] }
    }

    pub fn push(&mut self, v: Violation) {
        self.violations.push(v);
    }

    pub fn extend(&mut self, other: ValidationReport) {
        self.violations.extend(other.violations);
    }

    pub fn is_empty(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn violations(&self) -> &[Violation] {
        &self.violations
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, v) in self.violations.iter().enumerate() {
            if i > 0 {
                f.write_str("; ")?;
            }
            write!(f, "{v}")?;
        }
        Ok(())
    }
}

impl std::error::Error for ValidationReport {}

/// Re-checks the invariants of an already built term.
pub trait WellFormed {
    fn well_formed(&self) -> ValidationReport;
}

impl WellFormed for Process {
    fn well_formed(&self) -> ValidationReport {
        let mut g = ProcessGraph::new();
        let root = g.embed(self);
        g.well_formed(&[root])
    }
}

impl WellFormed for GlobalType {
    fn well_formed(&self) -> ValidationReport {
        let mut g = GlobalGraph::new();
        let root = g.embed(self);
        g.well_formed(&[root])
    }
}

impl WellFormed for Queue {
    fn well_formed(&self) -> ValidationReport {
        let mut report = ValidationReport::default();
        for ch in self.canonical().keys() {
            if ch.sender == ch.receiver {
                report.push(Violation::new(
                    format!("queue channel {ch}"),
                    ViolationKind::SelfCommunication(ch.sender.clone()),
                ));
            }
        }
        report
    }
}

impl WellFormed for Network {
    fn well_formed(&self) -> ValidationReport {
        let mut report = ValidationReport::default();
        for (p, proc) in self.bindings() {
            for mut v in proc.well_formed().violations {
                v.location = format!("{p}: {}", v.location);
                report.push(v);
            }
            if proc.plays().contains(p) {
                report.push(Violation::new(format!("binding {p}"), ViolationKind::SelfCommunication(p.clone())));
            }
        }
        report
    }
}

impl WellFormed for Session {
    fn well_formed(&self) -> ValidationReport {
        let mut report = self.network.well_formed();
        report.extend(self.queue.well_formed());
        report
    }
}
