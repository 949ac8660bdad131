//! Serializable views of derivations and failures.

use serde::Serialize;

use super::{judgement_fingerprint, Derivation, FailureReason, Rule, TypeFailure};
use crate::global::GlobalType;
use crate::name::ParticipantSet;
use crate::network::Session;
use crate::syntax::Printer;

pub const DERIVATION_SCHEMA: &str = "mpst-derivation/1";

#[derive(Clone, Debug, Serialize)]
pub struct JudgementView {
    pub fingerprint: String,
    pub history_size: usize,
    pub history_fingerprint: Option<String>,
    pub network: String,
    pub queue: String,
    pub gtype: String,
}

#[derive(Clone, Debug, Serialize)]
pub struct SoundnessView {
    pub gtype: String,
    pub queue: String,
}

#[derive(Clone, Debug, Serialize)]
pub struct NodeReport {
    pub rule: Rule,
    pub judgement: JudgementView,
    pub checked_players: Vec<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub soundness: Option<SoundnessView>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub revisited: Option<usize>,
    pub children: Vec<NodeReport>,
}

#[derive(Clone, Debug, Serialize)]
pub struct FailureView {
    pub kind: &'static str,
    pub message: String,
    pub reason: FailureReason,
    pub judgement: JudgementView,
    pub trail: Vec<String>,
}

/// The outcome of a check: exactly one of `derivation` and `failure`.
#[derive(Clone, Debug, Serialize)]
pub struct CheckReport {
    pub schema: &'static str,
    pub set: Vec<String>,
    pub accepted: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub derivation: Option<NodeReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub failure: Option<FailureView>,
    /// Names introduced by the printer for cycles without a source name.
    pub definitions: Vec<(String, String)>,
}

fn judgement(p: &mut Printer, s: &Session, g: &GlobalType, history: Option<(usize, &str)>) -> JudgementView {
    JudgementView {
        fingerprint: judgement_fingerprint(&s.network, &s.queue, g),
        history_size: history.map_or(0, |h| h.0),
        history_fingerprint: history.map(|h| h.1.to_string()),
        network: p.network(&s.network),
        queue: s.queue.to_string(),
        gtype: p.global(g),
    }
}

fn node(p: &mut Printer, d: &Derivation) -> NodeReport {
    NodeReport {
        rule: d.rule,
        judgement: judgement(p, &d.session, &d.gtype, Some((d.history_size, &d.history_fingerprint))),
        checked_players: d.conditions.checked_players.iter().map(|x| x.to_string()).collect(),
        soundness: d
            .conditions
            .soundness
            .as_ref()
            .map(|c| SoundnessView { gtype: p.global(&c.gtype), queue: c.queue.to_string() }),
        revisited: d.conditions.revisited,
        children: d.children.iter().map(|c| node(p, c)).collect(),
    }
}

fn set_names(set: &ParticipantSet) -> Vec<String> {
    set.iter().map(|x| x.to_string()).collect()
}

fn definitions(p: &mut Printer) -> Vec<(String, String)> {
    let mut defs = p.take_pending_processes();
    defs.extend(p.take_pending_globals());
    defs
}

impl CheckReport {
    pub fn accepted(set: &ParticipantSet, d: &Derivation, printer: &mut Printer) -> Self {
        let root = node(printer, d);
        CheckReport {
            schema: DERIVATION_SCHEMA,
            set: set_names(set),
            accepted: true,
            derivation: Some(root),
            failure: None,
            definitions: definitions(printer),
        }
    }

    pub fn rejected(set: &ParticipantSet, f: &TypeFailure, printer: &mut Printer) -> Self {
        let view = FailureView {
            kind: f.reason.kind(),
            message: f.reason.to_string(),
            reason: f.reason.clone(),
            judgement: judgement(printer, &f.session, &f.gtype, None),
            trail: f.trail.iter().map(|c| c.to_string()).collect(),
        };
        CheckReport {
            schema: DERIVATION_SCHEMA,
            set: set_names(set),
            accepted: false,
            derivation: None,
            failure: Some(view),
            definitions: definitions(printer),
        }
    }

    pub fn from_result(set: &ParticipantSet, r: &Result<Derivation, TypeFailure>, printer: &mut Printer) -> Self {
        match r {
            Ok(d) => Self::accepted(set, d, printer),
            Err(f) => Self::rejected(set, f, printer),
        }
    }
}
