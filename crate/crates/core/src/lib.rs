//! Partial typing for asynchronous multiparty sessions.
//!
//! Terms are regular (possibly cyclic) and stored as canonical minimal
//! graphs, so structural equality coincides with bisimilarity.

pub mod analysis;
pub mod comm;
pub mod dynamics;
pub mod global;
pub mod name;
pub mod network;
pub mod process;
pub mod queue;
pub mod regular;
pub mod syntax;
pub mod typing;
pub mod validate;
pub mod verify;

pub use analysis::{
    bounded, depth, is_bounded, obligation_depth, occurrence_weight, p_sound, paths_sample, weight, ExtNat,
};
pub use comm::{CommKind, CommParseError, Communication, Trace};
pub use dynamics::{
    config_enabled, config_step, session_enabled, session_run, session_step, StepError, TypeConfiguration,
};
pub use global::{GlobalGraph, GlobalHead, GlobalNode, GlobalType};
pub use name::{participants, Label, Participant, ParticipantSet};
pub use network::{network_equiv, Network, Session};
pub use process::{Polarity, ProcHead, Process, ProcessGraph, ProcessNode};
pub use queue::{Channel, ChannelForm, Message, Queue};
pub use syntax::{parse_module, render_global, render_module, render_process, ModuleError, SourceModule};
pub use typing::{
    derivation_valid, derivation_validate, typecheck, typecheck_with, CheckOptions, CycleMode, Derivation,
    FailureReason, Rule, TypeFailure,
};
pub use validate::{ValidationReport, Violation, ViolationKind, WellFormed};
pub use verify::{
    check_p_deadlock_free, check_p_lock_free, check_p_omf, explore, Bounds, Property, StateGraph, Status, Verdict,
};
