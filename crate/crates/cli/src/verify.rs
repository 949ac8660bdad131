use std::fmt::Write as _;

use partial_mpst::syntax::Printer;
use partial_mpst::{verify, Bounds, Property, Status};
use serde::Serialize;

use crate::check::braces;
use crate::input::{set_names, InputError, Inputs, Loaded};
use crate::style::Style;
use crate::{exit, Outcome};

pub const VERDICT_SCHEMA: &str = "mpst-verdict/1";

#[derive(Serialize)]
struct VerdictView {
    schema: &'static str,
    property: Property,
    set: Vec<String>,
    bounds: Bounds,
    status: Status,
    #[serde(skip_serializing_if = "Option::is_none")]
    witness_trace: Option<Vec<String>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    witness_state: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    witness_participant: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    witness_message: Option<String>,
    states_explored: usize,
    truncated: bool,
    definitions: Vec<(String, String)>,
}

fn describe(p: Property) -> &'static str {
    match p {
        Property::Lock => "lock-freedom",
        Property::Deadlock => "deadlock-freedom",
        Property::Omf => "orphan-message-freedom",
    }
}

pub fn run(
    loaded: &Loaded,
    session: Option<&str>,
    set: &str,
    property: Property,
    bounds: Bounds,
    style: &Style,
) -> Result<(Inputs, Outcome), InputError> {
    let (sname, s) = loaded.session(session)?;
    let set = loaded.set(set)?;
    let inputs = Inputs {
        files: loaded.files.clone(),
        session: Some(sname.clone()),
        set: Some(set_names(&set)),
        ..Default::default()
    };
    let v = verify::check(property, &s, &set, bounds);
    let mut p = Printer::for_module(&loaded.module);
    let w = v.witness.as_ref();
    let witness_state = w.map(|w| format!("{} || {}", p.network(&w.state.network), w.state.queue));
    let mut definitions = p.take_pending_processes();
    definitions.extend(p.take_pending_globals());
    let view = VerdictView {
        schema: VERDICT_SCHEMA,
        property,
        set: set_names(&set),
        bounds,
        status: v.status,
        witness_trace: w.map(|w| w.trace.iter().map(|c| c.to_string()).collect()),
        witness_state,
        witness_participant: w.and_then(|w| w.participant.as_ref()).map(|p| p.to_string()),
        witness_message: w.and_then(|w| w.message.as_ref()).map(|m| m.to_string()),
        states_explored: v.states_explored,
        truncated: v.truncated,
        definitions,
    };

    let (word, exit_code) = match v.status {
        Status::Holds => (style.good("Holds"), exit::OK),
        Status::Violated => (style.bad("Violated"), exit::FAILED),
        Status::HoldsWithinBounds => (style.unsure("HoldsWithinBounds"), exit::INCONCLUSIVE),
    };
    let mut text = String::new();
    let _ = writeln!(text, "{} of {sname} for {}: {word}", describe(property), braces(&set));
    if let Some(w) = &view.witness_participant {
        let _ = writeln!(text, "  participant: {w}");
    }
    if let Some(m) = &view.witness_message {
        let _ = writeln!(text, "  unread message: {m}");
    }
    if let Some(t) = &view.witness_trace {
        let shown = if t.is_empty() { "(initial state)".to_string() } else { t.join(" ") };
        let _ = writeln!(text, "  trace: {shown}");
    }
    if let Some(st) = &view.witness_state {
        let _ = writeln!(text, "  state: {st}");
    }
    for (name, body) in &view.definitions {
        let _ = writeln!(text, "  where {name} = {body}");
    }
    let _ = writeln!(
        text,
        "explored {} states (depth {}, queue bound {}){}",
        view.states_explored,
        bounds.max_trace_len,
        bounds.max_queue_per_channel,
        if view.truncated { ", truncated" } else { "" }
    );
    let payload = serde_json::to_value(&view).expect("verdicts serialize");
    Ok((inputs, Outcome { text, payload, exit_code }))
}
