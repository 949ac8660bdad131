use std::fmt::Write as _;
use std::path::PathBuf;

use partial_mpst::syntax::Printer;
use partial_mpst::{session_enabled, session_step, Communication, Session, Trace};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::input::{read_text, InputError, Inputs, Loaded};
use crate::style::Style;
use crate::{exit, Outcome};

pub const SIMULATION_SCHEMA: &str = "mpst-simulation/1";

pub enum Source {
    Trace(PathBuf),
    Random { steps: usize, seed: u64 },
}

#[derive(Serialize)]
struct StepView {
    index: usize,
    comm: String,
    session: String,
}

#[derive(Serialize)]
struct Failure {
    index: usize,
    comm: String,
}

#[derive(Serialize)]
struct Simulation {
    schema: &'static str,
    mode: &'static str,
    #[serde(skip_serializing_if = "Option::is_none")]
    seed: Option<u64>,
    initial: String,
    steps: Vec<StepView>,
    #[serde(rename = "final")]
    last: String,
    /// Random runs stop early in a state without transitions.
    stuck: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    failed: Option<Failure>,
    /// Names introduced for unnamed cyclic processes.
    definitions: Vec<(String, String)>,
}

pub fn parse_trace(text: &str) -> Result<Trace, InputError> {
    if text.trim_start().starts_with('[') {
        let steps: Vec<Communication> = serde_json::from_str(text).map_err(|e| InputError::BadTrace(e.to_string()))?;
        Ok(Trace(steps))
    } else {
        Trace::parse_text(text).map_err(|e| InputError::BadTrace(e.to_string()))
    }
}

fn show(p: &mut Printer, s: &Session) -> String {
    format!("{} || {}", p.network(&s.network), s.queue)
}

pub fn run(
    loaded: &Loaded,
    session: Option<&str>,
    source: Source,
    style: &Style,
) -> Result<(Inputs, Outcome), InputError> {
    let (sname, s) = loaded.session(session)?;
    let inputs = Inputs { files: loaded.files.clone(), session: Some(sname), ..Default::default() };
    let mut p = Printer::for_module(&loaded.module);
    let mut cur = s.clone();
    let mut steps = Vec::new();
    let mut failed = None;
    let mut stuck = false;
    let (mode, seed) = match source {
        Source::Trace(path) => {
            let trace = parse_trace(&read_text(&path)?)?;
            for (index, beta) in trace.iter().enumerate() {
                match session_step(&cur, beta) {
                    Ok(next) => {
                        cur = next;
                        steps.push(StepView { index, comm: beta.to_string(), session: show(&mut p, &cur) });
                    }
                    Err(_) => {
                        failed = Some(Failure { index, comm: beta.to_string() });
                        break;
                    }
                }
            }
            ("trace", None)
        }
        Source::Random { steps: n, seed } => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            for index in 0..n {
                let mut enabled = session_enabled(&cur);
                if enabled.is_empty() {
                    stuck = true;
                    break;
                }
                let (beta, next) = enabled.swap_remove(rng.random_range(0..enabled.len()));
                cur = next;
                steps.push(StepView { index, comm: beta.to_string(), session: show(&mut p, &cur) });
            }
            ("random", Some(seed))
        }
    };
    let initial = show(&mut p, &s);
    let last = show(&mut p, &cur);
    let mut definitions = p.take_pending_processes();
    definitions.extend(p.take_pending_globals());
    let sim = Simulation { schema: SIMULATION_SCHEMA, mode, seed, initial, steps, last, stuck, failed, definitions };

    let mut text = String::new();
    let _ = writeln!(text, "initial: {}", sim.initial);
    for st in &sim.steps {
        let _ = writeln!(text, "#{:<3} {:<14} {}", st.index, st.comm, style.dim(&st.session));
    }
    if let Some(f) = &sim.failed {
        let _ = writeln!(text, "{}: step #{} ({}) is not enabled", style.bad("failed"), f.index, f.comm);
    }
    if sim.stuck {
        let _ = writeln!(text, "stuck after {} steps", sim.steps.len());
    }
    let _ = writeln!(text, "final: {}", sim.last);
    for (name, body) in &sim.definitions {
        let _ = writeln!(text, "where {name} = {body}");
    }
    let exit_code = if sim.failed.is_some() { exit::FAILED } else { exit::OK };
    let payload = serde_json::to_value(&sim).expect("simulations serialize");
    Ok((inputs, Outcome { text, payload, exit_code }))
}
