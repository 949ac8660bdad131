//! `mpst`: check, analyze, simulate and verify multiparty sessions.

mod analyze;
mod check;
mod input;
mod simulate;
mod style;
mod verify;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use input::{InputError, Inputs};
use serde::Serialize;

pub const RUN_SCHEMA: &str = "mpst-run/1";

pub mod exit {
    pub const OK: u8 = 0;
    pub const FAILED: u8 = 1;
    pub const USAGE: u8 = 2;
    pub const INCONCLUSIVE: u8 = 3;
}

#[derive(Parser)]
#[command(
    name = "mpst",
    version,
    about = "Partial typing and bounded verification for asynchronous multiparty sessions"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Common {
    /// Definition files, read in order as one module.
    #[arg(required = true)]
    files: Vec<PathBuf>,
    /// Print a JSON report instead of text.
    #[arg(long)]
    json: bool,
}

#[derive(Clone, Copy, ValueEnum)]
enum CycleArg {
    Standard,
    EmptyQueue,
}

#[derive(Clone, Copy, ValueEnum)]
enum PropertyArg {
    Lock,
    Deadlock,
    Omf,
}

#[derive(Subcommand)]
enum Command {
    /// Type-check a session against a global type for a participant set.
    Check {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        global: Option<String>,
        #[arg(long)]
        session: Option<String>,
        /// A named set, `a,b` inline, or `-` for the empty set.
        #[arg(long)]
        set: String,
        /// `empty-queue` only closes cycles on an empty queue and skips
        /// soundness checks.
        #[arg(long, value_enum, default_value = "standard")]
        cycle: CycleArg,
    },
    /// Depth, boundedness and (with a queue) weight and soundness tables.
    Analyze {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        global: Option<String>,
        #[arg(long)]
        queue: Option<String>,
        /// The set for the soundness table; defaults to every participant.
        #[arg(long)]
        set: Option<String>,
    },
    /// Replay a trace or take random steps.
    Simulate {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        session: Option<String>,
        /// Whitespace-separated `p>q!l` / `p<q?l`, or a JSON array.
        #[arg(long, conflicts_with = "random", required_unless_present = "random")]
        trace: Option<PathBuf>,
        /// Number of uniformly random steps.
        #[arg(long)]
        random: Option<usize>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Bounded check of a partial property.
    Verify {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        session: Option<String>,
        #[arg(long)]
        set: String,
        #[arg(long, value_enum)]
        property: PropertyArg,
        /// Longest trace explored.
        #[arg(long, default_value_t = 64, value_parser = clap::value_parser!(u64).range(1..))]
        depth: u64,
        /// Most messages kept on one channel; sends beyond it are pruned.
        #[arg(long, default_value_t = 4, value_parser = clap::value_parser!(u64).range(1..))]
        queue_bound: u64,
    },
}

/// What a command produced: text, a JSON payload and an exit code.
pub struct Outcome {
    pub text: String,
    pub payload: serde_json::Value,
    pub exit_code: u8,
}

#[derive(Serialize)]
struct RunReport<'a> {
    schema: &'static str,
    command: &'static str,
    inputs: &'a Inputs,
    outcome: &'a serde_json::Value,
    exit_code: u8,
}

fn run(command: Command, style: &style::Style) -> Result<(&'static str, bool, Inputs, Outcome), InputError> {
    Ok(match command {
        Command::Check { common, global, session, set, cycle } => {
            let loaded = input::load(&common.files)?;
            let mode = match cycle {
                CycleArg::Standard => partial_mpst::CycleMode::Standard,
                CycleArg::EmptyQueue => partial_mpst::CycleMode::EmptyQueueCycle,
            };
            let (inputs, outcome) = check::run(&loaded, global.as_deref(), session.as_deref(), &set, mode, style)?;
            ("check", common.json, inputs, outcome)
        }
        Command::Analyze { common, global, queue, set } => {
            let loaded = input::load(&common.files)?;
            let (inputs, outcome) = analyze::run(&loaded, global.as_deref(), queue.as_deref(), set.as_deref(), style)?;
            ("analyze", common.json, inputs, outcome)
        }
        Command::Simulate { common, session, trace, random, seed } => {
            let loaded = input::load(&common.files)?;
            let source = match (trace, random) {
                (Some(path), _) => simulate::Source::Trace(path),
                (None, Some(n)) => simulate::Source::Random { steps: n, seed },
                (None, None) => unreachable!("clap requires one of them"),
            };
            let (inputs, outcome) = simulate::run(&loaded, session.as_deref(), source, style)?;
            ("simulate", common.json, inputs, outcome)
        }
        Command::Verify { common, session, set, property, depth, queue_bound } => {
            let loaded = input::load(&common.files)?;
            let property = match property {
                PropertyArg::Lock => partial_mpst::Property::Lock,
                PropertyArg::Deadlock => partial_mpst::Property::Deadlock,
                PropertyArg::Omf => partial_mpst::Property::Omf,
            };
            let bounds = partial_mpst::Bounds::new(depth as usize, queue_bound as usize);
            let (inputs, outcome) = verify::run(&loaded, session.as_deref(), &set, property, bounds, style)?;
            ("verify", common.json, inputs, outcome)
        }
    })
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let style = style::Style::from_env();
    match run(cli.command, &style) {
        Ok((command, json, inputs, outcome)) => {
            if json {
                let report = RunReport {
                    schema: RUN_SCHEMA,
                    command,
                    inputs: &inputs,
                    outcome: &outcome.payload,
                    exit_code: outcome.exit_code,
                };
                println!("{}", serde_json::to_string_pretty(&report).expect("reports serialize"));
            } else {
                print!("{}", outcome.text);
            }
            ExitCode::from(outcome.exit_code)
        }
        Err(e) => {
            eprintln!("mpst: {e}");
            ExitCode::from(exit::USAGE)
        }
    }
}
