#![allow(dead_code)]

use std::path::PathBuf;
use std::process::Command;
use std::time::{Duration, Instant};

pub struct Run {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
    pub elapsed: Duration,
}

pub fn root() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../..")
}

pub fn corpus(name: &str) -> String {
    root().join("corpus").join(name).display().to_string()
}

pub fn mpst(args: &[&str]) -> Run {
    let start = Instant::now();
    let out = Command::new(env!("CARGO_BIN_EXE_mpst")).args(args).env("MPST_COLOR", "0").output().expect("run mpst");
    Run {
        code: out.status.code().expect("exit code"),
        stdout: String::from_utf8(out.stdout).expect("utf-8"),
        stderr: String::from_utf8(out.stderr).expect("utf-8"),
        elapsed: start.elapsed(),
    }
}

pub fn json(args: &[&str]) -> (i32, serde_json::Value) {
    let mut all = args.to_vec();
    all.push("--json");
    let r = mpst(&all);
    let v = serde_json::from_str(&r.stdout).unwrap_or_else(|e| panic!("{e}: {}{}", r.stdout, r.stderr));
    (r.code, v)
}

fn schema(name: &str) -> serde_json::Value {
    let text = std::fs::read_to_string(root().join("schemas").join(name)).expect("schema file");
    serde_json::from_str(&text).expect("schema json")
}

/// Validator for run reports, with the outcome schemas registered.
pub fn report_validator() -> jsonschema::Validator {
    let mut opts = jsonschema::options();
    for (id, file) in [
        ("urn:mpst:derivation:1", "derivation.schema.json"),
        ("urn:mpst:analysis:1", "analysis.schema.json"),
        ("urn:mpst:simulation:1", "simulation.schema.json"),
        ("urn:mpst:verdict:1", "verdict.schema.json"),
    ] {
        opts = opts.with_resource(id, jsonschema::Resource::from_contents(schema(file)).expect("resource"));
    }
    opts.build(&schema("run-report.schema.json")).expect("schema compiles")
}

pub fn trace_validator() -> jsonschema::Validator {
    jsonschema::validator_for(&schema("trace.schema.json")).expect("schema compiles")
}

pub fn assert_valid(v: &jsonschema::Validator, value: &serde_json::Value) {
    let errors: Vec<String> = v.iter_errors(value).map(|e| format!("{} at {}", e, e.instance_path)).collect();
    assert!(errors.is_empty(), "{errors:?}\n{value:#}");
}
