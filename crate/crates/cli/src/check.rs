use std::fmt::Write as _;

use partial_mpst::syntax::Printer;
use partial_mpst::typing::CheckReport;
use partial_mpst::{
    derivation_validate, typecheck_with, CheckOptions, CycleMode, Derivation, ParticipantSet, TypeFailure,
};

use crate::input::{set_names, InputError, Inputs, Loaded};
use crate::style::Style;
use crate::{exit, Outcome};

pub fn braces(set: &ParticipantSet) -> String {
    format!("{{{}}}", set_names(set).join(", "))
}

fn tree(out: &mut String, p: &mut Printer, d: &Derivation, level: usize) {
    let _ = write!(
        out,
        "{}{:<5} {} || {} : {}",
        "  ".repeat(level),
        d.rule.to_string(),
        p.network(&d.session.network),
        d.session.queue,
        p.global(&d.gtype)
    );
    if let Some(k) = d.conditions.revisited {
        let _ = write!(out, "  (history entry {k})");
    }
    out.push('\n');
    for c in &d.children {
        tree(out, p, c, level + 1);
    }
}

fn definitions(out: &mut String, p: &mut Printer) {
    let mut defs = p.take_pending_processes();
    defs.extend(p.take_pending_globals());
    if !defs.is_empty() {
        out.push_str("where\n");
        for (name, body) in defs {
            let _ = writeln!(out, "  {name} = {body}");
        }
    }
}

pub fn run(
    loaded: &Loaded,
    global: Option<&str>,
    session: Option<&str>,
    set: &str,
    mode: CycleMode,
    style: &Style,
) -> Result<(Inputs, Outcome), InputError> {
    let (gname, g) = loaded.global(global)?;
    let (sname, s) = loaded.session(session)?;
    let set = loaded.set(set)?;
    let inputs = Inputs {
        files: loaded.files.clone(),
        global: Some(gname.clone()),
        session: Some(sname.clone()),
        set: Some(set_names(&set)),
        ..Default::default()
    };
    let options = CheckOptions { cycle_mode: mode };
    let result: Result<Derivation, TypeFailure> = typecheck_with(&set, &g, &s, options);
    let mut text = String::new();
    let mut p = Printer::for_module(&loaded.module);
    let exit_code = match &result {
        Ok(d) => {
            if let Err(e) = derivation_validate(d, &set, &g, &s, options) {
                // Never expected: the checker and the replay disagree.
                let _ = writeln!(text, "{}: {e}", style.bad("internal error"));
                exit::FAILED
            } else {
                let _ = writeln!(text, "{}: {sname} : {gname} for {}", style.good("accepted"), braces(&set));
                let _ = writeln!(text, "derivation: {} nodes, depth {}", d.nodes().len(), d.depth());
                tree(&mut text, &mut p, d, 0);
                definitions(&mut text, &mut p);
                exit::OK
            }
        }
        Err(f) => {
            let _ = writeln!(text, "{}: {sname} : {gname} for {}", style.bad("rejected"), braces(&set));
            let _ = writeln!(text, "reason: {} ({})", f.reason, f.reason.kind());
            let _ =
                writeln!(text, "at: {} || {} : {}", p.network(&f.session.network), f.session.queue, p.global(&f.gtype));
            if !f.trail.is_empty() {
                let _ = writeln!(text, "after: {}", f.trail);
            }
            definitions(&mut text, &mut p);
            exit::FAILED
        }
    };
    let mut p = Printer::for_module(&loaded.module);
    let report = CheckReport::from_result(&set, &result, &mut p);
    let payload = serde_json::to_value(&report).expect("check reports serialize");
    Ok((inputs, Outcome { text, payload, exit_code }))
}
