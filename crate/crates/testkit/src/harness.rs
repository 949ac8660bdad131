//! Executable statements of the fidelity, subject reduction and safety
//! results. Each returns a description of the first counterexample.

use std::collections::{HashSet, VecDeque};

use partial_mpst::{
    check_p_lock_free, check_p_omf, config_enabled, config_step, session_enabled, session_step, typecheck, Bounds,
    GlobalType, ParticipantSet, Session, Status, TypeConfiguration,
};

/// Every step of the configuration is a step of the session with the same
/// queue, and the successors still type-check.
pub fn fidelity(set: &ParticipantSet, g: &GlobalType, s: &Session) -> Result<(), String> {
    let steps = config_enabled(&TypeConfiguration::new(g.clone(), s.queue.clone())).map_err(|e| e.to_string())?;
    for (beta, c) in steps {
        let next = session_step(s, &beta).map_err(|e| format!("fidelity: type step {beta} not a session step: {e}"))?;
        if next.queue != c.queue {
            return Err(format!("fidelity: {beta} gives queue {} in the session, {} in the type", next.queue, c.queue));
        }
        typecheck(set, &c.gtype, &next).map_err(|f| format!("fidelity: after {beta}: {f}"))?;
    }
    Ok(())
}

/// Every session step is matched by the type (or leaves it unchanged when
/// the type does not mention the player). Returns the typed successors.
pub fn subject_reduction(
    set: &ParticipantSet,
    g: &GlobalType,
    s: &Session,
) -> Result<Vec<(GlobalType, Session)>, String> {
    let players = g.players();
    let mut out = Vec::new();
    for (beta, next) in session_enabled(s) {
        let g2 = if players.contains(&beta.player) {
            let c = config_step(&TypeConfiguration::new(g.clone(), s.queue.clone()), &beta)
                .map_err(|e| format!("subject reduction: {beta}: {e}"))?;
            if c.queue != next.queue {
                return Err(format!("subject reduction: {beta}: queues differ"));
            }
            c.gtype
        } else {
            g.clone()
        };
        typecheck(set, &g2, &next).map_err(|f| format!("subject reduction: after {beta}: {f}"))?;
        out.push((g2, next));
    }
    Ok(out)
}

/// Checks both statements on every typed pair reachable from `(g, s)` in
/// at most `max_steps` steps. Returns the number of pairs checked.
pub fn theorem_walk(set: &ParticipantSet, g: &GlobalType, s: &Session, max_steps: usize) -> Result<usize, String> {
    let mut seen: HashSet<(GlobalType, Session)> = HashSet::new();
    let mut work = VecDeque::from([(g.clone(), s.clone(), 0)]);
    seen.insert((g.clone(), s.clone()));
    let mut checked = 0;
    while let Some((g, s, steps)) = work.pop_front() {
        checked += 1;
        fidelity(set, &g, &s)?;
        let next = subject_reduction(set, &g, &s)?;
        if steps == max_steps {
            continue;
        }
        for (g2, s2) in next {
            if seen.insert((g2.clone(), s2.clone())) {
                work.push_back((g2, s2, steps + 1));
            }
        }
    }
    Ok(checked)
}

/// A type-checked session is never found lock-prone or orphaning.
pub fn safety(set: &ParticipantSet, s: &Session, b: Bounds) -> Result<(), String> {
    for (name, v) in [("lock", check_p_lock_free(s, set, b)), ("omf", check_p_omf(s, set, b))] {
        if v.status == Status::Violated {
            let w = v.witness.expect("violations carry a witness");
            return Err(format!("{name} violated after {} at {}", w.trace, w.state));
        }
    }
    Ok(())
}
