use std::collections::{HashMap, HashSet};
use std::fmt::Write as _;

use super::parser::SourceModule;
use crate::global::{GlobalHead, GlobalType};
use crate::network::Network;
use crate::process::{Polarity, ProcHead, Process};
use crate::queue::Queue;
use crate::regular::{Head, Regular};

/// Renders terms as DSL text. Subterms equal to a known definition are
/// printed by name; other cycles are cut with synthesized definitions that
/// accumulate in the printer until taken.
#[derive(Default)]
pub struct Printer {
    processes: HashMap<Process, String>,
    globals: HashMap<GlobalType, String>,
    taken: HashSet<String>,
    fresh: usize,
    pending_processes: Vec<(String, String)>,
    pending_globals: Vec<(String, String)>,
}

enum Kind {
    Process,
    Global,
}

impl Printer {
    pub fn new() -> Self {
        Self::default()
    }

    /// A printer that knows every process and global definition of `module`.
    pub fn for_module(module: &SourceModule) -> Self {
        let mut p = Self::new();
        for (name, proc) in &module.processes {
            p.name_process(name, proc);
        }
        for (name, g) in &module.globals {
            p.name_global(name, g);
        }
        for name in module.networks.keys().chain(module.queues.keys()).chain(module.sessions.keys()) {
            p.taken.insert(name.clone());
        }
        p
    }

    /// Registers a name. Leaves are never substituted and the first name
    /// given to a term wins.
    pub fn name_process(&mut self, name: &str, proc: &Process) {
        self.taken.insert(name.to_string());
        if !proc.is_inactive() {
            self.processes.entry(proc.clone()).or_insert_with(|| name.to_string());
        }
    }

    pub fn name_global(&mut self, name: &str, g: &GlobalType) {
        self.taken.insert(name.to_string());
        if !g.is_end() {
            self.globals.entry(g.clone()).or_insert_with(|| name.to_string());
        }
    }

    fn fresh_name(&mut self, kind: &Kind) -> String {
        let prefix = match kind {
            Kind::Process => "Proc",
            Kind::Global => "Glob",
        };
        loop {
            self.fresh += 1;
            let name = format!("{prefix}_{}", self.fresh);
            if self.taken.insert(name.clone()) {
                return name;
            }
        }
    }

    /// The process as an expression, using names where possible.
    pub fn process(&mut self, proc: &Process) -> String {
        let known: Vec<Option<String>> =
            known_names(proc.term(), |i| self.processes.get(&Process::from_term(proc.term().subterm(i))).cloned());
        self.render(proc.term(), known, false, Kind::Process, fmt_proc, |p, t, n| {
            p.processes.insert(Process::from_term(t), n);
        })
    }

    /// The body of a definition for `proc`; the root is always expanded.
    pub fn process_body(&mut self, proc: &Process) -> String {
        let known =
            known_names(proc.term(), |i| self.processes.get(&Process::from_term(proc.term().subterm(i))).cloned());
        self.render(proc.term(), known, true, Kind::Process, fmt_proc, |p, t, n| {
            p.processes.insert(Process::from_term(t), n);
        })
    }

    pub fn global(&mut self, g: &GlobalType) -> String {
        let known = known_names(g.term(), |i| self.globals.get(&GlobalType::from_term(g.term().subterm(i))).cloned());
        self.render(g.term(), known, false, Kind::Global, fmt_global, |p, t, n| {
            p.globals.insert(GlobalType::from_term(t), n);
        })
    }

    pub fn global_body(&mut self, g: &GlobalType) -> String {
        let known = known_names(g.term(), |i| self.globals.get(&GlobalType::from_term(g.term().subterm(i))).cloned());
        self.render(g.term(), known, true, Kind::Global, fmt_global, |p, t, n| {
            p.globals.insert(GlobalType::from_term(t), n);
        })
    }

    pub fn network(&mut self, n: &Network) -> String {
        if n.is_empty() {
            return "empty".to_string();
        }
        let parts: Vec<String> = n.bindings().iter().map(|(p, proc)| format!("{p}[{}]", self.process(proc))).collect();
        parts.join(" | ")
    }

    /// Synthesized process definitions produced so far, in creation order.
    pub fn take_pending_processes(&mut self) -> Vec<(String, String)> {
        std::mem::take(&mut self.pending_processes)
    }

    pub fn take_pending_globals(&mut self) -> Vec<(String, String)> {
        std::mem::take(&mut self.pending_globals)
    }

    fn render<H: Head>(
        &mut self,
        term: &Regular<H>,
        mut known: Vec<Option<String>>,
        expand_root: bool,
        kind: Kind,
        fmt: fn(&H, &[String]) -> String,
        register: impl Fn(&mut Self, Regular<H>, String),
    ) -> String {
        if !expand_root {
            if let Some(name) = &known[0] {
                return name.clone();
            }
        }
        // Back-edge targets of a DFS that stops at named nodes.
        let n = term.len();
        let mut state = vec![0u8; n];
        let mut cut = vec![false; n];
        let mut stack: Vec<(usize, usize)> = vec![(0, 0)];
        state[0] = 1;
        while let Some(top) = stack.last_mut() {
            let node = top.0;
            let children = &term.node(node).children;
            if top.1 < children.len() {
                let c = children[top.1];
                top.1 += 1;
                if known[c].is_some() {
                    continue;
                }
                match state[c] {
                    0 => {
                        state[c] = 1;
                        stack.push((c, 0));
                    }
                    1 => cut[c] = true,
                    _ => {}
                }
            } else {
                state[node] = 2;
                stack.pop();
            }
        }
        let mut synthesized = Vec::new();
        for i in 0..n {
            if cut[i] {
                let name = self.fresh_name(&kind);
                known[i] = Some(name.clone());
                synthesized.push(i);
            }
        }
        let main = match (&known[0], cut[0]) {
            (Some(name), true) if !expand_root => name.clone(),
            _ => write_node(term, 0, &known, true, fmt),
        };
        for i in synthesized {
            let name = known[i].clone().expect("synthesized");
            let body = write_node(term, i, &known, true, fmt);
            match kind {
                Kind::Process => self.pending_processes.push((name.clone(), body)),
                Kind::Global => self.pending_globals.push((name.clone(), body)),
            }
            register(self, term.subterm(i), name);
        }
        main
    }
}

fn known_names<H: Head>(term: &Regular<H>, lookup: impl Fn(usize) -> Option<String>) -> Vec<Option<String>> {
    (0..term.len()).map(lookup).collect()
}

fn write_node<H: Head>(
    term: &Regular<H>,
    node: usize,
    known: &[Option<String>],
    top: bool,
    fmt: fn(&H, &[String]) -> String,
) -> String {
    if !top {
        if let Some(name) = &known[node] {
            return name.clone();
        }
    }
    let n = term.node(node);
    let children: Vec<String> = n.children.iter().map(|&c| write_node(term, c, known, false, fmt)).collect();
    fmt(&n.head, &children)
}

fn branch_list(labels: &[impl std::fmt::Display], children: &[String]) -> String {
    if labels.len() == 1 {
        return format!("{}.{}", labels[0], children[0]);
    }
    let items: Vec<String> = labels.iter().zip(children).map(|(l, c)| format!("{l}.{c}")).collect();
    format!("{{{}}}", items.join(", "))
}

fn fmt_proc(head: &ProcHead, children: &[String]) -> String {
    match head {
        ProcHead::Inactive => "end".to_string(),
        ProcHead::Choice { polarity, peer, labels } => {
            let mark = match polarity {
                Polarity::Send => '!',
                Polarity::Receive => '?',
            };
            format!("{peer}{mark}{}", branch_list(labels, children))
        }
    }
}

fn fmt_global(head: &GlobalHead, children: &[String]) -> String {
    match head {
        GlobalHead::End => "End".to_string(),
        GlobalHead::Out { sender, receiver, labels } => {
            format!("{sender}->{receiver}!{}", branch_list(labels, children))
        }
        GlobalHead::In { reader, sender, label } => format!("{reader}<-{sender}?{label}.{}", children[0]),
    }
}

fn with_where(main: String, defs: Vec<(String, String)>) -> String {
    if defs.is_empty() {
        return main;
    }
    let defs: Vec<String> = defs.into_iter().map(|(n, b)| format!("{n} = {b}")).collect();
    format!("{main} where {}", defs.join("; "))
}

/// Standalone rendering; cycles are expressed through a `where` suffix.
pub fn render_process(proc: &Process) -> String {
    let mut p = Printer::new();
    let main = p.process(proc);
    with_where(main, p.take_pending_processes())
}

pub fn render_global(g: &GlobalType) -> String {
    let mut p = Printer::new();
    let main = p.global(g);
    with_where(main, p.take_pending_globals())
}

pub fn render_queue(q: &Queue) -> String {
    q.to_string()
}

/// Renders a whole module so that parsing the output gives back equal terms.
pub fn render_module(module: &SourceModule) -> String {
    let mut p = Printer::for_module(module);
    let mut out = String::new();
    for (name, proc) in &module.processes {
        let body = p.process_body(proc);
        let _ = writeln!(out, "process {name} = {body}");
    }
    let mut networks = Vec::new();
    for (name, n) in &module.networks {
        networks.push(format!("network {name} = {}", p.network(n)));
    }
    for (name, body) in p.take_pending_processes() {
        let _ = writeln!(out, "process {name} = {body}");
    }
    for (name, g) in &module.globals {
        let body = p.global_body(g);
        let _ = writeln!(out, "global {name} = {body}");
    }
    for (name, body) in p.take_pending_globals() {
        let _ = writeln!(out, "global {name} = {body}");
    }
    for line in networks {
        let _ = writeln!(out, "{line}");
    }
    for (name, q) in &module.queues {
        let items: Vec<String> = q.messages().map(|m| m.to_string()).collect();
        let _ = writeln!(out, "queue {name} = [{}]", items.join(", "));
    }
    for (name, s) in &module.sessions {
        let _ = writeln!(out, "session {name} = {} with {}", s.network, s.queue);
    }
    for (name, set) in &module.sets {
        let items: Vec<&str> = set.iter().map(|p| p.as_str()).collect();
        let _ = writeln!(out, "set {name} = {{{}}}", items.join(", "));
    }
    out
}
