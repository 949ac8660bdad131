use std::collections::{BTreeMap, HashMap};

use thiserror::Error;

use super::lexer::{tokenize, Pos, Spanned, Tok};
use crate::global::{GlobalGraph, GlobalNode, GlobalType};
use crate::name::{Label, Participant, ParticipantSet};
use crate::network::{Network, Session};
use crate::process::{Polarity, Process, ProcessGraph, ProcessNode};
use crate::queue::{Message, Queue};
use crate::regular::NodeId;
use crate::validate::ValidationReport;

const KEYWORDS: &[&str] = &["process", "global", "network", "queue", "session", "set", "end", "End", "with", "empty"];

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ModuleError {
    #[error("{pos}: syntax error: expected {}, found {found}", expected.join(" or "))]
    Syntax { pos: Pos, expected: Vec<String>, found: String },
    #[error("{pos}: unexpected character {ch:?}")]
    Character { pos: Pos, ch: char },
    #[error("{pos}: unresolved {kind} reference `{name}`")]
    Unresolved { pos: Pos, kind: &'static str, name: String },
    #[error("{pos}: duplicate {kind} definition `{name}`")]
    Duplicate { pos: Pos, kind: &'static str, name: String },
    #[error("{pos}: unguarded recursion in {kind} `{name}`")]
    UnguardedRecursion { pos: Pos, kind: &'static str, name: String },
    #[error("{pos}: ill-formed {kind} `{name}`: {report}")]
    Invalid { pos: Pos, kind: &'static str, name: String, report: ValidationReport },
}

impl ModuleError {
    pub fn pos(&self) -> Pos {
        match self {
            ModuleError::Syntax { pos, .. }
            | ModuleError::Character { pos, .. }
            | ModuleError::Unresolved { pos, .. }
            | ModuleError::Duplicate { pos, .. }
            | ModuleError::UnguardedRecursion { pos, .. }
            | ModuleError::Invalid { pos, .. } => *pos,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SessionDef {
    pub network: String,
    pub queue: String,
    pub session: Session,
}

/// A parsed and resolved definition file. Each definition kind has its own
/// namespace.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct SourceModule {
    pub processes: BTreeMap<String, Process>,
    pub globals: BTreeMap<String, GlobalType>,
    pub networks: BTreeMap<String, Network>,
    pub queues: BTreeMap<String, Queue>,
    pub sessions: BTreeMap<String, SessionDef>,
    pub sets: BTreeMap<String, ParticipantSet>,
}

#[derive(Clone, Debug)]
enum ProcAst {
    End,
    Choice { polarity: Polarity, peer: Participant, branches: Vec<(Label, ProcAst)> },
    Ref(String, Pos),
}

#[derive(Clone, Debug)]
enum GlobAst {
    End,
    Out { sender: Participant, receiver: Participant, branches: Vec<(Label, GlobAst)> },
    In { reader: Participant, sender: Participant, label: Label, cont: Box<GlobAst> },
    Ref(String, Pos),
}

struct Def<T> {
    name: String,
    pos: Pos,
    body: T,
}

/// A session body: network and queue names with their positions.
type SessionRefs = ((String, Pos), (String, Pos));

#[derive(Default)]
struct Raw {
    processes: Vec<Def<ProcAst>>,
    globals: Vec<Def<GlobAst>>,
    networks: Vec<Def<Vec<(Participant, ProcAst)>>>,
    queues: Vec<Def<Vec<Message>>>,
    sessions: Vec<Def<SessionRefs>>,
    sets: Vec<Def<Vec<Participant>>>,
}

struct Parser {
    toks: Vec<Spanned>,
    at: usize,
}

impl Parser {
    fn peek(&self) -> &Tok {
        &self.toks[self.at].tok
    }

    fn peek2(&self) -> &Tok {
        &self.toks[(self.at + 1).min(self.toks.len() - 1)].tok
    }

    fn pos(&self) -> Pos {
        self.toks[self.at].pos
    }

    fn advance(&mut self) -> Tok {
        let t = self.toks[self.at].tok.clone();
        if self.at + 1 < self.toks.len() {
            self.at += 1;
        }
        t
    }

    fn fail<T>(&self, expected: &[&str]) -> Result<T, ModuleError> {
        Err(ModuleError::Syntax {
            pos: self.pos(),
            expected: expected.iter().map(|s| s.to_string()).collect(),
            found: self.peek().to_string(),
        })
    }

    fn eat(&mut self, tok: Tok, what: &str) -> Result<(), ModuleError> {
        if *self.peek() == tok {
            self.advance();
            Ok(())
        } else {
            self.fail(&[what])
        }
    }

    fn is_kw(&self, kw: &str) -> bool {
        matches!(self.peek(), Tok::Ident(s) if s == kw)
    }

    fn ident(&mut self, what: &str) -> Result<String, ModuleError> {
        match self.peek() {
            Tok::Ident(s) if !KEYWORDS.contains(&s.as_str()) => {
                let s = s.clone();
                self.advance();
                Ok(s)
            }
            _ => self.fail(&[what]),
        }
    }

    /// Labels may coincide with keywords; the position disambiguates.
    fn label(&mut self) -> Result<Label, ModuleError> {
        match self.peek() {
            Tok::Ident(s) => {
                let l = Label::new(s);
                self.advance();
                Ok(l)
            }
            _ => self.fail(&["label"]),
        }
    }

    fn participant(&mut self) -> Result<Participant, ModuleError> {
        self.ident("participant").map(Participant::new)
    }

    fn module(&mut self) -> Result<Raw, ModuleError> {
        let mut raw = Raw::default();
        loop {
            let kw = match self.peek() {
                Tok::Eof => return Ok(raw),
                Tok::Ident(s) => s.clone(),
                _ => return self.fail(&["definition"]),
            };
            let expected = ["`process`", "`global`", "`network`", "`queue`", "`session`", "`set`"];
            if !matches!(kw.as_str(), "process" | "global" | "network" | "queue" | "session" | "set") {
                return self.fail(&expected);
            }
            self.advance();
            let pos = self.pos();
            let name = self.ident("definition name")?;
            self.eat(Tok::Eq, "`=`")?;
            match kw.as_str() {
                "process" => {
                    let body = self.proc()?;
                    raw.processes.push(Def { name, pos, body });
                }
                "global" => {
                    let body = self.gty()?;
                    raw.globals.push(Def { name, pos, body });
                }
                "network" => {
                    let body = self.network()?;
                    raw.networks.push(Def { name, pos, body });
                }
                "queue" => {
                    let body = self.queue()?;
                    raw.queues.push(Def { name, pos, body });
                }
                "session" => {
                    let npos = self.pos();
                    let net = self.ident("network name")?;
                    if !self.is_kw("with") {
                        return self.fail(&["`with`"]);
                    }
                    self.advance();
                    let qpos = self.pos();
                    let queue = self.ident("queue name")?;
                    raw.sessions.push(Def { name, pos, body: ((net, npos), (queue, qpos)) });
                }
                _ => {
                    let body = self.set()?;
                    raw.sets.push(Def { name, pos, body });
                }
            }
        }
    }

    fn proc(&mut self) -> Result<ProcAst, ModuleError> {
        if self.is_kw("end") {
            self.advance();
            return Ok(ProcAst::End);
        }
        let pos = self.pos();
        let polarity = match self.peek2() {
            Tok::Bang => Polarity::Send,
            Tok::Quest => Polarity::Receive,
            _ => {
                let name = self.ident("process")?;
                return Ok(ProcAst::Ref(name, pos));
            }
        };
        let peer = self.participant()?;
        self.advance();
        let branches = self.branches(Self::proc, ProcAst::End)?;
        Ok(ProcAst::Choice { polarity, peer, branches })
    }

    /// `{l.T, ...}` or a single `l.T`. A missing `.T` means the terminal.
    fn branches<T>(
        &mut self,
        body: fn(&mut Self) -> Result<T, ModuleError>,
        terminal: T,
    ) -> Result<Vec<(Label, T)>, ModuleError>
    where
        T: Clone,
    {
        let braced = *self.peek() == Tok::LBrace;
        if braced {
            self.advance();
        }
        let mut out = Vec::new();
        loop {
            let label = self.label()?;
            let cont = if *self.peek() == Tok::Dot {
                self.advance();
                body(self)?
            } else {
                terminal.clone()
            };
            out.push((label, cont));
            if !braced {
                return Ok(out);
            }
            match self.peek() {
                Tok::Comma => {
                    self.advance();
                }
                Tok::RBrace => {
                    self.advance();
                    return Ok(out);
                }
                _ => return self.fail(&["`,`", "`}`"]),
            }
        }
    }

    fn gty(&mut self) -> Result<GlobAst, ModuleError> {
        if self.is_kw("End") {
            self.advance();
            return Ok(GlobAst::End);
        }
        let pos = self.pos();
        match self.peek2() {
            Tok::Arrow => {
                let sender = self.participant()?;
                self.advance();
                let receiver = self.participant()?;
                self.eat(Tok::Bang, "`!`")?;
                let branches = self.branches(Self::gty, GlobAst::End)?;
                Ok(GlobAst::Out { sender, receiver, branches })
            }
            Tok::BackArrow => {
                let reader = self.participant()?;
                self.advance();
                let sender = self.participant()?;
                self.eat(Tok::Quest, "`?`")?;
                let label = self.label()?;
                let cont = if *self.peek() == Tok::Dot {
                    self.advance();
                    self.gty()?
                } else {
                    GlobAst::End
                };
                Ok(GlobAst::In { reader, sender, label, cont: Box::new(cont) })
            }
            _ => {
                let name = self.ident("global type")?;
                Ok(GlobAst::Ref(name, pos))
            }
        }
    }

    fn network(&mut self) -> Result<Vec<(Participant, ProcAst)>, ModuleError> {
        if self.is_kw("empty") {
            self.advance();
            return Ok(Vec::new());
        }
        let mut out = Vec::new();
        loop {
            let p = self.participant()?;
            self.eat(Tok::LBracket, "`[`")?;
            let body = self.proc()?;
            self.eat(Tok::RBracket, "`]`")?;
            out.push((p, body));
            if *self.peek() != Tok::Bar {
                return Ok(out);
            }
            self.advance();
        }
    }

    fn queue(&mut self) -> Result<Vec<Message>, ModuleError> {
        self.eat(Tok::LBracket, "`[`")?;
        let mut out = Vec::new();
        if *self.peek() == Tok::RBracket {
            self.advance();
            return Ok(out);
        }
        loop {
            let pos = self.pos();
            let sender = self.participant()?;
            self.eat(Tok::Arrow, "`->`")?;
            let receiver = self.participant()?;
            self.eat(Tok::Colon, "`:`")?;
            let label = self.label()?;
            if sender == receiver {
                return Err(ModuleError::Syntax {
                    pos,
                    expected: vec!["distinct sender and receiver".into()],
                    found: format!("`{sender}->{receiver}`"),
                });
            }
            out.push(Message::new(sender, label, receiver));
            match self.advance() {
                Tok::Comma => {}
                Tok::RBracket => return Ok(out),
                _ => {
                    self.at -= 1;
                    return self.fail(&["`,`", "`]`"]);
                }
            }
        }
    }

    fn set(&mut self) -> Result<Vec<Participant>, ModuleError> {
        self.eat(Tok::LBrace, "`{`")?;
        let mut out = Vec::new();
        if *self.peek() == Tok::RBrace {
            self.advance();
            return Ok(out);
        }
        loop {
            out.push(self.participant()?);
            match self.peek() {
                Tok::Comma => {
                    self.advance();
                }
                Tok::RBrace => {
                    self.advance();
                    return Ok(out);
                }
                _ => return self.fail(&["`,`", "`}`"]),
            }
        }
    }
}

fn check_unique<T>(defs: &[Def<T>], kind: &'static str) -> Result<(), ModuleError> {
    let mut seen = std::collections::HashSet::new();
    for d in defs {
        if !seen.insert(d.name.as_str()) {
            return Err(ModuleError::Duplicate { pos: d.pos, kind, name: d.name.clone() });
        }
    }
    Ok(())
}

/// Follows alias chains (`P = Q`) to a definition with a real body.
fn resolve_alias<'a, T>(
    defs: &'a HashMap<&str, &'a Def<T>>,
    start: &str,
    start_pos: Pos,
    kind: &'static str,
    is_ref: impl Fn(&T) -> Option<(&str, Pos)>,
) -> Result<&'a Def<T>, ModuleError> {
    let mut name = start;
    let mut pos = start_pos;
    let mut hops = 0;
    loop {
        let def = defs.get(name).ok_or_else(|| ModuleError::Unresolved { pos, kind, name: name.to_string() })?;
        match is_ref(&def.body) {
            None => return Ok(def),
            Some((next, next_pos)) => {
                hops += 1;
                if hops > defs.len() {
                    return Err(ModuleError::UnguardedRecursion { pos: def.pos, kind, name: def.name.clone() });
                }
                name = next;
                pos = next_pos;
            }
        }
    }
}

struct ProcLowering<'a> {
    graph: ProcessGraph,
    defs: HashMap<&'a str, &'a Def<ProcAst>>,
    roots: HashMap<&'a str, NodeId>,
}

impl<'a> ProcLowering<'a> {
    fn new(defs: &'a [Def<ProcAst>]) -> Self {
        let mut graph = ProcessGraph::new();
        let mut roots = HashMap::new();
        for d in defs {
            if !matches!(d.body, ProcAst::Ref(..)) {
                let id = graph.reserve();
                graph.name(id, d.name.clone());
                roots.insert(d.name.as_str(), id);
            }
        }
        let defs = defs.iter().map(|d| (d.name.as_str(), d)).collect();
        Self { graph, defs, roots }
    }

    fn reference(&self, name: &str, pos: Pos) -> Result<NodeId, ModuleError> {
        let def = resolve_alias(&self.defs, name, pos, "process", |b| match b {
            ProcAst::Ref(n, p) => Some((n.as_str(), *p)),
            _ => None,
        })?;
        Ok(self.roots[def.name.as_str()])
    }

    fn lower(&mut self, ast: &ProcAst) -> Result<NodeId, ModuleError> {
        match ast {
            ProcAst::End => Ok(self.graph.add(ProcessNode::Inactive)),
            ProcAst::Ref(name, pos) => self.reference(name, *pos),
            ProcAst::Choice { polarity, peer, branches } => {
                let id = self.graph.reserve();
                self.lower_into(id, *polarity, peer, branches)?;
                Ok(id)
            }
        }
    }

    fn lower_into(
        &mut self,
        id: NodeId,
        polarity: Polarity,
        peer: &Participant,
        branches: &[(Label, ProcAst)],
    ) -> Result<(), ModuleError> {
        let mut out = Vec::new();
        for (l, b) in branches {
            out.push((l.clone(), self.lower(b)?));
        }
        self.graph.define(id, ProcessNode::Choice { polarity, peer: peer.clone(), branches: out });
        Ok(())
    }

    fn lower_defs(&mut self, defs: &[Def<ProcAst>]) -> Result<(), ModuleError> {
        for d in defs {
            let Some(&id) = self.roots.get(d.name.as_str()) else { continue };
            match &d.body {
                ProcAst::End => self.graph.define(id, ProcessNode::Inactive),
                ProcAst::Choice { polarity, peer, branches } => self.lower_into(id, *polarity, peer, branches)?,
                ProcAst::Ref(..) => unreachable!(),
            }
        }
        Ok(())
    }

    fn build(&self, root: NodeId, pos: Pos, name: &str) -> Result<Process, ModuleError> {
        self.graph.build(root).map_err(|report| ModuleError::Invalid {
            pos,
            kind: "process",
            name: name.to_string(),
            report,
        })
    }
}

struct GlobLowering<'a> {
    graph: GlobalGraph,
    defs: HashMap<&'a str, &'a Def<GlobAst>>,
    roots: HashMap<&'a str, NodeId>,
}

impl<'a> GlobLowering<'a> {
    fn new(defs: &'a [Def<GlobAst>]) -> Self {
        let mut graph = GlobalGraph::new();
        let mut roots = HashMap::new();
        for d in defs {
            if !matches!(d.body, GlobAst::Ref(..)) {
                let id = graph.reserve();
                graph.name(id, d.name.clone());
                roots.insert(d.name.as_str(), id);
            }
        }
        let defs = defs.iter().map(|d| (d.name.as_str(), d)).collect();
        Self { graph, defs, roots }
    }

    fn reference(&self, name: &str, pos: Pos) -> Result<NodeId, ModuleError> {
        let def = resolve_alias(&self.defs, name, pos, "global type", |b| match b {
            GlobAst::Ref(n, p) => Some((n.as_str(), *p)),
            _ => None,
        })?;
        Ok(self.roots[def.name.as_str()])
    }

    fn lower(&mut self, ast: &GlobAst) -> Result<NodeId, ModuleError> {
        if let GlobAst::Ref(name, pos) = ast {
            return self.reference(name, *pos);
        }
        let id = self.graph.reserve();
        self.lower_into(id, ast)?;
        Ok(id)
    }

    fn lower_into(&mut self, id: NodeId, ast: &GlobAst) -> Result<(), ModuleError> {
        let node = match ast {
            GlobAst::End => GlobalNode::End,
            GlobAst::Out { sender, receiver, branches } => {
                let mut out = Vec::new();
                for (l, b) in branches {
                    out.push((l.clone(), self.lower(b)?));
                }
                GlobalNode::Out { sender: sender.clone(), receiver: receiver.clone(), branches: out }
            }
            GlobAst::In { reader, sender, label, cont } => GlobalNode::In {
                reader: reader.clone(),
                sender: sender.clone(),
                label: label.clone(),
                cont: self.lower(cont)?,
            },
            GlobAst::Ref(..) => unreachable!(),
        };
        self.graph.define(id, node);
        Ok(())
    }

    fn lower_defs(&mut self, defs: &[Def<GlobAst>]) -> Result<(), ModuleError> {
        for d in defs {
            if let Some(&id) = self.roots.get(d.name.as_str()) {
                self.lower_into(id, &d.body)?;
            }
        }
        Ok(())
    }
}

/// Parses and resolves a definition file.
pub fn parse_module(text: &str) -> Result<SourceModule, ModuleError> {
    let toks = tokenize(text).map_err(|(pos, ch)| ModuleError::Character { pos, ch })?;
    let raw = Parser { toks, at: 0 }.module()?;
    check_unique(&raw.processes, "process")?;
    check_unique(&raw.globals, "global type")?;
    check_unique(&raw.networks, "network")?;
    check_unique(&raw.queues, "queue")?;
    check_unique(&raw.sessions, "session")?;
    check_unique(&raw.sets, "set")?;

    let mut module = SourceModule::default();

    let mut procs = ProcLowering::new(&raw.processes);
    procs.lower_defs(&raw.processes)?;
    for d in &raw.processes {
        let root = match &d.body {
            ProcAst::Ref(..) => procs.reference(&d.name, d.pos)?,
            _ => procs.roots[d.name.as_str()],
        };
        module.processes.insert(d.name.clone(), procs.build(root, d.pos, &d.name)?);
    }

    let mut globs = GlobLowering::new(&raw.globals);
    globs.lower_defs(&raw.globals)?;
    for d in &raw.globals {
        let root = match &d.body {
            GlobAst::Ref(..) => globs.reference(&d.name, d.pos)?,
            _ => globs.roots[d.name.as_str()],
        };
        let g = globs.graph.build(root).map_err(|report| ModuleError::Invalid {
            pos: d.pos,
            kind: "global type",
            name: d.name.clone(),
            report,
        })?;
        module.globals.insert(d.name.clone(), g);
    }

    for d in &raw.networks {
        let mut bindings = Vec::new();
        for (p, ast) in &d.body {
            let root = procs.lower(ast)?;
            bindings.push((p.clone(), procs.build(root, d.pos, &d.name)?));
        }
        let net = Network::new(bindings).map_err(|report| ModuleError::Invalid {
            pos: d.pos,
            kind: "network",
            name: d.name.clone(),
            report,
        })?;
        module.networks.insert(d.name.clone(), net);
    }

    for d in &raw.queues {
        module.queues.insert(d.name.clone(), Queue::from_messages(d.body.iter().cloned()));
    }

    for d in &raw.sessions {
        let ((net, npos), (queue, qpos)) = &d.body;
        let network = module.networks.get(net).ok_or_else(|| ModuleError::Unresolved {
            pos: *npos,
            kind: "network",
            name: net.clone(),
        })?;
        let q = module.queues.get(queue).ok_or_else(|| ModuleError::Unresolved {
            pos: *qpos,
            kind: "queue",
            name: queue.clone(),
        })?;
        module.sessions.insert(
            d.name.clone(),
            SessionDef {
                network: net.clone(),
                queue: queue.clone(),
                session: Session::new(network.clone(), q.clone()),
            },
        );
    }

    for d in &raw.sets {
        module.sets.insert(d.name.clone(), d.body.iter().cloned().collect());
    }

    Ok(module)
}
