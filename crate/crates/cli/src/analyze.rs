use std::collections::HashMap;
use std::fmt::Write as _;

use partial_mpst::analysis::{depth_table, node_players, obligation_table, p_sound_report};
use partial_mpst::syntax::Printer;
use partial_mpst::{bounded, occurrence_weight, weight, ExtNat, GlobalType, Message, TypeConfiguration};
use serde::Serialize;

use crate::input::{set_names, InputError, Inputs, Loaded};
use crate::style::Style;
use crate::{exit, Outcome};

pub const ANALYSIS_SCHEMA: &str = "mpst-analysis/1";

#[derive(Serialize)]
struct NodeRow {
    node: usize,
    name: String,
    term: String,
}

#[derive(Serialize)]
struct DepthRow {
    node: usize,
    participant: String,
    depth: ExtNat,
    obligation: ExtNat,
}

#[derive(Serialize)]
struct WitnessView {
    node: usize,
    name: String,
    participant: String,
}

#[derive(Serialize)]
struct WeightRow {
    message: String,
    /// Position on its channel, from 1.
    position: usize,
    weight: ExtNat,
    occurrence_weight: ExtNat,
    in_set: bool,
}

#[derive(Serialize)]
struct QueueAnalysis {
    queue: String,
    set: Vec<String>,
    weights: Vec<WeightRow>,
    sound: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    offender: Option<String>,
}

#[derive(Serialize)]
struct Analysis {
    schema: &'static str,
    nodes: Vec<NodeRow>,
    depths: Vec<DepthRow>,
    bounded: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    witness: Option<WitnessView>,
    #[serde(skip_serializing_if = "Option::is_none")]
    soundness: Option<QueueAnalysis>,
    definitions: Vec<(String, String)>,
}

fn node_names(loaded: &Loaded, g: &GlobalType) -> Vec<String> {
    let mut known: HashMap<GlobalType, &str> = HashMap::new();
    for (name, def) in &loaded.module.globals {
        known.entry(def.clone()).or_insert(name);
    }
    (0..g.term().len())
        .map(|i| {
            let sub = GlobalType::from_term(g.term().subterm(i));
            known.get(&sub).map_or_else(|| format!("#{i}"), |n| n.to_string())
        })
        .collect()
}

pub fn run(
    loaded: &Loaded,
    global: Option<&str>,
    queue: Option<&str>,
    set: Option<&str>,
    style: &Style,
) -> Result<(Inputs, Outcome), InputError> {
    let (gname, g) = loaded.global(global)?;
    let names = node_names(loaded, &g);
    let mut printer = Printer::for_module(&loaded.module);
    let nodes: Vec<NodeRow> = (0..g.term().len())
        .map(|i| NodeRow {
            node: i,
            name: names[i].clone(),
            term: printer.global_body(&GlobalType::from_term(g.term().subterm(i))),
        })
        .collect();

    let players = node_players(&g);
    let depth = depth_table(&g);
    let obligation = obligation_table(&g);
    let depths: Vec<DepthRow> = depth
        .iter()
        .filter(|((i, p), _)| players[*i].contains(p))
        .map(|((i, p), d)| DepthRow {
            node: *i,
            participant: p.to_string(),
            depth: *d,
            obligation: obligation[&(*i, p.clone())],
        })
        .collect();
    let witness = bounded(&g).err().map(|w| WitnessView {
        node: w.node,
        name: names[w.node].clone(),
        participant: w.participant.to_string(),
    });

    let mut inputs = Inputs { files: loaded.files.clone(), global: Some(gname.clone()), ..Default::default() };
    let soundness = match queue {
        None => None,
        Some(qname) => {
            let q = loaded.queue(qname)?;
            let set = match set {
                Some(spec) => loaded.set(spec)?,
                None => {
                    let mut all = g.participants();
                    all.extend(q.messages().flat_map(|m| [m.sender, m.receiver]));
                    all
                }
            };
            inputs.queue = Some(qname.to_string());
            inputs.set = Some(set_names(&set));
            let mut weights = Vec::new();
            for (ch, labels) in q.canonical() {
                for (k, l) in labels.iter().enumerate() {
                    let m = Message::new(ch.sender.clone(), l.clone(), ch.receiver.clone());
                    weights.push(WeightRow {
                        message: m.to_string(),
                        position: k + 1,
                        weight: weight(&m, &g),
                        occurrence_weight: occurrence_weight(&m, k + 1, &g).value,
                        in_set: set.contains(&m.sender) && set.contains(&m.receiver),
                    });
                }
            }
            let report = p_sound_report(&TypeConfiguration::new(g.clone(), q.clone()), &set);
            Some(QueueAnalysis {
                queue: q.to_string(),
                set: set_names(&set),
                weights,
                sound: report.is_sound(),
                offender: report.offender.map(|m| m.to_string()),
            })
        }
    };
    let mut definitions = printer.take_pending_globals();
    definitions.extend(printer.take_pending_processes());
    let analysis = Analysis {
        schema: ANALYSIS_SCHEMA,
        nodes,
        depths,
        bounded: witness.is_none(),
        witness,
        soundness,
        definitions,
    };

    let mut text = String::new();
    let _ = writeln!(text, "global {gname}: {} nodes", analysis.nodes.len());
    for n in &analysis.nodes {
        let _ = writeln!(text, "  #{:<3} {:<8} {}", n.node, n.name, n.term);
    }
    for (name, body) in &analysis.definitions {
        let _ = writeln!(text, "  where {name} = {body}");
    }
    let _ = writeln!(text, "depth:");
    let _ = writeln!(text, "  {:<12} {:<11} {:>5} {:>10}", "node", "participant", "depth", "obligation");
    for r in &analysis.depths {
        let node = format!("#{} {}", r.node, if names[r.node].starts_with('#') { "" } else { &names[r.node] });
        let _ = writeln!(
            text,
            "  {:<12} {:<11} {:>5} {:>10}",
            node.trim_end(),
            r.participant,
            r.depth.to_string(),
            r.obligation.to_string()
        );
    }
    match &analysis.witness {
        None => {
            let _ = writeln!(text, "bounded: {}", style.good("yes"));
        }
        Some(w) => {
            let _ =
                writeln!(text, "bounded: {} (witness: {} at #{} {})", style.bad("no"), w.participant, w.node, w.name);
        }
    }
    if let Some(s) = &analysis.soundness {
        let set = format!("{{{}}}", s.set.join(", "));
        let _ = writeln!(text, "queue {}:", s.queue);
        let _ = writeln!(text, "  {:<16} {:>3} {:>6} {:>10} {:>6}", "message", "pos", "weight", "occurrence", "in set");
        for w in &s.weights {
            let _ = writeln!(
                text,
                "  {:<16} {:>3} {:>6} {:>10} {:>6}",
                w.message,
                w.position,
                w.weight.to_string(),
                w.occurrence_weight.to_string(),
                if w.in_set { "yes" } else { "no" }
            );
        }
        match &s.offender {
            None => {
                let _ = writeln!(text, "sound for {set}: {}", style.good("yes"));
            }
            Some(m) => {
                let _ = writeln!(text, "sound for {set}: {} ({m} may never be read)", style.bad("no"));
            }
        }
    }
    let payload = serde_json::to_value(&analysis).expect("analyses serialize");
    Ok((inputs, Outcome { text, payload, exit_code: exit::OK }))
}
