//! Loading definition files and resolving names given on the command line.

use std::path::{Path, PathBuf};

use partial_mpst::name::is_identifier;
use partial_mpst::{parse_module, GlobalType, ModuleError, Participant, ParticipantSet, Queue, Session, SourceModule};
use serde::Serialize;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum InputError {
    #[error("cannot read {path}: {source}")]
    Read { path: PathBuf, source: std::io::Error },
    #[error("{path}: {source}")]
    Parse { path: String, source: ModuleError },
    #[error("no {kind} named `{name}`")]
    Unknown { kind: &'static str, name: String },
    #[error("{kind} name required: the files define {count} of them")]
    Ambiguous { kind: &'static str, count: usize },
    #[error("invalid participant set `{0}`")]
    BadSet(String),
    #[error("invalid trace: {0}")]
    BadTrace(String),
}

/// The parsed files, concatenated in order.
pub struct Loaded {
    pub files: Vec<String>,
    pub module: SourceModule,
}

pub fn load(paths: &[PathBuf]) -> Result<Loaded, InputError> {
    let mut text = String::new();
    for p in paths {
        let part = std::fs::read_to_string(p).map_err(|source| InputError::Read { path: p.clone(), source })?;
        text.push_str(&part);
        text.push('\n');
    }
    let files: Vec<String> = paths.iter().map(|p| p.display().to_string()).collect();
    let module = parse_module(&text).map_err(|source| InputError::Parse { path: files.join(" + "), source })?;
    Ok(Loaded { files, module })
}

/// What the command line named, for reports.
#[derive(Clone, Debug, Default, Serialize)]
pub struct Inputs {
    pub files: Vec<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub global: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub session: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub queue: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub set: Option<Vec<String>>,
}

fn pick<'a, T>(
    map: &'a std::collections::BTreeMap<String, T>,
    name: Option<&str>,
    kind: &'static str,
) -> Result<(String, &'a T), InputError> {
    match name {
        Some(n) => map
            .get_key_value(n)
            .map(|(k, v)| (k.clone(), v))
            .ok_or_else(|| InputError::Unknown { kind, name: n.to_string() }),
        None if map.len() == 1 => {
            let (k, v) = map.iter().next().expect("one entry");
            Ok((k.clone(), v))
        }
        None => Err(InputError::Ambiguous { kind, count: map.len() }),
    }
}

impl Loaded {
    pub fn global(&self, name: Option<&str>) -> Result<(String, GlobalType), InputError> {
        pick(&self.module.globals, name, "global type").map(|(k, g)| (k, g.clone()))
    }

    pub fn queue(&self, name: &str) -> Result<Queue, InputError> {
        pick(&self.module.queues, Some(name), "queue").map(|(_, q)| q.clone())
    }

    /// A session definition, or a network with the empty queue.
    pub fn session(&self, name: Option<&str>) -> Result<(String, Session), InputError> {
        if let Some(n) = name {
            if !self.module.sessions.contains_key(n) {
                if let Some(net) = self.module.networks.get(n) {
                    return Ok((n.to_string(), Session::new(net.clone(), Queue::new())));
                }
            }
        }
        pick(&self.module.sessions, name, "session").map(|(k, d)| (k, d.session.clone()))
    }

    /// A named set, `-` for the empty set, or an inline list `a,b`
    /// (optionally in braces).
    pub fn set(&self, spec: &str) -> Result<ParticipantSet, InputError> {
        if let Some(s) = self.module.sets.get(spec) {
            return Ok(s.clone());
        }
        parse_set(spec)
    }
}

pub fn parse_set(spec: &str) -> Result<ParticipantSet, InputError> {
    let spec = spec.trim();
    if spec == "-" {
        return Ok(ParticipantSet::new());
    }
    let inner = spec.strip_prefix('{').and_then(|s| s.strip_suffix('}')).unwrap_or(spec);
    let mut out = ParticipantSet::new();
    for part in inner.split(',').map(str::trim).filter(|s| !s.is_empty()) {
        if !is_identifier(part) {
            return Err(InputError::BadSet(spec.to_string()));
        }
        out.insert(Participant::new(part));
    }
    if out.is_empty() && !inner.trim().is_empty() {
        return Err(InputError::BadSet(spec.to_string()));
    }
    Ok(out)
}

pub fn read_text(path: &Path) -> Result<String, InputError> {
    std::fs::read_to_string(path).map_err(|source| InputError::Read { path: path.to_path_buf(), source })
}

pub fn set_names(set: &ParticipantSet) -> Vec<String> {
    set.iter().map(|p| p.to_string()).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn inline_sets() {
        assert!(parse_set("-").unwrap().is_empty());
        assert!(parse_set("{}").unwrap().is_empty());
        assert_eq!(set_names(&parse_set("u2,u1").unwrap()), ["u1", "u2"]);
        assert_eq!(set_names(&parse_set("{p, q}").unwrap()), ["p", "q"]);
        assert!(parse_set("p,->").is_err());
    }
}
