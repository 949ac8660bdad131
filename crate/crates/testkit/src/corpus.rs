use std::fs;
use std::path::PathBuf;

use partial_mpst::{parse_module, typecheck, SourceModule};

use crate::Instance;

pub fn corpus_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../corpus")
}

/// Parses the concatenation of the named corpus files.
pub fn load(names: &[&str]) -> SourceModule {
    let texts: Vec<String> =
        names.iter().map(|n| fs::read_to_string(corpus_dir().join(n)).unwrap_or_else(|e| panic!("{n}: {e}"))).collect();
    parse_module(&texts.join("\n")).unwrap_or_else(|e| panic!("{names:?}: {e}"))
}

/// Every (set, global, session) triple of the corpus that type-checks.
pub fn corpus_instances() -> Vec<Instance> {
    let cases: &[(&str, &str, &str, &[&str])] = &[
        ("social_media.mps", "G", "Smex", &["Users"]),
        ("remark.mps", "G", "Remark", &["Nobody"]),
        ("ping_pong.mps", "Loop", "Start", &["Everyone", "Pair"]),
    ];
    let mut out = Vec::new();
    for (file, g, s, sets) in cases {
        let m = load(&[file]);
        for set in sets.iter() {
            let inst = Instance {
                name: format!("{file}:{set}"),
                set: m.sets[*set].clone(),
                gtype: m.globals[*g].clone(),
                session: m.sessions[*s].session.clone(),
            };
            typecheck(&inst.set, &inst.gtype, &inst.session)
                .unwrap_or_else(|f| panic!("{}: corpus instance rejected: {f}", inst.name));
            out.push(inst);
        }
    }
    out
}
