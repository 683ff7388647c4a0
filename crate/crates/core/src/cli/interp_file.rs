//! Interpretation files.
//!
//! ```json
//! {
//!   "name": "points",
//!   "source": "pointed_sets.thy",
//!   "target": "groups.thy",
//!   "sorts": { "S": "G" },
//!   "funcs": { "pt": "[x:G] x = e" },
//!   "rels": {}
//! }
//! ```
//!
//! Paths are relative to the file. `target` defaults to `source`; missing
//! sort, function and relation entries go to the target symbol of the same
//! name.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use serde::Deserialize;

use super::dsl::{parse_formula, parse_theory};
use crate::logic::{Context, Formula, Interpretation, Node, SortId, Term, Theory};

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct InterpFile {
    name: Option<String>,
    source: PathBuf,
    target: Option<PathBuf>,
    #[serde(default)]
    sorts: BTreeMap<String, String>,
    #[serde(default)]
    funcs: BTreeMap<String, String>,
    #[serde(default)]
    rels: BTreeMap<String, String>,
}

/// Reads and parses a theory file, prefixing errors with the path.
pub fn load_theory(path: &Path) -> Result<Theory, String> {
    let text = std::fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))?;
    parse_theory(&text).map_err(|e| format!("{}:{e}", path.display()))
}

pub fn load_interpretation(path: &Path) -> Result<Interpretation, String> {
    let text = std::fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))?;
    let dir = path.parent().unwrap_or(Path::new("."));
    parse_interpretation(&text, dir).map_err(|e| format!("{}: {e}", path.display()))
}

/// Parses interpretation JSON, resolving theory paths against `dir`.
pub fn parse_interpretation(text: &str, dir: &Path) -> Result<Interpretation, String> {
    let file: InterpFile = serde_json::from_str(text).map_err(|e| e.to_string())?;
    let source = Arc::new(load_theory(&dir.join(&file.source))?);
    let target = match &file.target {
        Some(t) => Arc::new(load_theory(&dir.join(t))?),
        None => source.clone(),
    };
    let (ssig, tsig) = (&source.sig, &target.sig);
    for (table, known) in [
        (&file.sorts, ssig.sorts.iter().map(String::as_str).collect::<Vec<_>>()),
        (&file.funcs, ssig.funcs.iter().map(|f| f.name.as_str()).collect()),
        (&file.rels, ssig.rels.iter().map(|r| r.name.as_str()).collect()),
    ] {
        if let Some(k) = table.keys().find(|k| !known.contains(&k.as_str())) {
            return Err(format!("`{k}` is not a source symbol"));
        }
    }
    let mut sort_map = Vec::new();
    for s in &ssig.sorts {
        let name = file.sorts.get(s).unwrap_or(s);
        sort_map.push(tsig.sort_id(name).ok_or_else(|| format!("no target sort `{name}`"))?);
    }
    let image = |name: &str, text: Option<&String>, sorts: Vec<SortId>, graph: bool| {
        match text {
            Some(t) => parse_formula(tsig, t).map_err(|e| format!("image of `{name}`: {e}")),
            None => {
                let ctx = Context::of_sorts(&sorts);
                let n = sorts.len();
                let body = if graph {
                    let g = tsig.func_id(name).ok_or_else(|| format!("no target symbol `{name}`"))?;
                    Node::eq(Term::app(g, (0..n - 1).map(Term::Var)), Term::Var(n - 1))
                } else {
                    let q = tsig.rel_id(name).ok_or_else(|| format!("no target symbol `{name}`"))?;
                    Node::rel(q, (0..n).map(Term::Var))
                };
                Formula::new(tsig, ctx, body).map_err(|e| format!("image of `{name}`: {e}"))
            }
        }
    };
    let mut func_images = Vec::new();
    for f in &ssig.funcs {
        let mut sorts: Vec<SortId> = f.args.iter().map(|a| sort_map[a.0]).collect();
        sorts.push(sort_map[f.result.0]);
        func_images.push(image(&f.name, file.funcs.get(&f.name), sorts, true)?);
    }
    let mut rel_images = Vec::new();
    for r in &ssig.rels {
        let sorts: Vec<SortId> = r.args.iter().map(|a| sort_map[a.0]).collect();
        rel_images.push(image(&r.name, file.rels.get(&r.name), sorts, false)?);
    }
    let name = file
        .name
        .unwrap_or_else(|| format!("{}->{}", source.name, target.name));
    Interpretation::new(name, source, target, sort_map, func_images, rel_images)
        .map_err(|e| e.to_string())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn theories() -> PathBuf {
        PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("theories")
    }

    #[test]
    fn missing_entries_default_by_name() {
        let i = parse_interpretation(r#"{"source": "groups.thy"}"#, &theories()).unwrap();
        assert_eq!(i.name, "groups->groups");
        let id = Interpretation::identity(i.source.clone());
        assert_eq!(i.func_images, id.func_images);
    }

    #[test]
    fn explicit_images_are_parsed() {
        let text = r#"{"source": "pointed_sets.thy", "target": "groups.thy",
            "sorts": {"S": "G"}, "funcs": {"pt": "[x:G] x = e"}}"#;
        let i = parse_interpretation(text, &theories()).unwrap();
        assert_eq!(i.sort_map.len(), 1);
        assert_eq!(i.func_images[0].ctx().len(), 1);
    }

    #[test]
    fn bad_images_are_rejected() {
        let wrong_ctx = r#"{"source": "pointed_sets.thy", "target": "groups.thy",
            "sorts": {"S": "G"}, "funcs": {"pt": "[x:G, y:G] x = y"}}"#;
        assert!(parse_interpretation(wrong_ctx, &theories()).is_err());
        let unknown = r#"{"source": "groups.thy", "funcs": {"nope": "[x:G] x = e"}}"#;
        assert!(parse_interpretation(unknown, &theories()).unwrap_err().contains("nope"));
        let no_sort = r#"{"source": "pointed_sets.thy", "target": "groups.thy"}"#;
        assert!(parse_interpretation(no_sort, &theories()).is_err());
    }
}
