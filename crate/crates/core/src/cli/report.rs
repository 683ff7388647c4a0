//! Run configuration and the versioned report every command emits.

use std::fmt::Write as _;
use std::path::PathBuf;

use serde::Serialize;
use serde_json::Value;

use crate::analysis::Verdict;
use crate::prover::ProverBounds;

pub const SCHEMA: &str = "cohere-report/1";

/// Exit status for unreadable or malformed input.
pub const EXIT_INPUT: i32 = 3;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Text,
    Json,
}

/// Finite stand-ins for the size bounds of the theory: carrier bound `n`,
/// formula and term depth, parameter labels per sort and prover limits.
/// The seed is echoed but unused since every algorithm is deterministic.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RunConfig {
    pub n: usize,
    pub depth: usize,
    pub label_budget: usize,
    pub term_depth: usize,
    pub prover: ProverBounds,
    pub format: Format,
    pub cache_dir: Option<PathBuf>,
    pub seed: u64,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            n: 4,
            depth: 3,
            label_budget: 3,
            term_depth: 2,
            prover: ProverBounds::default(),
            format: Format::Text,
            cache_dir: None,
            seed: 0,
        }
    }
}

impl RunConfig {
    pub fn validate(&self) -> Result<(), String> {
        let p = &self.prover;
        let fields = [
            ("n", self.n as u64),
            ("depth", self.depth as u64),
            ("label-budget", self.label_budget as u64),
            ("term-depth", self.term_depth as u64),
            ("max-elements", p.max_elements as u64),
            ("max-firings", p.max_firings as u64),
            ("max-branches", p.max_branches as u64),
            ("countermodel-nodes", p.countermodel_nodes),
        ];
        match fields.iter().find(|(_, v)| *v == 0) {
            Some((name, _)) => Err(format!("--{name} must be positive")),
            None => Ok(()),
        }
    }
}

/// How a verdict was reached.
pub mod provenance {
    /// A derivation found by the prover.
    pub const PROVED: &str = "proved";
    /// A finite model re-checked against the sequent.
    pub const COUNTERMODEL: &str = "countermodel";
    /// Exhaustive over the enumerated class; says nothing beyond the bound.
    pub const EXHAUSTIVE: &str = "exhaustive at bound";
    pub use crate::analysis::BOUND_VALIDATED;
    /// Parsing and well-formedness only.
    pub const SYNTACTIC: &str = "syntactic";
    /// A syntactic construction with nothing to decide.
    pub const CONSTRUCTION: &str = "construction";
    /// The prover stopped at a bound.
    pub const UNKNOWN: &str = "unknown at bound";
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Report {
    pub schema: &'static str,
    pub command: String,
    pub inputs: Value,
    pub config: RunConfig,
    pub verdict: Verdict,
    pub provenance: String,
    pub result: Value,
}

impl Report {
    pub fn new(command: &str, inputs: Value, config: &RunConfig) -> Self {
        Report {
            schema: SCHEMA,
            command: command.to_string(),
            inputs,
            config: config.clone(),
            verdict: Verdict::Pass,
            provenance: provenance::CONSTRUCTION.to_string(),
            result: Value::Null,
        }
    }

    pub fn with(mut self, verdict: Verdict, provenance: &str, result: Value) -> Self {
        self.verdict = verdict;
        self.provenance = provenance.to_string();
        self.result = result;
        self
    }

    pub fn exit_code(&self) -> i32 {
        match self.verdict {
            Verdict::Pass => 0,
            Verdict::Fail => 1,
            Verdict::Unknown => 2,
        }
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "command: {}", self.command);
        let _ = writeln!(out, "verdict: {}", self.verdict.as_str());
        let _ = writeln!(out, "provenance: {}", self.provenance);
        out.push_str("inputs:\n");
        render(&self.inputs, 1, &mut out);
        out.push_str("config:\n");
        render(&serde_json::to_value(&self.config).expect("config serializes"), 1, &mut out);
        out.push_str("result:\n");
        render(&self.result, 1, &mut out);
        out
    }

    pub fn render(&self, format: Format) -> String {
        match format {
            Format::Json => self.to_json(),
            Format::Text => self.to_text(),
        }
    }
}

fn scalar(v: &Value) -> Option<String> {
    match v {
        Value::Null => Some("-".into()),
        Value::Bool(b) => Some(b.to_string()),
        Value::Number(n) => Some(n.to_string()),
        Value::String(s) => Some(if s.contains('\n') { format!("|\n{s}") } else { s.clone() }),
        Value::Array(items) if items.iter().all(|i| !i.is_object()) && !nested(items) => Some(
            serde_json::to_string(v).expect("plain arrays serialize"),
        ),
        _ => None,
    }
}

fn nested(items: &[Value]) -> bool {
    let text = serde_json::to_string(items).expect("serializes");
    text.len() > 100
}

fn render(v: &Value, indent: usize, out: &mut String) {
    let pad = "  ".repeat(indent);
    match v {
        Value::Object(map) => {
            for (k, item) in map {
                match scalar(item) {
                    Some(s) if s.starts_with('|') => {
                        let _ = writeln!(out, "{pad}{k}:");
                        for line in s[2..].lines() {
                            let _ = writeln!(out, "{pad}  {line}");
                        }
                    }
                    Some(s) => {
                        let _ = writeln!(out, "{pad}{k}: {s}");
                    }
                    None => {
                        let _ = writeln!(out, "{pad}{k}:");
                        render(item, indent + 1, out);
                    }
                }
            }
        }
        Value::Array(items) => {
            for item in items {
                match scalar(item) {
                    Some(s) => {
                        let _ = writeln!(out, "{pad}- {s}");
                    }
                    None => {
                        let _ = writeln!(out, "{pad}-");
                        render(item, indent + 1, out);
                    }
                }
            }
        }
        other => {
            let _ = writeln!(out, "{pad}{}", scalar(other).unwrap_or_default());
        }
    }
}
