//! Abstract syntax for multi-sorted coherent and classical first-order logic.
//!
//! Formulas always travel with an explicit [`Context`]; the same body in a
//! longer context is a different formula, and moving between the two is an
//! explicit [`weaken`].

mod display;
mod interp;
mod ops;
mod signature;
mod syntax;

use serde::{Deserialize, Serialize};
use std::fmt;
use std::sync::Arc;
use thiserror::Error;

pub use display::{print_formula, print_node, print_sequent, print_term, print_theory};
pub use interp::Interpretation;
pub use ops::{substitute, substitute_classical, weaken};
pub use signature::{FuncId, FuncSym, RelId, RelSym, Signature, SignatureEmbedding, SortId};
pub use syntax::{Binder, ClassicalFormula, Context, Formula, Node, Sequent, Term};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum LogicError {
    #[error("duplicate symbol `{0}`")]
    DuplicateSymbol(String),
    #[error("unknown sort `{0}`")]
    UnknownSort(String),
    #[error("variable clash: `{0}` already in context")]
    VariableClash(String),
    #[error("sort mismatch: {0}")]
    SortMismatch(String),
    #[error("{0}")]
    IllFormed(Diagnostic),
    #[error("contexts of the two sides differ")]
    ContextMismatch,
    #[error("invalid interpretation: {0}")]
    BadInterpretation(String),
}

/// A located well-formedness complaint.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Diagnostic {
    pub location: String,
    pub message: String,
}

impl Diagnostic {
    pub fn new(location: impl Into<String>, message: impl Into<String>) -> Self {
        Diagnostic {
            location: location.into(),
            message: message.into(),
        }
    }
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.location, self.message)
    }
}

/// A signature with a finite list of axioms.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Theory {
    pub name: String,
    pub sig: Arc<Signature>,
    pub axioms: Vec<Sequent>,
    pub classical: bool,
}

impl Theory {
    pub fn new(name: impl Into<String>, sig: Signature) -> Self {
        Theory {
            name: name.into(),
            sig: Arc::new(sig),
            axioms: Vec::new(),
            classical: false,
        }
    }

    pub fn with_axioms(mut self, axioms: Vec<Sequent>) -> Self {
        self.axioms = axioms;
        self
    }

    pub fn classical(mut self, classical: bool) -> Self {
        self.classical = classical;
        self
    }

    /// Whether any axiom actually uses negation.
    pub fn uses_negation(&self) -> bool {
        self.axioms.iter().any(|a| !a.is_coherent())
    }
}

/// Checks every invariant of the signature and the axioms.
pub fn well_formed(theory: &Theory) -> Vec<Diagnostic> {
    let sig = &theory.sig;
    let mut out = Vec::new();
    for (i, s) in sig.sorts.iter().enumerate() {
        if sig.sorts[..i].contains(s) {
            out.push(Diagnostic::new(format!("sort `{s}`"), "duplicate sort name"));
        }
    }
    let mut names: Vec<&str> = Vec::new();
    let check_sort = |s: SortId, what: &str, out: &mut Vec<Diagnostic>| {
        if s.0 >= sig.sorts.len() {
            out.push(Diagnostic::new(what.to_string(), format!("undeclared sort {s}")));
        }
    };
    for f in &sig.funcs {
        let what = format!("function `{}`", f.name);
        if names.contains(&f.name.as_str()) {
            out.push(Diagnostic::new(&what, "duplicate symbol name"));
        }
        names.push(&f.name);
        for s in f.args.iter().chain(std::iter::once(&f.result)) {
            check_sort(*s, &what, &mut out);
        }
    }
    for r in &sig.rels {
        let what = format!("relation `{}`", r.name);
        if names.contains(&r.name.as_str()) {
            out.push(Diagnostic::new(&what, "duplicate symbol name"));
        }
        names.push(&r.name);
        for s in &r.args {
            check_sort(*s, &what, &mut out);
        }
    }
    if !out.is_empty() {
        return out;
    }
    for (i, ax) in theory.axioms.iter().enumerate() {
        for d in ax.check(sig, theory.classical, &format!("axiom {}", i + 1)) {
            if !out.contains(&d) {
                out.push(d);
            }
        }
    }
    out
}
