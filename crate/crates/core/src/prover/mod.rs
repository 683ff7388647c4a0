//! Bounded forward chaining for coherent sequents.
//!
//! [`prove`] starts from fresh elements for the context of the sequent,
//! asserts its left side and chases the axioms until the right side holds on
//! every branch, a branch saturates, or a bound fires. Saturated branches are
//! read back as finite structures; when the chase stops at a bound a finite
//! countermodel search takes over. Every countermodel is re-checked against
//! the theory before it is returned.

mod chase;
mod mace;
mod normal;

use serde::Serialize;
use thiserror::Error;

use crate::logic::{Sequent, Theory};
use crate::models::{Elem, FiniteStructure, ModelClass};

use chase::{BranchEnd, Chase};
use mace::MaceEnd;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct ProverBounds {
    pub max_elements: usize,
    pub max_firings: usize,
    pub max_branches: usize,
    /// Node budget shared by the countermodel search over all sizes.
    pub countermodel_nodes: u64,
}

impl Default for ProverBounds {
    fn default() -> Self {
        ProverBounds {
            max_elements: 8,
            max_firings: 500,
            max_branches: 64,
            countermodel_nodes: 300_000,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum BoundKind {
    Elements,
    Firings,
    Branches,
    /// A branch saturated but could not be read back as a model.
    Saturated,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct TraceEvent {
    pub step: usize,
    pub kind: String,
    /// 1-based axiom index.
    pub axiom: Option<usize>,
    pub tuple: Vec<usize>,
    /// Branch path, dot separated.
    pub path: String,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct Trace {
    pub events: Vec<TraceEvent>,
}

impl Trace {
    pub fn to_json(&self) -> serde_json::Value {
        serde_json::to_value(self).expect("trace serializes")
    }

    pub fn firings(&self) -> usize {
        self.events
            .iter()
            .filter(|e| e.kind == "fire" || e.kind == "branch")
            .count()
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct BoundReport {
    pub bound: BoundKind,
    pub detail: String,
    pub bounds: ProverBounds,
}

#[derive(Clone, Debug)]
pub enum ProofOutcome {
    Proved(Trace),
    Countermodel {
        model: FiniteStructure,
        witness: Vec<Elem>,
        trace: Trace,
    },
    Unknown {
        report: BoundReport,
        trace: Trace,
    },
}

impl ProofOutcome {
    pub fn is_proved(&self) -> bool {
        matches!(self, ProofOutcome::Proved(_))
    }

    pub fn is_countermodel(&self) -> bool {
        matches!(self, ProofOutcome::Countermodel { .. })
    }

    pub fn is_unknown(&self) -> bool {
        matches!(self, ProofOutcome::Unknown { .. })
    }

    pub fn trace(&self) -> &Trace {
        match self {
            ProofOutcome::Proved(t) => t,
            ProofOutcome::Countermodel { trace, .. } | ProofOutcome::Unknown { trace, .. } => trace,
        }
    }

    pub fn verdict(&self) -> &'static str {
        match self {
            ProofOutcome::Proved(_) => "proved",
            ProofOutcome::Countermodel { .. } => "countermodel",
            ProofOutcome::Unknown { .. } => "unknown",
        }
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ProverError {
    #[error("negation is not allowed: {0}")]
    NotCoherent(String),
}

pub fn prove(
    theory: &Theory,
    sequent: &Sequent,
    bounds: &ProverBounds,
) -> Result<ProofOutcome, ProverError> {
    if let Some(i) = theory.axioms.iter().position(|a| !a.is_coherent()) {
        return Err(ProverError::NotCoherent(format!("axiom {}", i + 1)));
    }
    if !sequent.is_coherent() {
        return Err(ProverError::NotCoherent("goal sequent".into()));
    }
    let mut chase = Chase::new(theory, sequent, bounds);
    let end = chase.run();
    let mut trace = Trace {
        events: std::mem::take(&mut chase.trace),
    };
    let (bound, detail) = match end {
        BranchEnd::Closed => return Ok(ProofOutcome::Proved(trace)),
        BranchEnd::Countermodel(model, witness) => {
            return Ok(ProofOutcome::Countermodel {
                model,
                witness,
                trace,
            })
        }
        BranchEnd::Open(bound, detail) => (bound, detail),
    };
    let step = trace.events.len();
    trace.events.push(TraceEvent {
        step,
        kind: "countermodel_search".into(),
        axiom: None,
        tuple: vec![],
        path: String::new(),
    });
    let detail = match mace::search(theory, sequent, bounds) {
        MaceEnd::Found(model, witness) => {
            return Ok(ProofOutcome::Countermodel {
                model,
                witness,
                trace,
            })
        }
        MaceEnd::Exhausted => format!(
            "chase stopped at {detail}; no countermodel with at most {} elements",
            bounds.max_elements
        ),
        MaceEnd::Budget => format!(
            "chase stopped at {detail}; countermodel search exceeded {} nodes",
            bounds.countermodel_nodes
        ),
    };
    Ok(ProofOutcome::Unknown {
        report: BoundReport {
            bound,
            detail,
            bounds: *bounds,
        },
        trace,
    })
}

/// Whether every model in the class satisfies the sequent. A necessary
/// condition for provability only.
pub fn entails_on_class(class: &ModelClass, sequent: &Sequent) -> bool {
    class.entails(sequent)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cli::{parse_sequent, parse_theory};
    use crate::models::{is_model, satisfies};

    fn check(src: &str, goal: &str) -> ProofOutcome {
        let t = parse_theory(src).unwrap();
        let s = parse_sequent(&t, goal).unwrap();
        let out = prove(&t, &s, &ProverBounds::default()).unwrap();
        if let ProofOutcome::Countermodel { model, .. } = &out {
            assert!(is_model(model, &t));
            assert!(!satisfies(model, &s));
        }
        out
    }

    const UNARY: &str = "theory u\nsort A\nrel P : A\nrel Q : A\n";

    #[test]
    fn identity_sequent_is_proved() {
        let t = "theory r\nsort A\nrel R : A A\n";
        assert!(check(t, "[x:A] exists y:A. R(x,y) |- exists y:A. R(x,y)").is_proved());
    }

    #[test]
    fn one_branch_closes_on_bottom() {
        let src = format!("{UNARY}axiom [x:A] top |- P(x) \\/ Q(x)\naxiom [x:A] Q(x) |- bot\n");
        let out = check(&src, "[x:A] top |- P(x)");
        assert!(out.is_proved());
        assert!(out.trace().events.iter().any(|e| e.kind == "branch"));
    }

    #[test]
    fn saturation_gives_singleton_countermodel() {
        match check(UNARY, "[x:A] top |- P(x)") {
            ProofOutcome::Countermodel { model, witness, .. } => {
                assert_eq!(model.sizes(), &[1]);
                assert_eq!(witness, vec![0]);
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn constants_inhabit_their_sort() {
        let src = include_str!("../../theories/pointed_sets.thy");
        let out = check(src, "top |- exists x:S. top");
        assert!(out.is_proved());
        assert!(out.trace().events.iter().any(|e| e.kind == "totalize"));
    }

    #[test]
    fn group_inverses_exist() {
        let src = include_str!("../../theories/groups.thy");
        assert!(check(src, "[x:G] top |- exists y:G. mul(x,y) = e").is_proved());
        assert!(check(src, "[x:G] top |- mul(inv(x), x) = e").is_proved());
    }

    #[test]
    fn commutativity_is_refuted_by_a_nonabelian_group() {
        let src = include_str!("../../theories/groups.thy");
        match check(src, "[x:G, y:G] top |- mul(x,y) = mul(y,x)") {
            ProofOutcome::Countermodel { model, .. } => assert_eq!(model.sizes(), &[6]),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn small_element_bound_is_reported() {
        let t = parse_theory(include_str!("../../theories/groups.thy")).unwrap();
        let s = parse_sequent(&t, "[x:G, y:G] top |- mul(x,y) = mul(y,x)").unwrap();
        let bounds = ProverBounds {
            max_elements: 4,
            ..ProverBounds::default()
        };
        let out = prove(&t, &s, &bounds).unwrap();
        assert!(out.is_unknown(), "{out:?}");
    }

    #[test]
    fn deterministic() {
        let src = format!("{UNARY}axiom [x:A] top |- P(x) \\/ Q(x)\n");
        let a = check(&src, "[x:A] top |- P(x)");
        let b = check(&src, "[x:A] top |- P(x)");
        assert_eq!(a.trace(), b.trace());
    }
}
