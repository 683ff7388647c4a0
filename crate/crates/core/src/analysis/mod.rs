//! Definable automorphisms and diagnostics for interpretations.
//!
//! Provability obligations go to the prover first; when it stops at a bound
//! the obligation is checked on an enumerated model class instead and tagged
//! as bound-validated. Semantic checks over finite classes report evidence at
//! the given bounds, never theorems.

mod interp;
mod isotropy;
mod local;

pub use local::{check_local_properties, closed_terms, CaseKind, LocalCase, LocalReport};

use serde::Serialize;
use thiserror::Error;

pub use interp::{
    check_faithful_reduct, check_functional, check_stabilizes_subobjects, check_supercovering,
    conceptual_completeness_report, conservativity_witness, nonfolding_spectral, CollapseWitness,
    separates_spectral, superdense_spectral, AnalysisBounds, FaithfulWitness,
    FunctionalityWitness, InterpretationReport, RowReport, RowResult, StabilityWitness,
    SupercoveringWitness,
};
pub use isotropy::{
    automorphism_sequents, check_definable_automorphism, check_normality, isotropy_at_model,
    AutomorphismCandidate, AutomorphismCheck, IsotropyEntry, IsotropyReport, IsotropyStatus,
    NormalityReport, Obligation, ObligationStatus,
};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Pass,
    Fail,
    Unknown,
}

impl Verdict {
    pub fn as_str(self) -> &'static str {
        match self {
            Verdict::Pass => "pass",
            Verdict::Fail => "fail",
            Verdict::Unknown => "unknown",
        }
    }

    /// Fail dominates unknown, which dominates pass.
    pub fn combine(self, other: Verdict) -> Verdict {
        match (self, other) {
            (Verdict::Fail, _) | (_, Verdict::Fail) => Verdict::Fail,
            (Verdict::Unknown, _) | (_, Verdict::Unknown) => Verdict::Unknown,
            _ => Verdict::Pass,
        }
    }
}

/// Provenance tag for verdicts that rest on a finite class rather than a
/// proof.
pub const BOUND_VALIDATED: &str = "bound-validated only";

#[derive(Debug, Error)]
pub enum AnalysisError {
    #[error("malformed candidate: {0}")]
    Candidate(String),
    #[error("model index {0} out of range")]
    Model(usize),
    #[error("reduct undefined on target model {model}: {detail}")]
    NotFunctional { model: usize, detail: String },
    #[error(transparent)]
    Models(#[from] crate::models::ModelError),
    #[error(transparent)]
    Transform(#[from] crate::transforms::TransformError),
    #[error(transparent)]
    Prover(#[from] crate::prover::ProverError),
}
