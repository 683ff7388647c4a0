//! Finite structures and everything computed from them by exhaustive search.

mod cache;
mod canon;
mod class;
mod eval;
mod hom;
mod search;
mod structure;

use thiserror::Error;

pub use cache::{enumerate_models_cached, ModelCache, CACHE_ENV};
pub use canon::{canonical_form, canonical_structure, canonical_with_perm};
pub use class::{enumerate_models, enumerate_models_with, ModelClass};
pub use eval::{
    eval, eval_classical, eval_term, first_violated_axiom, holds_at, is_model, satisfies,
    violation, DefinableSet,
};
pub use hom::{
    automorphisms, enumerate_homs, enumerate_isos, is_homomorphism, is_isomorphism, HomSearch,
    Homomorphism,
};
pub use search::{
    enumerate_expansions, enumerate_labelled, enumerate_representatives, size_vectors, ModelSearch, SearchLimits,
};
pub use structure::{Elem, FiniteStructure, StructureData, Tuples};

pub(crate) use eval::eval_node;
pub(crate) use search::with_fresh_constants;
pub(crate) use structure::table_len;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ModelError {
    #[error("invalid structure: {0}")]
    Invalid(String),
    #[error("signature mismatch")]
    SignatureMismatch,
    #[error("bound exceeded: {0}")]
    BoundExceeded(String),
    #[error("cache: {0}")]
    Cache(String),
}
