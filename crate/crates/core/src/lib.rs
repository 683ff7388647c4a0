//! Finite-model workbench for multi-sorted coherent first-order theories.
//!
//! The crate is organised bottom-up:
//!
//! * [`logic`]: signatures, formulas in context, sequents, theories and
//!   interpretations;
//! * [`models`]: finite structures, evaluation of definable sets, homomorphism
//!   search, canonical forms and model enumeration;
//! * [`prover`]: a bounded chase for coherent sequents with a finite
//!   countermodel fallback;
//! * [`transforms`]: Morleyization, diagrams, slices, pushouts, copowers and
//!   reducts;
//! * [`spectrum`]: labelled models, basic opens and the specialization order;
//! * [`definability`]: equivariant families and bounded formula search;
//! * [`analysis`]: definable automorphisms and interpretation diagnostics;
//! * [`cli`]: the theory file format, run configuration and reports.

pub mod logic;
pub mod models;
pub mod prover;
pub mod transforms;
pub mod spectrum;
pub mod definability;
pub mod analysis;
pub mod cli;
