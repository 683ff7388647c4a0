//! Theory files, run configuration, reports and command dispatch.

mod commands;
mod dsl;
mod interp_file;
mod report;

pub use commands::{execute, run, Cli, Command, Failure, GlobalOpts, Output};
pub use dsl::{
    parse_classical_formula, parse_formula, parse_formula_in, parse_sequent, parse_theory,
    ParseError,
};
pub use interp_file::{load_interpretation, load_theory, parse_interpretation};
pub use report::{provenance, Format, Report, RunConfig, EXIT_INPUT, SCHEMA};
