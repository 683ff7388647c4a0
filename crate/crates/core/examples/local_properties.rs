//! Disjunction and existence properties of the diagram of Z2, checked case
//! by case.

use std::sync::Arc;

use cohere::analysis::check_local_properties;
use cohere::cli::parse_theory;
use cohere::models::enumerate_models;
use cohere::prover::ProverBounds;
use cohere::transforms::diagram_theory;

fn main() {
    let groups = Arc::new(parse_theory(include_str!("../theories/groups.thy")).unwrap());
    let z2 = enumerate_models(&groups, 2).unwrap().get(1).clone();
    let d = diagram_theory(&groups, &z2).unwrap();
    let class = enumerate_models(&d.theory, 2).unwrap();
    let r = check_local_properties(&d.theory, &class, 2, 1, &ProverBounds::default()).unwrap();
    println!("disjunction: {}", r.disjunction.as_str());
    println!("existence: {}", r.existence.as_str());
    println!("{} cases checked", r.cases.len());
}
