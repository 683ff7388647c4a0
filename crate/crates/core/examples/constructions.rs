//! Theories built from other theories, counted by their models: the diagram
//! of Z2, a slice, the copower and a pushout.

use std::path::Path;
use std::sync::Arc;

use cohere::cli::{load_interpretation, parse_formula, parse_theory};
use cohere::logic::Theory;
use cohere::models::enumerate_models;
use cohere::transforms::{copower, diagram_theory, pushout, slice_theory};

const N: usize = 4;

fn count(t: &Arc<Theory>) -> usize {
    enumerate_models(t, N).unwrap().len()
}

fn main() {
    let groups = Arc::new(parse_theory(include_str!("../theories/groups.thy")).unwrap());
    let class = enumerate_models(&groups, N).unwrap();
    let z2 = class.models().iter().find(|m| m.sizes() == [2]).unwrap();

    // models: groups N with a homomorphism Z2 -> N
    let d = diagram_theory(&groups, z2).unwrap();
    println!("diagram(Z2): {} models", count(&d.theory));

    // models: groups with a chosen element of order dividing 2
    let phi = parse_formula(&groups.sig, "[x:G] mul(x, x) = e").unwrap();
    let s = slice_theory(&groups, &phi).unwrap();
    println!("slice over x*x = e: {} models", count(&s.theory));

    // models: pairs of groups with a homomorphism between them
    let c = copower(&groups);
    println!("copower: {} models", count(&c.theory));

    let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("theories");
    let left = load_interpretation(&dir.join("points_groups.json")).unwrap();
    let right = load_interpretation(&dir.join("points_abelian.json")).unwrap();
    let p = pushout(&left, &right).unwrap();
    println!("pushout over pointed sets: {} models", count(&p.theory));
}
