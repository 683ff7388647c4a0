//! Definable automorphisms: conjugation in groups, negation in abelian
//! groups, and the stalk of isotropy at Z3.

use std::sync::Arc;

use cohere::analysis::{
    check_definable_automorphism, check_normality, isotropy_at_model, AutomorphismCandidate,
};
use cohere::cli::{parse_formula, parse_theory};
use cohere::logic::{Context, SortId};
use cohere::models::enumerate_models;
use cohere::prover::ProverBounds;

fn main() {
    let bounds = ProverBounds {
        max_elements: 32,
        max_firings: 5000,
        ..ProverBounds::default()
    };
    let groups = Arc::new(parse_theory(include_str!("../theories/groups.thy")).unwrap());
    let conj = AutomorphismCandidate::new(
        &groups.sig,
        Context::new(vec![("g".into(), SortId(0))]).unwrap(),
        vec![parse_formula(&groups.sig, "[y:G, y2:G, g:G] y2 = mul(mul(g, y), inv(g))").unwrap()],
    )
    .unwrap();
    let check = check_definable_automorphism(&groups, &conj, &bounds, None).unwrap();
    println!("conjugation: {}", check.verdict.as_str());
    for o in &check.obligations {
        println!("  {} {}: {}", o.schema, o.symbol, o.status.as_str());
    }

    let abelian = Arc::new(parse_theory(include_str!("../theories/abelian_groups.thy")).unwrap());
    let neg = AutomorphismCandidate::new(
        &abelian.sig,
        Context::empty(),
        vec![parse_formula(&abelian.sig, "[y:A, y2:A] add(y, y2) = zero").unwrap()],
    )
    .unwrap();
    let check = check_definable_automorphism(&abelian, &neg, &bounds, None).unwrap();
    println!("negation: {}", check.verdict.as_str());

    let class = enumerate_models(&groups, 3).unwrap();
    let stalk = isotropy_at_model(&class, 2, 1, 1, 1).unwrap();
    for e in &stalk.entries {
        println!("Z3 automorphism {:?}: {:?}", e.automorphism.maps[0], e.status);
    }
    let normal = check_normality(&class, &stalk);
    println!("closed under composition: {}, normal: {}", stalk.closed, normal.holds);
}
