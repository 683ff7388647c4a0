//! Morleyization of a classical theory: new relation symbols for negated
//! subformulas, and the expansion of a classical model.

use std::sync::Arc;

use cohere::cli::{parse_classical_formula, parse_theory};
use cohere::logic::print_theory;
use cohere::models::{enumerate_models, eval, eval_classical, is_model};
use cohere::transforms::morleyize_with;

fn main() {
    let t = Arc::new(parse_theory(include_str!("../theories/unary_classical.thy")).unwrap());
    // x is the only element with P, if any has it
    let phi = parse_classical_formula(&t.sig, "[x:A] not (exists y:A. P(y) /\\ not x = y)").unwrap();
    let star = morleyize_with(&t, std::slice::from_ref(&phi));
    println!("{}", print_theory(&star.theory));

    let classical = enumerate_models(&t, 3).unwrap();
    let tr = star.translate_formula(&phi).unwrap();
    for m in classical.models() {
        let e = star.expand(m);
        assert!(is_model(&e, &star.theory));
        let direct = eval_classical(m, &phi).unwrap();
        let translated = eval(&e, &tr).unwrap();
        println!("size {}: {:?} = {:?}", m.sizes()[0], direct.tuples(), translated.tuples());
    }
}
