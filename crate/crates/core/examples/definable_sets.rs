//! Definable sets of a few formulas in the cyclic group of order 4.

use std::sync::Arc;

use cohere::cli::{parse_formula, parse_theory};
use cohere::models::{enumerate_models, eval, is_model};

fn main() {
    let groups = Arc::new(parse_theory(include_str!("../theories/groups.thy")).unwrap());
    let class = enumerate_models(&groups, 4).unwrap();
    let z4 = class
        .models()
        .iter()
        .find(|m| m.sizes() == [4] && class.automorphisms(class.index_of(m).unwrap()).len() == 2)
        .expect("Z4 is in the class");
    assert!(is_model(z4, &groups));

    for text in [
        "[x:G] mul(x, x) = e",
        "[x:G] exists y:G. x = mul(y, y)",
        "[x:G, y:G] mul(x, y) = e",
        "[x:G] x = e \\/ mul(x, x) = x",
    ] {
        let f = parse_formula(&groups.sig, text).unwrap();
        let set = eval(z4, &f).unwrap();
        println!("{text}\n  {} tuples: {:?}", set.len(), set.tuples());
    }
}
