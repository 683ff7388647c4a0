//! Which families of subsets of groups are definable, and at what depth.

use std::sync::Arc;

use cohere::cli::{parse_formula, parse_theory};
use cohere::definability::{definable_pieces, find_defining_formula, EquivariantFamily};
use cohere::logic::{print_formula, Context, SortId};
use cohere::models::enumerate_models;

fn main() {
    let groups = Arc::new(parse_theory(include_str!("../theories/groups.thy")).unwrap());
    let class = Arc::new(enumerate_models(&groups, 4).unwrap());
    let sig = &groups.sig;
    let x = Context::new(vec![("x".into(), SortId(0))]).unwrap();

    // the squares, given pointwise
    let mul = sig.func_id("mul").unwrap();
    let squares = EquivariantFamily::from_fn(class.clone(), x.clone(), |_, m, t| {
        (0..m.sizes()[0]).any(|y| m.apply(mul, &[y, y]) == t[0])
    });
    for depth in 1..=2 {
        let d = find_defining_formula(&squares, depth, 2);
        match d.formula() {
            Some(f) => println!("squares, depth {depth}: {}", print_formula(sig, f.ctx(), f.body())),
            None => println!("squares, depth {depth}: {}", d.verdict()),
        }
    }

    let idem = parse_formula(sig, "[x:G] mul(x, x) = x").unwrap();
    let units = EquivariantFamily::from_formula(class.clone(), &idem).unwrap();
    let pieces = definable_pieces(&units, 1, 1).unwrap();
    println!("{} formulas inside x*x = x, covering: {}", pieces.formulas.len(), pieces.covers);

    // element 1 of every group: not preserved by automorphisms
    let first = EquivariantFamily::from_fn(class, x, |_, m, t| m.sizes()[0] > 2 && t[0] == 1);
    match first.equivariance_witness() {
        Some(w) => println!("not equivariant: {}", w.to_json()),
        None => println!("equivariant"),
    }
}
