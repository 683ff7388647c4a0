//! Labelled models of the theory of groups, basic opens and the
//! specialization order between points.

use std::collections::BTreeMap;
use std::sync::Arc;

use cohere::cli::{parse_formula, parse_theory};
use cohere::models::enumerate_models;
use cohere::spectrum::{closure_leq, in_open, param_pool, BasicOpen, SpectrumGroupoid, SpectrumPoint};

fn main() {
    let groups = Arc::new(parse_theory(include_str!("../theories/groups.thy")).unwrap());
    let class = Arc::new(enumerate_models(&groups, 3).unwrap());
    let g = SpectrumGroupoid::build(class.clone(), 1);
    println!(
        "{} points, {} arrows, {} closure edges",
        g.points.len(),
        g.arrow_count(),
        g.closure_edges().len()
    );

    let k = param_pool(&groups.sig, 1).remove(0);
    let z3 = Arc::new(class.get(2).clone());
    let at = |a| {
        SpectrumPoint::new(2, z3.clone(), BTreeMap::from([(k.clone(), a)])).unwrap()
    };
    let bare = SpectrumPoint::new(2, z3.clone(), BTreeMap::new()).unwrap();

    let unit = BasicOpen::new(parse_formula(&groups.sig, "[x:G] x = e").unwrap(), vec![k.clone()]).unwrap();
    for a in 0..3 {
        println!("k0 = {a}: in V(k0 = e): {}", in_open(&at(a), &unit));
    }

    // an unlabelled point specializes to every labelling of the same model
    println!("bare <= (k0 = 1): {}", closure_leq(&bare, &at(1)).is_some());
    // the trivial endomorphism sends the label to the unit, but no
    // homomorphism moves the unit off itself
    println!("(k0 = 1) <= (k0 = 0): {}", closure_leq(&at(1), &at(0)).is_some());
    println!("(k0 = 0) <= (k0 = 1): {}", closure_leq(&at(0), &at(1)).is_some());
    println!("(k0 = 1) <= (k0 = 2): {:?}", closure_leq(&at(1), &at(2)).map(|h| h.maps));

    let small = SpectrumGroupoid::build(Arc::new(enumerate_models(&groups, 2).unwrap()), 1);
    print!("{}", small.to_dot());
}
