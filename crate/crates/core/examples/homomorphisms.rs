//! Homomorphisms between small groups and the automorphisms of the Klein
//! four-group.

use std::sync::Arc;

use cohere::cli::parse_theory;
use cohere::models::{automorphisms, enumerate_homs, enumerate_isos, enumerate_models};

fn main() {
    let groups = Arc::new(parse_theory(include_str!("../theories/groups.thy")).unwrap());
    let class = enumerate_models(&groups, 4).unwrap();
    for i in 0..class.len() {
        for j in 0..class.len() {
            let homs = enumerate_homs(class.get(i), class.get(j));
            print!("{:>3}", homs.len());
        }
        println!();
    }

    let klein = class
        .models()
        .iter()
        .find(|m| m.sizes() == [4] && automorphisms(m).len() == 6)
        .unwrap();
    println!("Aut(V4) has {} elements:", automorphisms(klein).len());
    for a in automorphisms(klein) {
        println!("  {:?}", a.maps[0]);
    }

    let copy = klein.relabel(&[vec![3, 2, 1, 0]]);
    println!("isomorphisms onto a relabelled copy: {}", enumerate_isos(klein, &copy).len());
}
