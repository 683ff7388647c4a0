//! Parse a theory in the text format, print it back and read a sequent
//! against it.

use cohere::cli::{parse_sequent, parse_theory};
use cohere::logic::{print_sequent, print_theory};

const MONOIDS: &str = "\
theory monoids
sort M
func one : -> M
func mul : M M -> M
axiom [x:M] top |- mul(one, x) = x
axiom [x:M] top |- mul(x, one) = x
axiom [x:M, y:M, z:M] top |- mul(mul(x, y), z) = mul(x, mul(y, z))
";

fn main() {
    let t = parse_theory(MONOIDS).expect("valid theory");
    println!("{}", print_theory(&t));

    // contexts may be left implicit
    let s = parse_sequent(&t, "top |- exists y:M. mul(x, y) = one").unwrap();
    println!("sequent: {}", print_sequent(&t.sig, &s));

    // errors carry a line and column
    let err = parse_theory("theory bad\nsort M\nfunc f : N -> M\n").unwrap_err();
    println!("error: {err}");
}
