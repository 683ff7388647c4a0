//! The three prover outcomes: a proof, a countermodel and a bound report.

use cohere::cli::{parse_sequent, parse_theory};
use cohere::prover::{prove, ProofOutcome, ProverBounds};

fn main() {
    let groups = parse_theory(include_str!("../theories/groups.thy")).unwrap();
    let bounds = ProverBounds::default();
    let goals = [
        "[x:G] top |- exists y:G. mul(x, y) = e",
        "[x:G, y:G] top |- mul(x, y) = mul(y, x)",
    ];
    for g in goals {
        let s = parse_sequent(&groups, g).unwrap();
        report(g, &prove(&groups, &s, &bounds).unwrap());
    }

    let tight = ProverBounds { max_elements: 4, ..bounds };
    let s = parse_sequent(&groups, goals[1]).unwrap();
    report("same, at most 4 elements", &prove(&groups, &s, &tight).unwrap());
}

fn report(goal: &str, out: &ProofOutcome) {
    println!("{goal}");
    match out {
        ProofOutcome::Proved(trace) => println!("  proved after {} firings", trace.firings()),
        ProofOutcome::Countermodel { model, witness, .. } => {
            println!("  countermodel of size {:?} at {witness:?}", model.sizes());
            println!("  {}", serde_json::to_string(&model.to_data()).unwrap());
        }
        ProofOutcome::Unknown { report, .. } => println!("  unknown: {}", report.detail),
    }
}
