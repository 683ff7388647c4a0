//! Diagnostics for four interpretations into the theory of groups, one row
//! failing in each of the last three.

use std::path::Path;

use cohere::analysis::{conceptual_completeness_report, AnalysisBounds};
use cohere::cli::load_interpretation;
use cohere::models::enumerate_models;

fn main() {
    let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("theories");
    let bounds = AnalysisBounds::default();
    for file in ["identity_groups.json", "quotient.json", "new_relation.json", "new_sort.json"] {
        let i = load_interpretation(&dir.join(file)).unwrap();
        let src = enumerate_models(&i.source, bounds.n).unwrap();
        let tgt = enumerate_models(&i.target, bounds.n).unwrap();
        let r = conceptual_completeness_report(&i, &src, &tgt, &bounds).unwrap();
        println!("{} ({})", i.name, r.verdict().as_str());
        for row in &r.rows {
            println!(
                "  {}: {:<28} {:<5} {:<30} {}",
                row.row,
                row.semantic_name,
                row.semantic.verdict.as_str(),
                row.spectral_name,
                row.spectral.verdict.as_str()
            );
        }
    }
}
