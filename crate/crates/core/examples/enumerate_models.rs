//! Groups of order at most 6 up to isomorphism, with automorphism counts and
//! an on-disk cache.

use std::sync::Arc;

use cohere::cli::parse_theory;
use cohere::models::{enumerate_models, enumerate_models_cached, ModelCache, SearchLimits};

fn main() {
    let groups = Arc::new(parse_theory(include_str!("../theories/groups.thy")).unwrap());
    let class = enumerate_models(&groups, 6).unwrap();
    println!("{} groups of order at most 6", class.len());
    for (i, m) in class.models().iter().enumerate() {
        println!("  #{i}: order {}, {} automorphisms", m.sizes()[0], class.automorphisms(i).len());
    }

    let dir = tempfile::tempdir().unwrap();
    let cache = ModelCache::new(dir.path());
    let cold = enumerate_models_cached(&groups, 4, SearchLimits::default(), Some(&cache)).unwrap();
    let warm = enumerate_models_cached(&groups, 4, SearchLimits::default(), Some(&cache)).unwrap();
    assert_eq!(cold.forms(), warm.forms());
    println!("cached run agrees: {} groups of order at most 4", warm.len());
}
