use std::collections::BTreeMap;
use std::sync::{Arc, OnceLock};

use proptest::prelude::*;
use proptest::sample::Index;

use cohere::analysis::isotropy_at_model;
use cohere::cli::{parse_formula, parse_sequent, parse_theory};
use cohere::definability::FormulaSpace;
use cohere::logic::{print_formula, Context, Formula, SortId, Theory};
use cohere::models::{
    canonical_form, enumerate_homs, enumerate_isos, enumerate_models, eval, is_homomorphism,
    is_isomorphism, is_model, FiniteStructure, Homomorphism, ModelClass,
};
use cohere::prover::{entails_on_class, prove, ProofOutcome, ProverBounds};
use cohere::spectrum::{closure_leq, param_pool, SpectrumPoint};
use cohere::transforms::morleyize;

fn theory(src: &str) -> Arc<Theory> {
    Arc::new(parse_theory(src).unwrap())
}

struct Fixture {
    theory: Arc<Theory>,
    class: ModelClass,
    formulas: Vec<Formula>,
}

fn fixture(src: &'static str, n: usize) -> Fixture {
    let theory = theory(src);
    let class = enumerate_models(&theory, n).unwrap();
    let mut space = FormulaSpace::new(theory.sig.clone(), class.models(), 1);
    let mut formulas = Vec::new();
    for s in theory.sig.sort_ids() {
        for vars in [vec![("x".to_string(), s)], vec![("x".to_string(), s), ("y".to_string(), s)]] {
            formulas.extend(space.formulas(&Context::new(vars).unwrap(), 2));
        }
    }
    Fixture { theory, class, formulas }
}

fn groups() -> &'static Fixture {
    static F: OnceLock<Fixture> = OnceLock::new();
    F.get_or_init(|| fixture(include_str!("../theories/groups.thy"), 4))
}

fn posets() -> &'static Fixture {
    static F: OnceLock<Fixture> = OnceLock::new();
    F.get_or_init(|| fixture(include_str!("../theories/posets.thy"), 3))
}

fn permutation(n: usize) -> impl Strategy<Value = Vec<usize>> {
    Just((0..n).collect::<Vec<_>>()).prop_shuffle()
}

fn model_and_perm(f: &'static Fixture) -> impl Strategy<Value = (usize, Vec<usize>)> {
    (0..f.class.len()).prop_flat_map(|i| (Just(i), permutation(f.class.get(i).sizes()[0])))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn relabelling_preserves_definable_sets((i, perm) in model_and_perm(groups()), k in any::<Index>()) {
        let f = groups();
        let m = f.class.get(i);
        let n = m.relabel(std::slice::from_ref(&perm));
        prop_assert_eq!(canonical_form(m), canonical_form(&n));
        let h = Homomorphism { maps: vec![perm.clone()] };
        prop_assert!(is_isomorphism(m, &n, &h));
        let phi = &f.formulas[k.index(f.formulas.len())];
        let here = eval(m, phi).unwrap();
        let there = eval(&n, phi).unwrap();
        let mut moved: Vec<Vec<usize>> = here.tuples().iter().map(|t| t.iter().map(|a| perm[*a]).collect()).collect();
        let mut expected = there.tuples();
        expected.sort();
        moved.sort();
        prop_assert_eq!(moved, expected);
    }

    #[test]
    fn printed_formulas_parse_back(k in any::<Index>(), which in any::<bool>()) {
        let f = if which { groups() } else { posets() };
        let phi = &f.formulas[k.index(f.formulas.len())];
        let text = print_formula(&f.theory.sig, phi.ctx(), phi.body());
        let back = parse_formula(&f.theory.sig, &text).unwrap();
        prop_assert_eq!(print_formula(&f.theory.sig, back.ctx(), back.body()), text);
        for m in f.class.models() {
            prop_assert_eq!(eval(m, phi).unwrap(), eval(m, &back).unwrap());
        }
    }

    #[test]
    fn homomorphisms_compose(i in 0..5usize, j in 0..5usize, k in 0..5usize) {
        let c = &groups().class;
        for g in enumerate_homs(c.get(i), c.get(j)) {
            for h in enumerate_homs(c.get(j), c.get(k)) {
                prop_assert!(is_homomorphism(c.get(i), c.get(k), &h.compose(&g)));
            }
        }
        for a in enumerate_isos(c.get(i), c.get(j)) {
            prop_assert!(is_isomorphism(c.get(j), c.get(i), &a.inverse()));
        }
    }

    #[test]
    fn closure_is_a_preorder(
        picks in proptest::collection::vec((any::<Index>(), proptest::collection::vec(proptest::option::of(0..4usize), 2)), 3)
    ) {
        let f = posets();
        let pool = param_pool(&f.theory.sig, 2);
        let points: Vec<SpectrumPoint> = picks
            .iter()
            .map(|(i, vals)| {
                let model = i.index(f.class.len());
                let m = Arc::new(f.class.get(model).clone());
                let env: BTreeMap<_, _> = pool
                    .iter()
                    .zip(vals)
                    .filter_map(|(p, v)| v.filter(|a| *a < m.sizes()[0]).map(|a| (p.clone(), a)))
                    .collect();
                SpectrumPoint::new(model, m, env).unwrap()
            })
            .collect();
        for p in &points {
            prop_assert!(closure_leq(p, p).is_some());
        }
        let (a, b, c) = (&points[0], &points[1], &points[2]);
        if closure_leq(a, b).is_some() && closure_leq(b, c).is_some() {
            prop_assert!(closure_leq(a, c).is_some());
        }
    }

    #[test]
    fn morleyized_expansions_are_models(size in 0..4usize, bits in proptest::collection::vec(any::<bool>(), 3)) {
        let t = theory(include_str!("../theories/unary_classical.thy"));
        let star = morleyize(&t);
        let m = FiniteStructure::from_fn(t.sig.clone(), vec![size], |_, _| 0, |_, a| bits[a[0]]).unwrap();
        let classical = enumerate_models(&t, 3).unwrap();
        let is_t_model = classical.index_of(&m).is_some();
        prop_assert_eq!(is_model(&star.expand(&m), &star.theory), is_t_model);
    }
}

const EQUATIONS: [&str; 8] = [
    "x", "e", "mul(x, y)", "mul(y, x)", "inv(x)", "mul(x, inv(x))", "inv(mul(x, y))", "mul(inv(y), inv(x))",
];

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn proved_equations_hold_in_small_groups(a in 0..8usize, b in 0..8usize) {
        let f = groups();
        let text = format!("[x:G, y:G] top |- {} = {}", EQUATIONS[a], EQUATIONS[b]);
        let s = parse_sequent(&f.theory, &text).unwrap();
        match prove(&f.theory, &s, &ProverBounds::default()).unwrap() {
            ProofOutcome::Proved(_) => prop_assert!(entails_on_class(&f.class, &s)),
            ProofOutcome::Countermodel { model, .. } => {
                prop_assert!(is_model(&model, &f.theory));
                prop_assert!(cohere::models::violation(&model, &s).is_some());
            }
            ProofOutcome::Unknown { .. } => {}
        }
    }
}

/// Conjugations `y ↦ g·y·g⁻¹` of `m`, as permutations.
fn inner_automorphisms(t: &Theory, m: &FiniteStructure) -> Vec<Vec<usize>> {
    let mul = t.sig.func_id("mul").unwrap();
    let inv = t.sig.func_id("inv").unwrap();
    let n = m.sizes()[0];
    let mut out: Vec<Vec<usize>> = (0..n)
        .map(|g| (0..n).map(|y| m.apply(mul, &[m.apply(mul, &[g, y]), m.apply(inv, &[g])])).collect())
        .collect();
    out.sort();
    out.dedup();
    out
}

fn m_definable(class: &ModelClass, i: usize) -> Vec<Vec<usize>> {
    let r = isotropy_at_model(class, i, 1, 2, 1).unwrap();
    assert!(r.closed);
    let mut found: Vec<Vec<usize>> = r.m_definable().iter().map(|h| h.maps[0].clone()).collect();
    found.sort();
    found
}

#[test]
fn klein_four_isotropy_is_trivial() {
    let f = groups();
    let v4 = (0..f.class.len())
        .find(|i| f.class.get(*i).sizes() == [4] && f.class.automorphisms(*i).len() == 6)
        .unwrap();
    let found = m_definable(&f.class, v4);
    assert_eq!(found, vec![vec![0, 1, 2, 3]]);
    assert_eq!(found, inner_automorphisms(&f.theory, f.class.get(v4)));
}

#[test]
fn s3_isotropy_is_all_inner_automorphisms() {
    let t = theory(include_str!("../theories/groups.thy"));
    let class = enumerate_models(&t, 6).unwrap();
    let s3 = (0..class.len())
        .find(|i| class.get(*i).sizes() == [6] && class.automorphisms(*i).len() == 6)
        .unwrap();
    let found = m_definable(&class, s3);
    assert_eq!(found.len(), 6);
    assert_eq!(found, inner_automorphisms(&t, class.get(s3)));
}

#[test]
fn unknown_sorts_are_rejected() {
    let t = &groups().theory;
    assert!(parse_formula(&t.sig, "[x:H] x = x").is_err());
    assert_eq!(t.sig.sort_ids().collect::<Vec<_>>(), vec![SortId(0)]);
}
