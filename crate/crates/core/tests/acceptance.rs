//! Acceptance suite: one line per criterion, then a non-zero exit if any
//! criterion failed. Oracles below (evaluation, homomorphisms, orbit counts)
//! are written out by brute force and share no code with the library.

use std::collections::BTreeSet;
use std::sync::Arc;
use std::time::{Duration, Instant};

use serde_json::{json, Value};

use cohere::analysis::{
    check_definable_automorphism, check_normality, conceptual_completeness_report,
    isotropy_at_model, AnalysisBounds, AutomorphismCandidate, IsotropyStatus, ObligationStatus,
    Verdict,
};
use cohere::cli::{parse_formula, parse_interpretation, parse_sequent, parse_theory};
use cohere::definability::{find_defining_formula, Definability, EquivariantFamily, FormulaSpace};
use cohere::logic::{print_formula, Context, Formula, Node, Signature, SortId, Term, Theory};
use cohere::models::{
    enumerate_isos, enumerate_models, is_model, violation, Elem, FiniteStructure, ModelClass,
    Tuples,
};
use cohere::prover::{entails_on_class, prove, ProofOutcome, ProverBounds};
use cohere::spectrum::{closure_leq, in_open, param_pool, BasicOpen, Param, SpectrumGroupoid, SpectrumPoint};
use cohere::transforms::{copower, diagram_theory, morleyize, morleyize_with, pushout, slice_theory};

// Pinned tolerances.
const SATISFACTION_SECONDS: u64 = 60;
const MAX_VIOLATIONS: usize = 0;
const SPECTRUM_N: usize = 3;
const LABEL_BUDGET: usize = 2;
const MAX_DEPTH: usize = 3;
const TERM_DEPTH: usize = 1;
const CLASSIFICATION_N: usize = 4;
const SOUNDNESS_N: usize = 4;
const ISOTROPY_BOUNDS: ProverBounds = ProverBounds {
    max_elements: 32,
    max_firings: 5000,
    max_branches: 64,
    countermodel_nodes: 300_000,
};

fn dir() -> std::path::PathBuf {
    std::path::PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("theories")
}

fn load(name: &str) -> Arc<Theory> {
    Arc::new(parse_theory(&std::fs::read_to_string(dir().join(name)).unwrap()).unwrap())
}

fn class(t: &Arc<Theory>, n: usize) -> ModelClass {
    enumerate_models(t, n).unwrap()
}

// ---------------------------------------------------------------- oracles

fn term(m: &FiniteStructure, t: &Term, env: &[Elem]) -> Elem {
    match t {
        Term::Var(v) => env[*v],
        Term::App(f, args) => {
            let vals: Vec<Elem> = args.iter().map(|a| term(m, a, env)).collect();
            m.apply(*f, &vals)
        }
    }
}

fn holds(m: &FiniteStructure, n: &Node, env: &mut Vec<Elem>) -> bool {
    match n {
        Node::True => true,
        Node::False => false,
        Node::Eq(a, b) => term(m, a, env) == term(m, b, env),
        Node::Rel(r, args) => {
            let vals: Vec<Elem> = args.iter().map(|a| term(m, a, env)).collect();
            m.holds(*r, &vals)
        }
        Node::And(a, b) => holds(m, a, env) && holds(m, b, env),
        Node::Or(a, b) => holds(m, a, env) || holds(m, b, env),
        Node::Not(a) => !holds(m, a, env),
        Node::Exists(b, body) => (0..m.size(b.sort)).any(|x| {
            env.push(x);
            let r = holds(m, body, env);
            env.pop();
            r
        }),
    }
}

fn all_tuples(m: &FiniteStructure, sorts: &[SortId]) -> Vec<Vec<Elem>> {
    Tuples::new(sorts.iter().map(|s| m.size(*s)).collect()).collect()
}

/// Every per-sort map `a -> b` that commutes with functions and preserves
/// relations, checked on every argument tuple.
fn brute_homs(a: &FiniteStructure, b: &FiniteStructure) -> Vec<Vec<Vec<Elem>>> {
    let sig = a.signature().clone();
    let sorts: Vec<SortId> = sig.sort_ids().collect();
    let per_sort: Vec<Vec<Vec<Elem>>> = sorts
        .iter()
        .map(|s| Tuples::new(vec![b.size(*s); a.size(*s)]).collect())
        .collect();
    let mut out = Vec::new();
    for pick in Tuples::new(per_sort.iter().map(Vec::len).collect()) {
        let maps: Vec<Vec<Elem>> = pick.iter().enumerate().map(|(s, i)| per_sort[s][*i].clone()).collect();
        let img = |s: SortId, x: Elem| maps[s.0][x];
        let funcs_ok = sig.func_ids().all(|f| {
            let sym = sig.func(f);
            all_tuples(a, &sym.args).iter().all(|t| {
                let mapped: Vec<Elem> = t.iter().zip(&sym.args).map(|(x, s)| img(*s, *x)).collect();
                img(sym.result, a.apply(f, t)) == b.apply(f, &mapped)
            })
        });
        let rels_ok = funcs_ok
            && sig.rel_ids().all(|r| {
                let args = &sig.rel(r).args;
                all_tuples(a, args).iter().all(|t| {
                    let mapped: Vec<Elem> = t.iter().zip(args).map(|(x, s)| img(*s, *x)).collect();
                    !a.holds(r, t) || b.holds(r, &mapped)
                })
            });
        if rels_ok {
            out.push(maps);
        }
    }
    out
}

fn is_bijection(maps: &[Vec<Elem>]) -> bool {
    maps.iter().all(|m| m.iter().collect::<BTreeSet<_>>().len() == m.len())
}

fn inverse(maps: &[Vec<Elem>]) -> Vec<Vec<Elem>> {
    maps.iter()
        .map(|m| {
            let mut inv = vec![0; m.len()];
            for (i, j) in m.iter().enumerate() {
                inv[*j] = i;
            }
            inv
        })
        .collect()
}

/// `g ∘ f`, per sort.
fn compose(g: &[Vec<Elem>], f: &[Vec<Elem>]) -> Vec<Vec<Elem>> {
    f.iter().zip(g).map(|(fs, gs)| fs.iter().map(|x| gs[*x]).collect()).collect()
}

/// Automorphisms of a single-sorted structure: bijective brute-force
/// homomorphisms whose inverse is also one.
fn brute_auts(m: &FiniteStructure) -> Vec<Vec<Vec<Elem>>> {
    brute_homs(m, m).into_iter().filter(|h| is_bijection(h)).collect()
}

fn permutations(n: usize) -> Vec<Vec<Elem>> {
    Tuples::new(vec![n; n])
        .filter(|p| p.iter().collect::<BTreeSet<_>>().len() == n)
        .collect()
}

// -------------------------------------------------------------- corpus

struct Corpus {
    name: &'static str,
    theory: Arc<Theory>,
}

/// The five corpus theories as coherent theories; the classical one is
/// replaced by its Morleyization.
fn corpus() -> Vec<Corpus> {
    let mut out: Vec<Corpus> = ["groups.thy", "abelian_groups.thy", "pointed_sets.thy", "posets.thy"]
        .iter()
        .map(|f| Corpus {
            name: f.trim_end_matches(".thy"),
            theory: load(f),
        })
        .collect();
    out.push(Corpus {
        name: "unary_classical*",
        theory: morleyize(&load("unary_classical.thy")).theory,
    });
    out
}

/// Contexts `[x:s]` and `[x:s, y:s]` for each sort.
fn contexts(sig: &Signature) -> Vec<Context> {
    let mut out = Vec::new();
    for s in sig.sort_ids() {
        out.push(Context::new(vec![("x".into(), s)]).unwrap());
        out.push(Context::new(vec![("x".into(), s), ("y".into(), s)]).unwrap());
    }
    out
}

fn formulas(sig: &Arc<Signature>, models: &[FiniteStructure], depth: usize) -> Vec<Formula> {
    let mut space = FormulaSpace::new(sig.clone(), models, TERM_DEPTH);
    let mut out = Vec::new();
    for ctx in contexts(sig) {
        out.extend(space.formulas(&ctx, depth));
    }
    out
}

// ------------------------------------------------------------ criteria

struct Outcome {
    pass: bool,
    detail: String,
    report: Value,
}

fn outcome(pass: bool, detail: String, report: Value) -> Outcome {
    Outcome { pass, detail, report }
}

/// 1. `in_open` agrees with direct evaluation at every point, for every
/// formula of depth at most 3 and every choice of labels.
fn satisfaction_lemma() -> Outcome {
    let start = Instant::now();
    let mut checks = 0usize;
    let mut violations = 0usize;
    let mut per_theory = Vec::new();
    for c in corpus() {
        let class = Arc::new(class(&c.theory, SPECTRUM_N));
        let g = SpectrumGroupoid::build(class.clone(), LABEL_BUDGET);
        let fs = formulas(&c.theory.sig, class.models(), MAX_DEPTH);
        let pool = param_pool(&c.theory.sig, LABEL_BUDGET);
        let mut local = 0usize;
        for f in &fs {
            let sorts = f.ctx().sorts();
            let choices: Vec<Vec<&Param>> = sorts
                .iter()
                .map(|s| pool.iter().filter(|p| p.sort == *s).collect())
                .collect();
            for pick in Tuples::new(choices.iter().map(Vec::len).collect()) {
                let params: Vec<Param> = pick.iter().enumerate().map(|(i, k)| choices[i][*k].clone()).collect();
                let open = BasicOpen::new(f.clone(), params.clone()).unwrap();
                for p in &g.points {
                    let direct = match p.values(&params) {
                        Some(t) => holds(&p.structure, f.body(), &mut t.clone()),
                        None => false,
                    };
                    checks += 1;
                    local += 1;
                    if in_open(p, &open) != direct {
                        violations += 1;
                    }
                }
            }
        }
        per_theory.push(json!({ "theory": c.name, "formulas": fs.len(), "points": g.points.len(), "checks": local }));
    }
    let elapsed = start.elapsed();
    let pass = violations <= MAX_VIOLATIONS && elapsed <= Duration::from_secs(SATISFACTION_SECONDS);
    outcome(
        pass,
        format!("{checks} checks, {violations} disagreements, {:.1}s (limit {SATISFACTION_SECONDS}s)", elapsed.as_secs_f64()),
        json!({ "checks": checks, "violations": violations, "theories": per_theory }),
    )
}

/// 2. For every model `M`, every relabelling `π` of `M` onto a copy `N`,
/// and every isomorphism `α: M -> N` found by the library, `α(φ^M) = φ^N`.
fn iso_stability() -> Outcome {
    let mut checks = 0usize;
    let mut violations = 0usize;
    let mut isos_seen = 0usize;
    for c in corpus() {
        let class = class(&c.theory, SPECTRUM_N);
        let fs = formulas(&c.theory.sig, class.models(), MAX_DEPTH);
        for m in class.models() {
            // single-sorted corpus: one permutation per copy
            for perm in permutations(m.sizes()[0]) {
                let n = m.relabel(std::slice::from_ref(&perm));
                let isos = enumerate_isos(m, &n);
                if !isos.iter().any(|h| h.maps[0] == perm) {
                    violations += 1;
                }
                for h in &isos {
                    isos_seen += 1;
                    if !is_bijection(&h.maps) || !brute_homs(m, &n).contains(&h.maps) {
                        violations += 1;
                        continue;
                    }
                    for f in &fs {
                        let sorts = f.ctx().sorts();
                        for t in all_tuples(m, &sorts) {
                            checks += 1;
                            let image: Vec<Elem> = t.iter().map(|x| h.maps[0][*x]).collect();
                            let in_m = holds(m, f.body(), &mut t.clone());
                            let in_n = holds(&n, f.body(), &mut image.clone());
                            let lib_m = cohere::models::eval(m, f).unwrap().contains(&t);
                            let lib_n = cohere::models::eval(&n, f).unwrap().contains(&image);
                            if in_m != in_n || lib_m != in_m || lib_n != in_n {
                                violations += 1;
                            }
                        }
                    }
                }
            }
        }
    }
    outcome(
        violations <= MAX_VIOLATIONS,
        format!("{isos_seen} isomorphisms, {checks} tuple checks, {violations} violations"),
        json!({ "isos": isos_seen, "checks": checks, "violations": violations }),
    )
}

/// 3. `closure_leq` agrees with brute-force label-respecting homomorphisms.
fn closure_oracle() -> Outcome {
    let mut pairs = 0usize;
    let mut disagreements = 0usize;
    let mut related = 0usize;
    for c in corpus() {
        let class = Arc::new(class(&c.theory, SPECTRUM_N));
        let g = SpectrumGroupoid::build(class.clone(), LABEL_BUDGET);
        let homs: Vec<Vec<Vec<Vec<Vec<Elem>>>>> = (0..class.len())
            .map(|i| (0..class.len()).map(|j| brute_homs(class.get(i), class.get(j))).collect())
            .collect();
        for mu in &g.points {
            for nu in &g.points {
                pairs += 1;
                let oracle = homs[mu.model][nu.model].iter().any(|h| respects(h, mu, nu));
                let lib = closure_leq(mu, nu);
                if let Some(h) = &lib {
                    if !respects(&h.maps, mu, nu) || !homs[mu.model][nu.model].contains(&h.maps) {
                        disagreements += 1;
                    }
                }
                related += oracle as usize;
                if lib.is_some() != oracle {
                    disagreements += 1;
                }
            }
        }
    }
    outcome(
        disagreements <= MAX_VIOLATIONS,
        format!("{pairs} point pairs, {related} in closure, {disagreements} disagreements"),
        json!({ "pairs": pairs, "related": related, "disagreements": disagreements }),
    )
}

fn respects(h: &[Vec<Elem>], mu: &SpectrumPoint, nu: &SpectrumPoint) -> bool {
    mu.env
        .iter()
        .all(|(p, a)| nu.value(p) == Some(h[p.sort.0][*a]))
}

/// Every structure of `sig` with carrier sizes `sizes`, relation tables only
/// (the classical corpus has no function symbols).
fn relational_structures(sig: &Arc<Signature>, sizes: &[usize]) -> Vec<FiniteStructure> {
    assert!(sig.funcs.is_empty());
    let lens: Vec<usize> = sig
        .rels
        .iter()
        .map(|r| r.args.iter().map(|s| sizes[s.0]).product())
        .collect();
    let total: usize = lens.iter().sum();
    let mut out = Vec::new();
    for bits in Tuples::new(vec![2; total]) {
        let mut rels = Vec::new();
        let mut at = 0;
        for l in &lens {
            rels.push(bits[at..at + l].iter().map(|b| *b == 1).collect());
            at += l;
        }
        out.push(FiniteStructure::new(sig.clone(), sizes.to_vec(), vec![], rels).unwrap());
    }
    out
}

fn satisfies_all(m: &FiniteStructure, t: &Theory) -> bool {
    t.axioms.iter().all(|ax| {
        all_tuples(m, &ax.ctx.sorts())
            .into_iter()
            .all(|tuple| !holds(m, &ax.lhs, &mut tuple.clone()) || holds(m, &ax.rhs, &mut tuple.clone()))
    })
}

/// 4. Labelled models of each classical corpus theory up to size 3 have
/// exactly one expansion to the Morleyization, every Morleyized model arises
/// this way, and classical formulas agree with their translations.
fn morleyization_bijection() -> Outcome {
    let mut violations = 0usize;
    let mut rows = Vec::new();
    for file in ["unary_classical.thy", "pure_identity.thy"] {
        let t = load(file);
        let star = morleyize(&t);
        let ssig = star.theory.sig.clone();
        let models_t: Vec<FiniteStructure> = (0..=SPECTRUM_N)
            .flat_map(|n| relational_structures(&t.sig, &[n]))
            .filter(|m| satisfies_all(m, &t))
            .collect();
        let models_star: Vec<FiniteStructure> = (0..=SPECTRUM_N)
            .flat_map(|n| relational_structures(&ssig, &[n]))
            .filter(|m| satisfies_all(m, &star.theory))
            .collect();
        for m in &models_t {
            let expansions: Vec<&FiniteStructure> = models_star
                .iter()
                .filter(|e| e.sizes() == m.sizes() && e.reduct_to(&t.sig).unwrap() == *m)
                .collect();
            if expansions.len() != 1 || *expansions[0] != star.expand(m) {
                violations += 1;
            }
        }
        if models_t.len() != models_star.len() {
            violations += 1;
        }
        let lib_t = class(&t, SPECTRUM_N);
        let lib_star = class(&star.theory, SPECTRUM_N);
        if lib_t.len() != lib_star.len() {
            violations += 1;
        }
        // the translation check needs a symbol for every negated subformula
        let mut space = FormulaSpace::new(t.sig.clone(), lib_t.models(), TERM_DEPTH).with_negation(true);
        let classical: Vec<_> = contexts(&t.sig)
            .iter()
            .flat_map(|ctx| space.classical_formulas(ctx, MAX_DEPTH))
            .collect();
        let wide = morleyize_with(&t, &classical);
        let mut formulas = 0;
        let mut agreements = 0;
        for f in &classical {
            let Some(tr) = wide.translate_formula(f) else {
                violations += 1;
                continue;
            };
            formulas += 1;
            for m in &models_t {
                let e = wide.expand(m);
                if !satisfies_all(&e, &wide.theory) {
                    violations += 1;
                }
                for tuple in all_tuples(m, &f.ctx().sorts()) {
                    agreements += 1;
                    if holds(m, f.body(), &mut tuple.clone()) != holds(&e, tr.body(), &mut tuple.clone()) {
                        violations += 1;
                    }
                }
            }
        }
        rows.push(json!({
            "theory": t.name,
            "labelled_models": models_t.len(),
            "labelled_star_models": models_star.len(),
            "iso_classes": lib_t.len(),
            "star_iso_classes": lib_star.len(),
            "formulas": formulas,
            "checks": agreements,
        }));
    }
    outcome(
        violations <= MAX_VIOLATIONS,
        format!("{} theories, {violations} violations", rows.len()),
        json!({ "theories": rows, "violations": violations }),
    )
}

/// Number of orbits of a set of per-sort maps under `act`, counted by
/// choosing the least image as representative.
fn orbits<G>(items: &[Vec<Vec<Elem>>], group: &[G], act: impl Fn(&G, &Vec<Vec<Elem>>) -> Vec<Vec<Elem>>) -> usize {
    items
        .iter()
        .map(|x| group.iter().map(|g| act(g, x)).min().unwrap())
        .collect::<BTreeSet<_>>()
        .len()
}

/// 5. Models of the classifying theories against orbit counts of pairs,
/// homomorphisms and isomorphisms.
fn classification_counts() -> Outcome {
    let n = CLASSIFICATION_N;
    let groups = load("groups.thy");
    let gclass = class(&groups, n);
    let auts: Vec<Vec<Vec<Vec<Elem>>>> = gclass.models().iter().map(brute_auts).collect();
    let sig = &groups.sig;
    let e = sig.func_id("e").unwrap();
    let mul = sig.func_id("mul").unwrap();

    // diagram(Z2): homomorphisms Z2 -> N up to automorphisms of N
    let z2 = gclass.models().iter().find(|m| m.sizes() == [2]).unwrap();
    let d = diagram_theory(&groups, z2).unwrap();
    let diagram_lib = class(&d.theory, n).len();
    let diagram_oracle: usize = gclass
        .models()
        .iter()
        .enumerate()
        .map(|(i, m)| orbits(&brute_homs(z2, m), &auts[i], |b, h| compose(b, h)))
        .sum();

    // slice over x·x = e: involutions-or-identity up to automorphisms
    let phi = parse_formula(sig, "[x:G] mul(x, x) = e").unwrap();
    let s = slice_theory(&groups, &phi).unwrap();
    let slice_lib = class(&s.theory, n).len();
    let slice_oracle: usize = gclass
        .models()
        .iter()
        .enumerate()
        .map(|(i, m)| {
            let pts: Vec<Vec<Vec<Elem>>> = (0..m.sizes()[0])
                .filter(|a| m.apply(mul, &[*a, *a]) == m.apply(e, &[]))
                .map(|a| vec![vec![a]])
                .collect();
            orbits(&pts, &auts[i], |b, p| vec![vec![b[0][p[0][0]]]])
        })
        .sum();

    // copower: homomorphisms N0 -> N1 up to automorphisms on both sides
    let c = copower(&groups);
    let copower_lib = class(&c.theory, n).len();
    let mut copower_oracle = 0;
    for (i, m0) in gclass.models().iter().enumerate() {
        for (j, m1) in gclass.models().iter().enumerate() {
            let pairs: Vec<(Vec<Vec<Elem>>, Vec<Vec<Elem>>)> = auts[i]
                .iter()
                .flat_map(|a| auts[j].iter().map(move |b| (inverse(a), b.clone())))
                .collect();
            copower_oracle += orbits(&brute_homs(m0, m1), &pairs, |(ai, b), h| compose(b, &compose(h, ai)));
        }
    }

    // pushout of groups and abelian groups over pointed sets: a group, an
    // abelian group and a pointed bijection between them, up to isomorphism
    let left = parse_interpretation(&std::fs::read_to_string(dir().join("points_groups.json")).unwrap(), &dir()).unwrap();
    let right = parse_interpretation(&std::fs::read_to_string(dir().join("points_abelian.json")).unwrap(), &dir()).unwrap();
    let po = pushout(&left, &right).unwrap();
    let pushout_lib = class(&po.theory, n).len();
    let ab = load("abelian_groups.thy");
    let aclass = class(&ab, n);
    let zero = ab.sig.func_id("zero").unwrap();
    let mut pushout_oracle = 0;
    for (i, g) in gclass.models().iter().enumerate() {
        for h in aclass.models() {
            if g.sizes() != h.sizes() {
                continue;
            }
            let bij: Vec<Vec<Vec<Elem>>> = permutations(g.sizes()[0])
                .into_iter()
                .filter(|f| f[g.apply(e, &[])] == h.apply(zero, &[]))
                .map(|f| vec![f])
                .collect();
            let haut = brute_auts(h);
            let pairs: Vec<(Vec<Vec<Elem>>, Vec<Vec<Elem>>)> = auts[i]
                .iter()
                .flat_map(|a| haut.iter().map(move |b| (inverse(a), b.clone())))
                .collect();
            pushout_oracle += orbits(&bij, &pairs, |(ai, b), f| compose(b, &compose(f, ai)));
        }
    }

    let rows = json!([
        { "theory": "diagram(Z2)", "models": diagram_lib, "oracle": diagram_oracle },
        { "theory": "slice(groups, x*x=e)", "models": slice_lib, "oracle": slice_oracle },
        { "theory": "copower(groups)", "models": copower_lib, "oracle": copower_oracle },
        { "theory": "pushout(groups, abelian_groups)", "models": pushout_lib, "oracle": pushout_oracle },
    ]);
    let pass = diagram_lib == diagram_oracle
        && slice_lib == slice_oracle
        && copower_lib == copower_oracle
        && pushout_lib == pushout_oracle;
    outcome(
        pass,
        format!(
            "diagram {diagram_lib}/{diagram_oracle}, slice {slice_lib}/{slice_oracle}, copower {copower_lib}/{copower_oracle}, pushout {pushout_lib}/{pushout_oracle}"
        ),
        json!({ "n": n, "rows": rows }),
    )
}

const SERIAL: &str = "theory serial\nsort A\nrel R : A A\naxiom [x:A] true |- exists y:A. R(x, y)\n";
const TOTAL: &str = "theory total\nsort A\nrel le : A A\naxiom [x:A, y:A] true |- le(x, y) \\/ le(y, x)\n";
const INVOLUTION: &str = "theory involution\nsort A\nfunc f : A -> A\naxiom [x:A] true |- f(f(x)) = x\n";
const PER: &str = "theory per\nsort A\nrel R : A A\naxiom [x:A, y:A] R(x, y) |- R(y, x)\naxiom [x:A, y:A, z:A] R(x, y) /\\ R(y, z) |- R(x, z)\n";
const PARTITION: &str = "theory partition\nsort A\nrel P : A\nrel Q : A\naxiom [x:A] true |- P(x) \\/ Q(x)\naxiom [x:A] P(x) /\\ Q(x) |- false\n";

/// `(theory, sequent, expected proved)`.
fn soundness_corpus() -> Vec<(&'static str, &'static str, bool)> {
    vec![
        ("groups.thy", "[x:G] top |- exists y:G. mul(x, y) = e", true),
        ("groups.thy", "[x:G] top |- mul(inv(x), x) = e", true),
        ("groups.thy", "top |- mul(e, e) = e", true),
        ("groups.thy", "[x:G] top |- exists y:G. mul(y, x) = e", true),
        ("groups.thy", "[x:G] top |- mul(x, e) = x", true),
        ("groups.thy", "[x:G, y:G] x = y |- mul(x, e) = y", true),
        ("groups.thy", "[x:G] top |- mul(e, mul(x, e)) = x", true),
        ("groups.thy", "[x:G, y:G] mul(x, y) = e |- y = inv(x)", true),
        ("abelian_groups.thy", "[x:A, y:A] top |- add(x, y) = add(y, x)", true),
        ("abelian_groups.thy", "[x:A] top |- add(x, zero) = x", true),
        ("abelian_groups.thy", "[x:A] top |- exists y:A. add(x, y) = zero", true),
        ("posets.thy", "[x:P] top |- le(x, x)", true),
        ("posets.thy", "[x:P, y:P, z:P, w:P] le(x, y) /\\ le(y, z) /\\ le(z, w) |- le(x, w)", true),
        ("posets.thy", "[x:P, y:P] le(x, y) /\\ le(y, x) |- x = y", true),
        ("posets.thy", "[x:P, y:P, z:P] le(x, y) /\\ le(y, z) /\\ le(z, x) |- x = y", true),
        ("pointed_sets.thy", "top |- exists x:S. x = pt", true),
        ("pointed_sets.thy", "top |- exists x:S. true", true),
        ("unary.thy", "[x:A] P(x) |- exists y:A. P(y)", true),
        (TOTAL, "[x:A] top |- le(x, x)", true),
        (INVOLUTION, "[x:A, y:A] f(x) = f(y) |- x = y", true),
        (INVOLUTION, "[x:A] top |- f(f(f(x))) = f(x)", true),
        (SERIAL, "[x:A] top |- exists y:A. exists z:A. R(x, y) /\\ R(y, z)", true),
        (PER, "[x:A, y:A] R(x, y) |- R(x, x)", true),
        (PARTITION, "[x:A, y:A] top |- (P(x) /\\ P(y)) \\/ Q(x) \\/ (P(x) /\\ Q(y))", true),
        (PARTITION, "[x:A] Q(x) |- exists y:A. Q(y) /\\ y = x", true),
        ("groups.thy", "[x:G, y:G] top |- mul(x, y) = mul(y, x)", false),
        ("groups.thy", "[x:G] top |- x = e", false),
        ("groups.thy", "[x:G] top |- mul(x, x) = e", false),
        ("groups.thy", "[x:G, y:G] top |- x = y", false),
        ("groups.thy", "[x:G] top |- mul(x, mul(x, x)) = e", false),
        ("abelian_groups.thy", "[x:A] top |- add(x, x) = zero", false),
        ("abelian_groups.thy", "[x:A] top |- x = neg(x)", false),
        ("abelian_groups.thy", "[x:A] top |- x = zero", false),
        ("posets.thy", "[x:P, y:P] top |- le(x, y)", false),
        ("posets.thy", "[x:P, y:P] top |- le(x, y) \\/ le(y, x)", false),
        ("posets.thy", "[x:P, y:P] le(x, y) |- le(y, x)", false),
        ("posets.thy", "[x:P, y:P, z:P] le(x, y) /\\ le(x, z) |- le(y, z) \\/ le(z, y)", false),
        ("pointed_sets.thy", "[x:S] top |- x = pt", false),
        ("pointed_sets.thy", "[x:S, y:S] top |- x = y \\/ x = pt", false),
        ("unary.thy", "[x:A] top |- P(x)", false),
        ("unary.thy", "[x:A, y:A] P(x) |- P(y)", false),
        ("unary.thy", "[x:A] top |- exists y:A. P(y)", false),
        (TOTAL, "[x:A, y:A] le(x, y) |- le(y, x)", false),
        (TOTAL, "[x:A, y:A, z:A] le(x, y) /\\ le(y, z) |- le(x, z)", false),
        (INVOLUTION, "[x:A] top |- f(x) = x", false),
        (INVOLUTION, "[x:A, y:A] top |- f(x) = y \\/ x = y", false),
        (SERIAL, "[x:A] top |- R(x, x)", false),
        (SERIAL, "[x:A, y:A] R(x, y) |- R(y, x)", false),
        (PER, "[x:A, y:A] top |- R(x, y)", false),
        (PARTITION, "[x:A] top |- P(x)", false),
    ]
}

/// 6. Proved sequents hold on every model up to size 4; countermodels are
/// models of the theory that violate the sequent.
fn prover_soundness() -> Outcome {
    let corpus = soundness_corpus();
    let bounds = ProverBounds::default();
    let mut proved = 0;
    let mut refuted = 0;
    let mut violations = 0;
    let mut mismatches = Vec::new();
    for (src, text, expect) in &corpus {
        let t = Arc::new(if src.ends_with(".thy") {
            (*load(src)).clone()
        } else {
            parse_theory(src).unwrap()
        });
        let s = parse_sequent(&t, text).unwrap();
        let out = prove(&t, &s, &bounds).unwrap();
        match &out {
            ProofOutcome::Proved(_) => {
                proved += 1;
                if !entails_on_class(&class(&t, SOUNDNESS_N), &s) {
                    violations += 1;
                }
            }
            ProofOutcome::Countermodel { model, witness, .. } => {
                refuted += 1;
                let valid = is_model(model, &t)
                    && violation(model, &s).is_some()
                    && satisfies_all(model, &t)
                    && holds(model, &s.lhs, &mut witness.clone())
                    && !holds(model, &s.rhs, &mut witness.clone());
                if !valid {
                    violations += 1;
                }
            }
            ProofOutcome::Unknown { .. } => {}
        }
        let got = out.verdict();
        let want = if *expect { "proved" } else { "countermodel" };
        if got != want {
            mismatches.push(json!({ "theory": t.name, "sequent": text, "expected": want, "got": got }));
        }
    }
    let pass = violations <= MAX_VIOLATIONS && mismatches.is_empty();
    outcome(
        pass,
        format!(
            "{} sequents: {proved} proved, {refuted} countermodels, {violations} unsound, {} unexpected",
            corpus.len(),
            mismatches.len()
        ),
        json!({ "proved": proved, "countermodels": refuted, "violations": violations, "mismatches": mismatches }),
    )
}

/// 7. Squares need a quantifier, the identity element is `x·x = x`, and a
/// non-equivariant family comes with an automorphism moving it.
fn definability() -> Outcome {
    let groups = load("groups.thy");
    let gclass = Arc::new(class(&groups, CLASSIFICATION_N));
    let sig = &groups.sig;
    let fam = |text: &str| {
        let f = parse_formula(sig, text).unwrap();
        EquivariantFamily::from_formula(gclass.clone(), &f).unwrap()
    };
    let squares = fam("[x:G] exists y:G. x = mul(y, y)");
    let sq1 = find_defining_formula(&squares, 1, 2);
    let sq2 = find_defining_formula(&squares, 2, 2);
    let squares_ok = matches!(sq1, Definability::NoneAtBound { .. })
        && sq2.formula().is_some_and(|f| f.depth() == 2 && squares.defined_by(f));

    let ids = fam("[x:G] x = e");
    let idem = parse_formula(sig, "[x:G] mul(x, x) = x").unwrap();
    let id1 = find_defining_formula(&ids, 1, 2);
    let ids_ok = ids.defined_by(&idem) && id1.formula().is_some_and(|f| ids.defined_by(f));

    // pick one non-identity element of Z3 only
    let sets = gclass
        .models()
        .iter()
        .map(|m| {
            let ctx = Context::new(vec![("x".into(), SortId(0))]).unwrap();
            let tuples: Vec<Vec<Elem>> = if m.sizes() == [3] {
                let unit = m.apply(sig.func_id("e").unwrap(), &[]);
                vec![vec![(0..3).find(|a| *a != unit).unwrap()]]
            } else {
                vec![]
            };
            cohere::models::DefinableSet::from_tuples(m, ctx, &tuples)
        })
        .collect();
    let bad = EquivariantFamily::new(
        gclass.clone(),
        Context::new(vec![("x".into(), SortId(0))]).unwrap(),
        sets,
    )
    .unwrap();
    let witness = match find_defining_formula(&bad, 2, 2) {
        Definability::NotEquivariant(w) => {
            let moved = w.iso.apply_tuple(&[SortId(0)], &w.tuple);
            let m = gclass.get(w.model);
            let valid = brute_auts(m).contains(&w.iso.maps)
                && bad.sets[w.model].contains(&w.tuple)
                && !bad.sets[w.model].contains(&moved);
            valid.then(|| w.to_json())
        }
        _ => None,
    };
    let show = |d: &Definability| match d.formula() {
        Some(f) => print_formula(sig, f.ctx(), f.body()),
        None => d.verdict().to_string(),
    };
    let pass = squares_ok && ids_ok && witness.is_some();
    outcome(
        pass,
        format!(
            "squares: depth 1 {}, depth 2 `{}`; identity `{}` = `x·x = x` on class: {ids_ok}; non-equivariant witness: {}",
            sq1.verdict(),
            show(&sq2),
            show(&id1),
            witness.is_some()
        ),
        json!({
            "squares_depth1": sq1.verdict(),
            "squares_depth2": show(&sq2),
            "identity": show(&id1),
            "identity_is_idempotent": ids_ok,
            "witness": witness,
        }),
    )
}

/// 8. Conjugation and abelian inversion pass every sequent check with the
/// equational ones proved; the Z3 stalk is {id, negation}, closed and normal.
fn isotropy() -> Outcome {
    let groups = load("groups.thy");
    let conj = AutomorphismCandidate::new(
        &groups.sig,
        Context::new(vec![("g".into(), SortId(0))]).unwrap(),
        vec![parse_formula(&groups.sig, "[y:G, y2:G, g:G] y2 = mul(mul(g, y), inv(g))").unwrap()],
    )
    .unwrap();
    let gclass = class(&groups, CLASSIFICATION_N);
    let cc = check_definable_automorphism(&groups, &conj, &ISOTROPY_BOUNDS, Some(&gclass)).unwrap();
    let ab = load("abelian_groups.thy");
    let inv = AutomorphismCandidate::new(
        &ab.sig,
        Context::empty(),
        vec![parse_formula(&ab.sig, "[y:A, y2:A] add(y, y2) = zero").unwrap()],
    )
    .unwrap();
    let aclass = class(&ab, CLASSIFICATION_N);
    let ic = check_definable_automorphism(&ab, &inv, &ISOTROPY_BOUNDS, Some(&aclass)).unwrap();
    let statuses = |c: &cohere::analysis::AutomorphismCheck| -> Vec<String> {
        c.obligations.iter().map(|o| format!("{}:{}:{}", o.schema, o.symbol, o.status.as_str())).collect()
    };
    let all_proved = |c: &cohere::analysis::AutomorphismCheck| {
        c.verdict == Verdict::Pass && c.obligations.iter().all(|o| o.status == ObligationStatus::Proved)
    };

    let small = class(&groups, SPECTRUM_N);
    let z3 = (0..small.len()).find(|i| small.get(*i).sizes() == [3]).unwrap();
    let stalk = isotropy_at_model(&small, z3, 1, TERM_DEPTH, 1).unwrap();
    let normal = check_normality(&small, &stalk);
    let m = small.get(z3);
    let e = groups.sig.func_id("e").unwrap();
    let inv_g = groups.sig.func_id("inv").unwrap();
    let identity: Vec<Elem> = (0..3).collect();
    let negation: Vec<Elem> = (0..3).map(|a| m.apply(inv_g, &[a])).collect();
    let _ = m.apply(e, &[]);
    let found: BTreeSet<Vec<Elem>> = stalk
        .entries
        .iter()
        .filter(|x| x.status == IsotropyStatus::MDefinable)
        .map(|x| x.automorphism.maps[0].clone())
        .collect();
    let expected: BTreeSet<Vec<Elem>> = [identity, negation].into_iter().collect();
    let stalk_ok = found == expected && stalk.entries.len() == 2 && stalk.closed && normal.holds;

    let pass = all_proved(&cc) && all_proved(&ic) && stalk_ok;
    outcome(
        pass,
        format!(
            "conjugation {}/{} proved, inversion {}/{} proved, Z3 stalk {} automorphisms, closed {}, normal {} ({} checks)",
            cc.obligations.iter().filter(|o| o.status == ObligationStatus::Proved).count(),
            cc.obligations.len(),
            ic.obligations.iter().filter(|o| o.status == ObligationStatus::Proved).count(),
            ic.obligations.len(),
            found.len(),
            stalk.closed,
            normal.holds,
            normal.checked
        ),
        json!({
            "conjugation": statuses(&cc),
            "inversion": statuses(&ic),
            "stalk": found.into_iter().collect::<Vec<_>>(),
            "closed": stalk.closed,
            "normality": normal.to_json(),
        }),
    )
}

/// 9. Each example fails exactly the expected row, with re-validated
/// witnesses, and the semantic and spectral readings agree.
fn conceptual_completeness() -> Outcome {
    let bounds = AnalysisBounds::default();
    let cases = [
        ("identity_groups.json", None),
        ("quotient.json", Some("a")),
        ("new_relation.json", Some("b")),
        ("new_sort.json", Some("c")),
    ];
    let mut rows = Vec::new();
    let mut pass = true;
    let mut summary = Vec::new();
    for (file, failing) in cases {
        let text = std::fs::read_to_string(dir().join(file)).unwrap();
        let i = parse_interpretation(&text, &dir()).unwrap();
        let source = class(&i.source, bounds.n);
        let target = class(&i.target, bounds.n);
        let r = conceptual_completeness_report(&i, &source, &target, &bounds).unwrap();
        let mut ok = true;
        for row in &r.rows {
            let want = if Some(row.row) == failing { Verdict::Fail } else { Verdict::Pass };
            ok &= row.semantic.verdict == want && row.spectral.verdict == want && row.agree;
            if want == Verdict::Fail {
                ok &= row.semantic.revalidated == Some(true) && row.spectral.revalidated == Some(true);
            }
        }
        if failing == Some("a") {
            ok &= r.collapse.as_ref().is_some_and(|c| c["confirmed"] == true);
        }
        pass &= ok;
        summary.push(format!("{} {}", i.name, if ok { "ok" } else { "wrong" }));
        rows.push(r.to_json());
    }
    outcome(pass, summary.join(", "), json!(rows))
}

fn run_all() -> Vec<(usize, &'static str, Outcome, Duration)> {
    let criteria: [(&'static str, fn() -> Outcome); 9] = [
        ("satisfaction lemma", satisfaction_lemma),
        ("iso-stability", iso_stability),
        ("closure oracle", closure_oracle),
        ("Morleyization bijection", morleyization_bijection),
        ("classification counts", classification_counts),
        ("prover soundness", prover_soundness),
        ("definability", definability),
        ("isotropy", isotropy),
        ("conceptual completeness diagnostics", conceptual_completeness),
    ];
    criteria
        .iter()
        .enumerate()
        .map(|(k, (name, f))| {
            let start = Instant::now();
            let o = f();
            (k + 1, *name, o, start.elapsed())
        })
        .collect()
}

fn serialize(results: &[(usize, &'static str, Outcome, Duration)]) -> String {
    let all: Vec<Value> = results
        .iter()
        .map(|(k, name, o, _)| json!({ "criterion": k, "name": name, "pass": o.pass, "report": o.report }))
        .collect();
    serde_json::to_string_pretty(&all).unwrap()
}

fn main() {
    // `cargo test` passes harness flags; a name filter that does not match
    // "acceptance" skips the suite
    let args: Vec<String> = std::env::args().skip(1).filter(|a| !a.starts_with('-')).collect();
    if args.iter().any(|a| !"acceptance".contains(a.as_str())) {
        return;
    }
    let first = run_all();
    let mut failed = 0;
    for (k, name, o, t) in &first {
        let tag = if o.pass { "PASS" } else { "FAIL" };
        println!("criterion {k:>2} {tag} {name}: {} [{:.1}s]", o.detail, t.as_secs_f64());
        failed += !o.pass as usize;
    }
    let second = run_all();
    let a = serialize(&first);
    let b = serialize(&second);
    let same = a == b;
    println!(
        "criterion 10 {} determinism: two full runs, {} report bytes, {}",
        if same { "PASS" } else { "FAIL" },
        a.len(),
        if same { "byte-identical" } else { "reports differ" }
    );
    failed += !same as usize;
    if failed > 0 {
        println!("{failed} criteria failed");
        std::process::exit(1);
    }
}
