//! Finite-scale diagnostics for an interpretation `I: E -> F`, one row per
//! property: supercovering / superdense (conservative), stabilizes subobjects
//! / separates subgroupoids (full on subobjects), faithful reduct /
//! non-folding (subcovering). Each semantic check has a spectral
//! counterpart computed with closure in the spectrum instead of direct
//! homomorphism search.

use std::collections::BTreeMap;
use std::sync::Arc;

use serde::Serialize;
use serde_json::{json, Value};

use super::{AnalysisError, Verdict, BOUND_VALIDATED};
use crate::definability::{Candidate, FormulaSpace};
use crate::logic::{print_formula, print_sequent, Context, Formula, Interpretation, Node, Sequent, Signature, SortId};
use crate::models::{enumerate_homs, eval, is_homomorphism, Elem, FiniteStructure, Homomorphism, ModelClass};
use crate::prover::{prove, ProofOutcome, ProverBounds};
use crate::spectrum::{arrow_closure, closure_leq, in_open, Arrow, BasicOpen, Env, Param, SpectrumPoint};
use crate::transforms::{reduct, reduct_hom};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct AnalysisBounds {
    /// Carrier bound for source and target model classes.
    pub n: usize,
    pub depth: usize,
    pub term_depth: usize,
    pub prover: ProverBounds,
}

impl Default for AnalysisBounds {
    fn default() -> Self {
        AnalysisBounds {
            n: 3,
            depth: 2,
            term_depth: 1,
            prover: ProverBounds::default(),
        }
    }
}

/// A target model whose reduct is undefined: some function image is not
/// functional there, or the reduct is not a source model.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FunctionalityWitness {
    pub model: usize,
    pub detail: String,
}

fn bit(c: &Candidate, i: usize) -> bool {
    c.bits[i / 64] >> (i % 64) & 1 == 1
}

fn row_index(m: &FiniteStructure, scope: &[SortId], t: &[Elem]) -> usize {
    scope.iter().zip(t).fold(0, |acc, (s, a)| acc * m.size(*s) + a)
}

fn offsets(models: &[FiniteStructure], scope: &[SortId]) -> Vec<usize> {
    let mut out = Vec::with_capacity(models.len());
    let mut at = 0;
    for m in models {
        out.push(at);
        at += scope.iter().map(|s| m.size(*s)).product::<usize>();
    }
    out
}

fn scope_context(scope: &[SortId]) -> Context {
    let vars = match scope {
        [s] => vec![("x".to_string(), *s)],
        _ => scope.iter().enumerate().map(|(i, s)| (format!("x{i}"), *s)).collect(),
    };
    Context::new(vars).expect("distinct names")
}

fn formula(sig: &Signature, scope: &[SortId], c: &Candidate) -> Formula {
    Formula::new(sig, scope_context(scope), c.body.clone()).expect("enumerated formulas are well-formed")
}

/// One single-variable context per source sort, then the empty context, as
/// `(source scope, target scope)`.
fn scopes(i: &Interpretation) -> Vec<(Vec<SortId>, Vec<SortId>)> {
    let mut out: Vec<_> = i.source.sig.sort_ids().map(|a| (vec![a], vec![i.map_sort(a)])).collect();
    out.push((vec![], vec![]));
    out
}

/// Every reduct `I*N`, or the first target model where it is undefined.
pub fn check_functional(i: &Interpretation, target: &ModelClass) -> Result<Vec<FiniteStructure>, FunctionalityWitness> {
    target
        .models()
        .iter()
        .enumerate()
        .map(|(k, n)| {
            reduct(n, i).map_err(|e| FunctionalityWitness {
                model: k,
                detail: e.to_string(),
            })
        })
        .collect()
}

fn reducts(i: &Interpretation, target: &ModelClass) -> Result<Vec<FiniteStructure>, AnalysisError> {
    check_functional(i, target).map_err(|w| AnalysisError::NotFunctional {
        model: w.model,
        detail: w.detail,
    })
}

/// A source model `M`, a tuple `a` and a formula `R` with `a ∉ R^M` such that
/// every homomorphism `h: M -> I*N` into a target reduct has `h(a) ∈ R`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SupercoveringWitness {
    pub model: usize,
    pub tuple: Vec<Elem>,
    pub formula: Formula,
}

impl SupercoveringWitness {
    /// Re-checks the witness by evaluation and fresh homomorphism enumeration.
    pub fn revalidate(&self, i: &Interpretation, source: &ModelClass, target: &ModelClass) -> bool {
        let m = source.get(self.model);
        let sorts = self.formula.ctx().sorts();
        let Ok(set) = eval(m, &self.formula) else {
            return false;
        };
        if set.contains(&self.tuple) {
            return false;
        }
        target.models().iter().all(|n| {
            let Ok(r) = reduct(n, i) else {
                return false;
            };
            let Ok(image) = eval(&r, &self.formula) else {
                return false;
            };
            enumerate_homs(m, &r)
                .iter()
                .all(|h| image.contains(&h.apply_tuple(&sorts, &self.tuple)))
        })
    }

    pub fn to_json(&self, sig: &Signature) -> Value {
        json!({
            "model": self.model,
            "tuple": self.tuple,
            "formula": print_formula(sig, self.formula.ctx(), self.formula.body()),
        })
    }
}

/// For every source model `M ≤ n`, tuple `a` (empty or one element) and
/// depth-bounded formula `R` with `a ∉ R^M`, looks for a target model `N` and
/// `h: M -> I*N` with `h(a) ∉ R^{I*N}`; `None` when every case escapes.
pub fn check_supercovering(
    i: &Interpretation,
    source: &ModelClass,
    target: &ModelClass,
    depth: usize,
    term_depth: usize,
) -> Result<Option<SupercoveringWitness>, AnalysisError> {
    let sig = i.source.sig.clone();
    let reds = reducts(i, target)?;
    let models: Vec<FiniteStructure> = source.models().iter().chain(&reds).cloned().collect();
    let mut space = FormulaSpace::new(sig.clone(), &models, term_depth);
    let homs: Vec<Vec<Vec<Homomorphism>>> = source
        .models()
        .iter()
        .map(|m| reds.iter().map(|r| enumerate_homs(m, r)).collect())
        .collect();
    for (scope, _) in scopes(i) {
        let offs = offsets(&models, &scope);
        // per source model and tuple: every reachable (reduct, image row)
        let mut cases: Vec<(usize, Vec<Elem>, usize, Vec<usize>)> = Vec::new();
        for (mi, m) in source.models().iter().enumerate() {
            for a in m.tuples(&scope) {
                let mut escapes: Vec<usize> = Vec::new();
                for (k, r) in reds.iter().enumerate() {
                    for h in &homs[mi][k] {
                        let b = h.apply_tuple(&scope, &a);
                        escapes.push(offs[source.len() + k] + row_index(r, &scope, &b));
                    }
                }
                escapes.sort_unstable();
                escapes.dedup();
                let own = offs[mi] + row_index(m, &scope, &a);
                cases.push((mi, a, own, escapes));
            }
        }
        for c in space.level(&scope, depth).iter() {
            for (mi, a, own, escapes) in &cases {
                if !bit(c, *own) && escapes.iter().all(|e| bit(c, *e)) {
                    return Ok(Some(SupercoveringWitness {
                        model: *mi,
                        tuple: a.clone(),
                        formula: formula(&sig, &scope, c),
                    }));
                }
            }
        }
    }
    Ok(None)
}

/// Target models `N0, N1`, a homomorphism `h: I*N0 -> I*N1` of reducts, a
/// target formula `S` over source-sort variables and a tuple in `S^{N0}`
/// whose image leaves `S^{N1}`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StabilityWitness {
    pub n0: usize,
    pub n1: usize,
    pub hom: Homomorphism,
    /// Source sorts of the context, for applying `hom`.
    pub sorts: Vec<SortId>,
    pub tuple: Vec<Elem>,
    pub formula: Formula,
}

impl StabilityWitness {
    pub fn revalidate(&self, i: &Interpretation, target: &ModelClass) -> bool {
        let (Ok(r0), Ok(r1)) = (reduct(target.get(self.n0), i), reduct(target.get(self.n1), i)) else {
            return false;
        };
        let (Ok(s0), Ok(s1)) = (eval(target.get(self.n0), &self.formula), eval(target.get(self.n1), &self.formula)) else {
            return false;
        };
        is_homomorphism(&r0, &r1, &self.hom)
            && s0.contains(&self.tuple)
            && !s1.contains(&self.hom.apply_tuple(&self.sorts, &self.tuple))
    }

    pub fn to_json(&self, sig: &Signature) -> Value {
        json!({
            "n0": self.n0,
            "n1": self.n1,
            "hom": self.hom.maps,
            "tuple": self.tuple,
            "formula": print_formula(sig, self.formula.ctx(), self.formula.body()),
        })
    }
}

/// Tests every depth-bounded target formula `S` over the empty context or a
/// variable of sort `I(A)` against every homomorphism between reducts.
pub fn check_stabilizes_subobjects(
    i: &Interpretation,
    target: &ModelClass,
    depth: usize,
    term_depth: usize,
) -> Result<Option<StabilityWitness>, AnalysisError> {
    let sig = i.target.sig.clone();
    let reds = reducts(i, target)?;
    let mut space = FormulaSpace::new(sig.clone(), target.models(), term_depth);
    let mut homs: Vec<(usize, usize, Homomorphism)> = Vec::new();
    for n0 in 0..reds.len() {
        for n1 in 0..reds.len() {
            for h in enumerate_homs(&reds[n0], &reds[n1]) {
                homs.push((n0, n1, h));
            }
        }
    }
    for (src_scope, scope) in scopes(i) {
        let offs = offsets(target.models(), &scope);
        let mut moves: Vec<(usize, usize, Vec<Elem>)> = Vec::new();
        for (hi, (n0, n1, h)) in homs.iter().enumerate() {
            for a in target.get(*n0).tuples(&scope) {
                let b = h.apply_tuple(&src_scope, &a);
                let from = offs[*n0] + row_index(target.get(*n0), &scope, &a);
                let to = offs[*n1] + row_index(target.get(*n1), &scope, &b);
                moves.push((from, to, vec![hi]));
                moves.last_mut().expect("pushed").2.extend(a);
            }
        }
        for c in space.level(&scope, depth).iter() {
            for (from, to, rest) in &moves {
                if bit(c, *from) && !bit(c, *to) {
                    let (n0, n1, h) = &homs[rest[0]];
                    return Ok(Some(StabilityWitness {
                        n0: *n0,
                        n1: *n1,
                        hom: h.clone(),
                        sorts: src_scope.clone(),
                        tuple: rest[1..].to_vec(),
                        formula: formula(&sig, &scope, c),
                    }));
                }
            }
        }
    }
    Ok(None)
}

/// Distinct target homomorphisms `g, h: N0 -> N1` with `I*g = I*h`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FaithfulWitness {
    pub n0: usize,
    pub n1: usize,
    pub g: Homomorphism,
    pub h: Homomorphism,
}

impl FaithfulWitness {
    pub fn revalidate(&self, i: &Interpretation, target: &ModelClass) -> bool {
        let (n0, n1) = (target.get(self.n0), target.get(self.n1));
        self.g != self.h
            && is_homomorphism(n0, n1, &self.g)
            && is_homomorphism(n0, n1, &self.h)
            && reduct_hom(&self.g, i) == reduct_hom(&self.h, i)
    }

    pub fn to_json(&self) -> Value {
        json!({ "n0": self.n0, "n1": self.n1, "g": self.g.maps, "h": self.h.maps })
    }
}

pub fn check_faithful_reduct(i: &Interpretation, target: &ModelClass) -> Option<FaithfulWitness> {
    for n0 in 0..target.len() {
        for n1 in 0..target.len() {
            let mut seen: BTreeMap<Homomorphism, Homomorphism> = BTreeMap::new();
            for h in enumerate_homs(target.get(n0), target.get(n1)) {
                if let Some(g) = seen.insert(reduct_hom(&h, i), h.clone()) {
                    return Some(FaithfulWitness { n0, n1, g, h });
                }
            }
        }
    }
    None
}

/// `I_♭`: the reduct with every label whose sort is the image of a source
/// sort carried over to that source sort.
fn flat(i: &Interpretation, point: &SpectrumPoint, reduct: &Arc<FiniteStructure>) -> SpectrumPoint {
    let mut env = Env::new();
    for a in i.source.sig.sort_ids() {
        for (p, v) in &point.env {
            if p.sort == i.map_sort(a) {
                env.insert(Param::new(p.name.clone(), a), *v);
            }
        }
    }
    SpectrumPoint {
        model: point.model,
        structure: reduct.clone(),
        env,
    }
}

fn label(sorts: &[SortId], values: &[Elem]) -> Env {
    sorts
        .iter()
        .zip(values)
        .map(|(s, v)| (Param::new("k", *s), *v))
        .collect()
}

/// Superdense over basic opens: for `U = V_k`, `V = V_{R(k)}` and a point
/// `μ = (M, k ↦ a)` in `U - V`, some target point `ν` has `I_♭ν ∈ U - V`
/// and `μ` in the closure of `I_♭ν`.
pub fn superdense_spectral(
    i: &Interpretation,
    source: &ModelClass,
    target: &ModelClass,
    depth: usize,
    term_depth: usize,
) -> Result<Option<SupercoveringWitness>, AnalysisError> {
    let sig = i.source.sig.clone();
    let reds: Vec<Arc<FiniteStructure>> = reducts(i, target)?.into_iter().map(Arc::new).collect();
    let models: Vec<FiniteStructure> = source
        .models()
        .iter()
        .cloned()
        .chain(reds.iter().map(|r| (**r).clone()))
        .collect();
    let mut space = FormulaSpace::new(sig.clone(), &models, term_depth);
    for (scope, tscope) in scopes(i) {
        let params: Vec<Param> = scope.iter().map(|s| Param::new("k", *s)).collect();
        let mut images: Vec<SpectrumPoint> = Vec::new();
        for (k, n) in target.models().iter().enumerate() {
            let n = Arc::new(n.clone());
            for b in n.tuples(&tscope) {
                let nu = SpectrumPoint {
                    model: k,
                    structure: n.clone(),
                    env: label(&tscope, &b),
                };
                images.push(flat(i, &nu, &reds[k]));
            }
        }
        let mut mus: Vec<(SpectrumPoint, Vec<usize>)> = Vec::new();
        for (mi, m) in source.models().iter().enumerate() {
            let m = Arc::new(m.clone());
            for a in m.tuples(&scope) {
                let mu = SpectrumPoint {
                    model: mi,
                    structure: m.clone(),
                    env: label(&scope, &a),
                };
                let reach = (0..images.len())
                    .filter(|j| closure_leq(&mu, &images[*j]).is_some())
                    .collect();
                mus.push((mu, reach));
            }
        }
        for c in space.level(&scope, depth).iter() {
            let open = BasicOpen::new(formula(&sig, &scope, c), params.clone()).expect("sorts match");
            let inside: Vec<bool> = images.iter().map(|p| in_open(p, &open)).collect();
            for (mu, reach) in &mus {
                if !in_open(mu, &open) && reach.iter().all(|j| inside[*j]) {
                    return Ok(Some(SupercoveringWitness {
                        model: mu.model,
                        tuple: mu.values(&params).expect("labelled"),
                        formula: open.formula,
                    }));
                }
            }
        }
    }
    Ok(None)
}

/// Separates subgroupoids over basic opens: for `U = V_k` and the full open
/// `V = V_{S(k)}`, target points `y0 ∈ V` and `y1` with `I_♭y0` in the
/// closure of `I_♭y1` force `y1 ∈ V`.
pub fn separates_spectral(
    i: &Interpretation,
    target: &ModelClass,
    depth: usize,
    term_depth: usize,
) -> Result<Option<StabilityWitness>, AnalysisError> {
    let sig = i.target.sig.clone();
    let reds: Vec<Arc<FiniteStructure>> = reducts(i, target)?.into_iter().map(Arc::new).collect();
    let mut space = FormulaSpace::new(sig.clone(), target.models(), term_depth);
    for (src_scope, scope) in scopes(i) {
        let params: Vec<Param> = scope.iter().map(|s| Param::new("k", *s)).collect();
        let mut points: Vec<(SpectrumPoint, SpectrumPoint)> = Vec::new();
        for (k, n) in target.models().iter().enumerate() {
            let n = Arc::new(n.clone());
            for a in n.tuples(&scope) {
                let y = SpectrumPoint {
                    model: k,
                    structure: n.clone(),
                    env: label(&scope, &a),
                };
                let j = flat(i, &y, &reds[k]);
                points.push((y, j));
            }
        }
        let mut pairs: Vec<(usize, usize, Homomorphism)> = Vec::new();
        for (p0, (_, j0)) in points.iter().enumerate() {
            for (p1, (_, j1)) in points.iter().enumerate() {
                if let Some(h) = closure_leq(j0, j1) {
                    pairs.push((p0, p1, h));
                }
            }
        }
        for c in space.level(&scope, depth).iter() {
            let open = BasicOpen::new(formula(&sig, &scope, c), params.clone()).expect("sorts match");
            let inside: Vec<bool> = points.iter().map(|(y, _)| in_open(y, &open)).collect();
            if let Some((p0, p1, h)) = pairs.iter().find(|(p0, p1, _)| inside[*p0] && !inside[*p1]) {
                let y0 = &points[*p0].0;
                return Ok(Some(StabilityWitness {
                    n0: y0.model,
                    n1: points[*p1].0.model,
                    hom: h.clone(),
                    sorts: src_scope.clone(),
                    tuple: y0.values(&params).expect("labelled"),
                    formula: open.formula,
                }));
            }
        }
    }
    Ok(None)
}

/// Non-folding on the arrows used to detect distinct homomorphisms: for
/// `g, h: N0 -> N1`, `ν0` and `ν0'` label every element of `N0` and `ν1`
/// carries their images under `g` and `h`; `α = 1: ν0 ≅ ν0'` lies in the
/// closure of `1_{ν1}` exactly when `g = h`. The check fails when `I_♭α`
/// lies in the closure of `I_♭1_{ν1}` while `α` does not.
pub fn nonfolding_spectral(i: &Interpretation, target: &ModelClass) -> Result<Option<FaithfulWitness>, AnalysisError> {
    let reds: Vec<Arc<FiniteStructure>> = reducts(i, target)?.into_iter().map(Arc::new).collect();
    let sig = &i.target.sig;
    for n0 in 0..target.len() {
        let m0 = Arc::new(target.get(n0).clone());
        let mut lg = Env::new();
        let mut lh = Env::new();
        for s in sig.sort_ids() {
            for e in 0..m0.size(s) {
                lg.insert(Param::new(format!("g{}_{e}", s.0), s), e);
                lh.insert(Param::new(format!("h{}_{e}", s.0), s), e);
            }
        }
        let nu0 = SpectrumPoint {
            model: n0,
            structure: m0.clone(),
            env: lg.clone(),
        };
        let nu0p = SpectrumPoint {
            model: n0,
            structure: m0.clone(),
            env: lh.clone(),
        };
        let alpha = Arrow {
            src: nu0.clone(),
            tgt: nu0p.clone(),
            iso: Homomorphism::identity(&m0),
        };
        let j_alpha = Arrow {
            src: flat(i, &nu0, &reds[n0]),
            tgt: flat(i, &nu0p, &reds[n0]),
            iso: Homomorphism::identity(&reds[n0]),
        };
        for n1 in 0..target.len() {
            let m1 = Arc::new(target.get(n1).clone());
            let homs = enumerate_homs(&m0, &m1);
            for (gi, g) in homs.iter().enumerate() {
                for h in &homs[gi + 1..] {
                    let mut env = Env::new();
                    for (p, e) in &lg {
                        env.insert(p.clone(), g.apply(p.sort, *e));
                    }
                    for (p, e) in &lh {
                        env.insert(p.clone(), h.apply(p.sort, *e));
                    }
                    let nu1 = SpectrumPoint {
                        model: n1,
                        structure: m1.clone(),
                        env,
                    };
                    let beta = Arrow {
                        src: nu1.clone(),
                        tgt: nu1.clone(),
                        iso: Homomorphism::identity(&m1),
                    };
                    let j1 = flat(i, &nu1, &reds[n1]);
                    let j_beta = Arrow {
                        src: j1.clone(),
                        tgt: j1,
                        iso: Homomorphism::identity(&reds[n1]),
                    };
                    if arrow_closure(&j_alpha, &j_beta) && !arrow_closure(&alpha, &beta) {
                        return Ok(Some(FaithfulWitness {
                            n0,
                            n1,
                            g: g.clone(),
                            h: h.clone(),
                        }));
                    }
                }
            }
        }
    }
    Ok(None)
}

/// The sequents `⊤ ⊢ R` over the source and `⊤ ⊢ I(R)` over the target with
/// the prover's verdict on each; a countermodel for the first and a proof of
/// the second show `R ⊊ A` collapsing to `IR = IA`.
#[derive(Clone, Debug)]
pub struct CollapseWitness {
    pub source_sequent: Sequent,
    pub source: ProofOutcome,
    pub target_sequent: Sequent,
    pub target: ProofOutcome,
}

impl CollapseWitness {
    pub fn confirmed(&self) -> bool {
        self.source.is_countermodel() && self.target.is_proved()
    }
}

pub fn conservativity_witness(
    i: &Interpretation,
    r: &Formula,
    bounds: &ProverBounds,
) -> Result<CollapseWitness, AnalysisError> {
    let source_sequent = Sequent::new(r.ctx().clone(), Node::True, r.body().clone());
    let target_sequent = i.translate_sequent(&source_sequent);
    Ok(CollapseWitness {
        source: prove(&i.source, &source_sequent, bounds)?,
        target: prove(&i.target, &target_sequent, bounds)?,
        source_sequent,
        target_sequent,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RowResult {
    pub verdict: Verdict,
    pub witness: Option<Value>,
    /// Whether the witness passed independent re-validation.
    pub revalidated: Option<bool>,
}

impl RowResult {
    fn pass() -> Self {
        RowResult {
            verdict: Verdict::Pass,
            witness: None,
            revalidated: None,
        }
    }

    fn fail(witness: Value, ok: bool) -> Self {
        RowResult {
            verdict: Verdict::Fail,
            witness: Some(witness),
            revalidated: Some(ok),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RowReport {
    pub row: &'static str,
    pub syntactic: &'static str,
    pub semantic_name: &'static str,
    pub spectral_name: &'static str,
    pub semantic: RowResult,
    pub spectral: RowResult,
    pub agree: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct InterpretationReport {
    pub interpretation: String,
    pub bounds: AnalysisBounds,
    pub rows: Vec<RowReport>,
    /// Conservative (hence faithful) and full on subobjects.
    pub evidence_full: bool,
    /// Subcovering, full on subobjects and faithful.
    pub evidence_essentially_surjective: bool,
    pub evidence_equivalence: bool,
    /// Sequent pairs showing a source subobject collapsing in the target.
    pub collapse: Option<Value>,
    pub provenance: &'static str,
}

impl InterpretationReport {
    pub fn verdict(&self) -> Verdict {
        self.rows
            .iter()
            .fold(Verdict::Pass, |v, r| v.combine(r.semantic.verdict).combine(r.spectral.verdict))
    }

    pub fn row(&self, name: &str) -> Option<&RowReport> {
        self.rows.iter().find(|r| r.row == name || r.semantic_name == name)
    }

    pub fn to_json(&self) -> Value {
        serde_json::to_value(self).expect("report serializes")
    }
}

fn row(
    row: &'static str,
    names: [&'static str; 3],
    semantic: RowResult,
    spectral: RowResult,
) -> RowReport {
    RowReport {
        row,
        syntactic: names[0],
        semantic_name: names[1],
        spectral_name: names[2],
        agree: semantic.verdict == spectral.verdict,
        semantic,
        spectral,
    }
}

/// Runs all six checks on the given classes. Evidence flags follow the
/// combination results: conservative and full on subobjects give full;
/// all three rows give essential surjectivity and so an equivalence.
pub fn conceptual_completeness_report(
    i: &Interpretation,
    source: &ModelClass,
    target: &ModelClass,
    bounds: &AnalysisBounds,
) -> Result<InterpretationReport, AnalysisError> {
    let (d, td) = (bounds.depth, bounds.term_depth);
    let ssig = &i.source.sig;
    let tsig = &i.target.sig;
    let mut collapse = None;
    let a_sem = match check_supercovering(i, source, target, d, td)? {
        None => RowResult::pass(),
        Some(w) => {
            let c = conservativity_witness(i, &w.formula, &bounds.prover)?;
            collapse = Some(json!({
                "source_sequent": print_sequent(ssig, &c.source_sequent),
                "source": c.source.verdict(),
                "target_sequent": print_sequent(tsig, &c.target_sequent),
                "target": c.target.verdict(),
                "confirmed": c.confirmed(),
            }));
            RowResult::fail(w.to_json(ssig), w.revalidate(i, source, target))
        }
    };
    let a_spec = match superdense_spectral(i, source, target, d, td)? {
        None => RowResult::pass(),
        Some(w) => RowResult::fail(w.to_json(ssig), w.revalidate(i, source, target)),
    };
    let b_sem = match check_stabilizes_subobjects(i, target, d, td)? {
        None => RowResult::pass(),
        Some(w) => RowResult::fail(w.to_json(tsig), w.revalidate(i, target)),
    };
    let b_spec = match separates_spectral(i, target, d, td)? {
        None => RowResult::pass(),
        Some(w) => RowResult::fail(w.to_json(tsig), w.revalidate(i, target)),
    };
    let c_sem = match check_faithful_reduct(i, target) {
        None => RowResult::pass(),
        Some(w) => RowResult::fail(w.to_json(), w.revalidate(i, target)),
    };
    let c_spec = match nonfolding_spectral(i, target)? {
        None => RowResult::pass(),
        Some(w) => RowResult::fail(w.to_json(), w.revalidate(i, target)),
    };
    let rows = vec![
        row("a", ["conservative", "supercovering", "superdense"], a_sem, a_spec),
        row(
            "b",
            ["full on subobjects", "stabilizes subobjects", "separates subgroupoids"],
            b_sem,
            b_spec,
        ),
        row("c", ["subcovering", "faithful reduct", "non-folding"], c_sem, c_spec),
    ];
    let passes = |k: usize| rows[k].semantic.verdict == Verdict::Pass && rows[k].spectral.verdict == Verdict::Pass;
    let evidence_full = passes(0) && passes(1);
    let evidence_essentially_surjective = passes(0) && passes(1) && passes(2);
    Ok(InterpretationReport {
        interpretation: i.name.clone(),
        bounds: *bounds,
        rows,
        evidence_full,
        evidence_essentially_surjective,
        evidence_equivalence: evidence_essentially_surjective,
        collapse,
        provenance: BOUND_VALIDATED,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cli::{parse_formula, parse_theory};
    use crate::models::enumerate_models;

    fn arc(src: &str) -> Arc<crate::logic::Theory> {
        Arc::new(parse_theory(src).unwrap())
    }

    fn classes(i: &Interpretation, n: usize) -> (ModelClass, ModelClass) {
        (
            enumerate_models(&i.source, n).unwrap(),
            enumerate_models(&i.target, n).unwrap(),
        )
    }

    #[test]
    fn identity_passes_every_row() {
        let t = arc(include_str!("../../theories/pointed_sets.thy"));
        let i = Interpretation::identity(t);
        let (s, tg) = classes(&i, 3);
        let r = conceptual_completeness_report(&i, &s, &tg, &AnalysisBounds::default()).unwrap();
        assert_eq!(r.verdict(), Verdict::Pass);
        assert!(r.rows.iter().all(|r| r.agree));
        assert!(r.evidence_equivalence);
    }

    #[test]
    fn quotient_fails_only_supercovering() {
        let e = arc("theory unary\nsort A\nrel P : A\n");
        let f = arc("theory unary_total\nsort A\nrel P : A\naxiom [x:A] true |- P(x)\n");
        let i = Interpretation::by_name(e, f).unwrap();
        let (s, tg) = classes(&i, 3);
        let r = conceptual_completeness_report(&i, &s, &tg, &AnalysisBounds::default()).unwrap();
        let verdicts: Vec<Verdict> = r.rows.iter().map(|r| r.semantic.verdict).collect();
        assert_eq!(verdicts, [Verdict::Fail, Verdict::Pass, Verdict::Pass]);
        assert!(r.rows.iter().all(|r| r.agree));
        assert_eq!(r.rows[0].semantic.revalidated, Some(true));
        assert_eq!(r.rows[0].spectral.revalidated, Some(true));
        assert_eq!(r.collapse.as_ref().unwrap()["confirmed"], true);
        assert!(!r.evidence_full);
    }

    #[test]
    fn new_relation_fails_only_stability() {
        let e = arc("theory bare\nsort A\n");
        let f = arc("theory marked\nsort A\nrel R : A\n");
        let i = Interpretation::by_name(e, f).unwrap();
        let (s, tg) = classes(&i, 3);
        let w = check_stabilizes_subobjects(&i, &tg, 1, 1).unwrap().unwrap();
        assert!(w.revalidate(&i, &tg));
        let r = conceptual_completeness_report(&i, &s, &tg, &AnalysisBounds::default()).unwrap();
        let verdicts: Vec<Verdict> = r.rows.iter().map(|r| r.semantic.verdict).collect();
        assert_eq!(verdicts, [Verdict::Pass, Verdict::Fail, Verdict::Pass]);
        assert!(r.rows.iter().all(|r| r.agree));
    }

    #[test]
    fn new_sort_fails_only_faithfulness() {
        let e = arc("theory nothing\n");
        let f = arc("theory inhabited\nsort A\naxiom [] true |- exists x:A. x = x\n");
        let i = Interpretation::by_name(e, f).unwrap();
        let (s, tg) = classes(&i, 3);
        let r = conceptual_completeness_report(&i, &s, &tg, &AnalysisBounds::default()).unwrap();
        let verdicts: Vec<Verdict> = r.rows.iter().map(|r| r.semantic.verdict).collect();
        assert_eq!(verdicts, [Verdict::Pass, Verdict::Pass, Verdict::Fail]);
        assert!(r.rows.iter().all(|r| r.agree));
        assert_eq!(r.rows[2].semantic.revalidated, Some(true));
    }

    #[test]
    fn point_into_groups_is_supercovering() {
        let e = arc(include_str!("../../theories/pointed_sets.thy"));
        let f = arc(include_str!("../../theories/groups.thy"));
        let fsig = f.sig.clone();
        let a = fsig.sort_id("G").unwrap();
        let pt = parse_formula(&fsig, "[x:G] x = e").unwrap();
        let i = Interpretation::new("point", e, f, vec![a], vec![pt], vec![]).unwrap();
        let (s, tg) = classes(&i, 3);
        assert!(check_supercovering(&i, &s, &tg, 2, 1).unwrap().is_none());
        assert!(superdense_spectral(&i, &s, &tg, 2, 1).unwrap().is_none());
    }

    #[test]
    fn non_functional_image_is_reported() {
        let e = arc(include_str!("../../theories/pointed_sets.thy"));
        let f = arc("theory bare\nsort S\n");
        let pt = parse_formula(&f.sig, "[x:S] x = x").unwrap();
        let s = f.sig.sort_id("S").unwrap();
        let i = Interpretation::new("loose", e, f, vec![s], vec![pt], vec![]).unwrap();
        let tg = enumerate_models(&i.target, 2).unwrap();
        let w = check_functional(&i, &tg).unwrap_err();
        assert!(w.detail.contains("pt"));
    }
}
