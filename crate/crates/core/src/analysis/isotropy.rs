//! Definable automorphisms: the six sequents, stalks at a model, normality.

use serde_json::{json, Value};

use super::{AnalysisError, Verdict, BOUND_VALIDATED};
use crate::definability::FormulaSpace;
use crate::logic::{print_formula, print_sequent, Binder, Context, Formula, Node, Sequent, Signature, SortId, Term, Theory};
use crate::models::{
    enumerate_homs, eval, is_isomorphism, violation, Elem, FiniteStructure, Homomorphism, ModelClass, Tuples,
};
use crate::prover::{prove, ProofOutcome, ProverBounds};

/// Formulas `σ_B(y, y', x)`, one per sort `B`, each in the context
/// `[y:B, y':B] ++ params`, with an optional anchor `(model, a)` fixing the
/// parameter value for the `M`-definable reading.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AutomorphismCandidate {
    pub params: Context,
    pub sigma: Vec<Formula>,
    pub anchor: Option<(usize, Vec<Elem>)>,
}

impl AutomorphismCandidate {
    pub fn new(sig: &Signature, params: Context, sigma: Vec<Formula>) -> Result<Self, AnalysisError> {
        if sigma.len() != sig.sorts.len() {
            return Err(AnalysisError::Candidate(format!(
                "{} formulas for {} sorts",
                sigma.len(),
                sig.sorts.len()
            )));
        }
        for (b, f) in sig.sort_ids().zip(&sigma) {
            let mut want = vec![b, b];
            want.extend(params.sorts());
            if f.ctx().sorts() != want {
                return Err(AnalysisError::Candidate(format!(
                    "formula for sort {} must be in context [y:{0}, y':{0}] followed by the parameters",
                    sig.sort_name(b)
                )));
            }
        }
        Ok(AutomorphismCandidate {
            params,
            sigma,
            anchor: None,
        })
    }

    pub fn with_anchor(mut self, model: usize, value: Vec<Elem>) -> Self {
        self.anchor = Some((model, value));
        self
    }

    fn inst(&self, b: SortId, y: Term, y2: Term, scope_len: usize) -> Node {
        let p = self.params.len();
        let mut images = vec![y, y2];
        images.extend((0..p).map(Term::Var));
        self.sigma[b.0].body().rebase(2 + p, &images, scope_len)
    }

    /// The permutation defined in `m` at parameter value `a`, if the
    /// formulas define an automorphism there.
    pub fn defines_automorphism(&self, m: &FiniteStructure, a: &[Elem]) -> Option<Homomorphism> {
        let mut maps = Vec::new();
        for (b, f) in self.sigma.iter().enumerate() {
            let set = eval(m, f).ok()?;
            let n = m.size(SortId(b));
            let mut map = Vec::with_capacity(n);
            for y in 0..n {
                let mut images = (0..n).filter(|y2| {
                    let mut t = vec![y, *y2];
                    t.extend_from_slice(a);
                    set.contains(&t)
                });
                match (images.next(), images.next()) {
                    (Some(y2), None) => map.push(y2),
                    _ => return None,
                }
            }
            maps.push(map);
        }
        let h = Homomorphism { maps };
        (h.is_bijective() && is_isomorphism(m, m, &h)).then_some(h)
    }

    pub fn to_json(&self, sig: &Signature) -> Value {
        let sigma: Vec<Value> = self
            .sigma
            .iter()
            .map(|f| json!(print_formula(sig, f.ctx(), f.body())))
            .collect();
        json!({
            "params": self.params.vars().iter().map(|(n, s)| json!([n, sig.sort_name(*s)])).collect::<Vec<_>>(),
            "sigma": sigma,
            "anchor": self.anchor.as_ref().map(|(m, a)| json!({ "model": m, "value": a })),
        })
    }
}

fn fresh(names: &mut Vec<String>, base: &str) -> String {
    let mut name = base.to_string();
    while names.contains(&name) {
        name.push('_');
    }
    names.push(name.clone());
    name
}

/// The sequents whose provability makes the candidate a definable
/// automorphism, as `(schema, symbol, sequent)`.
pub fn automorphism_sequents(sig: &Signature, cand: &AutomorphismCandidate) -> Vec<(String, String, Sequent)> {
    let p = cand.params.len();
    let base: Vec<(String, SortId)> = cand.params.vars().to_vec();
    let ctx_with = |extra: &[(&str, SortId)]| {
        let mut names: Vec<String> = base.iter().map(|(n, _)| n.clone()).collect();
        let mut vars = base.clone();
        for (n, s) in extra {
            vars.push((fresh(&mut names, n), *s));
        }
        Context::new(vars).expect("fresh names")
    };
    let v = Term::Var;
    let mut out = Vec::new();
    for b in sig.sort_ids() {
        let name = sig.sort_name(b).to_string();
        let ctx = ctx_with(&[("y", b)]);
        let rhs = Node::exists(Binder::new("y'", b), cand.inst(b, v(p), v(p + 1), p + 2));
        out.push(("total".into(), name.clone(), Sequent::new(ctx, Node::True, rhs)));
        let ctx = ctx_with(&[("y'", b)]);
        let rhs = Node::exists(Binder::new("y", b), cand.inst(b, v(p + 1), v(p), p + 2));
        out.push(("surjective".into(), name.clone(), Sequent::new(ctx, Node::True, rhs)));
        let ctx = ctx_with(&[("y", b), ("y'", b), ("y''", b)]);
        let lhs = Node::and(cand.inst(b, v(p), v(p + 1), p + 3), cand.inst(b, v(p), v(p + 2), p + 3));
        out.push((
            "single-valued".into(),
            name.clone(),
            Sequent::new(ctx.clone(), lhs, Node::eq(v(p + 1), v(p + 2))),
        ));
        let lhs = Node::and(cand.inst(b, v(p), v(p + 2), p + 3), cand.inst(b, v(p + 1), v(p + 2), p + 3));
        out.push(("injective".into(), name, Sequent::new(ctx, lhs, Node::eq(v(p), v(p + 1)))));
    }
    let pairs = |args: &[SortId]| {
        let n = args.len();
        let mut extra: Vec<(String, SortId)> = Vec::new();
        for (i, s) in args.iter().enumerate() {
            extra.push((format!("y{i}"), *s));
        }
        for (i, s) in args.iter().enumerate() {
            extra.push((format!("y{i}'"), *s));
        }
        let refs: Vec<(&str, SortId)> = extra.iter().map(|(a, s)| (a.as_str(), *s)).collect();
        let ctx = ctx_with(&refs);
        let len = p + 2 * n;
        let links = Node::conj(
            args.iter()
                .enumerate()
                .map(|(i, s)| cand.inst(*s, v(p + i), v(p + n + i), len)),
        );
        (ctx, links, len)
    };
    for r in sig.rel_ids() {
        let sym = sig.rel(r);
        let n = sym.args.len();
        let (ctx, links, _) = pairs(&sym.args);
        let lhs = Node::and(links, Node::rel(r, (0..n).map(|i| v(p + i))));
        let rhs = Node::rel(r, (0..n).map(|i| v(p + n + i)));
        out.push(("preserves".into(), sym.name.clone(), Sequent::new(ctx, lhs, rhs)));
    }
    for f in sig.func_ids() {
        let sym = sig.func(f);
        let n = sym.args.len();
        let (ctx, links, len) = pairs(&sym.args);
        let rhs = cand.inst(
            sym.result,
            Term::app(f, (0..n).map(|i| v(p + i))),
            Term::app(f, (0..n).map(|i| v(p + n + i))),
            len,
        );
        out.push(("natural".into(), sym.name.clone(), Sequent::new(ctx, links, rhs)));
    }
    out
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ObligationStatus {
    Proved,
    /// The prover returned a verified countermodel.
    Refuted,
    /// The prover stopped at a bound; every member of the class satisfies it.
    BoundValidated,
    /// The prover stopped at a bound; a member of the class violates it.
    FailsOnClass,
    Unknown,
}

impl ObligationStatus {
    pub fn as_str(self) -> &'static str {
        match self {
            ObligationStatus::Proved => "proved",
            ObligationStatus::Refuted => "refuted",
            ObligationStatus::BoundValidated => "bound-validated",
            ObligationStatus::FailsOnClass => "fails on class",
            ObligationStatus::Unknown => "unknown",
        }
    }

    fn verdict(self) -> Verdict {
        match self {
            ObligationStatus::Proved | ObligationStatus::BoundValidated => Verdict::Pass,
            ObligationStatus::Refuted | ObligationStatus::FailsOnClass => Verdict::Fail,
            ObligationStatus::Unknown => Verdict::Unknown,
        }
    }
}

#[derive(Clone, Debug)]
pub struct Obligation {
    pub schema: String,
    pub symbol: String,
    pub sequent: Sequent,
    pub status: ObligationStatus,
    pub provenance: &'static str,
    /// A model violating the sequent, with the violating tuple.
    pub countermodel: Option<(FiniteStructure, Vec<Elem>)>,
}

#[derive(Clone, Debug)]
pub struct AutomorphismCheck {
    pub obligations: Vec<Obligation>,
    pub verdict: Verdict,
}

impl AutomorphismCheck {
    pub fn all_proved(&self) -> bool {
        self.obligations.iter().all(|o| o.status == ObligationStatus::Proved)
    }

    pub fn to_json(&self, sig: &Signature) -> Value {
        let obligations: Vec<Value> = self
            .obligations
            .iter()
            .map(|o| {
                json!({
                    "schema": o.schema,
                    "symbol": o.symbol,
                    "sequent": print_sequent(sig, &o.sequent),
                    "status": o.status.as_str(),
                    "provenance": o.provenance,
                    "countermodel": o.countermodel.as_ref().map(|(m, t)| json!({ "model": m.to_data(), "tuple": t })),
                })
            })
            .collect();
        json!({ "verdict": self.verdict, "obligations": obligations })
    }
}

/// Decides every sequent with the prover; obligations the prover leaves open
/// are checked on `class` when given and tagged as bound-validated.
pub fn check_definable_automorphism(
    theory: &Theory,
    cand: &AutomorphismCandidate,
    bounds: &ProverBounds,
    class: Option<&ModelClass>,
) -> Result<AutomorphismCheck, AnalysisError> {
    let mut obligations = Vec::new();
    let mut verdict = Verdict::Pass;
    for (schema, symbol, sequent) in automorphism_sequents(&theory.sig, cand) {
        let outcome = prove(theory, &sequent, bounds)?;
        let (status, provenance, countermodel) = match outcome {
            ProofOutcome::Proved(_) => (ObligationStatus::Proved, "prover", None),
            ProofOutcome::Countermodel { model, witness, .. } => {
                (ObligationStatus::Refuted, "prover", Some((model, witness)))
            }
            ProofOutcome::Unknown { .. } => match class {
                Some(c) => match c.models().iter().find_map(|m| violation(m, &sequent).map(|t| (m.clone(), t))) {
                    None => (ObligationStatus::BoundValidated, BOUND_VALIDATED, None),
                    Some(w) => (ObligationStatus::FailsOnClass, BOUND_VALIDATED, Some(w)),
                },
                None => (ObligationStatus::Unknown, "prover", None),
            },
        };
        verdict = verdict.combine(status.verdict());
        obligations.push(Obligation {
            schema,
            symbol,
            sequent,
            status,
            provenance,
            countermodel,
        });
    }
    Ok(AutomorphismCheck { obligations, verdict })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum IsotropyStatus {
    /// Defined by formulas with a parameter from `M` that define an
    /// automorphism of every `N` along every homomorphism `M -> N` in the class.
    MDefinable,
    /// Defined at `M` only.
    ParameterDefinable,
    NotFound,
}

impl IsotropyStatus {
    pub fn as_str(self) -> &'static str {
        match self {
            IsotropyStatus::MDefinable => "M-definable",
            IsotropyStatus::ParameterDefinable => "parameter-definable only",
            IsotropyStatus::NotFound => "not found at bound",
        }
    }
}

#[derive(Clone, Debug)]
pub struct IsotropyEntry {
    pub automorphism: Homomorphism,
    pub status: IsotropyStatus,
    pub candidate: Option<AutomorphismCandidate>,
}

#[derive(Clone, Debug)]
pub struct IsotropyReport {
    pub model: usize,
    pub entries: Vec<IsotropyEntry>,
    /// The automorphisms found are closed under composition and inverse.
    pub closed: bool,
}

impl IsotropyReport {
    pub fn m_definable(&self) -> Vec<&Homomorphism> {
        self.entries
            .iter()
            .filter(|e| e.status == IsotropyStatus::MDefinable)
            .map(|e| &e.automorphism)
            .collect()
    }

    pub fn to_json(&self, sig: &Signature) -> Value {
        let entries: Vec<Value> = self
            .entries
            .iter()
            .map(|e| {
                json!({
                    "automorphism": e.automorphism.maps,
                    "status": e.status.as_str(),
                    "definition": e.candidate.as_ref().map(|c| c.to_json(sig)),
                })
            })
            .collect();
        json!({ "model": self.model, "entries": entries, "closed": self.closed })
    }
}

/// Whether `cand` at its anchor defines an automorphism of every class
/// member along every homomorphism out of the anchor model.
fn along_homs(cand: &AutomorphismCandidate, homs: &[(usize, Homomorphism)], class: &ModelClass) -> bool {
    let Some((_, a)) = &cand.anchor else {
        return false;
    };
    let psorts = cand.params.sorts();
    homs.iter().all(|(j, h)| {
        let moved = h.apply_tuple(&psorts, a);
        cand.defines_automorphism(class.get(*j), &moved).is_some()
    })
}

fn closed_set(found: &[&Homomorphism]) -> bool {
    found.iter().all(|a| {
        found.contains(&&a.inverse()) && found.iter().all(|b| found.contains(&&a.compose(b)))
    })
}

/// Enumerates `Aut(M)` and searches, per automorphism, formulas of depth at
/// most `depth` and parameters from `M` (at most `param_budget` of them)
/// defining it; candidates are then checked along every homomorphism from
/// `M` into the class.
pub fn isotropy_at_model(
    class: &ModelClass,
    model: usize,
    depth: usize,
    term_depth: usize,
    param_budget: usize,
) -> Result<IsotropyReport, AnalysisError> {
    if model >= class.len() {
        return Err(AnalysisError::Model(model));
    }
    let sig = class.theory.sig.clone();
    let m = class.get(model);
    // M first so its bits open every extension; the other members keep
    // formulas that agree on M but differ elsewhere apart
    let models: Vec<FiniteStructure> = std::iter::once(m.clone())
        .chain((0..class.len()).filter(|j| *j != model).map(|j| class.get(j).clone()))
        .collect();
    let mut space = FormulaSpace::new(sig.clone(), &models, term_depth);
    let homs: Vec<(usize, Homomorphism)> = (0..class.len())
        .flat_map(|j| enumerate_homs(m, class.get(j)).into_iter().map(move |h| (j, h)))
        .collect();
    let sorts: Vec<SortId> = sig.sort_ids().collect();
    let mut entries = Vec::new();
    for alpha in class.automorphisms(model) {
        let mut first: Option<AutomorphismCandidate> = None;
        let mut best: Option<AutomorphismCandidate> = None;
        'search: for p in 0..=param_budget {
            for pick in Tuples::new(vec![sorts.len(); p]) {
                let psorts: Vec<SortId> = pick.iter().map(|i| sorts[*i]).collect();
                let params = Context::new(
                    psorts.iter().enumerate().map(|(i, s)| (format!("x{i}"), *s)).collect(),
                )
                .expect("distinct names");
                let values: Vec<Vec<Elem>> = m.tuples(&psorts).collect();
                let width = values.len();
                // per sort, per parameter value: matching formulas in order
                let mut definers: Vec<Vec<Vec<Formula>>> = Vec::new();
                for b in &sorts {
                    let mut scope = vec![*b, *b];
                    scope.extend(&psorts);
                    let ctx = Context::new(
                        [("y".to_string(), *b), ("y'".to_string(), *b)]
                            .into_iter()
                            .chain(params.vars().iter().cloned())
                            .collect(),
                    )
                    .expect("distinct names");
                    let level = space.level(&scope, depth);
                    let n = m.size(*b);
                    let mut per_value = vec![Vec::new(); width];
                    for c in level.iter() {
                        let bit = |i: usize| c.bits[i / 64] >> (i % 64) & 1 == 1;
                        for (r, slot) in per_value.iter_mut().enumerate() {
                            let ok = (0..n).all(|y| {
                                (0..n).all(|y2| bit((y * n + y2) * width + r) == (alpha.maps[b.0][y] == y2))
                            });
                            if ok {
                                slot.push(Formula::new(&sig, ctx.clone(), c.body.clone()).expect("well-formed"));
                            }
                        }
                    }
                    definers.push(per_value);
                }
                for (r, a) in values.iter().enumerate() {
                    let lists: Vec<&Vec<Formula>> = definers.iter().map(|d| &d[r]).collect();
                    if lists.iter().any(|l| l.is_empty()) {
                        continue;
                    }
                    for choice in Tuples::new(lists.iter().map(|l| l.len()).collect()).take(256) {
                        let sigma: Vec<Formula> = choice.iter().zip(&lists).map(|(i, l)| l[*i].clone()).collect();
                        let cand = AutomorphismCandidate::new(&sig, params.clone(), sigma)?.with_anchor(model, a.clone());
                        if first.is_none() {
                            first = Some(cand.clone());
                        }
                        if along_homs(&cand, &homs, class) {
                            best = Some(cand);
                            break 'search;
                        }
                    }
                }
            }
        }
        let (status, candidate) = match (best, first) {
            (Some(c), _) => (IsotropyStatus::MDefinable, Some(c)),
            (None, Some(c)) => (IsotropyStatus::ParameterDefinable, Some(c)),
            (None, None) => (IsotropyStatus::NotFound, None),
        };
        entries.push(IsotropyEntry {
            automorphism: alpha.clone(),
            status,
            candidate,
        });
    }
    let found: Vec<&Homomorphism> = entries
        .iter()
        .filter(|e| e.status != IsotropyStatus::NotFound)
        .map(|e| &e.automorphism)
        .collect();
    let closed = closed_set(&found);
    Ok(IsotropyReport {
        model,
        entries,
        closed,
    })
}

#[derive(Clone, Debug)]
pub struct NormalityReport {
    pub holds: bool,
    pub checked: usize,
    /// `(entry, β)` pairs where the conjugate is not defined by `σ` at the
    /// moved parameter or is not among the `M`-definable automorphisms.
    pub failures: Vec<(usize, Homomorphism)>,
}

impl NormalityReport {
    pub fn to_json(&self) -> Value {
        let failures: Vec<Value> = self
            .failures
            .iter()
            .map(|(e, b)| json!({ "entry": e, "beta": b.maps }))
            .collect();
        json!({ "holds": self.holds, "checked": self.checked, "failures": failures })
    }
}

/// For every `β ∈ Aut(M)` and `M`-definable `α` given by `σ` at `b`, the
/// conjugate `β α β⁻¹` is the permutation defined by `σ` at `β(b)` and is
/// itself `M`-definable.
pub fn check_normality(class: &ModelClass, report: &IsotropyReport) -> NormalityReport {
    let m = class.get(report.model);
    let defined = report.m_definable();
    let mut failures = Vec::new();
    let mut checked = 0;
    for (i, e) in report.entries.iter().enumerate() {
        let (IsotropyStatus::MDefinable, Some(cand)) = (e.status, &e.candidate) else {
            continue;
        };
        let Some((_, b)) = &cand.anchor else {
            continue;
        };
        let psorts = cand.params.sorts();
        for beta in class.automorphisms(report.model) {
            checked += 1;
            let conj = beta.compose(&e.automorphism.compose(&beta.inverse()));
            let moved = beta.apply_tuple(&psorts, b);
            let ok = cand.defines_automorphism(m, &moved).as_ref() == Some(&conj)
                && defined.contains(&&conj);
            if !ok {
                failures.push((i, beta.clone()));
            }
        }
    }
    NormalityReport {
        holds: failures.is_empty(),
        checked,
        failures,
    }
}
