//! Labelled models as points, basic opens, and the specialization order.
//!
//! A point is a model together with a finite partial environment sending
//! parameter names to elements. Parameter names come from an unbounded
//! namespace; a run draws them from a pool of `budget` names per sort.

mod groupoid;

use std::collections::BTreeMap;
use std::fmt;
use std::ops::ControlFlow;
use std::sync::Arc;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::logic::{Binder, Context, Formula, Node, Sequent, SortId, Term, Theory};
use crate::models::{eval, Elem, FiniteStructure, HomSearch, Homomorphism};
use crate::prover::{prove, ProofOutcome, ProverBounds};

pub use groupoid::{param_pool, Component, SpectrumGroupoid};

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Param {
    pub sort: SortId,
    pub name: String,
}

impl Param {
    pub fn new(name: impl Into<String>, sort: SortId) -> Self {
        Param {
            sort,
            name: name.into(),
        }
    }
}

impl fmt::Display for Param {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.name)
    }
}

pub type Env = BTreeMap<Param, Elem>;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SpectrumPoint {
    /// Index of the model in its class.
    pub model: usize,
    pub structure: Arc<FiniteStructure>,
    pub env: Env,
}

impl SpectrumPoint {
    pub fn new(model: usize, structure: Arc<FiniteStructure>, env: Env) -> Result<Self, SpectrumError> {
        for (p, a) in &env {
            if *a >= structure.size(p.sort) {
                return Err(SpectrumError::OutOfRange(p.name.clone()));
            }
        }
        Ok(SpectrumPoint {
            model,
            structure,
            env,
        })
    }

    pub fn value(&self, p: &Param) -> Option<Elem> {
        self.env.get(p).copied()
    }

    /// The values of `params`, if all are defined.
    pub fn values(&self, params: &[Param]) -> Option<Vec<Elem>> {
        params.iter().map(|p| self.value(p)).collect()
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum SpectrumError {
    #[error("parameter `{0}` assigned outside its carrier")]
    OutOfRange(String),
    #[error("parameter `{0}` is both frozen and retargeted")]
    NotDisjoint(String),
    #[error("parameter `{0}` has the wrong sort for its position")]
    SortMismatch(String),
    #[error("{0} parameters for {1} values")]
    Arity(usize, usize),
}

/// `V_{φ(k)}`: the points at which the parameters `k` are defined and name a
/// tuple in `φ`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BasicOpen {
    pub formula: Formula,
    pub params: Vec<Param>,
}

impl BasicOpen {
    pub fn new(formula: Formula, params: Vec<Param>) -> Result<Self, SpectrumError> {
        let sorts = formula.ctx().sorts();
        if sorts.len() != params.len() {
            return Err(SpectrumError::Arity(params.len(), sorts.len()));
        }
        for (p, s) in params.iter().zip(&sorts) {
            if p.sort != *s {
                return Err(SpectrumError::SortMismatch(p.name.clone()));
            }
        }
        Ok(BasicOpen { formula, params })
    }
}

pub fn in_open(point: &SpectrumPoint, open: &BasicOpen) -> bool {
    let Some(tuple) = point.values(&open.params) else {
        return false;
    };
    match eval(&point.structure, &open.formula) {
        Ok(set) => set.contains(&tuple),
        Err(_) => false,
    }
}

/// Homomorphisms `M_μ -> M_ν` sending each parameter's value at `μ` to its
/// value at `ν`; empty unless every parameter defined at `μ` is defined at
/// `ν`.
fn label_search<'a>(mu: &'a SpectrumPoint, nu: &'a SpectrumPoint) -> Option<HomSearch<'a>> {
    let mut fixed: BTreeMap<(SortId, Elem), Elem> = BTreeMap::new();
    for (p, a) in &mu.env {
        let b = nu.value(p)?;
        match fixed.insert((p.sort, *a), b) {
            Some(old) if old != b => return None,
            _ => {}
        }
    }
    let mut search = HomSearch::new(&mu.structure, &nu.structure);
    for ((s, a), b) in fixed {
        search = search.fix(s, a, b);
    }
    Some(search)
}

/// `μ` lies in the closure of `ν`: the induced homomorphism `M_μ -> M_ν`.
pub fn closure_leq(mu: &SpectrumPoint, nu: &SpectrumPoint) -> Option<Homomorphism> {
    label_search(mu, nu)?.first()
}

/// Every homomorphism that witnesses `closure_leq(mu, nu)`.
pub fn closure_homs(mu: &SpectrumPoint, nu: &SpectrumPoint) -> Vec<Homomorphism> {
    label_search(mu, nu).map(|s| s.all()).unwrap_or_default()
}

/// Both points lie in each other's closure.
pub fn indistinguishable(mu: &SpectrumPoint, nu: &SpectrumPoint) -> bool {
    closure_leq(mu, nu).is_some() && closure_leq(nu, mu).is_some()
}

/// An isomorphism `iso: M_src -> M_tgt` between the models of two points.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Arrow {
    pub src: SpectrumPoint,
    pub tgt: SpectrumPoint,
    pub iso: Homomorphism,
}

/// `α` lies in the closure of `β`: there are label-respecting homomorphisms
/// `h0: src(α) -> src(β)` and `h1: tgt(α) -> tgt(β)` with `β ∘ h0 = h1 ∘ α`.
pub fn arrow_closure(alpha: &Arrow, beta: &Arrow) -> bool {
    let Some(h0s) = label_search(&alpha.src, &beta.src) else {
        return false;
    };
    if label_search(&alpha.tgt, &beta.tgt).is_none() {
        return false;
    }
    let back = alpha.iso.inverse();
    let mut found = false;
    h0s.run(|h0| {
        // the square forces h1 = β ∘ h0 ∘ α⁻¹
        let h1 = beta.iso.compose(&h0.compose(&back));
        let respects = alpha
            .tgt
            .env
            .iter()
            .all(|(p, a)| beta.tgt.value(p) == Some(h1.maps[p.sort.0][*a]));
        if respects && crate::models::is_homomorphism(&alpha.tgt.structure, &beta.tgt.structure, &h1) {
            found = true;
            ControlFlow::Break(())
        } else {
            ControlFlow::Continue(())
        }
    });
    found
}

/// Sets `retarget[i]` to `values[i]`, leaving every other parameter alone.
pub fn reassign(
    point: &SpectrumPoint,
    frozen: &[Param],
    retarget: &[Param],
    values: &[Elem],
) -> Result<SpectrumPoint, SpectrumError> {
    if retarget.len() != values.len() {
        return Err(SpectrumError::Arity(retarget.len(), values.len()));
    }
    if let Some(p) = retarget.iter().find(|p| frozen.contains(p)) {
        return Err(SpectrumError::NotDisjoint(p.name.clone()));
    }
    let mut env = point.env.clone();
    let mut seen: BTreeMap<&Param, Elem> = BTreeMap::new();
    for (p, v) in retarget.iter().zip(values) {
        if seen.insert(p, *v).is_some_and(|old| old != *v) {
            return Err(SpectrumError::NotDisjoint(p.name.clone()));
        }
        env.insert(p.clone(), *v);
    }
    SpectrumPoint::new(point.model, point.structure.clone(), env)
}

/// Given `U ⊆ V` on `points`, the sequent `∃y.ψ(x,y) ⊢ φ(x)` with
/// `U = V_{ψ(k,l)}`, `V = V_{φ(k)}`, and the prover's verdict on it. `None`
/// when the inclusion fails on some point.
pub fn open_inclusion_witness(
    theory: &Theory,
    points: &[SpectrumPoint],
    u: &BasicOpen,
    v: &BasicOpen,
    bounds: &ProverBounds,
) -> Option<(Sequent, ProofOutcome)> {
    if points.iter().any(|p| in_open(p, u) && !in_open(p, v)) {
        return None;
    }
    let mut shared: Vec<Param> = Vec::new();
    for p in &v.params {
        if !shared.contains(p) {
            shared.push(p.clone());
        }
    }
    let mut extra: Vec<Param> = Vec::new();
    for p in &u.params {
        if !shared.contains(p) && !extra.contains(p) {
            extra.push(p.clone());
        }
    }
    let n = shared.len();
    let level = |p: &Param| {
        shared
            .iter()
            .position(|q| q == p)
            .unwrap_or_else(|| n + extra.iter().position(|q| q == p).expect("collected"))
    };
    let ctx = Context::new(
        shared
            .iter()
            .map(|p| (p.name.clone(), p.sort))
            .collect(),
    )
    .ok()?;
    let u_images: Vec<Term> = u.params.iter().map(|p| Term::Var(level(p))).collect();
    let psi = u
        .formula
        .body()
        .rebase(u.params.len(), &u_images, n + extra.len());
    let binders = extra
        .iter()
        .map(|p| Binder::new(p.name.clone(), p.sort))
        .collect();
    let lhs = Node::exists_many(binders, psi);
    let v_images: Vec<Term> = v.params.iter().map(|p| Term::Var(level(p))).collect();
    let rhs = v.formula.body().rebase(v.params.len(), &v_images, n);
    let sequent = Sequent::new(ctx, lhs, rhs);
    let outcome = prove(theory, &sequent, bounds).ok()?;
    Some((sequent, outcome))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cli::{parse_formula, parse_theory};

    fn groups() -> Theory {
        parse_theory(include_str!("../../theories/groups.thy")).unwrap()
    }

    fn cyclic(t: &Theory, n: usize) -> Arc<FiniteStructure> {
        Arc::new(
            FiniteStructure::from_fn(
                t.sig.clone(),
                vec![n],
                |f, a| match f.0 {
                    0 => 0,
                    1 => (a[0] + a[1]) % n,
                    _ => (n - a[0]) % n,
                },
                |_, _| false,
            )
            .unwrap(),
        )
    }

    fn k(name: &str) -> Param {
        Param::new(name, SortId(0))
    }

    fn point(m: Arc<FiniteStructure>, env: &[(&str, Elem)]) -> SpectrumPoint {
        SpectrumPoint::new(0, m, env.iter().map(|(n, a)| (k(n), *a)).collect()).unwrap()
    }

    #[test]
    fn membership_in_basic_opens() {
        let t = groups();
        let z2 = cyclic(&t, 2);
        let top = BasicOpen::new(parse_formula(&t.sig, "[x:G] x = x").unwrap(), vec![k("k")]).unwrap();
        let idem =
            BasicOpen::new(parse_formula(&t.sig, "[x:G] mul(x,x) = x").unwrap(), vec![k("k")]).unwrap();
        assert!(!in_open(&point(z2.clone(), &[]), &top));
        assert!(in_open(&point(z2.clone(), &[("k", 1)]), &top));
        assert!(!in_open(&point(z2, &[("k", 1)]), &idem));
    }

    #[test]
    fn closure_between_cyclic_groups() {
        let t = groups();
        let (z2, z3, z4) = (cyclic(&t, 2), cyclic(&t, 3), cyclic(&t, 4));
        let mu = point(z2.clone(), &[("k", 1)]);
        assert_eq!(closure_leq(&mu, &mu), Some(Homomorphism { maps: vec![vec![0, 1]] }));
        let h = closure_leq(&mu, &point(z4, &[("k", 2)])).unwrap();
        assert_eq!(h.maps, vec![vec![0, 2]]);
        assert!(closure_leq(&mu, &point(z3, &[("k", 1)])).is_none());
        assert!(closure_leq(&mu, &point(z2, &[])).is_none());
    }

    #[test]
    fn arrow_closure_squares() {
        let t = groups();
        let (z2, z4) = (cyclic(&t, 2), cyclic(&t, 4));
        let id2 = Homomorphism::identity(&z2);
        let alpha = Arrow {
            src: point(z2.clone(), &[("k", 1)]),
            tgt: point(z2.clone(), &[("l", 1)]),
            iso: id2.clone(),
        };
        assert!(arrow_closure(&alpha, &alpha));
        // both ends route the generator of Z2 to 2 in Z4, but β twists by
        // negation, which fixes 2: the square commutes
        let neg = Homomorphism { maps: vec![vec![0, 3, 2, 1]] };
        let beta = Arrow {
            src: point(z4.clone(), &[("k", 2)]),
            tgt: point(z4.clone(), &[("l", 2)]),
            iso: neg,
        };
        assert!(arrow_closure(&alpha, &beta));
        // labels route the generator to 2 on one side and to 0 on the other
        let gamma = Arrow {
            src: point(z4.clone(), &[("k", 2)]),
            tgt: point(z4.clone(), &[("l", 0)]),
            iso: Homomorphism::identity(&z4),
        };
        assert!(!arrow_closure(&alpha, &gamma));
    }

    #[test]
    fn reassignment() {
        let t = groups();
        let z2 = cyclic(&t, 2);
        let p = point(z2, &[("k", 0)]);
        assert_eq!(reassign(&p, &[k("k")], &[], &[]).unwrap(), p);
        let q = reassign(&p, &[k("k")], &[k("l")], &[1]).unwrap();
        assert_eq!(q.value(&k("k")), Some(0));
        assert_eq!(q.value(&k("l")), Some(1));
        assert_eq!(
            reassign(&p, &[k("k")], &[k("k")], &[1]),
            Err(SpectrumError::NotDisjoint("k".into()))
        );
        assert!(reassign(&p, &[], &[k("l")], &[2]).is_err());
    }

    #[test]
    fn inclusion_of_opens_is_proved() {
        let t = groups();
        let z2 = cyclic(&t, 2);
        let mut pts: Vec<SpectrumPoint> = (0..2)
            .flat_map(|a| (0..2).map(move |b| (a, b)))
            .map(|(a, b)| point(z2.clone(), &[("k", a), ("l", b)]))
            .collect();
        pts.push(point(z2.clone(), &[("k", 0)]));
        let u = BasicOpen::new(
            parse_formula(&t.sig, "[x:G, y:G] x = e /\\ true").unwrap(),
            vec![k("k"), k("l")],
        )
        .unwrap();
        let v = BasicOpen::new(parse_formula(&t.sig, "[x:G] x = e").unwrap(), vec![k("k")]).unwrap();
        let (s, out) = open_inclusion_witness(&t, &pts, &u, &v, &ProverBounds::default()).unwrap();
        assert_eq!(s.ctx.len(), 1);
        assert!(out.is_proved());
        assert!(open_inclusion_witness(&t, &pts, &v, &u, &ProverBounds::default()).is_none());
    }
}
