//! Definable sets and satisfaction.
//!
//! Two independent routes are provided: [`eval`] computes a whole definable
//! set by set algebra (intersection, union, projection, complement), while
//! [`holds_at`] decides a single tuple by recursion on the formula.

use super::structure::{tuple_index, tuples_of, Elem, FiniteStructure, Tuples};
use super::ModelError;
use crate::logic::{ClassicalFormula, Context, Formula, Node, Sequent, SortId, Term, Theory};

/// The set `φ^M` of tuples satisfying a formula, as a dense bit table over
/// the product of the context carriers.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct DefinableSet {
    ctx: Context,
    radices: Vec<usize>,
    bits: Vec<bool>,
}

impl DefinableSet {
    pub fn from_bits(m: &FiniteStructure, ctx: Context, bits: Vec<bool>) -> Self {
        let radices: Vec<usize> = ctx.sorts().iter().map(|s| m.size(*s)).collect();
        assert_eq!(bits.len(), radices.iter().product::<usize>());
        DefinableSet { ctx, radices, bits }
    }

    pub fn from_tuples<'a>(
        m: &FiniteStructure,
        ctx: Context,
        tuples: impl IntoIterator<Item = &'a Vec<Elem>>,
    ) -> Self {
        let sorts = ctx.sorts();
        let mut bits = vec![false; super::structure::table_len(m.sizes(), &sorts)];
        for t in tuples {
            bits[tuple_index(m.sizes(), &sorts, t)] = true;
        }
        Self::from_bits(m, ctx, bits)
    }

    pub fn ctx(&self) -> &Context {
        &self.ctx
    }

    pub fn bits(&self) -> &[bool] {
        &self.bits
    }

    pub fn contains(&self, tuple: &[Elem]) -> bool {
        if tuple.len() != self.radices.len() || tuple.iter().zip(&self.radices).any(|(e, r)| e >= r)
        {
            return false;
        }
        let mut idx = 0;
        for (e, r) in tuple.iter().zip(&self.radices) {
            idx = idx * r + e;
        }
        self.bits[idx]
    }

    pub fn len(&self) -> usize {
        self.bits.iter().filter(|b| **b).count()
    }

    pub fn is_empty(&self) -> bool {
        !self.bits.iter().any(|b| *b)
    }

    /// Member tuples in row-major order.
    pub fn tuples(&self) -> Vec<Vec<Elem>> {
        Tuples::new(self.radices.clone())
            .zip(&self.bits)
            .filter(|(_, b)| **b)
            .map(|(t, _)| t)
            .collect()
    }

    pub fn is_subset(&self, other: &DefinableSet) -> bool {
        self.bits.len() == other.bits.len()
            && self.bits.iter().zip(&other.bits).all(|(a, b)| !*a || *b)
    }
}

fn check_signature(m: &FiniteStructure, ctx: &Context, body: &Node) -> Result<(), ModelError> {
    let mut out = Vec::new();
    if ctx.sorts().iter().any(|s| s.0 >= m.sizes().len()) {
        return Err(ModelError::SignatureMismatch);
    }
    body.check(m.signature(), &mut ctx.sorts(), true, "formula", &mut out);
    match out.into_iter().next() {
        None => Ok(()),
        Some(_) => Err(ModelError::SignatureMismatch),
    }
}

/// `φ^M` by structural recursion on the formula.
pub fn eval(m: &FiniteStructure, f: &Formula) -> Result<DefinableSet, ModelError> {
    check_signature(m, f.ctx(), f.body())?;
    let bits = eval_node(m, &f.ctx().sorts(), f.body());
    Ok(DefinableSet::from_bits(m, f.ctx().clone(), bits))
}

/// Classical evaluation; `not` is complement in the context carriers.
pub fn eval_classical(m: &FiniteStructure, f: &ClassicalFormula) -> Result<DefinableSet, ModelError> {
    check_signature(m, f.ctx(), f.body())?;
    let bits = eval_node(m, &f.ctx().sorts(), f.body());
    Ok(DefinableSet::from_bits(m, f.ctx().clone(), bits))
}

pub fn eval_term(m: &FiniteStructure, t: &Term, env: &[Elem]) -> Elem {
    match t {
        Term::Var(v) => env[*v],
        Term::App(f, args) => {
            let vals: Vec<Elem> = args.iter().map(|a| eval_term(m, a, env)).collect();
            m.apply(*f, &vals)
        }
    }
}

/// Dense evaluation of a body over `scope`; unchecked.
pub(crate) fn eval_node(m: &FiniteStructure, scope: &[SortId], n: &Node) -> Vec<bool> {
    let len = super::structure::table_len(m.sizes(), scope);
    match n {
        Node::True => vec![true; len],
        Node::False => vec![false; len],
        Node::Eq(a, b) => tuples_of(m.sizes(), scope)
            .map(|env| eval_term(m, a, &env) == eval_term(m, b, &env))
            .collect(),
        Node::Rel(r, args) => tuples_of(m.sizes(), scope)
            .map(|env| {
                let vals: Vec<Elem> = args.iter().map(|a| eval_term(m, a, &env)).collect();
                m.holds(*r, &vals)
            })
            .collect(),
        Node::And(a, b) => {
            let x = eval_node(m, scope, a);
            let y = eval_node(m, scope, b);
            x.iter().zip(&y).map(|(p, q)| *p && *q).collect()
        }
        Node::Or(a, b) => {
            let x = eval_node(m, scope, a);
            let y = eval_node(m, scope, b);
            x.iter().zip(&y).map(|(p, q)| *p || *q).collect()
        }
        Node::Exists(bd, a) => {
            let mut inner = scope.to_vec();
            inner.push(bd.sort);
            let body = eval_node(m, &inner, a);
            let k = m.size(bd.sort);
            (0..len)
                .map(|i| body[i * k..(i + 1) * k].iter().any(|b| *b))
                .collect()
        }
        Node::Not(a) => eval_node(m, scope, a).into_iter().map(|b| !b).collect(),
    }
}

/// Whether `M ⊨ n[env]`, where `env` assigns every free level of `n`.
pub fn holds_at(m: &FiniteStructure, n: &Node, env: &mut Vec<Elem>) -> bool {
    match n {
        Node::True => true,
        Node::False => false,
        Node::Eq(a, b) => eval_term(m, a, env) == eval_term(m, b, env),
        Node::Rel(r, args) => {
            let vals: Vec<Elem> = args.iter().map(|a| eval_term(m, a, env)).collect();
            m.holds(*r, &vals)
        }
        Node::And(a, b) => holds_at(m, a, env) && holds_at(m, b, env),
        Node::Or(a, b) => holds_at(m, a, env) || holds_at(m, b, env),
        Node::Exists(bd, a) => {
            for e in 0..m.size(bd.sort) {
                env.push(e);
                let ok = holds_at(m, a, env);
                env.pop();
                if ok {
                    return true;
                }
            }
            false
        }
        Node::Not(a) => !holds_at(m, a, env),
    }
}

/// `M ⊨ lhs ⊢ rhs`, i.e. `lhs^M ⊆ rhs^M`.
pub fn satisfies(m: &FiniteStructure, s: &Sequent) -> bool {
    violation(m, s).is_none()
}

/// A tuple in `lhs^M` but not in `rhs^M`, if any.
pub fn violation(m: &FiniteStructure, s: &Sequent) -> Option<Vec<Elem>> {
    let scope = s.ctx.sorts();
    let lhs = eval_node(m, &scope, &s.lhs);
    let rhs = eval_node(m, &scope, &s.rhs);
    tuples_of(m.sizes(), &scope)
        .zip(lhs.iter().zip(&rhs))
        .find(|(_, (l, r))| **l && !**r)
        .map(|(t, _)| t)
}

pub fn is_model(m: &FiniteStructure, t: &Theory) -> bool {
    *m.signature() == t.sig && t.axioms.iter().all(|a| satisfies(m, a))
}

/// First violated axiom with a witnessing tuple.
pub fn first_violated_axiom(m: &FiniteStructure, t: &Theory) -> Option<(usize, Vec<Elem>)> {
    t.axioms
        .iter()
        .enumerate()
        .find_map(|(i, a)| violation(m, a).map(|w| (i, w)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::logic::{Binder, Signature};
    use std::sync::Arc;

    fn zn(n: usize) -> (FiniteStructure, crate::logic::FuncId) {
        let mut sig = Signature::new();
        let g = sig.add_sort("G").unwrap();
        sig.add_func("e", &[], g).unwrap();
        let add = sig.add_func("add", &[g, g], g).unwrap();
        sig.add_func("neg", &[g], g).unwrap();
        let m = FiniteStructure::from_fn(
            Arc::new(sig),
            vec![n],
            |f, a| match f.0 {
                0 => 0,
                1 => (a[0] + a[1]) % n,
                _ => (n - a[0]) % n,
            },
            |_, _| false,
        )
        .unwrap();
        (m, add)
    }

    fn doubles(n: usize) -> Vec<Vec<Elem>> {
        let (m, add) = zn(n);
        let g = SortId(0);
        let ctx = Context::new(vec![("x".into(), g)]).unwrap();
        let body = Node::exists(
            Binder::new("y", g),
            Node::eq(Term::Var(0), Term::app(add, [Term::Var(1), Term::Var(1)])),
        );
        let f = Formula::new(m.signature(), ctx, body).unwrap();
        eval(&m, &f).unwrap().tuples()
    }

    #[test]
    fn doubling_images() {
        assert_eq!(doubles(2), vec![vec![0]]);
        assert_eq!(doubles(3), vec![vec![0], vec![1], vec![2]]);
    }

    #[test]
    fn satisfaction_examples() {
        let (m, add) = zn(2);
        let g = SortId(0);
        let ctx = Context::new(vec![("x".into(), g)]).unwrap();
        let zero = Term::constant(crate::logic::FuncId(0));
        let idem = Node::eq(Term::app(add, [Term::Var(0), Term::Var(0)]), Term::Var(0));
        let is_zero = Node::eq(Term::Var(0), zero);
        assert!(satisfies(&m, &Sequent::new(ctx.clone(), idem.clone(), idem.clone())));
        assert!(satisfies(&m, &Sequent::new(ctx.clone(), idem, is_zero.clone())));
        let s = Sequent::new(ctx, Node::True, is_zero);
        assert_eq!(violation(&m, &s), Some(vec![1]));
    }

    #[test]
    fn exists_over_empty_sort_is_false() {
        let mut sig = Signature::new();
        let a = sig.add_sort("A").unwrap();
        let m = FiniteStructure::new(Arc::new(sig), vec![0], vec![], vec![]).unwrap();
        let f = Formula::new(
            m.signature(),
            Context::empty(),
            Node::exists(Binder::new("x", a), Node::True),
        )
        .unwrap();
        let d = eval(&m, &f).unwrap();
        assert!(d.is_empty());
        assert_eq!(d.bits().len(), 1);
    }
}
