//! Finite countermodel search: the theory plus fresh constants that satisfy
//! the left side and refute the right side.

use super::ProverBounds;
use crate::logic::{Context, Node, Sequent, Term, Theory};
use crate::models::{
    holds_at, is_model, with_fresh_constants, Elem, FiniteStructure, ModelError, ModelSearch,
    SearchLimits,
};

pub(crate) enum MaceEnd {
    Found(FiniteStructure, Vec<Elem>),
    Exhausted,
    Budget,
}

/// Size vectors with every total up to `max`, smallest first.
fn sizes_up_to(sorts: usize, max: usize) -> Vec<Vec<usize>> {
    let mut out: Vec<Vec<usize>> = Vec::new();
    for total in 0..=max {
        out.extend(crate::models::size_vectors(sorts, total));
    }
    out
}

pub(crate) fn search(theory: &Theory, sequent: &Sequent, bounds: &ProverBounds) -> MaceEnd {
    let sorts = sequent.ctx.sorts();
    let (sig, consts) = with_fresh_constants(&theory.sig, "goal", &sorts);
    let images: Vec<Term> = consts.iter().map(|c| Term::constant(*c)).collect();
    let n = sorts.len();
    let closed = |node: &Node| node.rebase(n, &images, 0);
    let mut axioms = theory.axioms.clone();
    axioms.push(Sequent::new(Context::empty(), Node::True, closed(&sequent.lhs)));
    axioms.push(Sequent::new(Context::empty(), closed(&sequent.rhs), Node::False));
    let extended = Theory {
        name: format!("{}~refute", theory.name),
        sig,
        axioms,
        classical: false,
    };
    let mut budget = bounds.countermodel_nodes;
    let base_funcs = theory.sig.funcs.len();
    for sizes in sizes_up_to(theory.sig.sorts.len(), bounds.max_elements) {
        // constants need an inhabited sort
        if sorts.iter().any(|s| sizes[s.0] == 0) {
            continue;
        }
        let mut found = None;
        let run = ModelSearch::new(&extended, sizes.clone())
            .symmetry_breaking(true)
            .limits(SearchLimits { max_nodes: budget })
            .run(|m| {
                found = Some(m);
                false
            });
        match run {
            Ok(used) => budget -= used.min(budget),
            Err(ModelError::BoundExceeded(_)) => return MaceEnd::Budget,
            Err(_) => return MaceEnd::Budget,
        }
        if let Some(m) = found {
            let witness: Vec<Elem> = consts.iter().map(|c| m.func_table(*c)[0]).collect();
            let funcs = (0..base_funcs)
                .map(|f| m.func_table(crate::logic::FuncId(f)).to_vec())
                .collect();
            let rels = theory
                .sig
                .rel_ids()
                .map(|r| m.rel_table(r).to_vec())
                .collect();
            let Ok(reduct) = FiniteStructure::new(theory.sig.clone(), sizes, funcs, rels) else {
                continue;
            };
            let mut env = witness.clone();
            let lhs = holds_at(&reduct, &sequent.lhs, &mut env);
            let mut env = witness.clone();
            let rhs = holds_at(&reduct, &sequent.rhs, &mut env);
            if is_model(&reduct, theory) && lhs && !rhs {
                return MaceEnd::Found(reduct, witness);
            }
        }
    }
    MaceEnd::Exhausted
}
