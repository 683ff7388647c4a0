//! Diagrams of models and slices over formulas.

use std::sync::Arc;

use super::TransformError;
use crate::logic::{Context, Formula, FuncId, Node, Sequent, SortId, Term, Theory};
use crate::models::{is_model, with_fresh_constants, Elem, FiniteStructure, Homomorphism};

/// A theory whose models are models of the input under a fixed model `M`.
#[derive(Clone, Debug)]
pub struct DiagramTheory {
    pub theory: Arc<Theory>,
    pub base: FiniteStructure,
    /// `constants[s][a]` names element `a` of sort `s` of the base.
    pub constants: Vec<Vec<FuncId>>,
}

pub fn diagram_theory(theory: &Theory, m: &FiniteStructure) -> Result<DiagramTheory, TransformError> {
    if **m.signature() != *theory.sig || !is_model(m, theory) {
        return Err(TransformError::NotAModel(theory.name.clone()));
    }
    let mut sig = (*theory.sig).clone();
    let mut constants = Vec::new();
    for s in theory.sig.sort_ids() {
        let mut row = Vec::new();
        for a in 0..m.size(s) {
            let mut name = format!("c~{}~{a}", theory.sig.sort_name(s));
            while sig.contains_name(&name) {
                name.push('\'');
            }
            row.push(sig.add_func(&name, &[], s)?);
        }
        constants.push(row);
    }
    let c = |s: SortId, a: Elem| Term::constant(constants[s.0][a]);
    let mut axioms = theory.axioms.clone();
    for f in theory.sig.func_ids() {
        let sym = theory.sig.func(f);
        for args in m.tuples(&sym.args) {
            let lhs = Term::app(f, args.iter().zip(&sym.args).map(|(a, s)| c(*s, *a)));
            let rhs = c(sym.result, m.apply(f, &args));
            axioms.push(Sequent::new(Context::empty(), Node::True, Node::eq(lhs, rhs)));
        }
    }
    for r in theory.sig.rel_ids() {
        let sym = theory.sig.rel(r);
        for args in m.tuples(&sym.args) {
            if m.holds(r, &args) {
                let atom = Node::rel(r, args.iter().zip(&sym.args).map(|(a, s)| c(*s, *a)));
                axioms.push(Sequent::new(Context::empty(), Node::True, atom));
            }
        }
    }
    let out = Theory::new(format!("diag({})", theory.name), sig).with_axioms(axioms);
    Ok(DiagramTheory {
        theory: Arc::new(out),
        base: m.clone(),
        constants,
    })
}

impl DiagramTheory {
    /// Splits a model of the diagram into the model of the input theory and
    /// the homomorphism from the base read off the constants.
    pub fn split(&self, n: &FiniteStructure, input: &Arc<crate::logic::Signature>) -> (FiniteStructure, Homomorphism) {
        let reduct = n.reduct_to(input).expect("diagram signature extends the input");
        let maps = self
            .constants
            .iter()
            .map(|row| row.iter().map(|c| n.func_table(*c)[0]).collect())
            .collect();
        (reduct, Homomorphism { maps })
    }
}

/// A theory whose models are models of the input with a chosen tuple in the
/// extension of a formula.
#[derive(Clone, Debug)]
pub struct SliceTheory {
    pub theory: Arc<Theory>,
    pub constants: Vec<FuncId>,
}

pub fn slice_theory(theory: &Theory, phi: &Formula) -> Result<SliceTheory, TransformError> {
    Formula::new(&theory.sig, phi.ctx().clone(), phi.body().clone())?;
    let sorts = phi.ctx().sorts();
    let (sig, constants) = with_fresh_constants(&theory.sig, "c", &sorts);
    let images: Vec<Term> = constants.iter().map(|c| Term::constant(*c)).collect();
    let mut axioms = theory.axioms.clone();
    axioms.push(Sequent::new(
        Context::empty(),
        Node::True,
        phi.body().rebase(sorts.len(), &images, 0),
    ));
    let out = Theory {
        name: format!("{}/phi", theory.name),
        sig,
        axioms,
        classical: theory.classical,
    };
    Ok(SliceTheory {
        theory: Arc::new(out),
        constants,
    })
}

impl SliceTheory {
    /// The tuple named by the generic constants.
    pub fn point(&self, m: &FiniteStructure) -> Vec<Elem> {
        self.constants.iter().map(|c| m.func_table(*c)[0]).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cli::{parse_formula, parse_theory};
    use crate::models::{enumerate_homs, enumerate_labelled, SearchLimits};

    fn groups() -> Theory {
        parse_theory(include_str!("../../theories/groups.thy")).unwrap()
    }

    #[test]
    fn empty_structure_diagram_is_the_theory() {
        let t = parse_theory(include_str!("../../theories/posets.thy")).unwrap();
        let m = FiniteStructure::new(t.sig.clone(), vec![0], vec![], vec![vec![]]).unwrap();
        let d = diagram_theory(&t, &m).unwrap();
        assert_eq!(d.theory.axioms, t.axioms);
        assert_eq!(d.theory.sig.funcs, t.sig.funcs);
    }

    #[test]
    fn diagram_of_z2_counts_homs() {
        let t = groups();
        let limits = SearchLimits::default();
        let z2 = enumerate_labelled(&t, 2, limits)
            .unwrap()
            .into_iter()
            .find(|m| m.sizes() == [2])
            .unwrap();
        let d = diagram_theory(&t, &z2).unwrap();
        assert_eq!(d.constants.iter().map(Vec::len).sum::<usize>(), 2);
        for n in 1..=3 {
            let lhs = enumerate_labelled(&d.theory, n, limits).unwrap().len();
            let rhs: usize = enumerate_labelled(&t, n, limits)
                .unwrap()
                .iter()
                .map(|m| enumerate_homs(&z2, m).len())
                .sum();
            assert_eq!(lhs, rhs, "n = {n}");
        }
        for m in enumerate_labelled(&d.theory, 3, limits).unwrap() {
            let (n, h) = d.split(&m, &t.sig);
            assert!(crate::models::is_homomorphism(&z2, &n, &h));
        }
    }

    #[test]
    fn slice_over_bottom_has_no_inhabited_models() {
        let t = groups();
        let phi = parse_formula(&t.sig, "[x:G] bot").unwrap();
        let s = slice_theory(&t, &phi).unwrap();
        assert!(enumerate_labelled(&s.theory, 3, SearchLimits::default())
            .unwrap()
            .is_empty());
    }

    #[test]
    fn slice_over_involutions() {
        let t = groups();
        let phi = parse_formula(&t.sig, "[x:G] mul(x,x) = e").unwrap();
        let s = slice_theory(&t, &phi).unwrap();
        let limits = SearchLimits::default();
        let lhs = enumerate_labelled(&s.theory, 4, limits).unwrap();
        let rhs: usize = enumerate_labelled(&t, 4, limits)
            .unwrap()
            .iter()
            .map(|m| {
                let e = m.func_table(FuncId(0))[0];
                (0..m.size(SortId(0)))
                    .filter(|a| m.apply(FuncId(1), &[*a, *a]) == e)
                    .count()
            })
            .sum();
        assert_eq!(lhs.len(), rhs);
        for m in &lhs {
            let a = s.point(m)[0];
            assert_eq!(m.apply(FuncId(1), &[a, a]), m.func_table(FuncId(0))[0]);
        }
    }
}
