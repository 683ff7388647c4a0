//! Coherent formulas as disjunctions of existentially quantified conjunctions
//! of atoms.

use crate::logic::{Node, SortId, Term};

/// `∃ exists. atoms`, where the existential variables take the levels right
/// after the enclosing scope.
#[derive(Clone, Debug, PartialEq, Eq)]
pub(crate) struct Disjunct {
    pub exists: Vec<SortId>,
    pub atoms: Vec<Node>,
}

/// An empty list is `⊥`; a disjunct with no atoms is `⊤`.
pub(crate) fn dnf(n: &Node, scope: usize) -> Vec<Disjunct> {
    match n {
        Node::True => vec![Disjunct {
            exists: vec![],
            atoms: vec![],
        }],
        Node::False => vec![],
        Node::Eq(..) | Node::Rel(..) => vec![Disjunct {
            exists: vec![],
            atoms: vec![n.clone()],
        }],
        Node::Or(a, b) => {
            let mut out = dnf(a, scope);
            out.extend(dnf(b, scope));
            out
        }
        Node::And(a, b) => {
            let left = dnf(a, scope);
            let right = dnf(b, scope);
            let mut out = Vec::new();
            for l in &left {
                for r in &right {
                    let keep: Vec<Term> = (0..scope).map(Term::Var).collect();
                    let shift = scope + l.exists.len();
                    let mut atoms = l.atoms.clone();
                    atoms.extend(r.atoms.iter().map(|a| a.rebase(scope, &keep, shift)));
                    let mut exists = l.exists.clone();
                    exists.extend(r.exists.iter().copied());
                    out.push(Disjunct { exists, atoms });
                }
            }
            out
        }
        Node::Exists(bd, a) => dnf(a, scope + 1)
            .into_iter()
            .map(|d| {
                let mut exists = vec![bd.sort];
                exists.extend(d.exists);
                Disjunct {
                    exists,
                    atoms: d.atoms,
                }
            })
            .collect(),
        Node::Not(_) => panic!("negation has no coherent normal form"),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::logic::{Binder, RelId};

    #[test]
    fn conjunction_of_existentials_shifts_levels() {
        let s = SortId(0);
        let p = RelId(0);
        // [x] (∃y. P(x,y)) ∧ (∃z. P(z,x))
        let a = Node::exists(Binder::new("y", s), Node::rel(p, [Term::Var(0), Term::Var(1)]));
        let b = Node::exists(Binder::new("z", s), Node::rel(p, [Term::Var(1), Term::Var(0)]));
        let d = dnf(&Node::and(a, b), 1);
        assert_eq!(d.len(), 1);
        assert_eq!(d[0].exists, vec![s, s]);
        assert_eq!(
            d[0].atoms,
            vec![
                Node::rel(p, [Term::Var(0), Term::Var(1)]),
                Node::rel(p, [Term::Var(2), Term::Var(0)])
            ]
        );
    }

    #[test]
    fn disjunction_distributes() {
        let p = |i| Node::rel(RelId(i), [Term::Var(0)]);
        let f = Node::and(Node::or(p(0), p(1)), Node::or(p(2), Node::False));
        let d = dnf(&f, 1);
        assert_eq!(d.len(), 2);
        assert_eq!(d[1].atoms, vec![p(1), p(2)]);
    }
}
