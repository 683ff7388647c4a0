//! Morleyization: each negated subformula becomes a fresh relation symbol
//! with axioms making it the complement.

use std::sync::Arc;

use crate::logic::{
    ClassicalFormula, Context, Formula, Node, RelId, Sequent, Signature, SortId, Term, Theory,
};
use crate::models::{eval_node, FiniteStructure};

/// A symbol `N` standing for the negation of `body`, a coherent formula over
/// the context `scope`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NegationSymbol {
    pub rel: RelId,
    pub scope: Vec<SortId>,
    pub body: Node,
}

#[derive(Clone, Debug)]
pub struct MorleyizationResult {
    pub source: Arc<Theory>,
    pub theory: Arc<Theory>,
    pub symbols: Vec<NegationSymbol>,
}

struct Builder {
    sig: Signature,
    symbols: Vec<NegationSymbol>,
    axioms: Vec<Sequent>,
}

impl Builder {
    fn translate(&mut self, scope: &mut Vec<SortId>, n: &Node) -> Node {
        match n {
            Node::True | Node::False | Node::Eq(..) | Node::Rel(..) => n.clone(),
            Node::And(a, b) => {
                let a = self.translate(scope, a);
                Node::and(a, self.translate(scope, b))
            }
            Node::Or(a, b) => {
                let a = self.translate(scope, a);
                Node::or(a, self.translate(scope, b))
            }
            Node::Exists(bd, a) => {
                scope.push(bd.sort);
                let body = self.translate(scope, a);
                scope.pop();
                Node::exists(bd.clone(), body)
            }
            Node::Not(a) => {
                let inner = self.translate(scope, a);
                let mut used = inner.free_vars(scope.len());
                used.sort_unstable();
                used.dedup();
                let mut images = vec![Term::Var(0); scope.len()];
                for (i, v) in used.iter().enumerate() {
                    images[*v] = Term::Var(i);
                }
                let body = inner.rebase(scope.len(), &images, used.len());
                let sorts: Vec<SortId> = used.iter().map(|v| scope[*v]).collect();
                let rel = self.symbol(sorts, body);
                Node::rel(rel, used.into_iter().map(Term::Var))
            }
        }
    }

    fn symbol(&mut self, scope: Vec<SortId>, body: Node) -> RelId {
        if let Some(s) = self
            .symbols
            .iter()
            .find(|s| s.scope == scope && s.body == body)
        {
            return s.rel;
        }
        let k = scope.len();
        let base = match &body {
            Node::Rel(r, args) if *args == (0..k).map(Term::Var).collect::<Vec<_>>() => {
                format!("N~{}", self.sig.rel(*r).name)
            }
            _ => format!("N~{}", self.symbols.len()),
        };
        let mut name = base;
        while self.sig.contains_name(&name) {
            name.push('\'');
        }
        let rel = self.sig.add_rel(&name, &scope).expect("fresh name");
        let ctx = Context::of_sorts(&scope);
        let atom = Node::rel(rel, (0..k).map(Term::Var));
        self.axioms.push(Sequent::new(
            ctx.clone(),
            Node::True,
            Node::or(body.clone(), atom.clone()),
        ));
        self.axioms
            .push(Sequent::new(ctx, Node::and(body.clone(), atom), Node::False));
        self.symbols.push(NegationSymbol { rel, scope, body });
        rel
    }
}

pub fn morleyize(theory: &Theory) -> MorleyizationResult {
    morleyize_with(theory, &[])
}

/// Morleyizes `theory`, also introducing symbols for the negations that occur
/// in `extra` so that those formulas can be translated afterwards.
pub fn morleyize_with(theory: &Theory, extra: &[ClassicalFormula]) -> MorleyizationResult {
    let mut b = Builder {
        sig: (*theory.sig).clone(),
        symbols: Vec::new(),
        axioms: Vec::new(),
    };
    let mut translated = Vec::new();
    for ax in &theory.axioms {
        let mut scope = ax.ctx.sorts();
        let lhs = b.translate(&mut scope, &ax.lhs);
        let rhs = b.translate(&mut scope, &ax.rhs);
        translated.push(Sequent::new(ax.ctx.clone(), lhs, rhs));
    }
    for f in extra {
        b.translate(&mut f.ctx().sorts(), f.body());
    }
    if b.symbols.is_empty() {
        let same = Theory {
            classical: false,
            ..theory.clone()
        };
        return MorleyizationResult {
            source: Arc::new(theory.clone()),
            theory: Arc::new(same),
            symbols: vec![],
        };
    }
    translated.extend(b.axioms);
    let out = Theory::new(format!("{}*", theory.name), b.sig).with_axioms(translated);
    MorleyizationResult {
        source: Arc::new(theory.clone()),
        theory: Arc::new(out),
        symbols: b.symbols,
    }
}

impl MorleyizationResult {
    /// The coherent translation of a body over `scope`, if every negation in
    /// it already has a symbol.
    pub fn translate(&self, scope: &[SortId], n: &Node) -> Option<Node> {
        let mut b = Builder {
            sig: (*self.theory.sig).clone(),
            symbols: self.symbols.clone(),
            axioms: Vec::new(),
        };
        let out = b.translate(&mut scope.to_vec(), n);
        (b.symbols.len() == self.symbols.len()).then_some(out)
    }

    pub fn translate_formula(&self, f: &ClassicalFormula) -> Option<Formula> {
        let body = self.translate(&f.ctx().sorts(), f.body())?;
        Formula::new(&self.theory.sig, f.ctx().clone(), body).ok()
    }

    /// The unique expansion of a structure for the input signature in which
    /// every `N` is the complement of its formula.
    pub fn expand(&self, m: &FiniteStructure) -> FiniteStructure {
        let sig = self.theory.sig.clone();
        let funcs: Vec<Vec<usize>> = sig.func_ids().map(|f| m.func_table(f).to_vec()).collect();
        let mut rels: Vec<Vec<bool>> = sig
            .rel_ids()
            .map(|r| {
                if r.0 < m.signature().rels.len() {
                    m.rel_table(r).to_vec()
                } else {
                    vec![false; crate::models::table_len(m.sizes(), &sig.rel(r).args)]
                }
            })
            .collect();
        for s in &self.symbols {
            let cur = FiniteStructure::new(sig.clone(), m.sizes().to_vec(), funcs.clone(), rels.clone())
                .expect("tables sized from the signature");
            let bits = eval_node(&cur, &s.scope, &s.body);
            rels[s.rel.0] = bits.into_iter().map(|b| !b).collect();
        }
        FiniteStructure::new(sig, m.sizes().to_vec(), funcs, rels)
            .expect("tables sized from the signature")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cli::parse_theory;
    use crate::logic::print_theory;
    use crate::models::{enumerate_expansions, enumerate_labelled, is_model, SearchLimits};

    #[test]
    fn negated_atom_gets_complement_axioms() {
        let t = parse_theory(
            "classical theory t\nsort A\nrel R : A\nrel S : A\naxiom [x:A] not R(x) |- S(x)\n",
        )
        .unwrap();
        let out = morleyize(&t);
        assert_eq!(out.symbols.len(), 1);
        let text = print_theory(&out.theory);
        assert!(text.contains("rel N~R : A"), "{text}");
        assert!(text.contains("N~R(x) |- S(x)"), "{text}");
        assert!(text.contains("true |- R(x0) \\/ N~R(x0)"), "{text}");
        assert!(text.contains("R(x0) /\\ N~R(x0) |- false"), "{text}");
        assert_eq!(out.theory.axioms.len(), 3);
    }

    #[test]
    fn negation_free_input_is_unchanged() {
        let t = parse_theory(include_str!("../../theories/posets.thy")).unwrap();
        let out = morleyize(&t);
        assert!(out.symbols.is_empty());
        assert_eq!(out.theory.axioms, t.axioms);
        assert_eq!(out.theory.sig, t.sig);
    }

    #[test]
    fn unique_expansion_bijection() {
        let t = parse_theory(include_str!("../../theories/unary_classical.thy")).unwrap();
        let out = morleyize(&t);
        let limits = SearchLimits::default();
        for n in 0..=2 {
            let plain: Vec<_> = enumerate_labelled(&t, n, limits)
                .unwrap()
                .into_iter()
                .filter(|m| crate::models::is_model(m, &t))
                .collect();
            let starred = enumerate_labelled(&out.theory, n, limits).unwrap();
            assert_eq!(plain.len(), starred.len(), "n = {n}");
            for m in &plain {
                let exp = enumerate_expansions(&out.theory, m, limits).unwrap();
                assert_eq!(exp.len(), 1);
                assert_eq!(exp[0], out.expand(m));
                assert!(is_model(&exp[0], &out.theory));
            }
        }
    }
}
