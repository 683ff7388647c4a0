//! Copowers (models are homomorphisms) and pushouts of interpretations
//! (models are pairs of models with an isomorphism between their reducts).

use std::sync::Arc;

use super::{Renaming, TransformError};
use crate::logic::{Context, FuncId, Interpretation, Node, Sequent, Signature, SortId, Term, Theory};
use crate::models::{FiniteStructure, Homomorphism};

/// Applies `h[s]` to every variable of `scope` that `renaming` sends into a
/// hom sort.
fn images(scope: &[SortId], h: &[FuncId]) -> Vec<Term> {
    scope
        .iter()
        .enumerate()
        .map(|(i, s)| Term::app(h[s.0], [Term::Var(i)]))
        .collect()
}

#[derive(Clone, Debug)]
pub struct Copower {
    pub source: Arc<Theory>,
    pub theory: Arc<Theory>,
    pub left: Renaming,
    pub right: Renaming,
    /// `hom[s]: s~0 -> s~1`.
    pub hom: Vec<FuncId>,
}

pub fn copower(theory: &Theory) -> Copower {
    let src = &theory.sig;
    let mut sig = Signature::new();
    let left = Renaming::embed(&mut sig, src, "~0").expect("suffixed names are fresh");
    let right = Renaming::embed(&mut sig, src, "~1").expect("suffixed names are fresh");
    let hom: Vec<FuncId> = src
        .sort_ids()
        .map(|s| {
            sig.add_func(&format!("h~{}", src.sort_name(s)), &[left.sort(s)], right.sort(s))
                .expect("fresh name")
        })
        .collect();
    let mut axioms: Vec<Sequent> = theory.axioms.iter().map(|a| left.sequent(a)).collect();
    axioms.extend(theory.axioms.iter().map(|a| right.sequent(a)));
    for f in src.func_ids() {
        let sym = src.func(f);
        let n = sym.args.len();
        let ctx = Context::of_sorts(&sym.args.iter().map(|s| left.sort(*s)).collect::<Vec<_>>());
        let xs: Vec<Term> = (0..n).map(Term::Var).collect();
        let there = Term::app(hom[sym.result.0], [Term::app(left.funcs[f.0], xs)]);
        let here = Term::app(right.funcs[f.0], images(&sym.args, &hom));
        axioms.push(Sequent::new(ctx, Node::True, Node::eq(there, here)));
    }
    for r in src.rel_ids() {
        let sym = src.rel(r);
        let n = sym.args.len();
        let ctx = Context::of_sorts(&sym.args.iter().map(|s| left.sort(*s)).collect::<Vec<_>>());
        axioms.push(Sequent::new(
            ctx,
            Node::rel(left.rels[r.0], (0..n).map(Term::Var)),
            Node::rel(right.rels[r.0], images(&sym.args, &hom)),
        ));
    }
    let out = Theory::new(format!("{}^2", theory.name), sig).with_axioms(axioms);
    Copower {
        source: Arc::new(theory.clone()),
        theory: Arc::new(out),
        left,
        right,
        hom,
    }
}

impl Copower {
    /// Reads a model as `(domain, codomain, homomorphism)`.
    pub fn split(&self, m: &FiniteStructure) -> (FiniteStructure, FiniteStructure, Homomorphism) {
        let a = self.left.restrict(m, &self.source.sig);
        let b = self.right.restrict(m, &self.source.sig);
        let maps = self.hom.iter().map(|h| m.func_table(*h).to_vec()).collect();
        (a, b, Homomorphism { maps })
    }

    /// The model encoding a homomorphism `h: a -> b`.
    pub fn join(&self, a: &FiniteStructure, b: &FiniteStructure, h: &Homomorphism) -> FiniteStructure {
        let sig = self.theory.sig.clone();
        let nsorts = self.source.sig.sorts.len();
        let sizes = (0..2 * nsorts)
            .map(|s| if s < nsorts { a.sizes()[s] } else { b.sizes()[s - nsorts] })
            .collect();
        let mut funcs: Vec<Vec<usize>> = Vec::new();
        funcs.extend(a.signature().func_ids().map(|f| a.func_table(f).to_vec()));
        funcs.extend(b.signature().func_ids().map(|f| b.func_table(f).to_vec()));
        funcs.extend(h.maps.iter().cloned());
        let mut rels: Vec<Vec<bool>> = Vec::new();
        rels.extend(a.signature().rel_ids().map(|r| a.rel_table(r).to_vec()));
        rels.extend(b.signature().rel_ids().map(|r| b.rel_table(r).to_vec()));
        FiniteStructure::new(sig, sizes, funcs, rels).expect("tables laid out as in the signature")
    }
}

#[derive(Clone, Debug)]
pub struct Pushout {
    pub theory: Arc<Theory>,
    pub left: Renaming,
    pub right: Renaming,
    /// Per source sort `A`: `there[A]: I(A) -> J(A)` and `back[A]` its
    /// inverse.
    pub there: Vec<FuncId>,
    pub back: Vec<FuncId>,
}

/// The pushout of `i: E -> F` and `j: E -> G`. If `F` and `G` share a name,
/// their symbols are suffixed with `~l` and `~r`.
pub fn pushout(i: &Interpretation, j: &Interpretation) -> Result<Pushout, TransformError> {
    if i.source.sig != j.source.sig {
        return Err(TransformError::SourceMismatch);
    }
    let (fs, gs) = (&i.target.sig, &j.target.sig);
    let clash = fs.sorts.iter().any(|s| gs.contains_name(s))
        || fs.funcs.iter().any(|f| gs.contains_name(&f.name))
        || fs.rels.iter().any(|r| gs.contains_name(&r.name));
    let (ls, rs) = if clash { ("~l", "~r") } else { ("", "") };
    let mut sig = Signature::new();
    let left = Renaming::embed(&mut sig, fs, ls)?;
    let right = Renaming::embed(&mut sig, gs, rs)?;
    let esig = &i.source.sig;
    let fresh = |sig: &Signature, base: String| {
        let mut name = base;
        while sig.contains_name(&name) {
            name.push('\'');
        }
        name
    };
    let mut there = Vec::new();
    let mut back = Vec::new();
    for s in esig.sort_ids() {
        let a = left.sort(i.map_sort(s));
        let b = right.sort(j.map_sort(s));
        let name = fresh(&sig, format!("i~{}", esig.sort_name(s)));
        there.push(sig.add_func(&name, &[a], b)?);
        let name = fresh(&sig, format!("j~{}", esig.sort_name(s)));
        back.push(sig.add_func(&name, &[b], a)?);
    }
    let mut axioms: Vec<Sequent> = i.target.axioms.iter().map(|a| left.sequent(a)).collect();
    axioms.extend(j.target.axioms.iter().map(|a| right.sequent(a)));
    for s in esig.sort_ids() {
        let a = left.sort(i.map_sort(s));
        let b = right.sort(j.map_sort(s));
        let x = Term::Var(0);
        let ab = Term::app(back[s.0], [Term::app(there[s.0], [x.clone()])]);
        axioms.push(Sequent::new(Context::of_sorts(&[a]), Node::True, Node::eq(ab, x.clone())));
        let ba = Term::app(there[s.0], [Term::app(back[s.0], [x.clone()])]);
        axioms.push(Sequent::new(Context::of_sorts(&[b]), Node::True, Node::eq(ba, x)));
    }
    // each source symbol: its I-image and its J-image correspond along i, j
    let mut square = |src_sorts: Vec<SortId>, fi: &Node, gj: &Node| {
        let n = src_sorts.len();
        let lctx: Vec<SortId> = src_sorts.iter().map(|s| left.sort(i.map_sort(*s))).collect();
        let rctx: Vec<SortId> = src_sorts.iter().map(|s| right.sort(j.map_sort(*s))).collect();
        let to_right: Vec<Term> = src_sorts
            .iter()
            .enumerate()
            .map(|(k, s)| Term::app(there[s.0], [Term::Var(k)]))
            .collect();
        let to_left: Vec<Term> = src_sorts
            .iter()
            .enumerate()
            .map(|(k, s)| Term::app(back[s.0], [Term::Var(k)]))
            .collect();
        let fl = left.node(fi);
        let gr = right.node(gj);
        axioms.push(Sequent::new(
            Context::of_sorts(&lctx),
            fl.clone(),
            gr.rebase(n, &to_right, n),
        ));
        axioms.push(Sequent::new(Context::of_sorts(&rctx), gr, fl.rebase(n, &to_left, n)));
    };
    for f in esig.func_ids() {
        let sym = esig.func(f);
        let mut sorts = sym.args.clone();
        sorts.push(sym.result);
        square(sorts, i.func_images[f.0].body(), j.func_images[f.0].body());
    }
    for r in esig.rel_ids() {
        square(
            esig.rel(r).args.clone(),
            i.rel_images[r.0].body(),
            j.rel_images[r.0].body(),
        );
    }
    let name = format!("{}+{}", i.target.name, j.target.name);
    let out = Theory::new(name, sig).with_axioms(axioms);
    Ok(Pushout {
        theory: Arc::new(out),
        left,
        right,
        there,
        back,
    })
}

impl Pushout {
    /// Reads a model as `(M, N, iso)` with the iso given per source sort.
    pub fn split(
        &self,
        m: &FiniteStructure,
        f: &Arc<Signature>,
        g: &Arc<Signature>,
    ) -> (FiniteStructure, FiniteStructure, Vec<Vec<usize>>) {
        let a = self.left.restrict(m, f);
        let b = self.right.restrict(m, g);
        let iso = self.there.iter().map(|t| m.func_table(*t).to_vec()).collect();
        (a, b, iso)
    }
}
