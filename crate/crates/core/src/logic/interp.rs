//! Interpretations between theories.

use std::sync::Arc;

use super::signature::SortId;
use super::syntax::{Binder, Context, Formula, Node, Sequent, Term};
use super::{LogicError, Theory};

/// An interpretation `I: source -> target`.
///
/// Each source relation `R : A1..An` goes to a target formula in the context
/// `[x1:I(A1), .., xn:I(An)]`; each source function `f : A1..An -> B` goes to
/// a target formula in `[x1:I(A1), .., xn:I(An), y:I(B)]` that is meant to be
/// the graph of a function. Functionality is a semantic property and is
/// certified separately (see `analysis::check_functional`).
#[derive(Clone, Debug)]
pub struct Interpretation {
    pub name: String,
    pub source: Arc<Theory>,
    pub target: Arc<Theory>,
    pub sort_map: Vec<SortId>,
    pub func_images: Vec<Formula>,
    pub rel_images: Vec<Formula>,
}

impl Interpretation {
    pub fn new(
        name: impl Into<String>,
        source: Arc<Theory>,
        target: Arc<Theory>,
        sort_map: Vec<SortId>,
        func_images: Vec<Formula>,
        rel_images: Vec<Formula>,
    ) -> Result<Self, LogicError> {
        let ssig = &source.sig;
        let tsig = &target.sig;
        let bad = |m: String| Err(LogicError::BadInterpretation(m));
        if sort_map.len() != ssig.sorts.len() {
            return bad(format!(
                "sort map has {} entries for {} source sorts",
                sort_map.len(),
                ssig.sorts.len()
            ));
        }
        if sort_map.iter().any(|s| s.0 >= tsig.sorts.len()) {
            return bad("sort map names an unknown target sort".into());
        }
        if func_images.len() != ssig.funcs.len() || rel_images.len() != ssig.rels.len() {
            return bad("every source symbol needs exactly one image".into());
        }
        for (f, img) in ssig.funcs.iter().zip(&func_images) {
            let mut want: Vec<SortId> = f.args.iter().map(|a| sort_map[a.0]).collect();
            want.push(sort_map[f.result.0]);
            if img.ctx().sorts() != want {
                return bad(format!("image of `{}` has the wrong context", f.name));
            }
            Formula::new(tsig, img.ctx().clone(), img.body().clone())?;
        }
        for (r, img) in ssig.rels.iter().zip(&rel_images) {
            let want: Vec<SortId> = r.args.iter().map(|a| sort_map[a.0]).collect();
            if img.ctx().sorts() != want {
                return bad(format!("image of `{}` has the wrong context", r.name));
            }
            Formula::new(tsig, img.ctx().clone(), img.body().clone())?;
        }
        Ok(Interpretation {
            name: name.into(),
            source,
            target,
            sort_map,
            func_images,
            rel_images,
        })
    }

    /// The identity interpretation of a theory into itself.
    pub fn identity(theory: Arc<Theory>) -> Self {
        Self::by_name(theory.clone(), theory).expect("identity interpretation is valid")
    }

    /// Sends every source sort and symbol to the target one with the same name.
    pub fn by_name(source: Arc<Theory>, target: Arc<Theory>) -> Result<Self, LogicError> {
        let ssig = &source.sig;
        let tsig = &target.sig;
        let mut sort_map = Vec::new();
        for s in &ssig.sorts {
            sort_map.push(
                tsig.sort_id(s)
                    .ok_or_else(|| LogicError::BadInterpretation(format!("no target sort `{s}`")))?,
            );
        }
        let func_images = ssig
            .funcs
            .iter()
            .map(|f| {
                let g = tsig.func_id(&f.name).ok_or_else(|| {
                    LogicError::BadInterpretation(format!("no target symbol `{}`", f.name))
                })?;
                let mut sorts: Vec<SortId> = f.args.iter().map(|a| sort_map[a.0]).collect();
                sorts.push(sort_map[f.result.0]);
                let ctx = Context::of_sorts(&sorts);
                let n = f.args.len();
                let body = Node::eq(Term::app(g, (0..n).map(Term::Var)), Term::Var(n));
                Formula::new(tsig, ctx, body)
            })
            .collect::<Result<Vec<_>, _>>()?;
        let rel_images = ssig
            .rels
            .iter()
            .map(|r| {
                let q = tsig.rel_id(&r.name).ok_or_else(|| {
                    LogicError::BadInterpretation(format!("no target symbol `{}`", r.name))
                })?;
                let sorts: Vec<SortId> = r.args.iter().map(|a| sort_map[a.0]).collect();
                let body = Node::rel(q, (0..sorts.len()).map(Term::Var));
                Formula::new(tsig, Context::of_sorts(&sorts), body)
            })
            .collect::<Result<Vec<_>, _>>()?;
        let name = format!("{}->{}", source.name, target.name);
        Self::new(name, source, target, sort_map, func_images, rel_images)
    }

    pub fn map_sort(&self, s: SortId) -> SortId {
        self.sort_map[s.0]
    }

    pub fn map_context(&self, ctx: &Context) -> Context {
        ctx.map_sorts(|s| self.map_sort(s))
    }

    /// Translates a source formula body over `scope_len` source variables into
    /// a target body over the same variables. Function applications are
    /// flattened into existentially bound graph witnesses.
    pub fn translate_node(&self, scope_len: usize, node: &Node) -> Node {
        match node {
            Node::True => Node::True,
            Node::False => Node::False,
            Node::Eq(a, b) => self.translate_atom(scope_len, &[a.clone(), b.clone()], |v| {
                Node::eq(Term::Var(v[0]), Term::Var(v[1]))
            }),
            Node::Rel(r, args) => {
                let img = &self.rel_images[r.0];
                self.translate_atom(scope_len, args, |v| {
                    let images: Vec<Term> = v[..args.len()].iter().map(|x| Term::Var(*x)).collect();
                    img.body().rebase(args.len(), &images, v[args.len()])
                })
            }
            Node::And(a, b) => Node::and(
                self.translate_node(scope_len, a),
                self.translate_node(scope_len, b),
            ),
            Node::Or(a, b) => Node::or(
                self.translate_node(scope_len, a),
                self.translate_node(scope_len, b),
            ),
            Node::Exists(bd, a) => Node::exists(
                Binder::new(bd.name.clone(), self.map_sort(bd.sort)),
                self.translate_node(scope_len + 1, a),
            ),
            Node::Not(a) => Node::not(self.translate_node(scope_len, a)),
        }
    }

    // `build` receives the levels of the flattened arguments followed by the
    // total scope length after flattening.
    fn translate_atom(
        &self,
        scope_len: usize,
        args: &[Term],
        build: impl Fn(&[usize]) -> Node,
    ) -> Node {
        let mut apps: Vec<(usize, Vec<usize>)> = Vec::new();
        let mut levels = Vec::new();
        for a in args {
            levels.push(self.flatten(scope_len, a, &mut apps));
        }
        let total = scope_len + apps.len();
        let mut conds = Vec::new();
        let ssig = &self.source.sig;
        let mut binders = Vec::new();
        for (i, (f, arg_levels)) in apps.iter().enumerate() {
            let sym = &ssig.funcs[*f];
            let mut images: Vec<Term> = arg_levels.iter().map(|x| Term::Var(*x)).collect();
            images.push(Term::Var(scope_len + i));
            conds.push(self.func_images[*f].body().rebase(images.len(), &images, total));
            binders.push(Binder::new(format!("t{i}"), self.map_sort(sym.result)));
        }
        levels.push(total);
        conds.push(build(&levels));
        Node::exists_many(binders, Node::conj(conds))
    }

    fn flatten(&self, scope_len: usize, t: &Term, apps: &mut Vec<(usize, Vec<usize>)>) -> usize {
        match t {
            Term::Var(v) => *v,
            Term::App(f, args) => {
                let arg_levels = args.iter().map(|a| self.flatten(scope_len, a, apps)).collect();
                apps.push((f.0, arg_levels));
                scope_len + apps.len() - 1
            }
        }
    }

    pub fn translate_formula(&self, f: &Formula) -> Formula {
        Formula::new_unchecked(
            self.map_context(f.ctx()),
            self.translate_node(f.ctx().len(), f.body()),
        )
    }

    pub fn translate_sequent(&self, s: &Sequent) -> Sequent {
        let n = s.ctx.len();
        Sequent::new(
            self.map_context(&s.ctx),
            self.translate_node(n, &s.lhs),
            self.translate_node(n, &s.rhs),
        )
    }
}
