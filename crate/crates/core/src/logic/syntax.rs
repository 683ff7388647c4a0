//! Terms, formulas and sequents.
//!
//! Variables are de Bruijn *levels*: in a formula over a context of length
//! `n`, `Var(i)` for `i < n` is the `i`-th context variable and the variable
//! bound by an `Exists` at nesting depth `d` is `Var(n + d)`. Binder names are
//! kept for printing only and do not take part in equality, so derived `Eq`
//! on [`Node`] is alpha-equivalence.

use serde::{Deserialize, Serialize};
use std::hash::{Hash, Hasher};

use super::signature::{FuncId, RelId, Signature, SortId};
use super::{Diagnostic, LogicError};

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Term {
    Var(usize),
    App(FuncId, Vec<Term>),
}

impl Term {
    pub fn constant(f: FuncId) -> Term {
        Term::App(f, Vec::new())
    }

    pub fn app(f: FuncId, args: impl IntoIterator<Item = Term>) -> Term {
        Term::App(f, args.into_iter().collect())
    }

    pub fn depth(&self) -> usize {
        match self {
            Term::Var(_) => 0,
            Term::App(_, args) => 1 + args.iter().map(Term::depth).max().unwrap_or(0),
        }
    }

    /// Largest variable level occurring in the term, if any.
    pub fn max_var(&self) -> Option<usize> {
        match self {
            Term::Var(v) => Some(*v),
            Term::App(_, args) => args.iter().filter_map(Term::max_var).max(),
        }
    }

    pub fn vars(&self, out: &mut Vec<usize>) {
        match self {
            Term::Var(v) => out.push(*v),
            Term::App(_, args) => args.iter().for_each(|a| a.vars(out)),
        }
    }

    pub fn mentions_func(&self, f: FuncId) -> bool {
        match self {
            Term::Var(_) => false,
            Term::App(g, args) => *g == f || args.iter().any(|a| a.mentions_func(f)),
        }
    }

    /// Replaces `Var(i)` for `i < base` by `images[i]` and shifts the
    /// remaining levels so that `base` lands on `new_base`.
    pub fn rebase(&self, base: usize, images: &[Term], new_base: usize) -> Term {
        match self {
            Term::Var(v) if *v < base => images[*v].clone(),
            Term::Var(v) => Term::Var(v - base + new_base),
            Term::App(f, args) => Term::App(
                *f,
                args.iter().map(|a| a.rebase(base, images, new_base)).collect(),
            ),
        }
    }

    pub fn rename_funcs(&self, map: &impl Fn(FuncId) -> FuncId) -> Term {
        match self {
            Term::Var(v) => Term::Var(*v),
            Term::App(f, args) => {
                Term::App(map(*f), args.iter().map(|a| a.rename_funcs(map)).collect())
            }
        }
    }

    pub fn sort(&self, sig: &Signature, scope: &[SortId]) -> Result<SortId, String> {
        match self {
            Term::Var(v) => scope
                .get(*v)
                .copied()
                .ok_or_else(|| format!("unbound variable #{v}")),
            Term::App(f, args) => {
                let sym = sig
                    .funcs
                    .get(f.0)
                    .ok_or_else(|| format!("unknown function symbol #{}", f.0))?;
                if sym.args.len() != args.len() {
                    return Err(format!(
                        "arity mismatch: `{}` expects {} arguments, got {}",
                        sym.name,
                        sym.args.len(),
                        args.len()
                    ));
                }
                for (i, (a, want)) in args.iter().zip(&sym.args).enumerate() {
                    let got = a.sort(sig, scope)?;
                    if got != *want {
                        return Err(format!(
                            "sort mismatch: argument {} of `{}` has sort `{}`, expected `{}`",
                            i + 1,
                            sym.name,
                            sig.sorts.get(got.0).map(String::as_str).unwrap_or("?"),
                            sig.sorts.get(want.0).map(String::as_str).unwrap_or("?"),
                        ));
                    }
                }
                Ok(sym.result)
            }
        }
    }
}

/// An existential binder. Equality and hashing look at the sort only.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Binder {
    pub name: String,
    pub sort: SortId,
}

impl Binder {
    pub fn new(name: impl Into<String>, sort: SortId) -> Self {
        Binder {
            name: name.into(),
            sort,
        }
    }
}

impl PartialEq for Binder {
    fn eq(&self, other: &Self) -> bool {
        self.sort == other.sort
    }
}

impl Eq for Binder {}

impl Hash for Binder {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.sort.hash(state)
    }
}

impl PartialOrd for Binder {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Binder {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.sort.cmp(&other.sort)
    }
}

/// Formula syntax shared by the coherent and classical fragments.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Node {
    True,
    False,
    Eq(Term, Term),
    Rel(RelId, Vec<Term>),
    And(Box<Node>, Box<Node>),
    Or(Box<Node>, Box<Node>),
    Exists(Binder, Box<Node>),
    Not(Box<Node>),
}

impl Node {
    pub fn eq(a: Term, b: Term) -> Node {
        Node::Eq(a, b)
    }

    pub fn rel(r: RelId, args: impl IntoIterator<Item = Term>) -> Node {
        Node::Rel(r, args.into_iter().collect())
    }

    pub fn and(a: Node, b: Node) -> Node {
        Node::And(Box::new(a), Box::new(b))
    }

    pub fn or(a: Node, b: Node) -> Node {
        Node::Or(Box::new(a), Box::new(b))
    }

    pub fn exists(b: Binder, body: Node) -> Node {
        Node::Exists(b, Box::new(body))
    }

    pub fn not(a: Node) -> Node {
        Node::Not(Box::new(a))
    }

    /// Left-nested conjunction; `True` when empty.
    pub fn conj(items: impl IntoIterator<Item = Node>) -> Node {
        items
            .into_iter()
            .reduce(Node::and)
            .unwrap_or(Node::True)
    }

    /// Left-nested disjunction; `False` when empty.
    pub fn disj(items: impl IntoIterator<Item = Node>) -> Node {
        items.into_iter().reduce(Node::or).unwrap_or(Node::False)
    }

    /// Wraps `body` (over `scope ++ binders`) in one existential per binder.
    pub fn exists_many(binders: Vec<Binder>, body: Node) -> Node {
        binders
            .into_iter()
            .rev()
            .fold(body, |acc, b| Node::exists(b, acc))
    }

    pub fn is_coherent(&self) -> bool {
        match self {
            Node::True | Node::False | Node::Eq(..) | Node::Rel(..) => true,
            Node::And(a, b) | Node::Or(a, b) => a.is_coherent() && b.is_coherent(),
            Node::Exists(_, a) => a.is_coherent(),
            Node::Not(_) => false,
        }
    }

    /// Connective depth: atoms have depth 1, each connective adds one.
    pub fn depth(&self) -> usize {
        match self {
            Node::True | Node::False | Node::Eq(..) | Node::Rel(..) => 1,
            Node::And(a, b) | Node::Or(a, b) => 1 + a.depth().max(b.depth()),
            Node::Exists(_, a) | Node::Not(a) => 1 + a.depth(),
        }
    }

    pub fn rebase(&self, base: usize, images: &[Term], new_base: usize) -> Node {
        match self {
            Node::True => Node::True,
            Node::False => Node::False,
            Node::Eq(a, b) => Node::Eq(
                a.rebase(base, images, new_base),
                b.rebase(base, images, new_base),
            ),
            Node::Rel(r, args) => Node::Rel(
                *r,
                args.iter().map(|a| a.rebase(base, images, new_base)).collect(),
            ),
            Node::And(a, b) => Node::and(
                a.rebase(base, images, new_base),
                b.rebase(base, images, new_base),
            ),
            Node::Or(a, b) => Node::or(
                a.rebase(base, images, new_base),
                b.rebase(base, images, new_base),
            ),
            Node::Exists(bd, a) => Node::exists(bd.clone(), a.rebase(base, images, new_base)),
            Node::Not(a) => Node::not(a.rebase(base, images, new_base)),
        }
    }

    /// Renames symbols; used when a formula moves into a larger signature.
    pub fn rename_symbols(
        &self,
        funcs: &impl Fn(FuncId) -> FuncId,
        rels: &impl Fn(RelId) -> RelId,
        sorts: &impl Fn(SortId) -> SortId,
    ) -> Node {
        match self {
            Node::True => Node::True,
            Node::False => Node::False,
            Node::Eq(a, b) => Node::Eq(a.rename_funcs(funcs), b.rename_funcs(funcs)),
            Node::Rel(r, args) => {
                Node::Rel(rels(*r), args.iter().map(|a| a.rename_funcs(funcs)).collect())
            }
            Node::And(a, b) => Node::and(
                a.rename_symbols(funcs, rels, sorts),
                b.rename_symbols(funcs, rels, sorts),
            ),
            Node::Or(a, b) => Node::or(
                a.rename_symbols(funcs, rels, sorts),
                b.rename_symbols(funcs, rels, sorts),
            ),
            Node::Exists(bd, a) => Node::exists(
                Binder::new(bd.name.clone(), sorts(bd.sort)),
                a.rename_symbols(funcs, rels, sorts),
            ),
            Node::Not(a) => Node::not(a.rename_symbols(funcs, rels, sorts)),
        }
    }

    /// Free variables below `scope_len`, i.e. context variables used.
    pub fn free_vars(&self, scope_len: usize) -> Vec<usize> {
        fn go(n: &Node, depth_base: usize, out: &mut Vec<usize>) {
            match n {
                Node::True | Node::False => {}
                Node::Eq(a, b) => {
                    a.vars(out);
                    b.vars(out);
                }
                Node::Rel(_, args) => args.iter().for_each(|a| a.vars(out)),
                Node::And(a, b) | Node::Or(a, b) => {
                    go(a, depth_base, out);
                    go(b, depth_base, out);
                }
                Node::Exists(_, a) | Node::Not(a) => go(a, depth_base + 1, out),
            }
        }
        let mut all = Vec::new();
        go(self, scope_len, &mut all);
        all.retain(|v| *v < scope_len);
        all.sort_unstable();
        all.dedup();
        all
    }

    pub fn mentions_rel(&self, r: RelId) -> bool {
        match self {
            Node::True | Node::False | Node::Eq(..) => false,
            Node::Rel(q, _) => *q == r,
            Node::And(a, b) | Node::Or(a, b) => a.mentions_rel(r) || b.mentions_rel(r),
            Node::Exists(_, a) | Node::Not(a) => a.mentions_rel(r),
        }
    }

    pub fn mentions_func(&self, f: FuncId) -> bool {
        match self {
            Node::True | Node::False => false,
            Node::Eq(a, b) => a.mentions_func(f) || b.mentions_func(f),
            Node::Rel(_, args) => args.iter().any(|a| a.mentions_func(f)),
            Node::And(a, b) | Node::Or(a, b) => a.mentions_func(f) || b.mentions_func(f),
            Node::Exists(_, a) | Node::Not(a) => a.mentions_func(f),
        }
    }

    /// Type-checks the node over `scope`, appending diagnostics.
    pub fn check(
        &self,
        sig: &Signature,
        scope: &mut Vec<SortId>,
        allow_not: bool,
        location: &str,
        out: &mut Vec<Diagnostic>,
    ) {
        match self {
            Node::True | Node::False => {}
            Node::Eq(a, b) => {
                let sa = a.sort(sig, scope);
                let sb = b.sort(sig, scope);
                match (sa, sb) {
                    (Ok(x), Ok(y)) if x != y => out.push(Diagnostic::new(
                        location,
                        format!(
                            "sort mismatch: equation between `{}` and `{}`",
                            sig.sorts[x.0], sig.sorts[y.0]
                        ),
                    )),
                    (Ok(_), Ok(_)) => {}
                    (Err(e), _) | (_, Err(e)) => out.push(Diagnostic::new(location, e)),
                }
            }
            Node::Rel(r, args) => {
                let Some(sym) = sig.rels.get(r.0) else {
                    out.push(Diagnostic::new(
                        location,
                        format!("unknown relation symbol #{}", r.0),
                    ));
                    return;
                };
                if sym.args.len() != args.len() {
                    out.push(Diagnostic::new(
                        location,
                        format!(
                            "arity mismatch: `{}` expects {} arguments, got {}",
                            sym.name,
                            sym.args.len(),
                            args.len()
                        ),
                    ));
                    return;
                }
                for (i, (a, want)) in args.iter().zip(&sym.args).enumerate() {
                    match a.sort(sig, scope) {
                        Ok(got) if got != *want => out.push(Diagnostic::new(
                            location,
                            format!(
                                "sort mismatch: argument {} of `{}` has sort `{}`, expected `{}`",
                                i + 1,
                                sym.name,
                                sig.sorts[got.0],
                                sig.sorts[want.0]
                            ),
                        )),
                        Ok(_) => {}
                        Err(e) => out.push(Diagnostic::new(location, e)),
                    }
                }
            }
            Node::And(a, b) | Node::Or(a, b) => {
                a.check(sig, scope, allow_not, location, out);
                b.check(sig, scope, allow_not, location, out);
            }
            Node::Exists(bd, a) => {
                if bd.sort.0 >= sig.sorts.len() {
                    out.push(Diagnostic::new(
                        location,
                        format!("unknown sort for bound variable `{}`", bd.name),
                    ));
                    return;
                }
                scope.push(bd.sort);
                a.check(sig, scope, allow_not, location, out);
                scope.pop();
            }
            Node::Not(a) => {
                if !allow_not {
                    out.push(Diagnostic::new(
                        location,
                        "classical connective in coherent theory",
                    ));
                }
                a.check(sig, scope, allow_not, location, out);
            }
        }
    }
}

/// An ordered list of distinct sorted variables.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Context {
    vars: Vec<(String, SortId)>,
}

impl Context {
    pub fn empty() -> Self {
        Self::default()
    }

    pub fn new(vars: Vec<(String, SortId)>) -> Result<Self, LogicError> {
        for (i, (name, _)) in vars.iter().enumerate() {
            if vars[..i].iter().any(|(n, _)| n == name) {
                return Err(LogicError::VariableClash(name.clone()));
            }
        }
        Ok(Context { vars })
    }

    /// Builds a context with generated names `x0, x1, ...`.
    pub fn of_sorts(sorts: &[SortId]) -> Self {
        Context {
            vars: sorts
                .iter()
                .enumerate()
                .map(|(i, s)| (format!("x{i}"), *s))
                .collect(),
        }
    }

    /// Unchecked construction, for building malformed contexts in tests.
    #[cfg(test)]
    pub(crate) fn from_vars_unchecked(vars: Vec<(String, SortId)>) -> Self {
        Context { vars }
    }

    pub fn len(&self) -> usize {
        self.vars.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vars.is_empty()
    }

    pub fn vars(&self) -> &[(String, SortId)] {
        &self.vars
    }

    pub fn sorts(&self) -> Vec<SortId> {
        self.vars.iter().map(|(_, s)| *s).collect()
    }

    pub fn name(&self, i: usize) -> &str {
        &self.vars[i].0
    }

    pub fn sort(&self, i: usize) -> SortId {
        self.vars[i].1
    }

    pub fn position(&self, name: &str) -> Option<usize> {
        self.vars.iter().position(|(n, _)| n == name)
    }

    pub fn concat(&self, other: &Context) -> Result<Context, LogicError> {
        let mut vars = self.vars.clone();
        vars.extend(other.vars.iter().cloned());
        Context::new(vars)
    }

    pub fn map_sorts(&self, f: impl Fn(SortId) -> SortId) -> Context {
        Context {
            vars: self.vars.iter().map(|(n, s)| (n.clone(), f(*s))).collect(),
        }
    }

    pub fn var(&self, i: usize) -> Term {
        assert!(i < self.vars.len());
        Term::Var(i)
    }

    pub fn var_named(&self, name: &str) -> Option<Term> {
        self.position(name).map(Term::Var)
    }
}

/// A coherent formula together with its context.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Formula {
    ctx: Context,
    body: Node,
}

impl Formula {
    /// Checks scoping, sorting and that only coherent connectives occur.
    pub fn new(sig: &Signature, ctx: Context, body: Node) -> Result<Self, LogicError> {
        check_body(sig, &ctx, &body, false)?;
        Ok(Formula { ctx, body })
    }

    pub(crate) fn new_unchecked(ctx: Context, body: Node) -> Self {
        debug_assert!(body.is_coherent());
        Formula { ctx, body }
    }

    pub fn top(ctx: Context) -> Self {
        Formula {
            ctx,
            body: Node::True,
        }
    }

    pub fn ctx(&self) -> &Context {
        &self.ctx
    }

    pub fn body(&self) -> &Node {
        &self.body
    }

    pub fn into_parts(self) -> (Context, Node) {
        (self.ctx, self.body)
    }

    pub fn depth(&self) -> usize {
        self.body.depth()
    }

    pub fn to_classical(&self) -> ClassicalFormula {
        ClassicalFormula {
            ctx: self.ctx.clone(),
            body: self.body.clone(),
        }
    }
}

/// A first-order formula that may use negation.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ClassicalFormula {
    ctx: Context,
    body: Node,
}

impl ClassicalFormula {
    pub fn new(sig: &Signature, ctx: Context, body: Node) -> Result<Self, LogicError> {
        check_body(sig, &ctx, &body, true)?;
        Ok(ClassicalFormula { ctx, body })
    }

    pub(crate) fn new_unchecked(ctx: Context, body: Node) -> Self {
        ClassicalFormula { ctx, body }
    }

    pub fn ctx(&self) -> &Context {
        &self.ctx
    }

    pub fn body(&self) -> &Node {
        &self.body
    }

    /// The coherent formula, if no negation occurs.
    pub fn as_coherent(&self) -> Option<Formula> {
        self.body
            .is_coherent()
            .then(|| Formula::new_unchecked(self.ctx.clone(), self.body.clone()))
    }
}

fn check_body(sig: &Signature, ctx: &Context, body: &Node, allow_not: bool) -> Result<(), LogicError> {
    let mut out = Vec::new();
    for (_, s) in ctx.vars() {
        if s.0 >= sig.sorts.len() {
            out.push(Diagnostic::new("context", format!("unknown sort {s}")));
        }
    }
    body.check(sig, &mut ctx.sorts(), allow_not, "formula", &mut out);
    match out.into_iter().next() {
        None => Ok(()),
        Some(d) => Err(LogicError::IllFormed(d)),
    }
}

/// A sequent `lhs ⊢_ctx rhs`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Sequent {
    pub ctx: Context,
    pub lhs: Node,
    pub rhs: Node,
}

impl Sequent {
    pub fn new(ctx: Context, lhs: Node, rhs: Node) -> Self {
        Sequent { ctx, lhs, rhs }
    }

    pub fn from_formulas(lhs: &Formula, rhs: &Formula) -> Result<Self, LogicError> {
        if lhs.ctx() != rhs.ctx() {
            return Err(LogicError::ContextMismatch);
        }
        Ok(Sequent {
            ctx: lhs.ctx().clone(),
            lhs: lhs.body().clone(),
            rhs: rhs.body().clone(),
        })
    }

    pub fn is_coherent(&self) -> bool {
        self.lhs.is_coherent() && self.rhs.is_coherent()
    }

    pub fn lhs_formula(&self) -> ClassicalFormula {
        ClassicalFormula::new_unchecked(self.ctx.clone(), self.lhs.clone())
    }

    pub fn rhs_formula(&self) -> ClassicalFormula {
        ClassicalFormula::new_unchecked(self.ctx.clone(), self.rhs.clone())
    }

    pub fn check(&self, sig: &Signature, allow_not: bool, location: &str) -> Vec<Diagnostic> {
        let mut out = Vec::new();
        for (i, (name, s)) in self.ctx.vars().iter().enumerate() {
            if s.0 >= sig.sorts.len() {
                out.push(Diagnostic::new(
                    location,
                    format!("unknown sort for context variable `{name}`"),
                ));
            }
            if self.ctx.vars()[..i].iter().any(|(n, _)| n == name) {
                out.push(Diagnostic::new(
                    location,
                    format!("variable clash: `{name}` bound twice in context"),
                ));
            }
        }
        if !out.is_empty() {
            return out;
        }
        let mut scope = self.ctx.sorts();
        self.lhs
            .check(sig, &mut scope, allow_not, &format!("{location}, lhs"), &mut out);
        self.rhs
            .check(sig, &mut scope, allow_not, &format!("{location}, rhs"), &mut out);
        out
    }
}
