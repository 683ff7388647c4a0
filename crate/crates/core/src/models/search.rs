//! Finite model search by backtracking over table entries.
//!
//! Cells are filled in a fixed order: constants first, then every other cell
//! by the largest element among its arguments (binary symbols before unary
//! ones, relations last within a level). After each assignment the axioms that
//! mention the assigned symbol are evaluated in three-valued logic over the
//! partial tables; a tuple on which the left side is true and the right side
//! false prunes the branch.

use std::sync::Arc;

use super::eval::is_model;
use super::structure::{table_len, tuple_index, tuples_of, Elem, FiniteStructure, Tuples};
use super::ModelError;
use crate::logic::{FuncId, Node, RelId, Sequent, Signature, SortId, Term, Theory};

/// Limits for a search. `max_nodes` bounds the number of assignments tried.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SearchLimits {
    pub max_nodes: u64,
}

impl Default for SearchLimits {
    fn default() -> Self {
        SearchLimits {
            max_nodes: 50_000_000,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Tri {
    F,
    U,
    T,
}

impl Tri {
    fn and(self, o: Tri) -> Tri {
        self.min(o)
    }

    fn or(self, o: Tri) -> Tri {
        self.max(o)
    }

    fn not(self) -> Tri {
        match self {
            Tri::F => Tri::T,
            Tri::U => Tri::U,
            Tri::T => Tri::F,
        }
    }
}

impl PartialOrd for Tri {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Tri {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        (*self as u8).cmp(&(*other as u8))
    }
}

#[derive(Clone, Copy, Debug)]
enum Cell {
    Func(FuncId, usize),
    Rel(RelId, usize),
}

struct Partial<'a> {
    sig: &'a Signature,
    sizes: &'a [usize],
    funcs: Vec<Vec<Option<Elem>>>,
    rels: Vec<Vec<Option<bool>>>,
}

impl Partial<'_> {
    fn term(&self, t: &Term, env: &[Elem]) -> Option<Elem> {
        match t {
            Term::Var(v) => Some(env[*v]),
            Term::App(f, args) => {
                let mut vals = Vec::with_capacity(args.len());
                for a in args {
                    vals.push(self.term(a, env)?);
                }
                let idx = tuple_index(self.sizes, &self.sig.func(*f).args, &vals);
                self.funcs[f.0][idx]
            }
        }
    }

    fn node(&self, n: &Node, env: &mut Vec<Elem>) -> Tri {
        match n {
            Node::True => Tri::T,
            Node::False => Tri::F,
            Node::Eq(a, b) => {
                if a == b {
                    return Tri::T;
                }
                match (self.term(a, env), self.term(b, env)) {
                    (Some(x), Some(y)) => {
                        if x == y {
                            Tri::T
                        } else {
                            Tri::F
                        }
                    }
                    _ => Tri::U,
                }
            }
            Node::Rel(r, args) => {
                let mut vals = Vec::with_capacity(args.len());
                for a in args {
                    match self.term(a, env) {
                        Some(v) => vals.push(v),
                        None => return Tri::U,
                    }
                }
                let idx = tuple_index(self.sizes, &self.sig.rel(*r).args, &vals);
                match self.rels[r.0][idx] {
                    Some(true) => Tri::T,
                    Some(false) => Tri::F,
                    None => Tri::U,
                }
            }
            Node::And(a, b) => {
                let x = self.node(a, env);
                if x == Tri::F {
                    return Tri::F;
                }
                x.and(self.node(b, env))
            }
            Node::Or(a, b) => {
                let x = self.node(a, env);
                if x == Tri::T {
                    return Tri::T;
                }
                x.or(self.node(b, env))
            }
            Node::Exists(bd, a) => {
                let mut acc = Tri::F;
                for e in 0..self.sizes[bd.sort.0] {
                    env.push(e);
                    let v = self.node(a, env);
                    env.pop();
                    acc = acc.or(v);
                    if acc == Tri::T {
                        break;
                    }
                }
                acc
            }
            Node::Not(a) => self.node(a, env).not(),
        }
    }

    fn refutes(&self, s: &Sequent) -> bool {
        let scope = s.ctx.sorts();
        for t in tuples_of(self.sizes, &scope) {
            let mut env = t;
            if self.node(&s.lhs, &mut env) == Tri::T && self.node(&s.rhs, &mut env) == Tri::F {
                return true;
            }
        }
        false
    }
}

/// Backtracking search for models of a theory with fixed carrier sizes.
pub struct ModelSearch<'a> {
    theory: &'a Theory,
    sizes: Vec<usize>,
    fixed_funcs: Vec<Option<Vec<Elem>>>,
    fixed_rels: Vec<Option<Vec<bool>>>,
    limits: SearchLimits,
    symmetry_breaking: bool,
}

impl<'a> ModelSearch<'a> {
    pub fn new(theory: &'a Theory, sizes: Vec<usize>) -> Self {
        ModelSearch {
            theory,
            fixed_funcs: vec![None; theory.sig.funcs.len()],
            fixed_rels: vec![None; theory.sig.rels.len()],
            sizes,
            limits: SearchLimits::default(),
            symmetry_breaking: false,
        }
    }

    /// Skips assignments that differ only by renaming elements no assigned
    /// cell mentions yet. Every isomorphism class is still visited at least
    /// once, but not every labelled model.
    pub fn symmetry_breaking(mut self, on: bool) -> Self {
        self.symmetry_breaking = on;
        self
    }

    pub fn limits(mut self, limits: SearchLimits) -> Self {
        self.limits = limits;
        self
    }

    /// Fixes the table of a function symbol.
    pub fn fix_func(mut self, f: FuncId, table: Vec<Elem>) -> Self {
        self.fixed_funcs[f.0] = Some(table);
        self
    }

    pub fn fix_rel(mut self, r: RelId, table: Vec<bool>) -> Self {
        self.fixed_rels[r.0] = Some(table);
        self
    }

    /// Calls `visit` on every model in search order until it returns false.
    /// Returns the number of nodes used, or an error if the budget ran out.
    pub fn run(&self, mut visit: impl FnMut(FiniteStructure) -> bool) -> Result<u64, ModelError> {
        let sig = &*self.theory.sig;
        let sizes = &self.sizes[..];
        let mut partial = Partial {
            sig,
            sizes,
            funcs: sig
                .funcs
                .iter()
                .map(|f| vec![None; table_len(sizes, &f.args)])
                .collect(),
            rels: sig
                .rels
                .iter()
                .map(|r| vec![None; table_len(sizes, &r.args)])
                .collect(),
        };
        for (i, t) in self.fixed_funcs.iter().enumerate() {
            if let Some(t) = t {
                let cap = sizes[sig.funcs[i].result.0];
                if t.len() != partial.funcs[i].len() || t.iter().any(|v| *v >= cap) {
                    return Err(ModelError::Invalid(format!(
                        "fixed table of `{}` does not fit the carriers",
                        sig.funcs[i].name
                    )));
                }
                partial.funcs[i] = t.iter().map(|v| Some(*v)).collect();
            }
        }
        for (i, t) in self.fixed_rels.iter().enumerate() {
            if let Some(t) = t {
                if t.len() != partial.rels[i].len() {
                    return Err(ModelError::Invalid(format!(
                        "fixed table of `{}` does not fit the carriers",
                        sig.rels[i].name
                    )));
                }
                partial.rels[i] = t.iter().map(|v| Some(*v)).collect();
            }
        }
        let watch_func = |f: FuncId| -> Vec<usize> {
            (0..self.theory.axioms.len())
                .filter(|i| {
                    let a = &self.theory.axioms[*i];
                    a.lhs.mentions_func(f) || a.rhs.mentions_func(f)
                })
                .collect()
        };
        let watch_rel = |r: RelId| -> Vec<usize> {
            (0..self.theory.axioms.len())
                .filter(|i| {
                    let a = &self.theory.axioms[*i];
                    a.lhs.mentions_rel(r) || a.rhs.mentions_rel(r)
                })
                .collect()
        };
        // (key, cell, args, result sort, watched axioms)
        let mut plan: Vec<((usize, usize, usize, usize), CellPlan)> = Vec::new();
        for f in sig.func_ids().filter(|f| self.fixed_funcs[f.0].is_none()) {
            let sym = sig.func(f);
            let w = watch_func(f);
            for (idx, args) in tuples_of(sizes, &sym.args).enumerate() {
                let top = args.iter().max().map_or(0, |m| m + 1);
                let rank = if sym.args.is_empty() { 0 } else { 1 + usize::MAX / 2 - sym.args.len() };
                plan.push((
                    (top, rank, f.0, idx),
                    CellPlan {
                        cell: Cell::Func(f, idx),
                        args: sym.args.iter().copied().zip(args).collect(),
                        result: Some(sym.result),
                        watch: w.clone(),
                    },
                ));
            }
        }
        for r in sig.rel_ids().filter(|r| self.fixed_rels[r.0].is_none()) {
            let sym = sig.rel(r);
            let w = watch_rel(r);
            for (idx, args) in tuples_of(sizes, &sym.args).enumerate() {
                let top = args.iter().max().map_or(0, |m| m + 1);
                plan.push((
                    (top, usize::MAX, r.0, idx),
                    CellPlan {
                        cell: Cell::Rel(r, idx),
                        args: sym.args.iter().copied().zip(args).collect(),
                        result: None,
                        watch: w.clone(),
                    },
                ));
            }
        }
        plan.sort_by_key(|(k, _)| *k);
        let cells: Vec<CellPlan> = plan.into_iter().map(|(_, c)| c).collect();
        // elements mentioned by fixed tables are never interchangeable
        let mut touched: Vec<Vec<u32>> = sizes.iter().map(|n| vec![0; *n]).collect();
        for (i, t) in self.fixed_funcs.iter().enumerate() {
            if t.is_some() {
                let sym = &sig.funcs[i];
                for (args, v) in tuples_of(sizes, &sym.args).zip(partial.funcs[i].iter()) {
                    for (s, a) in sym.args.iter().zip(&args) {
                        touched[s.0][*a] += 1;
                    }
                    touched[sym.result.0][v.unwrap()] += 1;
                }
            }
        }
        for (i, t) in self.fixed_rels.iter().enumerate() {
            if t.is_some() {
                let sym = &sig.rels[i];
                for args in tuples_of(sizes, &sym.args) {
                    for (s, a) in sym.args.iter().zip(&args) {
                        touched[s.0][*a] += 1;
                    }
                }
            }
        }
        // axioms decidable before any assignment
        if self.theory.axioms.iter().any(|a| partial.refutes(a)) {
            return Ok(0);
        }
        let mut nodes = 0u64;
        let mut go = Walker {
            theory: self.theory,
            cells: &cells,
            touched,
            symmetry: self.symmetry_breaking,
            nodes: &mut nodes,
            limit: self.limits.max_nodes,
            visit: &mut visit,
        };
        match go.walk(0, &mut partial) {
            Step::Budget => Err(ModelError::BoundExceeded(format!(
                "model search exceeded {} nodes",
                self.limits.max_nodes
            ))),
            _ => Ok(nodes),
        }
    }

    pub fn all(&self) -> Result<Vec<FiniteStructure>, ModelError> {
        let mut out = Vec::new();
        self.run(|m| {
            out.push(m);
            true
        })?;
        Ok(out)
    }

    pub fn first(&self) -> Result<Option<FiniteStructure>, ModelError> {
        let mut out = None;
        self.run(|m| {
            out = Some(m);
            false
        })?;
        Ok(out)
    }
}

enum Step {
    Continue,
    Stop,
    Budget,
}

struct CellPlan {
    cell: Cell,
    args: Vec<(SortId, Elem)>,
    result: Option<SortId>,
    watch: Vec<usize>,
}

struct Walker<'a, 'b, V: FnMut(FiniteStructure) -> bool> {
    theory: &'a Theory,
    cells: &'a [CellPlan],
    // how often each element occurs in assigned cells
    touched: Vec<Vec<u32>>,
    symmetry: bool,
    nodes: &'b mut u64,
    limit: u64,
    visit: &'b mut V,
}

impl<V: FnMut(FiniteStructure) -> bool> Walker<'_, '_, V> {
    fn walk(&mut self, i: usize, p: &mut Partial) -> Step {
        if i == self.cells.len() {
            let m = FiniteStructure::new_unchecked(
                self.theory.sig.clone(),
                p.sizes.to_vec(),
                p.funcs
                    .iter()
                    .map(|t| t.iter().map(|v| v.unwrap()).collect())
                    .collect(),
                p.rels
                    .iter()
                    .map(|t| t.iter().map(|v| v.unwrap()).collect())
                    .collect(),
            );
            debug_assert!(is_model(&m, self.theory));
            return if (self.visit)(m) {
                Step::Continue
            } else {
                Step::Stop
            };
        }
        let plan = &self.cells[i];
        for (s, a) in &plan.args {
            self.touched[s.0][*a] += 1;
        }
        let values: Vec<usize> = match plan.result {
            Some(s) => {
                let n = p.sizes[s.0];
                if self.symmetry {
                    // untouched elements are interchangeable: try only the
                    // first of them
                    let t = &self.touched[s.0];
                    let fresh = (0..n).find(|v| t[*v] == 0);
                    (0..n).filter(|v| t[*v] > 0 || Some(*v) == fresh).collect()
                } else {
                    (0..n).collect()
                }
            }
            None => vec![0, 1],
        };
        let mut result = Step::Continue;
        for v in values {
            *self.nodes += 1;
            if *self.nodes > self.limit {
                result = Step::Budget;
                break;
            }
            match plan.cell {
                Cell::Func(f, idx) => p.funcs[f.0][idx] = Some(v),
                Cell::Rel(r, idx) => p.rels[r.0][idx] = Some(v == 1),
            }
            let ok = !plan
                .watch
                .iter()
                .any(|a| p.refutes(&self.theory.axioms[*a]));
            if ok {
                if let Some(s) = plan.result {
                    self.touched[s.0][v] += 1;
                }
                let step = self.walk(i + 1, p);
                if let Some(s) = plan.result {
                    self.touched[s.0][v] -= 1;
                }
                if !matches!(step, Step::Continue) {
                    result = step;
                    break;
                }
            }
        }
        clear(p, plan.cell);
        for (s, a) in &plan.args {
            self.touched[s.0][*a] -= 1;
        }
        result
    }
}

fn clear(p: &mut Partial, cell: Cell) {
    match cell {
        Cell::Func(f, idx) => p.funcs[f.0][idx] = None,
        Cell::Rel(r, idx) => p.rels[r.0][idx] = None,
    }
}

/// Every per-sort size vector with entries in `0..=n`, smallest total first
/// and lexicographic within equal totals.
pub fn size_vectors(sorts: usize, n: usize) -> Vec<Vec<usize>> {
    let mut all: Vec<Vec<usize>> = Tuples::new(vec![n + 1; sorts]).collect();
    all.sort_by(|a, b| {
        a.iter()
            .sum::<usize>()
            .cmp(&b.iter().sum::<usize>())
            .then_with(|| a.cmp(b))
    });
    all
}

/// All labelled expansions of `base` (a structure over a sub-signature,
/// matched by name) to models of `theory` on the same carriers.
pub fn enumerate_expansions(
    theory: &Theory,
    base: &FiniteStructure,
    limits: SearchLimits,
) -> Result<Vec<FiniteStructure>, ModelError> {
    let emb = theory
        .sig
        .embedding_of(base.signature())
        .ok_or(ModelError::SignatureMismatch)?;
    let mut sizes = vec![None; theory.sig.sorts.len()];
    for (i, s) in emb.sorts.iter().enumerate() {
        sizes[s.0] = Some(base.sizes()[i]);
    }
    let sizes = sizes
        .into_iter()
        .collect::<Option<Vec<_>>>()
        .ok_or_else(|| ModelError::Invalid("expansion would need carriers for new sorts".into()))?;
    let mut search = ModelSearch::new(theory, sizes).limits(limits);
    for (i, f) in emb.funcs.iter().enumerate() {
        search = search.fix_func(*f, base.func_table(FuncId(i)).to_vec());
    }
    for (i, r) in emb.rels.iter().enumerate() {
        search = search.fix_rel(*r, base.rel_table(RelId(i)).to_vec());
    }
    search.all()
}

/// All labelled models with every carrier at most `n`.
pub fn enumerate_labelled(
    theory: &Theory,
    n: usize,
    limits: SearchLimits,
) -> Result<Vec<FiniteStructure>, ModelError> {
    collect_all(theory, n, limits, false)
}

/// At least one model per isomorphism class with every carrier at most `n`.
pub fn enumerate_representatives(
    theory: &Theory,
    n: usize,
    limits: SearchLimits,
) -> Result<Vec<FiniteStructure>, ModelError> {
    collect_all(theory, n, limits, true)
}

fn collect_all(
    theory: &Theory,
    n: usize,
    limits: SearchLimits,
    symmetry: bool,
) -> Result<Vec<FiniteStructure>, ModelError> {
    let mut out = Vec::new();
    let mut budget = limits.max_nodes;
    for sizes in size_vectors(theory.sig.sorts.len(), n) {
        let used = ModelSearch::new(theory, sizes)
            .limits(SearchLimits { max_nodes: budget })
            .symmetry_breaking(symmetry)
            .run(|m| {
                out.push(m);
                true
            })?;
        budget -= used.min(budget);
    }
    Ok(out)
}

/// Adds constants `c~0, c~1, ...` for `sorts` and returns their ids.
pub(crate) fn with_fresh_constants(
    sig: &Signature,
    prefix: &str,
    sorts: &[SortId],
) -> (Arc<Signature>, Vec<FuncId>) {
    let mut sig = sig.clone();
    let mut ids = Vec::new();
    for (i, s) in sorts.iter().enumerate() {
        let mut name = format!("{prefix}~{i}");
        while sig.contains_name(&name) {
            name.push('\'');
        }
        ids.push(sig.add_func(&name, &[], *s).expect("fresh name"));
    }
    (Arc::new(sig), ids)
}
