//! The chase: a growing set of elements and facts, closed under congruence.

use std::collections::{BTreeMap, BTreeSet};
use std::sync::Arc;

use super::normal::{dnf, Disjunct};
use super::{BoundKind, ProverBounds, TraceEvent};
use crate::logic::{FuncId, Node, RelId, Sequent, Signature, SortId, Term, Theory};
use crate::models::{holds_at, is_model, Elem, FiniteStructure, Tuples};

/// Elements are indices; equalities are kept in a union-find whose roots are
/// the smallest member, and the function graph and relation facts are
/// re-canonicalised after every merge.
#[derive(Clone, Debug)]
pub(crate) struct State {
    sorts: Vec<SortId>,
    parent: Vec<usize>,
    funcs: BTreeMap<(FuncId, Vec<usize>), usize>,
    rels: BTreeSet<(RelId, Vec<usize>)>,
}

impl State {
    fn new() -> Self {
        State {
            sorts: Vec::new(),
            parent: Vec::new(),
            funcs: BTreeMap::new(),
            rels: BTreeSet::new(),
        }
    }

    pub(crate) fn find(&self, mut x: usize) -> usize {
        while self.parent[x] != x {
            x = self.parent[x];
        }
        x
    }

    fn fresh(&mut self, s: SortId) -> usize {
        let id = self.sorts.len();
        self.sorts.push(s);
        self.parent.push(id);
        id
    }

    fn union(&mut self, a: usize, b: usize) -> bool {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra == rb {
            return false;
        }
        let (lo, hi) = if ra < rb { (ra, rb) } else { (rb, ra) };
        self.parent[hi] = lo;
        true
    }

    /// Restores canonical keys and merges results of congruent applications.
    fn close(&mut self) {
        loop {
            let mut merged = false;
            let old = std::mem::take(&mut self.funcs);
            let mut next: BTreeMap<(FuncId, Vec<usize>), usize> = BTreeMap::new();
            for ((f, args), v) in old {
                let key = (f, args.iter().map(|a| self.find(*a)).collect::<Vec<_>>());
                let val = self.find(v);
                match next.get(&key) {
                    Some(w) => {
                        let w = *w;
                        if self.union(w, val) {
                            merged = true;
                        }
                    }
                    None => {
                        next.insert(key, val);
                    }
                }
            }
            self.funcs = next;
            if !merged {
                break;
            }
        }
        let funcs = std::mem::take(&mut self.funcs);
        self.funcs = funcs
            .into_iter()
            .map(|((f, args), v)| {
                (
                    (f, args.iter().map(|a| self.find(*a)).collect()),
                    self.find(v),
                )
            })
            .collect();
        let rels = std::mem::take(&mut self.rels);
        self.rels = rels
            .into_iter()
            .map(|(r, args)| (r, args.iter().map(|a| self.find(*a)).collect()))
            .collect();
    }

    fn index(&self) -> GraphIndex {
        let mut by_value: BTreeMap<(FuncId, usize), Vec<Vec<usize>>> = BTreeMap::new();
        for ((f, args), v) in &self.funcs {
            by_value.entry((*f, *v)).or_default().push(args.clone());
        }
        GraphIndex {
            entries: self.funcs.iter().map(|((f, a), v)| (*f, a.clone(), *v)).collect(),
            by_value,
        }
    }

    pub(crate) fn roots(&self, s: SortId) -> Vec<usize> {
        (0..self.sorts.len())
            .filter(|x| self.parent[*x] == *x && self.sorts[*x] == s)
            .collect()
    }

    fn live(&self) -> usize {
        (0..self.sorts.len()).filter(|x| self.parent[*x] == *x).count()
    }

    fn lookup(&self, t: &Term, env: &[usize]) -> Option<usize> {
        match t {
            Term::Var(v) => Some(self.find(env[*v])),
            Term::App(f, args) => {
                let mut vals = Vec::with_capacity(args.len());
                for a in args {
                    vals.push(self.lookup(a, env)?);
                }
                self.funcs.get(&(*f, vals)).map(|v| self.find(*v))
            }
        }
    }

    /// Evaluates a term, adding elements for applications not yet present.
    fn create(&mut self, sig: &Signature, t: &Term, env: &[usize]) -> usize {
        match t {
            Term::Var(v) => self.find(env[*v]),
            Term::App(f, args) => {
                let vals: Vec<usize> = args.iter().map(|a| self.create(sig, a, env)).collect();
                if let Some(v) = self.funcs.get(&(*f, vals.clone())) {
                    return self.find(*v);
                }
                let v = self.fresh(sig.func(*f).result);
                self.funcs.insert((*f, vals), v);
                v
            }
        }
    }

    /// One round of missing applications over the current roots, each given
    /// a fresh value, while the element count stays within `max`. Whether
    /// anything was added.
    fn totalize(&mut self, sig: &Signature, max: usize) -> bool {
        let mut added = false;
        for f in sig.func_ids() {
            let sym = sig.func(f);
            let pools: Vec<Vec<usize>> = sym.args.iter().map(|a| self.roots(*a)).collect();
            for pick in Tuples::new(pools.iter().map(Vec::len).collect()) {
                let args: Vec<usize> = pick.iter().zip(&pools).map(|(i, p)| p[*i]).collect();
                if self.funcs.contains_key(&(f, args.clone())) {
                    continue;
                }
                if self.live() >= max {
                    return added;
                }
                let v = self.fresh(sym.result);
                self.funcs.insert((f, args), v);
                added = true;
            }
        }
        added
    }

    /// Number of elements `create` would add, as an upper bound.
    fn missing(&self, t: &Term, env: &[usize], known: usize) -> usize {
        match t {
            Term::Var(_) => 0,
            Term::App(_, args) => {
                let mentions_new = t.max_var().is_some_and(|v| v >= known);
                if !mentions_new && self.lookup(t, env).is_some() {
                    return 0;
                }
                1 + args.iter().map(|a| self.missing(a, env, known)).sum::<usize>()
            }
        }
    }

    fn atom_true(&self, a: &Node, env: &[usize]) -> bool {
        match a {
            Node::True => true,
            Node::Eq(x, y) => match (self.lookup(x, env), self.lookup(y, env)) {
                (Some(p), Some(q)) => p == q,
                _ => false,
            },
            Node::Rel(r, args) => {
                let mut vals = Vec::with_capacity(args.len());
                for t in args {
                    match self.lookup(t, env) {
                        Some(v) => vals.push(v),
                        None => return false,
                    }
                }
                self.rels.contains(&(*r, vals))
            }
            _ => false,
        }
    }

    fn assert_atom(&mut self, sig: &Signature, a: &Node, env: &[usize]) {
        match a {
            Node::True => {}
            Node::Eq(x, y) => {
                let p = self.create(sig, x, env);
                let q = self.create(sig, y, env);
                self.union(p, q);
                self.close();
            }
            Node::Rel(r, args) => {
                let vals: Vec<usize> = args.iter().map(|t| self.create(sig, t, env)).collect();
                self.rels.insert((*r, vals));
            }
            other => unreachable!("not an atom: {other:?}"),
        }
    }

    /// Whether some disjunct holds at `env` with witnesses among the current
    /// elements.
    fn satisfied(&self, rhs: &[Disjunct], env: &[usize]) -> bool {
        rhs.iter().any(|d| {
            let choices: Vec<Vec<usize>> = d.exists.iter().map(|s| self.roots(*s)).collect();
            let mut full = env.to_vec();
            Tuples::new(choices.iter().map(Vec::len).collect()).any(|pick| {
                full.truncate(env.len());
                full.extend(pick.iter().zip(&choices).map(|(i, c)| c[*i]));
                d.atoms.iter().all(|a| self.atom_true(a, &full))
            })
        })
    }

    fn cost(&self, d: &Disjunct, env: &[usize]) -> usize {
        let mut full = env.to_vec();
        full.extend(std::iter::repeat(0).take(d.exists.len()));
        let known = env.len();
        d.exists.len()
            + d.atoms
                .iter()
                .map(|a| match a {
                    Node::Eq(x, y) => self.missing(x, &full, known) + self.missing(y, &full, known),
                    Node::Rel(_, args) => args.iter().map(|t| self.missing(t, &full, known)).sum(),
                    _ => 0,
                })
                .sum::<usize>()
    }

    fn fire(&mut self, sig: &Signature, d: &Disjunct, env: &[usize]) {
        let mut full = env.to_vec();
        for s in &d.exists {
            full.push(self.fresh(*s));
        }
        for a in &d.atoms {
            self.assert_atom(sig, a, &full);
        }
        self.close();
    }

    /// The finite structure on the current classes, if every function is
    /// total on them.
    fn to_structure(&self, sig: &Arc<Signature>) -> Option<(FiniteStructure, Vec<usize>)> {
        let mut index = vec![usize::MAX; self.sorts.len()];
        let mut sizes = vec![0; sig.sorts.len()];
        for x in 0..self.sorts.len() {
            if self.parent[x] == x {
                let s = self.sorts[x].0;
                index[x] = sizes[s];
                sizes[s] += 1;
            }
        }
        let roots: Vec<Vec<usize>> = sig.sort_ids().map(|s| self.roots(s)).collect();
        let mut funcs = Vec::new();
        for f in sig.func_ids() {
            let sym = sig.func(f);
            let mut table = Vec::new();
            for args in Tuples::new(sym.args.iter().map(|s| sizes[s.0]).collect()) {
                let ids: Vec<usize> = args
                    .iter()
                    .zip(&sym.args)
                    .map(|(a, s)| roots[s.0][*a])
                    .collect();
                let v = self.funcs.get(&(f, ids))?;
                table.push(index[self.find(*v)]);
            }
            funcs.push(table);
        }
        let mut rels = Vec::new();
        for r in sig.rel_ids() {
            let sym = sig.rel(r);
            let table = Tuples::new(sym.args.iter().map(|s| sizes[s.0]).collect())
                .map(|args| {
                    let ids: Vec<usize> = args
                        .iter()
                        .zip(&sym.args)
                        .map(|(a, s)| roots[s.0][*a])
                        .collect();
                    self.rels.contains(&(r, ids))
                })
                .collect();
            rels.push(table);
        }
        let m = FiniteStructure::new(sig.clone(), sizes, funcs, rels).ok()?;
        Some((m, index))
    }
}

type Partial = Vec<Option<usize>>;

/// The function graph indexed for matching term patterns.
struct GraphIndex {
    entries: Vec<(FuncId, Vec<usize>, usize)>,
    by_value: BTreeMap<(FuncId, usize), Vec<Vec<usize>>>,
}

impl GraphIndex {
    /// Assignments of variables `0..n` under which `pat` names an existing
    /// element.
    fn matches(&self, pat: &Term, n: usize) -> Vec<Partial> {
        let Term::App(f, args) = pat else {
            return vec![];
        };
        let mut out = Vec::new();
        for (g, vals, _) in &self.entries {
            if g == f {
                self.match_args(args, vals, vec![None; n], &mut out);
            }
        }
        out
    }

    fn match_args(&self, pats: &[Term], vals: &[usize], env: Partial, out: &mut Vec<Partial>) {
        let mut cur = vec![env];
        for (p, v) in pats.iter().zip(vals) {
            let mut next = Vec::new();
            for e in cur {
                self.match_term(p, *v, e, &mut next);
            }
            cur = next;
        }
        out.extend(cur);
    }

    fn match_term(&self, pat: &Term, v: usize, mut env: Partial, out: &mut Vec<Partial>) {
        match pat {
            Term::Var(i) => match env[*i] {
                Some(w) if w != v => {}
                Some(_) => out.push(env),
                None => {
                    env[*i] = Some(v);
                    out.push(env);
                }
            },
            Term::App(f, args) => {
                if let Some(rows) = self.by_value.get(&(*f, v)) {
                    for vals in rows {
                        self.match_args(args, vals, env.clone(), out);
                    }
                }
            }
        }
    }
}

struct Rule {
    axiom: usize,
    vars: Vec<SortId>,
    ctx_len: usize,
    lhs: Vec<Node>,
    rhs: Vec<Disjunct>,
    /// Right-side terms over the context that mention every context variable
    /// left unbound by the left side; empty when there is no such variable or
    /// no such term.
    triggers: Vec<Term>,
}

fn subterms<'t>(t: &'t Term, out: &mut Vec<&'t Term>) {
    if let Term::App(_, args) = t {
        out.push(t);
        for a in args {
            subterms(a, out);
        }
    }
}

fn atom_terms(a: &Node) -> Vec<&Term> {
    match a {
        Node::Eq(x, y) => vec![x, y],
        Node::Rel(_, args) => args.iter().collect(),
        _ => vec![],
    }
}

fn triggers(n: usize, lhs: &[Node], rhs: &[Disjunct]) -> Vec<Term> {
    let mut bound = Vec::new();
    for a in lhs {
        for t in atom_terms(a) {
            t.vars(&mut bound);
        }
    }
    let free: Vec<usize> = (0..n).filter(|v| !bound.contains(v)).collect();
    if free.is_empty() {
        return vec![];
    }
    let mut out: Vec<Term> = Vec::new();
    for d in rhs {
        for a in &d.atoms {
            for t in atom_terms(a) {
                let mut subs = Vec::new();
                subterms(t, &mut subs);
                for s in subs {
                    let mut vs = Vec::new();
                    s.vars(&mut vs);
                    if vs.iter().all(|v| *v < n)
                        && free.iter().all(|v| vs.contains(v))
                        && !out.contains(s)
                    {
                        out.push(s.clone());
                    }
                }
            }
        }
    }
    out
}

pub(crate) enum BranchEnd {
    Closed,
    Countermodel(FiniteStructure, Vec<Elem>),
    Open(BoundKind, String),
}

pub(crate) struct Chase<'a> {
    theory: &'a Theory,
    sequent: &'a Sequent,
    rules: Vec<Rule>,
    bounds: &'a ProverBounds,
    goal_rhs: Vec<Disjunct>,
    firings: usize,
    branches: usize,
    pub trace: Vec<TraceEvent>,
}

impl<'a> Chase<'a> {
    pub(crate) fn new(theory: &'a Theory, sequent: &'a Sequent, bounds: &'a ProverBounds) -> Self {
        let mut rules = Vec::new();
        for (i, ax) in theory.axioms.iter().enumerate() {
            let n = ax.ctx.len();
            let rhs = dnf(&ax.rhs, n);
            for d in dnf(&ax.lhs, n) {
                let mut vars = ax.ctx.sorts();
                vars.extend(d.exists.iter().copied());
                rules.push(Rule {
                    axiom: i,
                    vars,
                    ctx_len: n,
                    triggers: triggers(n, &d.atoms, &rhs),
                    lhs: d.atoms,
                    rhs: rhs.clone(),
                });
            }
        }
        Chase {
            theory,
            sequent,
            rules,
            bounds,
            goal_rhs: dnf(&sequent.rhs, sequent.ctx.len()),
            firings: 0,
            branches: 1,
            trace: Vec::new(),
        }
    }

    fn event(&mut self, kind: &str, axiom: Option<usize>, tuple: Vec<usize>, path: &str) {
        self.trace.push(TraceEvent {
            step: self.trace.len(),
            kind: kind.to_string(),
            axiom: axiom.map(|a| a + 1),
            tuple,
            path: path.to_string(),
        });
    }

    pub(crate) fn run(&mut self) -> BranchEnd {
        let sig = self.theory.sig.clone();
        let mut state = State::new();
        let goal: Vec<usize> = self
            .sequent
            .ctx
            .sorts()
            .iter()
            .map(|s| state.fresh(*s))
            .collect();
        let n = goal.len();
        let lhs = dnf(&self.sequent.lhs, n);
        if lhs.is_empty() {
            self.event("close", None, vec![], "");
            return BranchEnd::Closed;
        }
        if lhs.len() > 1 {
            self.branches += lhs.len() - 1;
        }
        let mut open = None;
        for (k, d) in lhs.iter().enumerate() {
            let path = if lhs.len() > 1 { k.to_string() } else { String::new() };
            let mut st = state.clone();
            st.fire(&sig, d, &goal);
            self.materialize_goal(&mut st, &goal);
            self.event("assume", None, goal.clone(), &path);
            match self.branch(st, &goal, &path) {
                BranchEnd::Closed => {}
                cm @ BranchEnd::Countermodel(..) => return cm,
                o @ BranchEnd::Open(..) => {
                    if open.is_none() {
                        open = Some(o);
                    }
                }
            }
        }
        open.unwrap_or(BranchEnd::Closed)
    }

    fn materialize_goal(&self, st: &mut State, goal: &[usize]) {
        let sig = self.theory.sig.clone();
        let n = goal.len();
        for d in &self.goal_rhs {
            for a in &d.atoms {
                let terms: Vec<&Term> = match a {
                    Node::Eq(x, y) => vec![x, y],
                    Node::Rel(_, args) => args.iter().collect(),
                    _ => vec![],
                };
                for t in terms {
                    if t.max_var().map_or(true, |v| v < n) {
                        st.create(&sig, t, goal);
                    }
                }
            }
        }
        st.close();
    }

    fn goal_holds(&self, st: &State, goal: &[usize]) -> bool {
        let env: Vec<usize> = goal.iter().map(|g| st.find(*g)).collect();
        st.satisfied(&self.goal_rhs, &env)
    }

    /// Active instances: (rule, assignment) whose left side holds and whose
    /// right side does not. Instances supported by an existing trigger term,
    /// and instances of rules without triggers, are preferred; the rest are
    /// returned only when there are none.
    fn active(&self, st: &State) -> Vec<(usize, Vec<usize>)> {
        let mut out = BTreeSet::new();
        let index = st.index();
        for (ri, rule) in self.rules.iter().enumerate() {
            if rule.triggers.is_empty() {
                self.enumerate(st, ri, |_| true, &mut out);
            } else if rule.lhs.is_empty() {
                for t in &rule.triggers {
                    for env in index.matches(t, rule.ctx_len) {
                        let env: Vec<usize> = env.into_iter().map(|v| v.unwrap_or(0)).collect();
                        if !st.satisfied(&rule.rhs, &env) {
                            out.insert((ri, env));
                        }
                    }
                }
            } else {
                let supported =
                    |env: &[usize]| rule.triggers.iter().any(|t| st.lookup(t, env).is_some());
                self.enumerate(st, ri, supported, &mut out);
            }
        }
        if out.is_empty() {
            for ri in 0..self.rules.len() {
                self.enumerate(st, ri, |_| true, &mut out);
            }
        }
        out.into_iter().collect()
    }

    fn enumerate(
        &self,
        st: &State,
        ri: usize,
        keep: impl Fn(&[usize]) -> bool,
        out: &mut BTreeSet<(usize, Vec<usize>)>,
    ) {
        let rule = &self.rules[ri];
        let choices: Vec<Vec<usize>> = rule.vars.iter().map(|s| st.roots(*s)).collect();
        for pick in Tuples::new(choices.iter().map(Vec::len).collect()) {
            let env: Vec<usize> = pick.iter().zip(&choices).map(|(i, c)| c[*i]).collect();
            if !rule.lhs.iter().all(|a| st.atom_true(a, &env)) {
                continue;
            }
            let ctx_env = &env[..rule.ctx_len];
            if keep(ctx_env) && !st.satisfied(&rule.rhs, ctx_env) {
                out.insert((ri, ctx_env.to_vec()));
            }
        }
    }

    fn tier(&self, st: &State, ri: usize, env: &[usize]) -> usize {
        let rhs = &self.rules[ri].rhs;
        match rhs.len() {
            0 => 0,
            1 => st.cost(&rhs[0], env),
            k => k - 1 + rhs.iter().map(|d| st.cost(d, env)).max().unwrap_or(0),
        }
    }

    /// Runs one branch: free instances to saturation, then rounds of the
    /// remaining ones, cheapest first; a disjunction is split when it is the
    /// cheapest thing left.
    fn branch(&mut self, mut st: State, goal: &[usize], path: &str) -> BranchEnd {
        let sig = self.theory.sig.clone();
        loop {
            if self.goal_holds(&st, goal) {
                self.event("goal", None, goal.iter().map(|g| st.find(*g)).collect(), path);
                return BranchEnd::Closed;
            }
            let active = self.active(&st);
            if active.is_empty() {
                // functions are total: give missing applications values
                if st.to_structure(&self.theory.sig).is_none()
                    && st.totalize(&sig, self.bounds.max_elements)
                {
                    self.event("totalize", None, vec![], path);
                    continue;
                }
                self.event("saturate", None, vec![], path);
                return self.extract(&st, goal);
            }
            let mut ranked: Vec<(usize, usize, Vec<usize>)> = active
                .into_iter()
                .map(|(ri, env)| (self.tier(&st, ri, &env), ri, env))
                .collect();
            ranked.sort();
            let (top, ri, env) = ranked[0].clone();
            if top > 0 && self.rules[ri].rhs.len() > 1 {
                return self.split(st, ri, env, goal, path);
            }
            let round: Vec<(usize, Vec<usize>)> = ranked
                .into_iter()
                .filter(|(t, ri, _)| (top > 0 || *t == 0) && self.rules[*ri].rhs.len() <= 1)
                .map(|(_, ri, env)| (ri, env))
                .collect();
            let mut progressed = false;
            for (ri, env) in round {
                let rule = &self.rules[ri];
                let env: Vec<usize> = env.iter().map(|x| st.find(*x)).collect();
                if st.satisfied(&rule.rhs, &env) {
                    continue;
                }
                if self.firings >= self.bounds.max_firings {
                    self.event("bound", None, vec![], path);
                    return BranchEnd::Open(
                        BoundKind::Firings,
                        format!("{} rule firings", self.bounds.max_firings),
                    );
                }
                let axiom = rule.axiom;
                if rule.rhs.is_empty() {
                    self.firings += 1;
                    self.event("fire", Some(axiom), env.clone(), path);
                    self.event("close", Some(axiom), vec![], path);
                    return BranchEnd::Closed;
                }
                let d = rule.rhs[0].clone();
                if st.live() + st.cost(&d, &env) > self.bounds.max_elements {
                    continue;
                }
                self.firings += 1;
                self.event("fire", Some(axiom), env.clone(), path);
                st.fire(&sig, &d, &env);
                progressed = true;
            }
            if !progressed {
                self.event("bound", None, vec![], path);
                return BranchEnd::Open(
                    BoundKind::Elements,
                    format!("{} elements", self.bounds.max_elements),
                );
            }
        }
    }

    fn split(&mut self, st: State, ri: usize, env: Vec<usize>, goal: &[usize], path: &str) -> BranchEnd {
        let sig = self.theory.sig.clone();
        let rule_axiom = self.rules[ri].axiom;
        let rhs = self.rules[ri].rhs.clone();
        self.branches += rhs.len() - 1;
        if self.branches > self.bounds.max_branches {
            self.event("bound", None, vec![], path);
            return BranchEnd::Open(
                BoundKind::Branches,
                format!("{} branches", self.bounds.max_branches),
            );
        }
        if self.firings >= self.bounds.max_firings {
            return BranchEnd::Open(
                BoundKind::Firings,
                format!("{} rule firings", self.bounds.max_firings),
            );
        }
        self.firings += 1;
        self.event("branch", Some(rule_axiom), env.clone(), path);
        let mut open = None;
        for (k, d) in rhs.iter().enumerate() {
            let sub = if path.is_empty() {
                k.to_string()
            } else {
                format!("{path}.{k}")
            };
            if st.live() + st.cost(d, &env) > self.bounds.max_elements {
                open.get_or_insert(BranchEnd::Open(
                    BoundKind::Elements,
                    format!("{} elements", self.bounds.max_elements),
                ));
                continue;
            }
            let mut child = st.clone();
            child.fire(&sig, d, &env);
            match self.branch(child, goal, &sub) {
                BranchEnd::Closed => {}
                cm @ BranchEnd::Countermodel(..) => return cm,
                o @ BranchEnd::Open(..) => {
                    if open.is_none() {
                        open = Some(o);
                    }
                }
            }
        }
        open.unwrap_or(BranchEnd::Closed)
    }

    fn extract(&self, st: &State, goal: &[usize]) -> BranchEnd {
        let Some((m, index)) = st.to_structure(&self.theory.sig) else {
            return BranchEnd::Open(
                BoundKind::Saturated,
                "saturated with partial function tables".into(),
            );
        };
        let witness: Vec<Elem> = goal.iter().map(|g| index[st.find(*g)]).collect();
        let mut env = witness.clone();
        let refutes = holds_at(&m, &self.sequent.lhs, &mut env) && {
            let mut env = witness.clone();
            !holds_at(&m, &self.sequent.rhs, &mut env)
        };
        if is_model(&m, self.theory) && refutes {
            BranchEnd::Countermodel(m, witness)
        } else {
            BranchEnd::Open(
                BoundKind::Saturated,
                "saturated state failed re-verification".into(),
            )
        }
    }
}
