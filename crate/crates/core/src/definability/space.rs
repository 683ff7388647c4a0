//! Canonical enumeration of formulas over a fixed list of structures, keeping
//! one formula per extension.
//!
//! Formulas are produced by depth, then constructor (atoms, `not`, `/\`,
//! `\/`, `exists`), then symbol and operand index. Conjunctions and
//! disjunctions are only formed for operand pairs `i < j`. A candidate whose
//! extension on every structure equals that of an earlier one is dropped;
//! since every connective acts on extensions, this loses no extension.

use std::collections::{HashMap, HashSet};
use std::rc::Rc;
use std::sync::Arc;

use crate::logic::{Binder, ClassicalFormula, Context, Formula, Node, Signature, SortId, Term};
use crate::models::{Elem, FiniteStructure, Tuples};

/// Extension of a formula over every structure of the space, packed.
pub type Bits = Vec<u64>;

#[derive(Clone, Debug)]
pub struct Candidate {
    pub body: Node,
    pub depth: usize,
    pub bits: Bits,
}

#[derive(Clone, Debug)]
struct TermRow {
    term: Term,
    sort: SortId,
    values: Vec<Elem>,
}

/// Per-structure tuple counts of a scope inside a flat vector.
#[derive(Clone, Debug)]
struct Layout {
    lens: Vec<usize>,
    total: usize,
}

pub struct FormulaSpace<'a> {
    sig: Arc<Signature>,
    models: &'a [FiniteStructure],
    term_depth: usize,
    negation: bool,
    terms: HashMap<Vec<SortId>, Rc<Vec<TermRow>>>,
    levels: HashMap<(Vec<SortId>, usize), Rc<Vec<Candidate>>>,
}

fn pack(bits: impl IntoIterator<Item = bool>, len: usize) -> Bits {
    let mut out = vec![0u64; len.div_ceil(64)];
    for (i, b) in bits.into_iter().enumerate() {
        if b {
            out[i / 64] |= 1 << (i % 64);
        }
    }
    out
}

fn get(bits: &[u64], i: usize) -> bool {
    bits[i / 64] >> (i % 64) & 1 == 1
}

impl<'a> FormulaSpace<'a> {
    /// Coherent formulas, atoms with terms nested at most `term_depth` deep.
    pub fn new(sig: Arc<Signature>, models: &'a [FiniteStructure], term_depth: usize) -> Self {
        FormulaSpace {
            sig,
            models,
            term_depth,
            negation: false,
            terms: HashMap::new(),
            levels: HashMap::new(),
        }
    }

    /// Also form `not φ`.
    pub fn with_negation(mut self, on: bool) -> Self {
        self.negation = on;
        self.levels.clear();
        self
    }

    pub fn models(&self) -> &[FiniteStructure] {
        self.models
    }

    fn layout(&self, scope: &[SortId]) -> Layout {
        let mut lens = Vec::new();
        let mut total = 0;
        for m in self.models {
            let len: usize = scope.iter().map(|s| m.size(*s)).product();
            lens.push(len);
            total += len;
        }
        Layout {
            lens,
            total,
        }
    }

    /// The bits of an arbitrary body over `scope`, in this space's layout.
    pub fn extension(&self, scope: &[SortId], body: &Node) -> Bits {
        let layout = self.layout(scope);
        let flat = self
            .models
            .iter()
            .flat_map(|m| crate::models::eval_node(m, scope, body));
        pack(flat, layout.total)
    }

    fn terms(&mut self, scope: &[SortId]) -> Rc<Vec<TermRow>> {
        if let Some(t) = self.terms.get(scope) {
            return t.clone();
        }
        let layout = self.layout(scope);
        let owner: Vec<usize> = (0..self.models.len())
            .flat_map(|m| std::iter::repeat_n(m, layout.lens[m]))
            .collect();
        let mut rows: Vec<TermRow> = Vec::new();
        let mut seen: HashSet<(SortId, Vec<Elem>)> = HashSet::new();
        for (v, s) in scope.iter().enumerate() {
            let values: Vec<Elem> = self
                .models
                .iter()
                .flat_map(|m| Tuples::new(scope.iter().map(|s| m.size(*s)).collect()).map(move |t| t[v]))
                .collect();
            if seen.insert((*s, values.clone())) {
                rows.push(TermRow {
                    term: Term::Var(v),
                    sort: *s,
                    values,
                });
            }
        }
        let mut frontier = 0;
        for _ in 0..self.term_depth {
            let known = rows.len();
            for f in self.sig.func_ids() {
                let sym = self.sig.func(f);
                let choices: Vec<Vec<usize>> = sym
                    .args
                    .iter()
                    .map(|a| (0..known).filter(|i| rows[*i].sort == *a).collect())
                    .collect();
                for pick in Tuples::new(choices.iter().map(Vec::len).collect()) {
                    let args: Vec<usize> = pick.iter().zip(&choices).map(|(p, c)| c[*p]).collect();
                    // at least one argument from the previous round
                    if !args.is_empty() && args.iter().all(|a| *a < frontier) {
                        continue;
                    }
                    if args.is_empty() && frontier > 0 {
                        continue;
                    }
                    let values: Vec<Elem> = (0..layout.total)
                        .map(|i| {
                            let vals: Vec<Elem> = args.iter().map(|a| rows[*a].values[i]).collect();
                            self.models[owner[i]].apply(f, &vals)
                        })
                        .collect();
                    if seen.insert((sym.result, values.clone())) {
                        rows.push(TermRow {
                            term: Term::app(f, args.iter().map(|a| rows[*a].term.clone())),
                            sort: sym.result,
                            values,
                        });
                    }
                }
            }
            frontier = known;
        }
        let rows = Rc::new(rows);
        self.terms.insert(scope.to_vec(), rows.clone());
        rows
    }

    fn atoms(&mut self, scope: &[SortId]) -> Vec<Candidate> {
        let layout = self.layout(scope);
        let terms = self.terms(scope);
        let mut out = vec![
            Candidate {
                body: Node::True,
                depth: 1,
                bits: pack(std::iter::repeat_n(true, layout.total), layout.total),
            },
            Candidate {
                body: Node::False,
                depth: 1,
                bits: pack(std::iter::empty(), layout.total),
            },
        ];
        for i in 0..terms.len() {
            for j in i + 1..terms.len() {
                if terms[i].sort != terms[j].sort {
                    continue;
                }
                let bits = pack(
                    terms[i].values.iter().zip(&terms[j].values).map(|(a, b)| a == b),
                    layout.total,
                );
                out.push(Candidate {
                    body: Node::eq(terms[i].term.clone(), terms[j].term.clone()),
                    depth: 1,
                    bits,
                });
            }
        }
        let owner: Vec<usize> = (0..self.models.len())
            .flat_map(|m| std::iter::repeat_n(m, layout.lens[m]))
            .collect();
        for r in self.sig.rel_ids() {
            let sym = self.sig.rel(r);
            let choices: Vec<Vec<usize>> = sym
                .args
                .iter()
                .map(|a| (0..terms.len()).filter(|i| terms[*i].sort == *a).collect())
                .collect();
            for pick in Tuples::new(choices.iter().map(Vec::len).collect()) {
                let args: Vec<usize> = pick.iter().zip(&choices).map(|(p, c)| c[*p]).collect();
                let bits = pack(
                    (0..layout.total).map(|i| {
                        let vals: Vec<Elem> = args.iter().map(|a| terms[*a].values[i]).collect();
                        self.models[owner[i]].holds(r, &vals)
                    }),
                    layout.total,
                );
                out.push(Candidate {
                    body: Node::rel(r, args.iter().map(|a| terms[*a].term.clone())),
                    depth: 1,
                    bits,
                });
            }
        }
        out
    }

    /// Every distinct extension reachable with depth at most `depth` over
    /// `scope`, each with its first formula in canonical order.
    pub fn level(&mut self, scope: &[SortId], depth: usize) -> Rc<Vec<Candidate>> {
        let key = (scope.to_vec(), depth);
        if let Some(l) = self.levels.get(&key) {
            return l.clone();
        }
        let mut seen: HashSet<Bits> = HashSet::new();
        let mut items: Vec<Candidate> = Vec::new();
        let mut push = |c: Candidate, items: &mut Vec<Candidate>| {
            if seen.insert(c.bits.clone()) {
                items.push(c);
            }
        };
        if depth <= 1 {
            for c in self.atoms(scope) {
                push(c, &mut items);
            }
        } else {
            let prev = self.level(scope, depth - 1);
            for c in prev.iter() {
                push(c.clone(), &mut items);
            }
            let top = depth - 1;
            if self.negation {
                let total = self.layout(scope).total;
                let spare = total % 64;
                for c in prev.iter().filter(|c| c.depth == top) {
                    let mut bits: Bits = c.bits.iter().map(|w| !w).collect();
                    if spare != 0 {
                        if let Some(last) = bits.last_mut() {
                            *last &= (1u64 << spare) - 1;
                        }
                    }
                    push(
                        Candidate {
                            body: Node::not(c.body.clone()),
                            depth,
                            bits,
                        },
                        &mut items,
                    );
                }
            }
            for or in [false, true] {
                for i in 0..prev.len() {
                    for j in i + 1..prev.len() {
                        let (a, b) = (&prev[i], &prev[j]);
                        if a.depth != top && b.depth != top {
                            continue;
                        }
                        let bits: Bits = a
                            .bits
                            .iter()
                            .zip(&b.bits)
                            .map(|(x, y)| if or { x | y } else { x & y })
                            .collect();
                        if seen.contains(&bits) {
                            continue;
                        }
                        let body = if or {
                            Node::or(a.body.clone(), b.body.clone())
                        } else {
                            Node::and(a.body.clone(), b.body.clone())
                        };
                        seen.insert(bits.clone());
                        items.push(Candidate { body, depth, bits });
                    }
                }
            }
            let layout = self.layout(scope);
            for s in self.sig.sort_ids() {
                let mut inner_scope = scope.to_vec();
                inner_scope.push(s);
                let inner = self.level(&inner_scope, depth - 1);
                for c in inner.iter().filter(|c| c.depth == top) {
                    let mut flat = Vec::with_capacity(layout.total);
                    let mut base = 0;
                    for (m, len) in self.models.iter().zip(&layout.lens) {
                        let k = m.size(s);
                        for i in 0..*len {
                            flat.push((0..k).any(|a| get(&c.bits, base + i * k + a)));
                        }
                        base += len * k;
                    }
                    let bits = pack(flat, layout.total);
                    if seen.insert(bits.clone()) {
                        items.push(Candidate {
                            body: Node::exists(Binder::new("y", s), c.body.clone()),
                            depth,
                            bits,
                        });
                    }
                }
            }
        }
        let items = Rc::new(items);
        self.levels.insert(key, items.clone());
        items
    }

    /// Coherent formulas in `ctx`, one per extension, in canonical order.
    pub fn formulas(&mut self, ctx: &Context, depth: usize) -> Vec<Formula> {
        self.level(&ctx.sorts(), depth)
            .iter()
            .filter_map(|c| Formula::new(&self.sig, ctx.clone(), c.body.clone()).ok())
            .collect()
    }

    /// As [`FormulaSpace::formulas`], allowing `not` when enabled.
    pub fn classical_formulas(&mut self, ctx: &Context, depth: usize) -> Vec<ClassicalFormula> {
        self.level(&ctx.sorts(), depth)
            .iter()
            .filter_map(|c| ClassicalFormula::new(&self.sig, ctx.clone(), c.body.clone()).ok())
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cli::parse_theory;
    use crate::models::{enumerate_models, eval};

    #[test]
    fn extensions_are_distinct_and_match_evaluation() {
        let t = Arc::new(parse_theory(include_str!("../../theories/groups.thy")).unwrap());
        let class = enumerate_models(&t, 4).unwrap();
        let mut space = FormulaSpace::new(t.sig.clone(), class.models(), 2);
        let ctx = Context::new(vec![("x".into(), SortId(0))]).unwrap();
        let level = space.level(&ctx.sorts(), 2);
        let distinct: HashSet<&Bits> = level.iter().map(|c| &c.bits).collect();
        assert_eq!(distinct.len(), level.len());
        for c in level.iter() {
            assert_eq!(c.bits, space.extension(&ctx.sorts(), &c.body));
            let f = Formula::new(&t.sig, ctx.clone(), c.body.clone()).unwrap();
            assert!(f.depth() <= 2);
            for m in class.models() {
                eval(m, &f).unwrap();
            }
        }
    }

    #[test]
    fn negation_reaches_complements() {
        let t = parse_theory(include_str!("../../theories/unary_classical.thy")).unwrap();
        let m = FiniteStructure::from_fn(t.sig.clone(), vec![2], |_, _| 0, |_, a| a[0] == 0).unwrap();
        let models = [m];
        let mut space = FormulaSpace::new(t.sig.clone(), &models, 1).with_negation(true);
        let ctx = Context::new(vec![("x".into(), SortId(0))]).unwrap();
        // x ranges over two elements: all four subsets are reachable
        assert_eq!(space.level(&ctx.sorts(), 2).len(), 4);
        let mut coherent = FormulaSpace::new(t.sig.clone(), &models, 1);
        assert_eq!(coherent.level(&ctx.sorts(), 3).len(), 3);
    }
}
