//! Existence and disjunction properties of a theory, tested on closed
//! sentences up to a depth.

use std::collections::HashMap;

use serde_json::{json, Value};

use super::{AnalysisError, Verdict};
use crate::definability::FormulaSpace;
use crate::logic::{print_sequent, Binder, Context, Node, Sequent, Signature, SortId, Term, Theory};
use crate::models::ModelClass;
use crate::prover::{prove, ProofOutcome, ProverBounds};

/// Closed terms of sort `s` up to term depth `depth`, shallowest first, at
/// most `cap` of them.
pub fn closed_terms(sig: &Signature, s: SortId, depth: usize, cap: usize) -> Vec<Term> {
    let mut by_sort: Vec<Vec<Term>> = vec![Vec::new(); sig.sorts.len()];
    for d in 1..=depth {
        let mut fresh: Vec<(SortId, Term)> = Vec::new();
        for f in sig.func_ids() {
            let sym = sig.func(f);
            if sym.args.is_empty() {
                if d == 1 {
                    fresh.push((sym.result, Term::constant(f)));
                }
                continue;
            }
            let pools: Vec<&Vec<Term>> = sym.args.iter().map(|a| &by_sort[a.0]).collect();
            if pools.iter().any(|p| p.is_empty()) {
                continue;
            }
            let radices: Vec<usize> = pools.iter().map(|p| p.len()).collect();
            for pick in crate::models::Tuples::new(radices) {
                let args: Vec<Term> = pick.iter().zip(&pools).map(|(i, p)| p[*i].clone()).collect();
                if args.iter().any(|t| t.depth() == d - 1) {
                    fresh.push((sym.result, Term::app(f, args)));
                }
            }
        }
        for (r, t) in fresh {
            if by_sort[r.0].len() < cap {
                by_sort[r.0].push(t);
            }
        }
    }
    std::mem::take(&mut by_sort[s.0])
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CaseKind {
    Disjunction,
    Existence,
}

/// One provable sentence and what was found for it.
#[derive(Clone, Debug)]
pub struct LocalCase {
    pub kind: CaseKind,
    pub sequent: Sequent,
    pub verdict: Verdict,
    /// The proved disjunct or the instance `⊤ ⊢ φ(t)`.
    pub witness: Option<Sequent>,
    pub detail: String,
}

#[derive(Clone, Debug)]
pub struct LocalReport {
    pub disjunction: Verdict,
    pub existence: Verdict,
    pub cases: Vec<LocalCase>,
}

impl LocalReport {
    pub fn verdict(&self) -> Verdict {
        self.disjunction.combine(self.existence)
    }

    pub fn to_json(&self, sig: &Signature) -> Value {
        let cases: Vec<Value> = self
            .cases
            .iter()
            .map(|c| {
                json!({
                    "kind": match c.kind {
                        CaseKind::Disjunction => "disjunction",
                        CaseKind::Existence => "existence",
                    },
                    "sequent": print_sequent(sig, &c.sequent),
                    "verdict": c.verdict,
                    "witness": c.witness.as_ref().map(|w| print_sequent(sig, w)),
                    "detail": c.detail,
                })
            })
            .collect();
        json!({ "disjunction": self.disjunction, "existence": self.existence, "cases": cases })
    }
}

struct Prover<'a> {
    theory: &'a Theory,
    bounds: &'a ProverBounds,
    memo: HashMap<Node, Verdict>,
}

impl Prover<'_> {
    /// Pass for proved, fail for a countermodel, unknown at a bound.
    fn closed(&mut self, rhs: &Node) -> Result<Verdict, AnalysisError> {
        if let Some(v) = self.memo.get(rhs) {
            return Ok(*v);
        }
        let s = Sequent::new(Context::empty(), Node::True, rhs.clone());
        let v = match prove(self.theory, &s, self.bounds)? {
            ProofOutcome::Proved(_) => Verdict::Pass,
            ProofOutcome::Countermodel { .. } => Verdict::Fail,
            ProofOutcome::Unknown { .. } => Verdict::Unknown,
        };
        self.memo.insert(rhs.clone(), v);
        Ok(v)
    }
}

fn closed_sequent(rhs: Node) -> Sequent {
    Sequent::new(Context::empty(), Node::True, rhs)
}

/// Candidate sentences are the disjunctions `φ ∨ ψ` of distinct closed
/// formulas of depth below `depth` and the existentials `∃x.φ` over single
/// variables, one representative per extension on `class`. Sentences false
/// somewhere on `class` cannot be provable and are skipped; the rest go to
/// the prover. A disjunction is only tested when neither disjunct is proved
/// on its own, and an existential is witnessed by the first closed term `t` (up
/// to `term_depth`) with `⊤ ⊢ φ(t)` proved.
pub fn check_local_properties(
    theory: &Theory,
    class: &ModelClass,
    depth: usize,
    term_depth: usize,
    bounds: &ProverBounds,
) -> Result<LocalReport, AnalysisError> {
    let sig = theory.sig.clone();
    let mut space = FormulaSpace::new(sig.clone(), class.models(), term_depth);
    let mut prover = Prover {
        theory,
        bounds,
        memo: HashMap::new(),
    };
    let mut cases = Vec::new();
    let inner = depth.saturating_sub(1).max(1);
    let closed = space.level(&[], inner);
    let valid = |bits: &[u64]| (0..class.len()).all(|k| bits[k / 64] >> (k % 64) & 1 == 1);
    // a disjunct proved on its own settles every disjunction containing it
    let mut alone = Vec::with_capacity(closed.len());
    for x in closed.iter() {
        alone.push(valid(&x.bits) && prover.closed(&x.body)? == Verdict::Pass);
    }
    for (a, x) in closed.iter().enumerate() {
        for (b, y) in closed.iter().enumerate().skip(a + 1) {
            let both: Vec<u64> = x.bits.iter().zip(&y.bits).map(|(p, q)| p | q).collect();
            if !valid(&both) || alone[a] || alone[b] {
                continue;
            }
            let disj = Node::or(x.body.clone(), y.body.clone());
            let whole = prover.closed(&disj)?;
            if whole == Verdict::Fail {
                continue;
            }
            let sequent = closed_sequent(disj);
            if whole == Verdict::Unknown {
                cases.push(LocalCase {
                    kind: CaseKind::Disjunction,
                    sequent,
                    verdict: Verdict::Unknown,
                    witness: None,
                    detail: "disjunction undecided at bound".into(),
                });
                continue;
            }
            let (vx, vy) = (prover.closed(&x.body)?, prover.closed(&y.body)?);
            let (verdict, witness, detail) = if vx == Verdict::Pass {
                (Verdict::Pass, Some(closed_sequent(x.body.clone())), "left disjunct proved")
            } else if vy == Verdict::Pass {
                (Verdict::Pass, Some(closed_sequent(y.body.clone())), "right disjunct proved")
            } else if vx == Verdict::Fail && vy == Verdict::Fail {
                (Verdict::Fail, None, "both disjuncts have countermodels")
            } else {
                (Verdict::Unknown, None, "a disjunct is undecided at bound")
            };
            cases.push(LocalCase {
                kind: CaseKind::Disjunction,
                sequent,
                verdict,
                witness,
                detail: detail.into(),
            });
        }
    }
    for s in sig.sort_ids() {
        let terms = closed_terms(&sig, s, term_depth, 32);
        let level = space.level(&[s], inner);
        for phi in level.iter() {
            let ex = Node::exists(Binder::new("x", s), phi.body.clone());
            let holds_everywhere = class.models().iter().all(|m| {
                crate::models::holds_at(m, &ex, &mut Vec::new())
            });
            if !holds_everywhere {
                continue;
            }
            let whole = prover.closed(&ex)?;
            if whole == Verdict::Fail {
                continue;
            }
            let sequent = closed_sequent(ex);
            if whole == Verdict::Unknown {
                cases.push(LocalCase {
                    kind: CaseKind::Existence,
                    sequent,
                    verdict: Verdict::Unknown,
                    witness: None,
                    detail: "existential undecided at bound".into(),
                });
                continue;
            }
            let mut found = None;
            let mut undecided = false;
            for t in &terms {
                let inst = phi.body.rebase(1, std::slice::from_ref(t), 0);
                match prover.closed(&inst)? {
                    Verdict::Pass => {
                        found = Some(closed_sequent(inst));
                        break;
                    }
                    Verdict::Unknown => undecided = true,
                    Verdict::Fail => {}
                }
            }
            let (verdict, detail) = match (&found, undecided) {
                (Some(_), _) => (Verdict::Pass, "closed term witness proved"),
                (None, true) => (Verdict::Unknown, "some instance undecided at bound"),
                (None, false) => (Verdict::Fail, "no closed term witness"),
            };
            cases.push(LocalCase {
                kind: CaseKind::Existence,
                sequent,
                verdict,
                witness: found,
                detail: detail.into(),
            });
        }
    }
    let fold = |k: CaseKind| {
        cases
            .iter()
            .filter(|c| c.kind == k)
            .fold(Verdict::Pass, |v, c| v.combine(c.verdict))
    };
    Ok(LocalReport {
        disjunction: fold(CaseKind::Disjunction),
        existence: fold(CaseKind::Existence),
        cases,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cli::{parse_classical_formula, parse_theory};
    use crate::models::enumerate_models;
    use crate::transforms::{diagram_theory, morleyize_with};
    use std::sync::Arc;

    #[test]
    fn diagram_of_z2_is_local() {
        let g = parse_theory(include_str!("../../theories/groups.thy")).unwrap();
        let gc = enumerate_models(&Arc::new(g.clone()), 2).unwrap();
        let z2 = gc.models().iter().find(|m| m.sizes() == [2]).unwrap();
        let d = diagram_theory(&g, z2).unwrap();
        let class = enumerate_models(&d.theory, 2).unwrap();
        let r = check_local_properties(&d.theory, &class, 2, 1, &ProverBounds::default()).unwrap();
        assert_eq!(r.verdict(), Verdict::Pass);
        // some existential needed a constant witness
        assert!(r.cases.iter().any(|c| c.kind == CaseKind::Existence && c.witness.is_some()));
    }

    #[test]
    fn morleyized_free_theory_lacks_the_disjunction_property() {
        let t = parse_theory("classical theory free\nsort A\nfunc c : -> A\nrel P : A\n").unwrap();
        let not_p = parse_classical_formula(&t.sig, "[x:A] not P(x)").unwrap();
        let star = morleyize_with(&t, &[not_p]);
        let class = enumerate_models(&star.theory, 2).unwrap();
        let r = check_local_properties(&star.theory, &class, 2, 1, &ProverBounds::default()).unwrap();
        assert_eq!(r.disjunction, Verdict::Fail);
        let bad = r.cases.iter().find(|c| c.verdict == Verdict::Fail).unwrap();
        assert_eq!(bad.kind, CaseKind::Disjunction);
    }

    #[test]
    fn closed_terms_by_depth() {
        let g = parse_theory(include_str!("../../theories/groups.thy")).unwrap();
        let s = g.sig.sort_id("G").unwrap();
        let ts = closed_terms(&g.sig, s, 2, 32);
        // e, then inv(e) and mul(e, e)
        assert_eq!(ts.len(), 3);
        assert_eq!(ts[0].depth(), 1);
    }
}
