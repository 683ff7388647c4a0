use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::sync::Arc;

use super::ModelError;
use crate::logic::{FuncId, RelId, Signature, SortId};

/// Elements of a carrier are `0..size`.
pub type Elem = usize;

/// A finite structure: per-sort carriers, total function tables and relation
/// tables, stored densely in row-major order over argument tuples.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct FiniteStructure {
    sig: Arc<Signature>,
    sizes: Vec<usize>,
    funcs: Vec<Vec<Elem>>,
    rels: Vec<Vec<bool>>,
}

impl FiniteStructure {
    pub fn new(
        sig: Arc<Signature>,
        sizes: Vec<usize>,
        funcs: Vec<Vec<Elem>>,
        rels: Vec<Vec<bool>>,
    ) -> Result<Self, ModelError> {
        let m = FiniteStructure {
            sig,
            sizes,
            funcs,
            rels,
        };
        m.validate()?;
        Ok(m)
    }

    pub(crate) fn new_unchecked(
        sig: Arc<Signature>,
        sizes: Vec<usize>,
        funcs: Vec<Vec<Elem>>,
        rels: Vec<Vec<bool>>,
    ) -> Self {
        FiniteStructure {
            sig,
            sizes,
            funcs,
            rels,
        }
    }

    /// Builds a structure from closures over argument tuples.
    pub fn from_fn(
        sig: Arc<Signature>,
        sizes: Vec<usize>,
        mut func: impl FnMut(FuncId, &[Elem]) -> Elem,
        mut rel: impl FnMut(RelId, &[Elem]) -> bool,
    ) -> Result<Self, ModelError> {
        let funcs = sig
            .func_ids()
            .map(|f| {
                tuples_of(&sizes, &sig.func(f).args)
                    .map(|t| func(f, &t))
                    .collect()
            })
            .collect();
        let rels = sig
            .rel_ids()
            .map(|r| tuples_of(&sizes, &sig.rel(r).args).map(|t| rel(r, &t)).collect())
            .collect();
        Self::new(sig, sizes, funcs, rels)
    }

    fn validate(&self) -> Result<(), ModelError> {
        let sig = &self.sig;
        let bad = |m: String| Err(ModelError::Invalid(m));
        if self.sizes.len() != sig.sorts.len() {
            return bad("one carrier size per sort required".into());
        }
        if self.funcs.len() != sig.funcs.len() || self.rels.len() != sig.rels.len() {
            return bad("one table per symbol required".into());
        }
        for (f, table) in sig.funcs.iter().zip(&self.funcs) {
            if table.len() != table_len(&self.sizes, &f.args) {
                return bad(format!("table of `{}` has the wrong length", f.name));
            }
            let cap = self.sizes[f.result.0];
            if table.iter().any(|v| *v >= cap) {
                return bad(format!("table of `{}` leaves its result carrier", f.name));
            }
        }
        for (r, table) in sig.rels.iter().zip(&self.rels) {
            if table.len() != table_len(&self.sizes, &r.args) {
                return bad(format!("table of `{}` has the wrong length", r.name));
            }
        }
        Ok(())
    }

    pub fn signature(&self) -> &Arc<Signature> {
        &self.sig
    }

    pub fn sizes(&self) -> &[usize] {
        &self.sizes
    }

    pub fn size(&self, s: SortId) -> usize {
        self.sizes[s.0]
    }

    pub fn total_size(&self) -> usize {
        self.sizes.iter().sum()
    }

    pub fn func_table(&self, f: FuncId) -> &[Elem] {
        &self.funcs[f.0]
    }

    pub fn rel_table(&self, r: RelId) -> &[bool] {
        &self.rels[r.0]
    }

    pub fn apply(&self, f: FuncId, args: &[Elem]) -> Elem {
        let idx = tuple_index(&self.sizes, &self.sig.func(f).args, args);
        self.funcs[f.0][idx]
    }

    pub fn holds(&self, r: RelId, args: &[Elem]) -> bool {
        let idx = tuple_index(&self.sizes, &self.sig.rel(r).args, args);
        self.rels[r.0][idx]
    }

    /// All tuples over the given sorts in row-major order.
    pub fn tuples(&self, sorts: &[SortId]) -> Tuples {
        tuples_of(&self.sizes, sorts)
    }

    /// Applies a per-sort relabelling `perm[s][old] = new`.
    pub fn relabel(&self, perm: &[Vec<Elem>]) -> FiniteStructure {
        let sig = &self.sig;
        let mut inv: Vec<Vec<Elem>> = perm.iter().map(|p| vec![0; p.len()]).collect();
        for (s, p) in perm.iter().enumerate() {
            for (old, new) in p.iter().enumerate() {
                inv[s][*new] = old;
            }
        }
        let funcs = sig
            .funcs
            .iter()
            .enumerate()
            .map(|(fi, f)| {
                let table = &self.funcs[fi];
                tuples_of(&self.sizes, &f.args)
                    .map(|new_args| {
                        let old: Vec<Elem> = new_args
                            .iter()
                            .zip(&f.args)
                            .map(|(a, s)| inv[s.0][*a])
                            .collect();
                        perm[f.result.0][table[tuple_index(&self.sizes, &f.args, &old)]]
                    })
                    .collect()
            })
            .collect();
        let rels = sig
            .rels
            .iter()
            .enumerate()
            .map(|(ri, r)| {
                let table = &self.rels[ri];
                tuples_of(&self.sizes, &r.args)
                    .map(|new_args| {
                        let old: Vec<Elem> = new_args
                            .iter()
                            .zip(&r.args)
                            .map(|(a, s)| inv[s.0][*a])
                            .collect();
                        table[tuple_index(&self.sizes, &r.args, &old)]
                    })
                    .collect()
            })
            .collect();
        FiniteStructure::new_unchecked(self.sig.clone(), self.sizes.clone(), funcs, rels)
    }

    /// The reduct to a sub-signature matched by name.
    pub fn reduct_to(&self, sub: &Arc<Signature>) -> Result<FiniteStructure, ModelError> {
        let emb = self
            .sig
            .embedding_of(sub)
            .ok_or(ModelError::SignatureMismatch)?;
        let sizes = emb.sorts.iter().map(|s| self.sizes[s.0]).collect();
        let funcs = emb.funcs.iter().map(|f| self.funcs[f.0].clone()).collect();
        let rels = emb.rels.iter().map(|r| self.rels[r.0].clone()).collect();
        FiniteStructure::new(sub.clone(), sizes, funcs, rels)
    }

    /// Re-types the structure over an equal signature held elsewhere.
    pub fn with_signature(&self, sig: Arc<Signature>) -> Result<FiniteStructure, ModelError> {
        if *sig != *self.sig {
            return Err(ModelError::SignatureMismatch);
        }
        Ok(FiniteStructure {
            sig,
            ..self.clone()
        })
    }

    pub fn to_data(&self) -> StructureData {
        let sig = &self.sig;
        StructureData {
            sizes: sig
                .sorts
                .iter()
                .cloned()
                .zip(self.sizes.iter().copied())
                .collect(),
            funcs: sig
                .funcs
                .iter()
                .zip(&self.funcs)
                .map(|(f, t)| (f.name.clone(), t.clone()))
                .collect(),
            rels: sig
                .rels
                .iter()
                .zip(&self.rels)
                .map(|(r, t)| {
                    let rows = tuples_of(&self.sizes, &r.args)
                        .zip(t)
                        .filter(|(_, b)| **b)
                        .map(|(tu, _)| tu)
                        .collect();
                    (r.name.clone(), rows)
                })
                .collect(),
        }
    }

    pub fn from_data(sig: Arc<Signature>, data: &StructureData) -> Result<Self, ModelError> {
        let sizes = sig
            .sorts
            .iter()
            .map(|s| {
                data.sizes
                    .get(s)
                    .copied()
                    .ok_or_else(|| ModelError::Invalid(format!("missing size for sort `{s}`")))
            })
            .collect::<Result<Vec<_>, _>>()?;
        let funcs = sig
            .funcs
            .iter()
            .map(|f| {
                data.funcs
                    .get(&f.name)
                    .cloned()
                    .ok_or_else(|| ModelError::Invalid(format!("missing table for `{}`", f.name)))
            })
            .collect::<Result<Vec<_>, _>>()?;
        let mut rels = Vec::new();
        for r in &sig.rels {
            let mut table = vec![false; table_len(&sizes, &r.args)];
            for row in data.rels.get(&r.name).into_iter().flatten() {
                if row.len() != r.args.len()
                    || row.iter().zip(&r.args).any(|(e, s)| *e >= sizes[s.0])
                {
                    return Err(ModelError::Invalid(format!("bad tuple for `{}`", r.name)));
                }
                table[tuple_index(&sizes, &r.args, row)] = true;
            }
            rels.push(table);
        }
        Self::new(sig, sizes, funcs, rels)
    }
}

/// Name-keyed plain form of a structure, used for JSON files.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct StructureData {
    pub sizes: BTreeMap<String, usize>,
    pub funcs: BTreeMap<String, Vec<Elem>>,
    pub rels: BTreeMap<String, Vec<Vec<Elem>>>,
}

pub(crate) fn table_len(sizes: &[usize], sorts: &[SortId]) -> usize {
    sorts.iter().map(|s| sizes[s.0]).product()
}

pub(crate) fn tuple_index(sizes: &[usize], sorts: &[SortId], tuple: &[Elem]) -> usize {
    let mut idx = 0;
    for (e, s) in tuple.iter().zip(sorts) {
        idx = idx * sizes[s.0] + e;
    }
    idx
}

pub(crate) fn tuples_of(sizes: &[usize], sorts: &[SortId]) -> Tuples {
    Tuples::new(sorts.iter().map(|s| sizes[s.0]).collect())
}

/// Row-major odometer over a product of ranges.
#[derive(Clone, Debug)]
pub struct Tuples {
    radices: Vec<usize>,
    next: Option<Vec<Elem>>,
}

impl Tuples {
    pub fn new(radices: Vec<usize>) -> Self {
        let next = if radices.iter().any(|r| *r == 0) {
            None
        } else {
            Some(vec![0; radices.len()])
        };
        Tuples { radices, next }
    }
}

impl Iterator for Tuples {
    type Item = Vec<Elem>;

    fn next(&mut self) -> Option<Vec<Elem>> {
        let cur = self.next.take()?;
        let mut succ = cur.clone();
        let mut i = succ.len();
        loop {
            if i == 0 {
                break;
            }
            i -= 1;
            succ[i] += 1;
            if succ[i] < self.radices[i] {
                self.next = Some(succ);
                break;
            }
            succ[i] = 0;
        }
        Some(cur)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tuples_order_and_empty() {
        let t: Vec<_> = Tuples::new(vec![2, 2]).collect();
        assert_eq!(t, vec![vec![0, 0], vec![0, 1], vec![1, 0], vec![1, 1]]);
        assert_eq!(Tuples::new(vec![]).count(), 1);
        assert_eq!(Tuples::new(vec![3, 0]).count(), 0);
    }

    #[test]
    fn data_round_trip() {
        let mut sig = Signature::new();
        let a = sig.add_sort("A").unwrap();
        sig.add_func("f", &[a], a).unwrap();
        sig.add_rel("R", &[a, a]).unwrap();
        let sig = Arc::new(sig);
        let m = FiniteStructure::from_fn(sig.clone(), vec![3], |_, x| (x[0] + 1) % 3, |_, x| {
            x[0] < x[1]
        })
        .unwrap();
        let back = FiniteStructure::from_data(sig, &m.to_data()).unwrap();
        assert_eq!(m, back);
    }

    #[test]
    fn invalid_tables_rejected() {
        let mut sig = Signature::new();
        let a = sig.add_sort("A").unwrap();
        sig.add_func("c", &[], a).unwrap();
        let sig = Arc::new(sig);
        assert!(FiniteStructure::new(sig.clone(), vec![0], vec![vec![]], vec![]).is_err());
        assert!(FiniteStructure::new(sig.clone(), vec![1], vec![vec![1]], vec![]).is_err());
        assert!(FiniteStructure::new(sig, vec![1], vec![vec![0]], vec![]).is_ok());
    }
}
