//! Passes from theories to theories whose models classify something about the
//! models of the input: Morleyization, diagrams, slices, pushouts and
//! copowers. [`reduct`] is the functor on models induced by an
//! interpretation.

mod colimit;
mod diagram;
mod morley;
mod reduct;

use std::sync::Arc;

use thiserror::Error;

use crate::logic::{FuncId, LogicError, Node, RelId, Sequent, Signature, SortId};
use crate::models::{FiniteStructure, ModelError};

pub use colimit::{copower, pushout, Copower, Pushout};
pub use diagram::{diagram_theory, slice_theory, DiagramTheory, SliceTheory};
pub use morley::{morleyize, morleyize_with, MorleyizationResult, NegationSymbol};
pub use reduct::{reduct, reduct_hom};

#[derive(Debug, Error)]
pub enum TransformError {
    #[error("structure is not a model of `{0}`")]
    NotAModel(String),
    #[error("image of `{symbol}` is not functional at {tuple:?}")]
    NotFunctional { symbol: String, tuple: Vec<usize> },
    #[error("interpretations have different sources")]
    SourceMismatch,
    #[error(transparent)]
    Logic(#[from] LogicError),
    #[error(transparent)]
    Model(#[from] ModelError),
}

/// Where the sorts and symbols of one signature landed inside a larger one.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Renaming {
    pub sorts: Vec<SortId>,
    pub funcs: Vec<FuncId>,
    pub rels: Vec<RelId>,
}

impl Renaming {
    /// Copies every sort and symbol of `src` into `sig` with `suffix`
    /// appended to its name.
    pub(crate) fn embed(sig: &mut Signature, src: &Signature, suffix: &str) -> Result<Self, LogicError> {
        let mut sorts = Vec::new();
        for s in &src.sorts {
            sorts.push(sig.add_sort(&format!("{s}{suffix}"))?);
        }
        let mut funcs = Vec::new();
        for f in &src.funcs {
            let args: Vec<SortId> = f.args.iter().map(|a| sorts[a.0]).collect();
            funcs.push(sig.add_func(&format!("{}{suffix}", f.name), &args, sorts[f.result.0])?);
        }
        let mut rels = Vec::new();
        for r in &src.rels {
            let args: Vec<SortId> = r.args.iter().map(|a| sorts[a.0]).collect();
            rels.push(sig.add_rel(&format!("{}{suffix}", r.name), &args)?);
        }
        Ok(Renaming { sorts, funcs, rels })
    }

    pub fn sort(&self, s: SortId) -> SortId {
        self.sorts[s.0]
    }

    pub fn node(&self, n: &Node) -> Node {
        n.rename_symbols(&|f| self.funcs[f.0], &|r| self.rels[r.0], &|s| self.sorts[s.0])
    }

    pub fn sequent(&self, s: &Sequent) -> Sequent {
        Sequent::new(
            s.ctx.map_sorts(|x| self.sort(x)),
            self.node(&s.lhs),
            self.node(&s.rhs),
        )
    }

    /// The part of `m` that lives in the image of this renaming, as a
    /// structure over `src`.
    pub fn restrict(&self, m: &FiniteStructure, src: &Arc<Signature>) -> FiniteStructure {
        FiniteStructure::new(
            src.clone(),
            self.sorts.iter().map(|s| m.size(*s)).collect(),
            self.funcs.iter().map(|f| m.func_table(*f).to_vec()).collect(),
            self.rels.iter().map(|r| m.rel_table(*r).to_vec()).collect(),
        )
        .expect("restriction of a valid structure is valid")
    }
}
