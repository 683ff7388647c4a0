//! Multi-sorted signatures.

use serde::{Deserialize, Serialize};
use std::fmt;

use super::LogicError;

/// Index of a sort in its [`Signature`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct SortId(pub usize);

/// Index of a function symbol in its [`Signature`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct FuncId(pub usize);

/// Index of a relation symbol in its [`Signature`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct RelId(pub usize);

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct FuncSym {
    pub name: String,
    pub args: Vec<SortId>,
    pub result: SortId,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct RelSym {
    pub name: String,
    pub args: Vec<SortId>,
}

/// Sorts, function symbols and relation symbols. Constants are nullary
/// functions and propositions are nullary relations.
///
/// Fields are public so that ill-formed signatures can be built and then
/// reported by [`crate::logic::well_formed`]; the `add_*` methods refuse to
/// create one.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Signature {
    pub sorts: Vec<String>,
    pub funcs: Vec<FuncSym>,
    pub rels: Vec<RelSym>,
}

impl Signature {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add_sort(&mut self, name: &str) -> Result<SortId, LogicError> {
        if self.sort_id(name).is_some() {
            return Err(LogicError::DuplicateSymbol(name.to_string()));
        }
        self.sorts.push(name.to_string());
        Ok(SortId(self.sorts.len() - 1))
    }

    pub fn add_func(
        &mut self,
        name: &str,
        args: &[SortId],
        result: SortId,
    ) -> Result<FuncId, LogicError> {
        self.check_fresh_symbol(name)?;
        for s in args.iter().chain(std::iter::once(&result)) {
            self.check_sort(*s)?;
        }
        self.funcs.push(FuncSym {
            name: name.to_string(),
            args: args.to_vec(),
            result,
        });
        Ok(FuncId(self.funcs.len() - 1))
    }

    pub fn add_rel(&mut self, name: &str, args: &[SortId]) -> Result<RelId, LogicError> {
        self.check_fresh_symbol(name)?;
        for s in args {
            self.check_sort(*s)?;
        }
        self.rels.push(RelSym {
            name: name.to_string(),
            args: args.to_vec(),
        });
        Ok(RelId(self.rels.len() - 1))
    }

    fn check_fresh_symbol(&self, name: &str) -> Result<(), LogicError> {
        if self.func_id(name).is_some() || self.rel_id(name).is_some() {
            Err(LogicError::DuplicateSymbol(name.to_string()))
        } else {
            Ok(())
        }
    }

    fn check_sort(&self, s: SortId) -> Result<(), LogicError> {
        if s.0 < self.sorts.len() {
            Ok(())
        } else {
            Err(LogicError::UnknownSort(format!("#{}", s.0)))
        }
    }

    pub fn sort_id(&self, name: &str) -> Option<SortId> {
        self.sorts.iter().position(|s| s == name).map(SortId)
    }

    pub fn func_id(&self, name: &str) -> Option<FuncId> {
        self.funcs.iter().position(|f| f.name == name).map(FuncId)
    }

    pub fn rel_id(&self, name: &str) -> Option<RelId> {
        self.rels.iter().position(|r| r.name == name).map(RelId)
    }

    pub fn sort_name(&self, s: SortId) -> &str {
        &self.sorts[s.0]
    }

    pub fn func(&self, f: FuncId) -> &FuncSym {
        &self.funcs[f.0]
    }

    pub fn rel(&self, r: RelId) -> &RelSym {
        &self.rels[r.0]
    }

    pub fn sort_ids(&self) -> impl Iterator<Item = SortId> {
        (0..self.sorts.len()).map(SortId)
    }

    pub fn func_ids(&self) -> impl Iterator<Item = FuncId> {
        (0..self.funcs.len()).map(FuncId)
    }

    pub fn rel_ids(&self) -> impl Iterator<Item = RelId> {
        (0..self.rels.len()).map(RelId)
    }

    /// Whether `name` is already used by a sort or a symbol.
    pub fn contains_name(&self, name: &str) -> bool {
        self.sorts.iter().any(|s| s == name)
            || self.funcs.iter().any(|f| f.name == name)
            || self.rels.iter().any(|r| r.name == name)
    }

    /// True when the other signature's symbols all occur here under the same
    /// name and with the same (by-name) typing.
    pub fn contains_by_name(&self, other: &Signature) -> bool {
        self.embedding_of(other).is_some()
    }

    /// Maps the sorts and symbols of `other` into `self` by name.
    pub fn embedding_of(&self, other: &Signature) -> Option<SignatureEmbedding> {
        let sorts = other
            .sorts
            .iter()
            .map(|s| self.sort_id(s))
            .collect::<Option<Vec<_>>>()?;
        let mut funcs = Vec::new();
        for f in &other.funcs {
            let id = self.func_id(&f.name)?;
            let mine = self.func(id);
            let args: Vec<_> = f.args.iter().map(|a| sorts[a.0]).collect();
            if mine.args != args || mine.result != sorts[f.result.0] {
                return None;
            }
            funcs.push(id);
        }
        let mut rels = Vec::new();
        for r in &other.rels {
            let id = self.rel_id(&r.name)?;
            let args: Vec<_> = r.args.iter().map(|a| sorts[a.0]).collect();
            if self.rel(id).args != args {
                return None;
            }
            rels.push(id);
        }
        Some(SignatureEmbedding { sorts, funcs, rels })
    }
}

/// A by-name inclusion of one signature into another.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SignatureEmbedding {
    pub sorts: Vec<SortId>,
    pub funcs: Vec<FuncId>,
    pub rels: Vec<RelId>,
}

impl fmt::Display for SortId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "#{}", self.0)
    }
}
