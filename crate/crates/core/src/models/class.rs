use std::collections::BTreeMap;
use std::sync::Arc;

use super::canon::canonical_with_perm;
use super::eval::{is_model, satisfies};
use super::hom::{automorphisms, enumerate_homs, enumerate_isos, Homomorphism};
use super::search::{enumerate_representatives, SearchLimits};
use super::structure::FiniteStructure;
use super::ModelError;
use crate::logic::{Sequent, Theory};

/// The models of a theory with every carrier at most `n`, one per
/// isomorphism class, in increasing canonical-form order.
#[derive(Clone, Debug)]
pub struct ModelClass {
    pub theory: Arc<Theory>,
    pub n: usize,
    models: Vec<FiniteStructure>,
    forms: Vec<Vec<u8>>,
    auts: Vec<Vec<Homomorphism>>,
}

impl ModelClass {
    /// Builds a class from arbitrary models, deduplicating up to isomorphism.
    pub fn from_models(
        theory: Arc<Theory>,
        n: usize,
        models: impl IntoIterator<Item = FiniteStructure>,
    ) -> Result<Self, ModelError> {
        let mut by_form: BTreeMap<Vec<u8>, FiniteStructure> = BTreeMap::new();
        for m in models {
            if *m.signature() != theory.sig {
                return Err(ModelError::SignatureMismatch);
            }
            if !is_model(&m, &theory) {
                return Err(ModelError::Invalid("structure is not a model of the theory".into()));
            }
            let (form, perm) = canonical_with_perm(&m);
            by_form.entry(form).or_insert_with(|| m.relabel(&perm));
        }
        let (forms, models): (Vec<_>, Vec<_>) = by_form.into_iter().unzip();
        let auts = models.iter().map(automorphisms).collect();
        Ok(ModelClass {
            theory,
            n,
            models,
            forms,
            auts,
        })
    }

    pub fn models(&self) -> &[FiniteStructure] {
        &self.models
    }

    pub fn len(&self) -> usize {
        self.models.len()
    }

    pub fn is_empty(&self) -> bool {
        self.models.is_empty()
    }

    pub fn get(&self, i: usize) -> &FiniteStructure {
        &self.models[i]
    }

    pub fn form(&self, i: usize) -> &[u8] {
        &self.forms[i]
    }

    pub fn forms(&self) -> &[Vec<u8>] {
        &self.forms
    }

    /// `Aut(M_i)`, identity first.
    pub fn automorphisms(&self, i: usize) -> &[Homomorphism] {
        &self.auts[i]
    }

    /// Isomorphisms between members; empty unless `i == j`, since members
    /// are pairwise non-isomorphic.
    pub fn isos(&self, i: usize, j: usize) -> Vec<Homomorphism> {
        if i == j {
            self.auts[i].clone()
        } else {
            enumerate_isos(&self.models[i], &self.models[j])
        }
    }

    pub fn homs(&self, i: usize, j: usize) -> Vec<Homomorphism> {
        enumerate_homs(&self.models[i], &self.models[j])
    }

    /// Index of the member isomorphic to `m`.
    pub fn index_of(&self, m: &FiniteStructure) -> Option<usize> {
        let form = canonical_with_perm(m).0;
        self.forms.binary_search(&form).ok()
    }

    /// Every member satisfies the sequent. A necessary condition for
    /// provability only.
    pub fn entails(&self, s: &Sequent) -> bool {
        self.models.iter().all(|m| satisfies(m, s))
    }
}

pub fn enumerate_models(theory: &Arc<Theory>, n: usize) -> Result<ModelClass, ModelError> {
    enumerate_models_with(theory, n, SearchLimits::default())
}

pub fn enumerate_models_with(
    theory: &Arc<Theory>,
    n: usize,
    limits: SearchLimits,
) -> Result<ModelClass, ModelError> {
    let reps = enumerate_representatives(theory, n, limits)?;
    ModelClass::from_models(theory.clone(), n, reps)
}
