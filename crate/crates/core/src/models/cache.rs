//! On-disk cache of model classes keyed by theory text and size bound.

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use std::io::Write;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use super::class::{enumerate_models_with, ModelClass};
use super::search::SearchLimits;
use super::structure::{FiniteStructure, StructureData};
use super::ModelError;
use crate::logic::{print_theory, Theory};

const VERSION: u32 = 1;

/// Environment variable naming the default cache directory.
pub const CACHE_ENV: &str = "COHERE_CACHE_DIR";

#[derive(Serialize, Deserialize)]
struct CacheFile {
    version: u32,
    theory_hash: String,
    n: usize,
    forms: Vec<String>,
    models: Vec<StructureData>,
}

#[derive(Clone, Debug)]
pub struct ModelCache {
    dir: PathBuf,
}

impl ModelCache {
    pub fn new(dir: impl Into<PathBuf>) -> Self {
        ModelCache { dir: dir.into() }
    }

    pub fn from_env() -> Option<Self> {
        std::env::var_os(CACHE_ENV).map(Self::new)
    }

    pub fn dir(&self) -> &Path {
        &self.dir
    }

    pub fn key(theory: &Theory, n: usize) -> String {
        let mut h = Sha256::new();
        h.update(print_theory(theory).as_bytes());
        h.update(b"\n#n=");
        h.update(n.to_string().as_bytes());
        hex::encode(h.finalize())
    }

    fn path(&self, key: &str) -> PathBuf {
        self.dir.join(format!("models-{key}.json"))
    }

    pub fn load(&self, theory: &Arc<Theory>, n: usize) -> Option<ModelClass> {
        let key = Self::key(theory, n);
        let text = std::fs::read_to_string(self.path(&key)).ok()?;
        let file: CacheFile = serde_json::from_str(&text).ok()?;
        if file.version != VERSION || file.theory_hash != key || file.n != n {
            return None;
        }
        let models = file
            .models
            .iter()
            .map(|d| FiniteStructure::from_data(theory.sig.clone(), d))
            .collect::<Result<Vec<_>, _>>()
            .ok()?;
        let class = ModelClass::from_models(theory.clone(), n, models).ok()?;
        let forms: Vec<String> = class.forms().iter().map(hex::encode).collect();
        (forms == file.forms).then_some(class)
    }

    /// Writes atomically: a temporary file in the cache directory is renamed
    /// over the target.
    pub fn store(&self, class: &ModelClass) -> Result<(), ModelError> {
        let io = |e: std::io::Error| ModelError::Cache(e.to_string());
        std::fs::create_dir_all(&self.dir).map_err(io)?;
        let key = Self::key(&class.theory, class.n);
        let file = CacheFile {
            version: VERSION,
            theory_hash: key.clone(),
            n: class.n,
            forms: class.forms().iter().map(hex::encode).collect(),
            models: class.models().iter().map(FiniteStructure::to_data).collect(),
        };
        let text = serde_json::to_string(&file).map_err(|e| ModelError::Cache(e.to_string()))?;
        let mut tmp = tempfile::NamedTempFile::new_in(&self.dir).map_err(io)?;
        tmp.write_all(text.as_bytes()).map_err(io)?;
        tmp.persist(self.path(&key))
            .map_err(|e| ModelError::Cache(e.to_string()))?;
        Ok(())
    }
}

/// Enumerates through the cache when one is given.
pub fn enumerate_models_cached(
    theory: &Arc<Theory>,
    n: usize,
    limits: SearchLimits,
    cache: Option<&ModelCache>,
) -> Result<ModelClass, ModelError> {
    if let Some(c) = cache {
        if let Some(class) = c.load(theory, n) {
            return Ok(class);
        }
    }
    let class = enumerate_models_with(theory, n, limits)?;
    if let Some(c) = cache {
        c.store(&class)?;
    }
    Ok(class)
}
