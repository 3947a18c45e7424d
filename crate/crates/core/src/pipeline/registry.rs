//! Model registry backed by a versioned JSON manifest.
//!
//! ```json
//! {
//!   "version": 1,
//!   "models": {
//!     "POS_EN": {
//!       "tasks": ["pos"],
//!       "language": "en",
//!       "window_size": 512,
//!       "batch": { "batch_size": 128, "batch_max_tokens": 12800 },
//!       "scorer": "oracle"
//!     }
//!   }
//! }
//! ```
//!
//! Optional per-model keys: `scorers` (per-task scorer overrides),
//! `encoder_dim`, `subword_chunk`, `abbreviations`.

use std::collections::{BTreeMap, HashMap};
use std::fs;
use std::path::Path;
use std::sync::{Arc, Mutex, OnceLock};

use serde::{Deserialize, Serialize};

use super::{Pipeline, PipelineError, Task};
use crate::sampler::BatchSpec;

pub const MANIFEST_VERSION: u32 = 1;

const BUILTIN_MANIFEST: &str = include_str!("../../data/manifest.json");

fn default_scorer() -> String {
    "hash".to_string()
}

fn default_encoder_dim() -> usize {
    32
}

fn default_chunk() -> usize {
    4
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelEntry {
    pub tasks: Vec<Task>,
    pub language: String,
    pub window_size: usize,
    pub batch: BatchSpec,
    #[serde(default = "default_scorer")]
    pub scorer: String,
    #[serde(default)]
    pub scorers: BTreeMap<Task, String>,
    #[serde(default = "default_encoder_dim")]
    pub encoder_dim: usize,
    #[serde(default = "default_chunk")]
    pub subword_chunk: usize,
    #[serde(default)]
    pub abbreviations: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Manifest {
    pub version: u32,
    pub models: BTreeMap<String, ModelEntry>,
}

/// Which scorer implementation a task is bound to.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum ScorerKind {
    Hash,
    Oracle,
}

impl ScorerKind {
    fn parse(id: &str) -> Option<Self> {
        match id {
            "hash" => Some(ScorerKind::Hash),
            "oracle" => Some(ScorerKind::Oracle),
            _ => None,
        }
    }
}

/// Fully resolved configuration of one pipeline.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PipelineConfig {
    pub identifier: String,
    /// Canonical order, no duplicates.
    pub tasks: Vec<Task>,
    pub language: String,
    pub window_size: usize,
    pub batch: BatchSpec,
    pub scorers: BTreeMap<Task, ScorerKind>,
    pub encoder_dim: usize,
    pub subword_chunk: usize,
    pub abbreviations: Vec<String>,
}

impl PipelineConfig {
    pub fn from_entry(identifier: &str, entry: &ModelEntry) -> Result<Self, PipelineError> {
        let bad = |reason: String| PipelineError::Manifest(format!("{}: {}", identifier, reason));

        let suffix = identifier.rsplit('_').next().unwrap_or_default();
        if !suffix.eq_ignore_ascii_case(&entry.language) || entry.language.is_empty() {
            return Err(bad(format!(
                "identifier suffix {:?} does not name language {:?}",
                suffix, entry.language
            )));
        }
        if entry.tasks.is_empty() {
            return Err(bad("no tasks".into()));
        }
        let mut tasks = entry.tasks.clone();
        tasks.sort();
        tasks.dedup();
        if tasks.len() != entry.tasks.len() {
            return Err(bad("duplicate task".into()));
        }
        if entry.window_size < 4 {
            return Err(bad(format!("window_size {} is below 4", entry.window_size)));
        }
        let batch = BatchSpec::new(entry.batch.batch_size, entry.batch.batch_max_tokens).map_err(|e| bad(e.to_string()))?;
        if entry.window_size > batch.batch_max_tokens {
            return Err(bad("a full window does not fit in batch_max_tokens".into()));
        }
        if entry.encoder_dim == 0 || entry.subword_chunk == 0 {
            return Err(bad("encoder_dim and subword_chunk must be positive".into()));
        }
        let default = ScorerKind::parse(&entry.scorer).ok_or_else(|| bad(format!("unknown scorer {:?}", entry.scorer)))?;
        let mut scorers = BTreeMap::new();
        for &task in &tasks {
            let kind = match entry.scorers.get(&task) {
                Some(id) => ScorerKind::parse(id).ok_or_else(|| bad(format!("unknown scorer {:?}", id)))?,
                None => default,
            };
            scorers.insert(task, kind);
        }
        if let Some(task) = entry.scorers.keys().find(|t| !tasks.contains(t)) {
            return Err(bad(format!("scorer bound for task {} not in task list", task)));
        }

        Ok(PipelineConfig {
            identifier: identifier.to_string(),
            tasks,
            language: entry.language.to_lowercase(),
            window_size: entry.window_size,
            batch,
            scorers,
            encoder_dim: entry.encoder_dim,
            subword_chunk: entry.subword_chunk,
            abbreviations: entry.abbreviations.clone(),
        })
    }
}

impl Manifest {
    pub fn from_json(text: &str) -> Result<Self, PipelineError> {
        let manifest: Manifest = serde_json::from_str(text).map_err(|e| PipelineError::Manifest(e.to_string()))?;
        if manifest.version != MANIFEST_VERSION {
            return Err(PipelineError::Manifest(format!(
                "unsupported manifest version {} (expected {})",
                manifest.version, MANIFEST_VERSION
            )));
        }
        for (id, entry) in &manifest.models {
            PipelineConfig::from_entry(id, entry)?;
        }
        Ok(manifest)
    }

    pub fn builtin() -> Self {
        Manifest::from_json(BUILTIN_MANIFEST).expect("bundled manifest is valid")
    }
}

/// Resolves identifiers to pipelines, building each at most once.
pub struct Registry {
    manifest: Manifest,
    loaded: Mutex<HashMap<String, Arc<Pipeline>>>,
}

impl Registry {
    pub fn new(manifest: Manifest) -> Self {
        Registry {
            manifest,
            loaded: Mutex::new(HashMap::new()),
        }
    }

    pub fn builtin() -> Self {
        Registry::new(Manifest::builtin())
    }

    pub fn from_file(path: impl AsRef<Path>) -> Result<Self, PipelineError> {
        let path = path.as_ref();
        let text = fs::read_to_string(path).map_err(|e| PipelineError::Manifest(format!("{}: {}", path.display(), e)))?;
        Ok(Registry::new(Manifest::from_json(&text)?))
    }

    pub fn manifest(&self) -> &Manifest {
        &self.manifest
    }

    pub fn identifiers(&self) -> Vec<String> {
        self.manifest.models.keys().cloned().collect()
    }

    pub fn config(&self, identifier: &str) -> Result<PipelineConfig, PipelineError> {
        let entry = self
            .manifest
            .models
            .get(identifier)
            .ok_or_else(|| PipelineError::UnknownIdentifier {
                identifier: identifier.to_string(),
                available: self.identifiers(),
            })?;
        PipelineConfig::from_entry(identifier, entry)
    }

    pub fn load(&self, identifier: &str) -> Result<Arc<Pipeline>, PipelineError> {
        let mut loaded = self.loaded.lock().unwrap_or_else(|e| e.into_inner());
        if let Some(p) = loaded.get(identifier) {
            return Ok(Arc::clone(p));
        }
        let pipeline = Arc::new(Pipeline::new(self.config(identifier)?));
        loaded.insert(identifier.to_string(), Arc::clone(&pipeline));
        Ok(pipeline)
    }
}

/// Loads a pipeline from the bundled manifest.
pub fn load(identifier: &str) -> Result<Arc<Pipeline>, PipelineError> {
    static BUILTIN: OnceLock<Registry> = OnceLock::new();
    BUILTIN.get_or_init(Registry::builtin).load(identifier)
}
