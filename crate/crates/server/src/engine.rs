//! What workers run: a batch of sentences for one signature in, one document
//! out.

use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::{Arc, Mutex};
use std::thread;
use std::time::Duration;

use mtnlp_core::pipeline::registry::Registry;
use mtnlp_core::pipeline::tokenizer::Tokenizer;
use mtnlp_core::{Document, Input, Pipeline, PipelineError, Task};
use serde::Serialize;
use thiserror::Error;

use crate::batcher::Signature;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
#[error("{0}")]
pub struct EngineError(pub String);

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ModelInfo {
    pub identifier: String,
    pub language: String,
    pub tasks: Vec<Task>,
}

pub trait Engine: Send + Sync + 'static {
    /// Loaded models, in preference order.
    fn models(&self) -> Vec<ModelInfo>;

    fn tokenize(&self, model: &str, text: &str) -> Vec<Vec<String>>;

    /// Parses `sentences` with the tasks of `signature`. The result must have
    /// one `tok` row per input sentence.
    fn run(&self, signature: &Signature, sentences: Vec<Vec<String>>) -> Result<Document, EngineError>;
}

/// Serves loaded pipelines.
pub struct PipelineEngine {
    pipelines: Vec<Arc<Pipeline>>,
}

impl PipelineEngine {
    pub fn new(pipelines: Vec<Arc<Pipeline>>) -> Self {
        PipelineEngine { pipelines }
    }

    pub fn load(registry: &Registry, identifiers: &[String]) -> Result<Self, PipelineError> {
        let pipelines = identifiers.iter().map(|id| registry.load(id)).collect::<Result<_, _>>()?;
        Ok(PipelineEngine { pipelines })
    }

    fn pipeline(&self, model: &str) -> Result<&Pipeline, EngineError> {
        self.pipelines
            .iter()
            .find(|p| p.config().identifier == model)
            .map(|p| p.as_ref())
            .ok_or_else(|| EngineError(format!("model {} is not loaded", model)))
    }
}

impl Engine for PipelineEngine {
    fn models(&self) -> Vec<ModelInfo> {
        self.pipelines
            .iter()
            .map(|p| ModelInfo {
                identifier: p.config().identifier.clone(),
                language: p.config().language.clone(),
                tasks: p.config().tasks.clone(),
            })
            .collect()
    }

    fn tokenize(&self, model: &str, text: &str) -> Vec<Vec<String>> {
        match self.pipeline(model) {
            Ok(p) => p.tokenize(text),
            Err(_) => Tokenizer::default().tokenize(text),
        }
    }

    fn run(&self, signature: &Signature, sentences: Vec<Vec<String>>) -> Result<Document, EngineError> {
        self.pipeline(&signature.model)?
            .parse(Input::Tokens(sentences), Some(&signature.tasks))
            .map_err(|e| EngineError(e.to_string()))
    }
}

/// Per-batch latency of [`MockEngine`]: `fixed + per_sentence * sentences`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct CostModel {
    pub fixed: Duration,
    pub per_sentence: Duration,
}

impl CostModel {
    pub fn latency(&self, sentences: usize) -> Duration {
        self.fixed + self.per_sentence * sentences as u32
    }
}

/// Token that makes [`MockEngine`] fail the whole batch it appears in.
pub const POISON: &str = "<poison>";

/// A stand-in model with a fixed cost profile. It echoes the tokens, tags each
/// with its lowercase form as `lem` and its length as `pos`, and fails any
/// batch containing [`POISON`].
pub struct MockEngine {
    info: ModelInfo,
    cost: CostModel,
    calls: AtomicUsize,
    batches: Mutex<Vec<usize>>,
}

impl MockEngine {
    pub fn new(cost: CostModel) -> Self {
        MockEngine {
            info: ModelInfo {
                identifier: "MOCK_EN".to_string(),
                language: "en".to_string(),
                tasks: vec![Task::Lem, Task::Pos],
            },
            cost,
            calls: AtomicUsize::new(0),
            batches: Mutex::new(Vec::new()),
        }
    }

    pub fn calls(&self) -> usize {
        self.calls.load(Ordering::SeqCst)
    }

    /// Sentence count of every batch run so far.
    pub fn batch_sizes(&self) -> Vec<usize> {
        self.batches.lock().unwrap_or_else(|e| e.into_inner()).clone()
    }
}

impl Engine for MockEngine {
    fn models(&self) -> Vec<ModelInfo> {
        vec![self.info.clone()]
    }

    fn tokenize(&self, _model: &str, text: &str) -> Vec<Vec<String>> {
        Tokenizer::default().tokenize(text)
    }

    fn run(&self, signature: &Signature, sentences: Vec<Vec<String>>) -> Result<Document, EngineError> {
        self.calls.fetch_add(1, Ordering::SeqCst);
        self.batches.lock().unwrap_or_else(|e| e.into_inner()).push(sentences.len());
        thread::sleep(self.cost.latency(sentences.len()));
        if sentences.iter().flatten().any(|t| t == POISON) {
            return Err(EngineError("poisoned batch".to_string()));
        }
        let mut doc = Document::new(sentences);
        if signature.tasks.contains(&Task::Lem) {
            doc.lem = Some(doc.tok.iter().map(|s| s.iter().map(|t| t.to_lowercase()).collect()).collect());
        }
        if signature.tasks.contains(&Task::Pos) {
            doc.pos = Some(doc.tok.iter().map(|s| s.iter().map(|t| t.chars().count().to_string()).collect()).collect());
        }
        Ok(doc)
    }
}
