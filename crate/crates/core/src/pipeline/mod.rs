//! End-to-end parsing: tokenize, sub-tokenize, window, encode once, pool, then
//! fan the token vectors out to every requested task decoder.

pub mod encoder;
pub mod registry;
pub mod scorer;
pub mod tokenizer;

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::decoders::{
    decode_dep, decode_lemmas, decode_ner, decode_tags, stub_structure, DecodeError, ScoreSet, Structure, StubTask,
};
use crate::doc::{AmrTriple, ConNode, DepArc, DocError, Document, EntitySpan, SrlFrame};
use crate::sampler::{build_batches, restore_order, SamplerError};
use crate::windowing::{apply_windows, plan_windows, pool_subtokens, restore, SubtokenSequence, WindowError};

use encoder::{CharChunkTokenizer, EncodeError, Encoder, HashEncoder, SubwordTokenizer};
use registry::{PipelineConfig, ScorerKind};
use scorer::{HashScorer, OracleScorer, ScoreError, Scorer};
use tokenizer::Tokenizer;

pub use registry::load;

/// Tasks in canonical (output) order.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Task {
    Lem,
    Pos,
    Ner,
    Srl,
    Dep,
    Con,
    Amr,
    Dcr,
}

impl Task {
    pub const ALL: [Task; 8] = [
        Task::Lem,
        Task::Pos,
        Task::Ner,
        Task::Srl,
        Task::Dep,
        Task::Con,
        Task::Amr,
        Task::Dcr,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Task::Lem => "lem",
            Task::Pos => "pos",
            Task::Ner => "ner",
            Task::Srl => "srl",
            Task::Dep => "dep",
            Task::Con => "con",
            Task::Amr => "amr",
            Task::Dcr => "dcr",
        }
    }

    /// Coreference sees the whole document rather than one sentence.
    pub fn is_document_level(self) -> bool {
        self == Task::Dcr
    }
}

impl fmt::Display for Task {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Task {
    type Err = PipelineError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Task::ALL
            .into_iter()
            .find(|t| t.as_str().eq_ignore_ascii_case(s.trim()))
            .ok_or_else(|| PipelineError::UnknownTask(s.to_string()))
    }
}

#[derive(Debug, Error)]
pub enum PipelineError {
    #[error("unknown model identifier {identifier:?}; available: {}", available.join(", "))]
    UnknownIdentifier { identifier: String, available: Vec<String> },

    #[error("invalid manifest: {0}")]
    Manifest(String),

    #[error("unknown task {0:?}")]
    UnknownTask(String),

    #[error("task {task} is not served by {identifier}")]
    UnsupportedTask { task: Task, identifier: String },

    #[error("sentence {0} is empty")]
    EmptySentence(usize),

    #[error("token {token} of sentence {sentence} is empty")]
    EmptyToken { sentence: usize, token: usize },

    #[error(transparent)]
    Window(#[from] WindowError),

    #[error(transparent)]
    Sampler(#[from] SamplerError),

    #[error(transparent)]
    Encode(#[from] EncodeError),

    #[error("{task} scorer failed on sentence {sentence}: {source}")]
    Score {
        task: Task,
        sentence: usize,
        source: ScoreError,
    },

    #[error("{task} decoding failed on sentence {sentence}: {source}")]
    Decode {
        task: Task,
        sentence: usize,
        source: DecodeError,
    },

    #[error(transparent)]
    Document(#[from] DocError),
}

/// What to parse: raw text (tokenized and split into sentences here) or
/// sentences that are already tokenized.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Input {
    Text(String),
    Tokens(Vec<Vec<String>>),
}

impl From<&str> for Input {
    fn from(text: &str) -> Self {
        Input::Text(text.to_string())
    }
}

impl From<Vec<Vec<String>>> for Input {
    fn from(tokens: Vec<Vec<String>>) -> Self {
        Input::Tokens(tokens)
    }
}

enum Annotation {
    Strings(Vec<String>),
    Spans(Vec<EntitySpan>),
    Frames(Vec<SrlFrame>),
    Arcs(Vec<DepArc>),
    Tree(ConNode),
    Graph(Vec<AmrTriple>),
}

pub struct Pipeline {
    config: PipelineConfig,
    tokenizer: Tokenizer,
    subword: Arc<dyn SubwordTokenizer>,
    encoder: Arc<dyn Encoder>,
    scorers: BTreeMap<Task, Arc<dyn Scorer>>,
}

impl fmt::Debug for Pipeline {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Pipeline").field("config", &self.config).finish_non_exhaustive()
    }
}

impl Pipeline {
    /// Builds the reference components named by `config`.
    pub fn new(config: PipelineConfig) -> Self {
        let hash: Arc<dyn Scorer> = Arc::new(HashScorer::default());
        let mut oracle: Option<Arc<dyn Scorer>> = None;
        let scorers = config
            .scorers
            .iter()
            .map(|(&task, kind)| {
                let scorer = match kind {
                    ScorerKind::Hash => Arc::clone(&hash),
                    ScorerKind::Oracle => Arc::clone(oracle.get_or_insert_with(|| Arc::new(OracleScorer::builtin()))),
                };
                (task, scorer)
            })
            .collect();
        Pipeline {
            tokenizer: Tokenizer::new(&config.abbreviations),
            subword: Arc::new(CharChunkTokenizer::with_chunk(config.subword_chunk)),
            encoder: Arc::new(HashEncoder { dim: config.encoder_dim }),
            scorers,
            config,
        }
    }

    pub fn with_encoder(mut self, encoder: Arc<dyn Encoder>) -> Self {
        self.encoder = encoder;
        self
    }

    pub fn with_subword_tokenizer(mut self, subword: Arc<dyn SubwordTokenizer>) -> Self {
        self.subword = subword;
        self
    }

    /// Binds `scorer` to every task of the pipeline.
    pub fn with_scorer(mut self, scorer: Arc<dyn Scorer>) -> Self {
        for slot in self.scorers.values_mut() {
            *slot = Arc::clone(&scorer);
        }
        self
    }

    pub fn with_task_scorer(mut self, task: Task, scorer: Arc<dyn Scorer>) -> Self {
        if let Some(slot) = self.scorers.get_mut(&task) {
            *slot = scorer;
        }
        self
    }

    pub fn config(&self) -> &PipelineConfig {
        &self.config
    }

    pub fn tasks(&self) -> &[Task] {
        &self.config.tasks
    }

    pub fn tokenize(&self, text: &str) -> Vec<Vec<String>> {
        self.tokenizer.tokenize(text)
    }

    /// Parses tokenized sentences with every task of the pipeline.
    pub fn parse_tokens(&self, sentences: Vec<Vec<String>>) -> Result<Document, PipelineError> {
        self.parse(Input::Tokens(sentences), None)
    }

    /// Requested tasks in canonical order; `None` means all.
    pub fn resolve_tasks(&self, requested: Option<&[Task]>) -> Result<Vec<Task>, PipelineError> {
        let mut tasks = match requested {
            None => return Ok(self.config.tasks.clone()),
            Some(tasks) => tasks.to_vec(),
        };
        if let Some(&task) = tasks.iter().find(|t| !self.config.tasks.contains(t)) {
            return Err(PipelineError::UnsupportedTask {
                task,
                identifier: self.config.identifier.clone(),
            });
        }
        tasks.sort();
        tasks.dedup();
        Ok(tasks)
    }

    pub fn parse(&self, input: Input, tasks: Option<&[Task]>) -> Result<Document, PipelineError> {
        let tasks = self.resolve_tasks(tasks)?;
        let sentences = match input {
            Input::Text(text) => self.tokenizer.tokenize(&text),
            Input::Tokens(sentences) => {
                for (s, sentence) in sentences.iter().enumerate() {
                    if sentence.is_empty() {
                        return Err(PipelineError::EmptySentence(s));
                    }
                    if let Some(t) = sentence.iter().position(|t| t.is_empty()) {
                        return Err(PipelineError::EmptyToken { sentence: s, token: t });
                    }
                }
                sentences
            }
        };
        if sentences.is_empty() {
            return Ok(Document::default());
        }

        let vectors = self.encode(&sentences)?;

        let jobs: Vec<(usize, Task)> = (0..sentences.len())
            .flat_map(|s| tasks.iter().filter(|t| !t.is_document_level()).map(move |&t| (s, t)))
            .collect();
        let results: Vec<Annotation> = jobs
            .par_iter()
            .map(|&(s, task)| self.decode(task, s, &sentences[s], &vectors[s]))
            .collect::<Result<_, _>>()?;

        let mut doc = Document::new(sentences.clone());
        for ((_, task), annotation) in jobs.into_iter().zip(results) {
            match (task, annotation) {
                (Task::Lem, Annotation::Strings(v)) => doc.lem.get_or_insert_with(Vec::new).push(v),
                (Task::Pos, Annotation::Strings(v)) => doc.pos.get_or_insert_with(Vec::new).push(v),
                (Task::Ner, Annotation::Spans(v)) => doc.ner.get_or_insert_with(Vec::new).push(v),
                (Task::Srl, Annotation::Frames(v)) => doc.srl.get_or_insert_with(Vec::new).push(v),
                (Task::Dep, Annotation::Arcs(v)) => doc.dep.get_or_insert_with(Vec::new).push(v),
                (Task::Con, Annotation::Tree(v)) => doc.con.get_or_insert_with(Vec::new).push(v),
                (Task::Amr, Annotation::Graph(v)) => doc.amr.get_or_insert_with(Vec::new).push(v),
                _ => unreachable!("decode returns the annotation kind of its task"),
            }
        }
        if tasks.contains(&Task::Dcr) {
            let clusters = self.scorers[&Task::Dcr]
                .coref(&sentences, &vectors)
                .map_err(|source| PipelineError::Score {
                    task: Task::Dcr,
                    sentence: 0,
                    source,
                })?;
            doc.dcr = Some(clusters);
        }
        doc.validate()?;
        Ok(doc)
    }

    /// Token vectors for every sentence. All windows of all sentences are
    /// batched by length; the encoder runs once per batch.
    pub fn encode(&self, sentences: &[Vec<String>]) -> Result<Vec<Vec<Vec<f64>>>, PipelineError> {
        let seqs: Vec<SubtokenSequence<u32>> = sentences
            .iter()
            .map(|tokens| {
                let pieces = tokens.iter().map(|t| self.subword.split(t)).collect();
                SubtokenSequence::new(self.subword.begin(), self.subword.end(), pieces)
            })
            .collect();
        let plans = seqs
            .iter()
            .map(|seq| plan_windows(seq.len(), self.config.window_size))
            .collect::<Result<Vec<_>, _>>()?;

        let mut windows = Vec::new();
        for (seq, plan) in seqs.iter().zip(&plans) {
            windows.extend(apply_windows(&seq.items, plan)?);
        }
        let lengths: Vec<usize> = windows.iter().map(Vec::len).collect();
        let assignment = build_batches(&lengths, self.config.batch)?;

        let mut batched = Vec::with_capacity(assignment.batches.len());
        for batch in &assignment.batches {
            let input: Vec<Vec<u32>> = batch.indices.iter().map(|&i| windows[i].clone()).collect();
            let output = self.encoder.encode(&input)?;
            if output.len() != input.len() {
                return Err(EncodeError(format!("{} windows in, {} out", input.len(), output.len())).into());
            }
            batched.push(output);
        }
        let mut per_window = restore_order(batched, &assignment)?.into_iter();

        seqs.iter()
            .zip(&plans)
            .map(|(seq, plan)| {
                let outputs: Vec<Vec<Vec<f64>>> = per_window.by_ref().take(plan.windows.len()).collect();
                let subtoken_vectors = restore(&outputs, plan)?;
                Ok(pool_subtokens(&seq.alignment, &subtoken_vectors)?)
            })
            .collect()
    }

    fn decode(&self, task: Task, sentence: usize, tokens: &[String], vectors: &[Vec<f64>]) -> Result<Annotation, PipelineError> {
        let scores = self.scorers[&task]
            .score(task, tokens, vectors)
            .map_err(|source| PipelineError::Score { task, sentence, source })?;
        decode_task(task, tokens, &scores).map_err(|source| PipelineError::Decode { task, sentence, source })
    }
}

fn decode_task(task: Task, tokens: &[String], scores: &ScoreSet) -> Result<Annotation, DecodeError> {
    scores.validate(tokens.len())?;
    let structure = |stub: StubTask| match &scores.structure {
        Some(s) => Ok(s.clone()),
        None => stub_structure(tokens, stub),
    };
    Ok(match task {
        Task::Lem => Annotation::Strings(decode_lemmas(tokens, scores.tags.as_ref().ok_or(DecodeError::Missing("tag scores"))?)?),
        Task::Pos => Annotation::Strings(decode_tags(scores.tags.as_ref().ok_or(DecodeError::Missing("tag scores"))?)?),
        Task::Ner => Annotation::Spans(decode_ner(scores.spans.as_ref().ok_or(DecodeError::Missing("span scores"))?, tokens)?),
        Task::Dep => {
            let arcs = scores.arcs.as_ref().ok_or(DecodeError::Missing("arc scores"))?;
            let labels = scores.labels.as_ref().ok_or(DecodeError::Missing("label scores"))?;
            Annotation::Arcs(decode_dep(arcs, labels)?)
        }
        Task::Con => match structure(StubTask::Con)? {
            Structure::Con(tree) => Annotation::Tree(tree),
            _ => return Err(DecodeError::Missing("constituency tree")),
        },
        Task::Srl => match structure(StubTask::Srl)? {
            Structure::Srl(frames) => Annotation::Frames(frames),
            _ => return Err(DecodeError::Missing("semantic role frames")),
        },
        Task::Amr => match structure(StubTask::Amr)? {
            Structure::Amr(graph) => Annotation::Graph(graph),
            _ => return Err(DecodeError::Missing("AMR graph")),
        },
        Task::Dcr => unreachable!("document-level task"),
    })
}
