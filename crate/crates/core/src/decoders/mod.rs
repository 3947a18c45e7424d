//! Decoding algorithms that turn scorer output into annotations.
//!
//! Scorers are pluggable and produce a [`ScoreSet`]; everything here is a pure,
//! deterministic function of it.

mod edit_script;
mod mst;
mod ner;
mod stub;
mod tags;

use thiserror::Error;

use crate::doc::{AmrTriple, ConNode, SrlFrame};

pub use edit_script::{apply_edit_script, derive_edit_script, EditScript, ScriptParseError};
pub use mst::{decode_dep, mst_decode, tree_score};
pub use ner::decode_ner;
pub use stub::{stub_structure, StubTask};
pub use tags::{decode_lemmas, decode_tags};

#[derive(Debug, Error, PartialEq)]
pub enum DecodeError {
    #[error("empty tag set")]
    EmptyTagset,

    #[error("expected scores for {expected} tokens, got {actual}")]
    TokenCount { expected: usize, actual: usize },

    #[error("score vector for token {token} has {actual} entries, tag set has {expected}")]
    Width { token: usize, expected: usize, actual: usize },

    #[error("non-finite score at {0}")]
    NonFinite(String),

    #[error("score set has no {0}")]
    Missing(&'static str),

    #[error("script {script:?} cannot be applied to {form:?}")]
    InapplicableScript { script: String, form: String },

    #[error("unknown structure task {0:?}")]
    UnknownTask(String),
}

fn check_finite(values: &[f64], what: impl FnOnce() -> String) -> Result<(), DecodeError> {
    if values.iter().all(|v| v.is_finite()) {
        Ok(())
    } else {
        Err(DecodeError::NonFinite(what()))
    }
}

/// Index of the largest value; the lowest index wins ties.
pub(crate) fn argmax(values: &[f64]) -> Option<usize> {
    let mut best: Option<usize> = None;
    for (i, &v) in values.iter().enumerate() {
        match best {
            Some(b) if values[b] >= v => {}
            _ => best = Some(i),
        }
    }
    best
}

/// Per-token scores over a tag inventory.
#[derive(Clone, Debug, PartialEq)]
pub struct TagScores {
    pub labels: Vec<String>,
    pub scores: Vec<Vec<f64>>,
}

impl TagScores {
    pub fn validate(&self, tokens: usize) -> Result<(), DecodeError> {
        if self.labels.is_empty() {
            return Err(DecodeError::EmptyTagset);
        }
        if self.scores.len() != tokens {
            return Err(DecodeError::TokenCount {
                expected: tokens,
                actual: self.scores.len(),
            });
        }
        for (token, row) in self.scores.iter().enumerate() {
            if row.len() != self.labels.len() {
                return Err(DecodeError::Width {
                    token,
                    expected: self.labels.len(),
                    actual: row.len(),
                });
            }
            check_finite(row, || format!("tag scores of token {}", token))?;
        }
        Ok(())
    }
}

/// Head-dependent scores: `get(h, d)` scores head `h` (0 = root, `i + 1` =
/// token `i`) for dependent token `d`.
#[derive(Clone, Debug, PartialEq)]
pub struct ArcScores {
    tokens: usize,
    data: Vec<f64>,
}

impl ArcScores {
    pub fn zeros(tokens: usize) -> Self {
        ArcScores {
            tokens,
            data: vec![0.0; (tokens + 1) * tokens],
        }
    }

    /// `rows` must have `n + 1` rows of `n` entries.
    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self, DecodeError> {
        let tokens = rows.len().saturating_sub(1);
        let mut scores = ArcScores::zeros(tokens);
        for (h, row) in rows.iter().enumerate() {
            if row.len() != tokens {
                return Err(DecodeError::Width {
                    token: h,
                    expected: tokens,
                    actual: row.len(),
                });
            }
            check_finite(row, || format!("arc scores of head {}", h))?;
            for (d, &v) in row.iter().enumerate() {
                scores.set(h, d, v);
            }
        }
        Ok(scores)
    }

    pub fn tokens(&self) -> usize {
        self.tokens
    }

    pub fn get(&self, head: usize, dependent: usize) -> f64 {
        self.data[head * self.tokens + dependent]
    }

    pub fn set(&mut self, head: usize, dependent: usize, score: f64) {
        self.data[head * self.tokens + dependent] = score;
    }

    fn validate(&self) -> Result<(), DecodeError> {
        check_finite(&self.data, || "arc scores".to_string())
    }
}

/// Relation label scores for every (head, dependent) pair, same indexing as
/// [`ArcScores`].
#[derive(Clone, Debug, PartialEq)]
pub struct LabelScores {
    pub labels: Vec<String>,
    tokens: usize,
    data: Vec<f64>,
}

impl LabelScores {
    pub fn zeros(labels: Vec<String>, tokens: usize) -> Self {
        let data = vec![0.0; (tokens + 1) * tokens * labels.len()];
        LabelScores { labels, tokens, data }
    }

    fn offset(&self, head: usize, dependent: usize) -> usize {
        (head * self.tokens + dependent) * self.labels.len()
    }

    pub fn get(&self, head: usize, dependent: usize) -> &[f64] {
        let at = self.offset(head, dependent);
        &self.data[at..at + self.labels.len()]
    }

    pub fn get_mut(&mut self, head: usize, dependent: usize) -> &mut [f64] {
        let at = self.offset(head, dependent);
        let width = self.labels.len();
        &mut self.data[at..at + width]
    }

    fn validate(&self, tokens: usize) -> Result<(), DecodeError> {
        if self.labels.is_empty() {
            return Err(DecodeError::EmptyTagset);
        }
        if self.tokens != tokens {
            return Err(DecodeError::TokenCount {
                expected: tokens,
                actual: self.tokens,
            });
        }
        check_finite(&self.data, || "label scores".to_string())
    }
}

/// Label scores for every span of up to `max_width` tokens. Label 0 is the
/// null ("not an entity") label.
#[derive(Clone, Debug, PartialEq)]
pub struct SpanScores {
    pub labels: Vec<String>,
    pub max_width: usize,
    tokens: usize,
    // rows[start][width - 1] -> label scores
    rows: Vec<Vec<Vec<f64>>>,
}

impl SpanScores {
    /// Every span starts with all weight on the null label.
    pub fn null(labels: Vec<String>, tokens: usize, max_width: usize) -> Self {
        let mut empty = vec![0.0; labels.len()];
        if let Some(first) = empty.first_mut() {
            *first = 1.0;
        }
        let rows = (0..tokens)
            .map(|start| vec![empty.clone(); max_width.min(tokens - start)])
            .collect();
        SpanScores {
            labels,
            max_width,
            tokens,
            rows,
        }
    }

    pub fn tokens(&self) -> usize {
        self.tokens
    }

    /// Scores for tokens `start..end`, or `None` when the span is out of range
    /// or wider than `max_width`.
    pub fn get(&self, start: usize, end: usize) -> Option<&[f64]> {
        if end <= start {
            return None;
        }
        self.rows.get(start)?.get(end - start - 1).map(Vec::as_slice)
    }

    pub fn get_mut(&mut self, start: usize, end: usize) -> Option<&mut [f64]> {
        if end <= start {
            return None;
        }
        self.rows
            .get_mut(start)?
            .get_mut(end - start - 1)
            .map(Vec::as_mut_slice)
    }

    /// All `(start, end)` pairs that carry scores, in (start, end) order.
    pub fn spans(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.rows
            .iter()
            .enumerate()
            .flat_map(|(start, row)| (1..=row.len()).map(move |w| (start, start + w)))
    }

    fn validate(&self, tokens: usize) -> Result<(), DecodeError> {
        if self.labels.len() < 2 {
            return Err(DecodeError::EmptyTagset);
        }
        if self.tokens != tokens {
            return Err(DecodeError::TokenCount {
                expected: tokens,
                actual: self.tokens,
            });
        }
        for (start, row) in self.rows.iter().enumerate() {
            for (w, scores) in row.iter().enumerate() {
                if scores.len() != self.labels.len() {
                    return Err(DecodeError::Width {
                        token: start,
                        expected: self.labels.len(),
                        actual: scores.len(),
                    });
                }
                check_finite(scores, || format!("span [{}, {})", start, start + w + 1))?;
            }
        }
        Ok(())
    }
}

/// A structure supplied directly by a scorer for tasks whose decoding is done
/// model-side.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Structure {
    Con(ConNode),
    Srl(Vec<SrlFrame>),
    Amr(Vec<AmrTriple>),
}

/// Everything a scorer can hand to a decoder. Each task reads the parts it
/// needs.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct ScoreSet {
    pub tags: Option<TagScores>,
    pub arcs: Option<ArcScores>,
    pub labels: Option<LabelScores>,
    pub spans: Option<SpanScores>,
    pub structure: Option<Structure>,
}

impl ScoreSet {
    pub fn with_tags(tags: TagScores) -> Self {
        ScoreSet {
            tags: Some(tags),
            ..Default::default()
        }
    }

    pub fn with_spans(spans: SpanScores) -> Self {
        ScoreSet {
            spans: Some(spans),
            ..Default::default()
        }
    }

    pub fn with_arcs(arcs: ArcScores, labels: LabelScores) -> Self {
        ScoreSet {
            arcs: Some(arcs),
            labels: Some(labels),
            ..Default::default()
        }
    }

    pub fn with_structure(structure: Structure) -> Self {
        ScoreSet {
            structure: Some(structure),
            ..Default::default()
        }
    }

    /// Checks finiteness and that every present part is sized for `tokens`.
    pub fn validate(&self, tokens: usize) -> Result<(), DecodeError> {
        if let Some(tags) = &self.tags {
            tags.validate(tokens)?;
        }
        if let Some(arcs) = &self.arcs {
            if arcs.tokens != tokens {
                return Err(DecodeError::TokenCount {
                    expected: tokens,
                    actual: arcs.tokens,
                });
            }
            arcs.validate()?;
        }
        if let Some(labels) = &self.labels {
            labels.validate(tokens)?;
        }
        if let Some(spans) = &self.spans {
            spans.validate(tokens)?;
        }
        Ok(())
    }
}
