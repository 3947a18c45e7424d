//! Scorers turn token vectors into decoder inputs.
//!
//! [`HashScorer`] is a fixed, pseudo-randomly initialized set of linear and
//! bilinear layers: it exercises every decoder with realistic shapes but its
//! predictions carry no linguistic meaning. [`OracleScorer`] emits one-hot
//! scores for sentences found in a gold fixture and defers to a fallback
//! scorer otherwise; decoding its scores reproduces the gold annotations.

use std::collections::HashMap;

use thiserror::Error;

use super::encoder::{fnv1a, mix, unit};
use super::Task;
use crate::decoders::{
    derive_edit_script, ArcScores, LabelScores, ScoreSet, SpanScores, Structure, TagScores,
};
use crate::doc::{CorefCluster, DocError, Document};

#[derive(Debug, Error, PartialEq, Eq)]
#[error("scorer failure: {0}")]
pub struct ScoreError(pub String);

pub trait Scorer: Send + Sync {
    /// Scores one sentence for one task. Tasks decoded model-side (con, srl,
    /// amr) may return a [`Structure`], or an empty [`ScoreSet`] to get the
    /// placeholder structure.
    fn score(&self, task: Task, tokens: &[String], vectors: &[Vec<f64>]) -> Result<ScoreSet, ScoreError>;

    /// Document-level coreference over sentences in document order.
    fn coref(&self, _sentences: &[Vec<String>], _vectors: &[Vec<Vec<f64>>]) -> Result<Vec<CorefCluster>, ScoreError> {
        Ok(Vec::new())
    }
}

/// Penn Treebank part-of-speech tags.
pub const POS_TAGS: &[&str] = &[
    "CC", "CD", "DT", "EX", "FW", "IN", "JJ", "JJR", "JJS", "LS", "MD", "NN", "NNS", "NNP", "NNPS", "PDT", "POS", "PRP",
    "PRP$", "RB", "RBR", "RBS", "RP", "SYM", "TO", "UH", "VB", "VBD", "VBG", "VBN", "VBP", "VBZ", "WDT", "WP", "WP$",
    "WRB", "$", "``", "''", "-LRB-", "-RRB-", ",", ".", ":", "HYPH", "NFP", "ADD", "AFX", "XX",
];

/// Null label followed by the OntoNotes entity types.
pub const NER_LABELS: &[&str] = &[
    "O", "PERSON", "NORP", "FAC", "ORG", "GPE", "LOC", "PRODUCT", "EVENT", "WORK_OF_ART", "LAW", "LANGUAGE", "DATE",
    "TIME", "PERCENT", "MONEY", "QUANTITY", "ORDINAL", "CARDINAL",
];

pub const DEP_LABELS: &[&str] = &[
    "root", "nsbj", "csbj", "obj", "dat", "comp", "com", "cop", "aux", "neg", "det", "adj", "adv", "advcl", "advnp",
    "appo", "attr", "case", "cc", "conj", "dep", "expl", "lv", "mark", "meta", "num", "poss", "ppmod", "prn", "prt",
    "punct", "relcl", "acl", "obl",
];

/// Form/lemma exemplars whose edit scripts make up the reference lemma tag set.
const LEMMA_EXEMPLARS: &[(&str, &str)] = &[
    ("walk", "walk"),
    ("Walk", "walk"),
    ("walks", "walk"),
    ("walked", "walk"),
    ("walking", "walk"),
    ("boxes", "box"),
    ("studies", "study"),
    ("studied", "study"),
    ("making", "make"),
    ("made", "make"),
    ("is", "be"),
    ("are", "be"),
    ("was", "be"),
    ("were", "be"),
    ("has", "have"),
    ("had", "have"),
    ("went", "go"),
    ("better", "good"),
    ("children", "child"),
    ("stopped", "stop"),
];

const NER_MAX_WIDTH: usize = 8;

/// Fixed linear (tags, entity spans) and bilinear (arcs) layers with weights
/// drawn from a seeded hash.
#[derive(Clone, Debug)]
pub struct HashScorer {
    seed: u64,
    lemma_scripts: Vec<String>,
    lowercase_script: usize,
    pub ner_max_width: usize,
    /// Score given to the null label of every span.
    pub ner_threshold: f64,
}

impl Default for HashScorer {
    fn default() -> Self {
        HashScorer::new(0)
    }
}

impl HashScorer {
    pub fn new(seed: u64) -> Self {
        let mut lemma_scripts: Vec<String> = Vec::new();
        for (form, lemma) in LEMMA_EXEMPLARS {
            let tag = derive_edit_script(form, lemma).to_string();
            if !lemma_scripts.contains(&tag) {
                lemma_scripts.push(tag);
            }
        }
        let lowercase_script = lemma_scripts
            .iter()
            .position(|t| *t == derive_edit_script("Walk", "walk").to_string())
            .expect("lowercase exemplar present");
        HashScorer {
            seed,
            lemma_scripts,
            lowercase_script,
            ner_max_width: NER_MAX_WIDTH,
            ner_threshold: 3.0,
        }
    }

    fn weight(&self, layer: &str, row: usize, col: usize) -> f64 {
        let h = self.seed ^ fnv1a(layer.as_bytes());
        unit(mix(h ^ mix((row as u64) << 32 | col as u64)))
    }

    fn linear(&self, layer: &str, row: usize, v: &[f64]) -> f64 {
        v.iter().enumerate().map(|(k, x)| self.weight(layer, row, k) * x).sum()
    }

    fn tag_scores(&self, layer: &str, labels: Vec<String>, vectors: &[Vec<f64>]) -> TagScores {
        let scores = vectors
            .iter()
            .map(|v| (0..labels.len()).map(|l| self.linear(layer, l, v)).collect())
            .collect();
        TagScores { labels, scores }
    }

    fn root_vector(&self, dim: usize) -> Vec<f64> {
        (0..dim).map(|k| self.weight("root", 0, k)).collect()
    }

    fn spans(&self, vectors: &[Vec<f64>]) -> SpanScores {
        let labels: Vec<String> = NER_LABELS.iter().map(|s| s.to_string()).collect();
        let n = vectors.len();
        let mut spans = SpanScores::null(labels.clone(), n, self.ner_max_width);
        for (start, end) in spans.spans().collect::<Vec<_>>() {
            let dim = vectors[start].len();
            let mut mean = vec![0.0; dim];
            for v in &vectors[start..end] {
                for (m, x) in mean.iter_mut().zip(v) {
                    *m += x / (end - start) as f64;
                }
            }
            let row = spans.get_mut(start, end).expect("span in table");
            row[0] = self.ner_threshold;
            for (l, slot) in row.iter_mut().enumerate().skip(1) {
                *slot = self.linear("ner", l, &mean);
            }
        }
        spans
    }

    fn arcs(&self, vectors: &[Vec<f64>]) -> (ArcScores, LabelScores) {
        let n = vectors.len();
        let dim = vectors.first().map_or(0, Vec::len);
        let root = self.root_vector(dim);
        let head_vec = |h: usize| if h == 0 { &root } else { &vectors[h - 1] };
        let mut arcs = ArcScores::zeros(n);
        let labels: Vec<String> = DEP_LABELS.iter().map(|s| s.to_string()).collect();
        let mut label_scores = LabelScores::zeros(labels.clone(), n);
        // label scores are linear in head + dependent, so project each vector once
        let arc_weights: Vec<f64> = (0..dim).map(|k| self.weight("arc", 0, k)).collect();
        let project = |v: &[f64]| -> Vec<f64> { (0..labels.len()).map(|l| self.linear("rel", l, v)).collect() };
        let head_parts: Vec<(f64, Vec<f64>)> = (0..=n)
            .map(|h| (self.linear("arc-head", 0, head_vec(h)), project(head_vec(h))))
            .collect();
        let dep_parts: Vec<Vec<f64>> = vectors.iter().map(|v| project(v)).collect();
        for (h, (head_bias, head_rel)) in head_parts.iter().enumerate() {
            let hv = head_vec(h);
            for (d, dv) in vectors.iter().enumerate() {
                let bilinear: f64 = (0..dim).map(|k| arc_weights[k] * hv[k] * dv[k]).sum();
                arcs.set(h, d, bilinear + head_bias);
                for (l, slot) in label_scores.get_mut(h, d).iter_mut().enumerate() {
                    *slot = head_rel[l] + dep_parts[d][l];
                }
            }
        }
        (arcs, label_scores)
    }
}

impl Scorer for HashScorer {
    fn score(&self, task: Task, _tokens: &[String], vectors: &[Vec<f64>]) -> Result<ScoreSet, ScoreError> {
        Ok(match task {
            Task::Pos => ScoreSet::with_tags(self.tag_scores("pos", POS_TAGS.iter().map(|s| s.to_string()).collect(), vectors)),
            Task::Lem => {
                let mut tags = self.tag_scores("lem", self.lemma_scripts.clone(), vectors);
                for row in &mut tags.scores {
                    row[self.lowercase_script] += 4.0;
                }
                ScoreSet::with_tags(tags)
            }
            Task::Ner => ScoreSet::with_spans(self.spans(vectors)),
            Task::Dep => {
                let (arcs, labels) = self.arcs(vectors);
                ScoreSet::with_arcs(arcs, labels)
            }
            Task::Con | Task::Srl | Task::Amr | Task::Dcr => ScoreSet::default(),
        })
    }
}

const GOLD: &str = include_str!("../../data/gold.json");

/// Scores that decode to known annotations for fixture sentences.
pub struct OracleScorer {
    gold: Vec<Document>,
    index: HashMap<Vec<String>, (usize, usize)>,
    fallback: Box<dyn Scorer>,
}

fn extend_labels(base: &[&str], extra: impl IntoIterator<Item = String>) -> Vec<String> {
    let mut labels: Vec<String> = base.iter().map(|s| s.to_string()).collect();
    for label in extra {
        if !labels.contains(&label) {
            labels.push(label);
        }
    }
    labels
}

fn one_hot(width: usize, at: usize) -> Vec<f64> {
    let mut row = vec![0.0; width];
    row[at] = 1.0;
    row
}

impl OracleScorer {
    /// Oracle over the shipped fixture documents, with [`HashScorer`] as the
    /// fallback.
    pub fn builtin() -> Self {
        let gold: Vec<Document> = serde_json::from_str(GOLD).expect("bundled gold fixture parses");
        OracleScorer::new(gold, Box::new(HashScorer::default())).expect("bundled gold fixture is valid")
    }

    pub fn new(gold: Vec<Document>, fallback: Box<dyn Scorer>) -> Result<Self, DocError> {
        let mut index = HashMap::new();
        for (d, doc) in gold.iter().enumerate() {
            doc.validate()?;
            for (s, tokens) in doc.tok.iter().enumerate() {
                index.entry(tokens.clone()).or_insert((d, s));
            }
        }
        Ok(OracleScorer { gold, index, fallback })
    }

    pub fn documents(&self) -> &[Document] {
        &self.gold
    }

    fn gold_scores(&self, task: Task, doc: &Document, s: usize) -> Option<ScoreSet> {
        let tokens = &doc.tok[s];
        let n = tokens.len();
        Some(match task {
            Task::Pos => {
                let gold = &doc.pos.as_ref()?[s];
                let labels = extend_labels(POS_TAGS, gold.iter().cloned());
                let scores = gold
                    .iter()
                    .map(|t| one_hot(labels.len(), labels.iter().position(|l| l == t).expect("label added")))
                    .collect();
                ScoreSet::with_tags(TagScores { labels, scores })
            }
            Task::Lem => {
                let gold = &doc.lem.as_ref()?[s];
                let scripts: Vec<String> = tokens
                    .iter()
                    .zip(gold)
                    .map(|(form, lemma)| derive_edit_script(form, lemma).to_string())
                    .collect();
                let labels = extend_labels(&[], scripts.iter().cloned());
                let scores = scripts
                    .iter()
                    .map(|t| one_hot(labels.len(), labels.iter().position(|l| l == t).expect("label added")))
                    .collect();
                ScoreSet::with_tags(TagScores { labels, scores })
            }
            Task::Ner => {
                let gold = &doc.ner.as_ref()?[s];
                let labels = extend_labels(NER_LABELS, gold.iter().map(|e| e.label.clone()));
                let width = gold.iter().map(|e| e.end - e.start).max().unwrap_or(1).max(NER_MAX_WIDTH);
                let mut spans = SpanScores::null(labels.clone(), n, width);
                for e in gold {
                    let at = labels.iter().position(|l| *l == e.label).expect("label added");
                    spans
                        .get_mut(e.start, e.end)
                        .expect("gold span within table")
                        .copy_from_slice(&one_hot(labels.len(), at));
                }
                ScoreSet::with_spans(spans)
            }
            Task::Dep => {
                let gold = &doc.dep.as_ref()?[s];
                let labels = extend_labels(DEP_LABELS, gold.iter().map(|a| a.relation.clone()));
                let mut arcs = ArcScores::zeros(n);
                let mut rels = LabelScores::zeros(labels.clone(), n);
                for (d, arc) in gold.iter().enumerate() {
                    let h = (arc.head + 1) as usize;
                    arcs.set(h, d, 1.0);
                    let at = labels.iter().position(|l| *l == arc.relation).expect("label added");
                    rels.get_mut(h, d)[at] = 1.0;
                }
                ScoreSet::with_arcs(arcs, rels)
            }
            Task::Con => ScoreSet::with_structure(Structure::Con(doc.con.as_ref()?[s].clone())),
            Task::Srl => ScoreSet::with_structure(Structure::Srl(doc.srl.as_ref()?[s].clone())),
            Task::Amr => ScoreSet::with_structure(Structure::Amr(doc.amr.as_ref()?[s].clone())),
            Task::Dcr => return None,
        })
    }
}

impl Scorer for OracleScorer {
    fn score(&self, task: Task, tokens: &[String], vectors: &[Vec<f64>]) -> Result<ScoreSet, ScoreError> {
        let gold = self
            .index
            .get(tokens)
            .and_then(|&(d, s)| self.gold_scores(task, &self.gold[d], s));
        match gold {
            Some(scores) => Ok(scores),
            None => self.fallback.score(task, tokens, vectors),
        }
    }

    fn coref(&self, sentences: &[Vec<String>], vectors: &[Vec<Vec<f64>>]) -> Result<Vec<CorefCluster>, ScoreError> {
        match self.gold.iter().find(|d| d.tok == sentences && d.dcr.is_some()) {
            Some(doc) => Ok(doc.dcr.clone().unwrap_or_default()),
            None => self.fallback.coref(sentences, vectors),
        }
    }
}
