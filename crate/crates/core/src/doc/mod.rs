//! The annotation container returned by every entry point, and its JSON wire
//! format.
//!
//! A [`Document`] always carries the `tok` rows. Every other key is optional
//! and, when present, holds one entry per sentence (`dcr` is the exception: it
//! is document-level). Emitted keys follow a fixed order so that identical
//! documents serialize to identical bytes:
//!
//! ```text
//! tok, lem, pos, ner, srl, dep, sdp, con, amr, dcr
//! ```
//!
//! Spans are written as `[label, start, end, form]` with `end` exclusive,
//! dependency arcs as `[head, relation]` with `-1` for the root, and
//! constituency trees as nested `[label, [children...]]` lists whose leaves are
//! plain strings.

mod bracketed;
mod penman;

use std::fmt;
use std::ops::Range;

use serde::de::{self, Deserializer};
use serde::ser::{SerializeTuple, Serializer};
use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use bracketed::{bracketed_to_con, con_to_bracketed, BracketError};
pub use penman::{amr_to_penman, penman_to_amr, PenmanError};

#[derive(Debug, Error)]
pub enum DocError {
    #[error("invalid `{task}` annotation{}: {reason}", sentence_suffix(*.sentence))]
    Invalid {
        task: &'static str,
        sentence: Option<usize>,
        reason: String,
    },

    #[error("malformed document JSON: {0}")]
    Json(#[from] serde_json::Error),
}

fn sentence_suffix(sentence: Option<usize>) -> String {
    match sentence {
        Some(idx) => format!(" in sentence {}", idx),
        None => String::new(),
    }
}

fn invalid(task: &'static str, sentence: Option<usize>, reason: impl Into<String>) -> DocError {
    DocError::Invalid {
        task,
        sentence,
        reason: reason.into(),
    }
}

/// A labeled token span; used for named entities and semantic roles.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct EntitySpan {
    pub label: String,
    pub start: usize,
    /// Exclusive.
    pub end: usize,
    /// Tokens `start..end` joined by single spaces.
    pub form: String,
}

impl EntitySpan {
    /// Builds a span and computes its surface form from the sentence.
    pub fn from_tokens(label: impl Into<String>, start: usize, end: usize, tokens: &[String]) -> Self {
        EntitySpan {
            label: label.into(),
            start,
            end,
            form: tokens[start..end].join(" "),
        }
    }

    pub fn overlaps(&self, other: &EntitySpan) -> bool {
        self.start < other.end && other.start < self.end
    }

    fn check(&self, tokens: &[String]) -> Result<(), String> {
        if self.start >= self.end || self.end > tokens.len() {
            return Err(format!(
                "span [{}, {}) out of bounds for {} tokens",
                self.start,
                self.end,
                tokens.len()
            ));
        }
        let expected = tokens[self.start..self.end].join(" ");
        if self.form != expected {
            return Err(format!(
                "span [{}, {}) has form {:?}, tokens spell {:?}",
                self.start, self.end, self.form, expected
            ));
        }
        Ok(())
    }
}

impl Serialize for EntitySpan {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        let mut tup = serializer.serialize_tuple(4)?;
        tup.serialize_element(&self.label)?;
        tup.serialize_element(&self.start)?;
        tup.serialize_element(&self.end)?;
        tup.serialize_element(&self.form)?;
        tup.end()
    }
}

impl<'de> Deserialize<'de> for EntitySpan {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let (label, start, end, form) = <(String, usize, usize, String)>::deserialize(deserializer)?;
        Ok(EntitySpan {
            label,
            start,
            end,
            form,
        })
    }
}

/// Head of a token and the relation to it. `head == -1` is the artificial root.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct DepArc {
    pub head: i64,
    pub relation: String,
}

impl DepArc {
    pub fn new(head: i64, relation: impl Into<String>) -> Self {
        DepArc {
            head,
            relation: relation.into(),
        }
    }

    fn check(&self, own: usize, len: usize) -> Result<(), String> {
        if self.head < -1 || self.head >= len as i64 {
            return Err(format!("token {} has head {} outside [-1, {})", own, self.head, len));
        }
        if self.head == own as i64 {
            return Err(format!("token {} is its own head", own));
        }
        Ok(())
    }
}

impl Serialize for DepArc {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        (self.head, &self.relation).serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for DepArc {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let (head, relation) = <(i64, String)>::deserialize(deserializer)?;
        Ok(DepArc { head, relation })
    }
}

/// A constituency tree node.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum ConNode {
    NonTerminal { label: String, children: Vec<ConNode> },
    Terminal(String),
}

impl ConNode {
    pub fn node(label: impl Into<String>, children: Vec<ConNode>) -> Self {
        ConNode::NonTerminal {
            label: label.into(),
            children,
        }
    }

    pub fn leaf(form: impl Into<String>) -> Self {
        ConNode::Terminal(form.into())
    }

    /// Terminal forms, left to right.
    pub fn leaves(&self) -> Vec<&str> {
        let mut out = Vec::new();
        self.collect_leaves(&mut out);
        out
    }

    fn collect_leaves<'a>(&'a self, out: &mut Vec<&'a str>) {
        match self {
            ConNode::Terminal(form) => out.push(form),
            ConNode::NonTerminal { children, .. } => {
                for child in children {
                    child.collect_leaves(out);
                }
            }
        }
    }

    fn check_shape(&self) -> Result<(), String> {
        match self {
            ConNode::Terminal(form) if form.is_empty() => Err("empty terminal".to_string()),
            ConNode::Terminal(_) => Ok(()),
            ConNode::NonTerminal { label, children } => {
                if label.is_empty() {
                    return Err("empty non-terminal label".to_string());
                }
                if children.is_empty() {
                    return Err(format!("non-terminal {} has no children", label));
                }
                children.iter().try_for_each(ConNode::check_shape)
            }
        }
    }
}

impl Serialize for ConNode {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        match self {
            ConNode::Terminal(form) => serializer.serialize_str(form),
            ConNode::NonTerminal { label, children } => (label, children).serialize(serializer),
        }
    }
}

impl<'de> Deserialize<'de> for ConNode {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Leaf(String),
            Node(String, Vec<ConNode>),
        }

        match Raw::deserialize(deserializer) {
            Ok(Raw::Leaf(form)) => Ok(ConNode::Terminal(form)),
            Ok(Raw::Node(label, children)) => Ok(ConNode::NonTerminal { label, children }),
            Err(_) => Err(de::Error::custom(
                "constituent must be a string or a [label, [children]] pair",
            )),
        }
    }
}

/// One AMR triple. Concepts are attached through the `instance` relation.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct AmrTriple {
    pub source: String,
    pub relation: String,
    pub target: String,
}

pub const AMR_INSTANCE: &str = "instance";

impl AmrTriple {
    pub fn new(source: impl Into<String>, relation: impl Into<String>, target: impl Into<String>) -> Self {
        AmrTriple {
            source: source.into(),
            relation: relation.into(),
            target: target.into(),
        }
    }

    pub fn instance(variable: impl Into<String>, concept: impl Into<String>) -> Self {
        AmrTriple::new(variable, AMR_INSTANCE, concept)
    }

    pub fn is_instance(&self) -> bool {
        self.relation == AMR_INSTANCE
    }
}

impl Serialize for AmrTriple {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        (&self.source, &self.relation, &self.target).serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for AmrTriple {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let (source, relation, target) = <(String, String, String)>::deserialize(deserializer)?;
        Ok(AmrTriple {
            source,
            relation,
            target,
        })
    }
}

fn check_amr(triples: &[AmrTriple]) -> Result<(), String> {
    use std::collections::HashMap;

    let mut instances: HashMap<&str, usize> = HashMap::new();
    for t in triples.iter().filter(|t| t.is_instance()) {
        *instances.entry(t.source.as_str()).or_default() += 1;
    }
    if let Some((var, _)) = instances.iter().find(|(_, &count)| count > 1) {
        return Err(format!("variable {} has more than one instance triple", var));
    }
    match triples.iter().find(|t| !instances.contains_key(t.source.as_str())) {
        Some(t) => Err(format!("variable {} has no instance triple", t.source)),
        None => Ok(()),
    }
}

/// A coreference mention: sentence index, token span (end exclusive) and text.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct CorefMention {
    pub sentence: usize,
    pub start: usize,
    pub end: usize,
    pub text: String,
}

impl CorefMention {
    pub fn from_tokens(sentence: usize, start: usize, end: usize, tok: &[Vec<String>]) -> Self {
        CorefMention {
            sentence,
            start,
            end,
            text: tok[sentence][start..end].join(" "),
        }
    }
}

impl Serialize for CorefMention {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        (self.sentence, self.start, self.end, &self.text).serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for CorefMention {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let (sentence, start, end, text) = <(usize, usize, usize, String)>::deserialize(deserializer)?;
        Ok(CorefMention {
            sentence,
            start,
            end,
            text,
        })
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct CorefCluster {
    pub mentions: Vec<CorefMention>,
}

/// One semantic-role frame: the predicate (role `PRED`) and its arguments, in
/// decoder order.
pub type SrlFrame = Vec<EntitySpan>;

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Document {
    pub tok: Vec<Vec<String>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lem: Option<Vec<Vec<String>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub pos: Option<Vec<Vec<String>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ner: Option<Vec<Vec<EntitySpan>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub srl: Option<Vec<Vec<SrlFrame>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dep: Option<Vec<Vec<DepArc>>>,
    /// Secondary dependencies: per token, a list of extra arcs.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sdp: Option<Vec<Vec<Vec<DepArc>>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub con: Option<Vec<ConNode>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub amr: Option<Vec<Vec<AmrTriple>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dcr: Option<Vec<CorefCluster>>,
}

impl Document {
    pub fn new(tok: Vec<Vec<String>>) -> Self {
        Document {
            tok,
            ..Default::default()
        }
    }

    pub fn len(&self) -> usize {
        self.tok.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tok.is_empty()
    }

    /// Checks every structural invariant, naming the first offending task and
    /// sentence.
    pub fn validate(&self) -> Result<(), DocError> {
        let n = self.tok.len();

        fn rows<T>(task: &'static str, values: &Option<Vec<T>>, n: usize) -> Result<(), DocError> {
            match values {
                Some(rows) if rows.len() != n => Err(invalid(
                    task,
                    None,
                    format!("{} sentences, but `tok` has {}", rows.len(), n),
                )),
                _ => Ok(()),
            }
        }

        fn per_token<T>(task: &'static str, values: &Option<Vec<Vec<T>>>, tok: &[Vec<String>]) -> Result<(), DocError> {
            rows(task, values, tok.len())?;
            for (idx, (row, tokens)) in values.iter().flatten().zip(tok).enumerate() {
                if row.len() != tokens.len() {
                    return Err(invalid(
                        task,
                        Some(idx),
                        format!("{} values for {} tokens", row.len(), tokens.len()),
                    ));
                }
            }
            Ok(())
        }

        per_token("lem", &self.lem, &self.tok)?;
        per_token("pos", &self.pos, &self.tok)?;
        per_token("dep", &self.dep, &self.tok)?;
        per_token("sdp", &self.sdp, &self.tok)?;
        rows("ner", &self.ner, n)?;
        rows("srl", &self.srl, n)?;
        rows("con", &self.con, n)?;
        rows("amr", &self.amr, n)?;

        for (idx, (spans, tokens)) in self.ner.iter().flatten().zip(&self.tok).enumerate() {
            for span in spans {
                span.check(tokens).map_err(|r| invalid("ner", Some(idx), r))?;
            }
        }
        for (idx, (frames, tokens)) in self.srl.iter().flatten().zip(&self.tok).enumerate() {
            for span in frames.iter().flatten() {
                span.check(tokens).map_err(|r| invalid("srl", Some(idx), r))?;
            }
        }
        for (idx, (arcs, tokens)) in self.dep.iter().flatten().zip(&self.tok).enumerate() {
            for (own, arc) in arcs.iter().enumerate() {
                arc.check(own, tokens.len()).map_err(|r| invalid("dep", Some(idx), r))?;
            }
        }
        for (idx, (extra, tokens)) in self.sdp.iter().flatten().zip(&self.tok).enumerate() {
            for (own, arc) in extra.iter().enumerate().flat_map(|(own, arcs)| arcs.iter().map(move |a| (own, a))) {
                arc.check(own, tokens.len()).map_err(|r| invalid("sdp", Some(idx), r))?;
            }
        }
        for (idx, (tree, tokens)) in self.con.iter().flatten().zip(&self.tok).enumerate() {
            tree.check_shape().map_err(|r| invalid("con", Some(idx), r))?;
            let leaves = tree.leaves();
            if leaves.len() != tokens.len() || leaves.iter().zip(tokens).any(|(l, t)| *l != t.as_str()) {
                return Err(invalid("con", Some(idx), "tree leaves do not spell the sentence"));
            }
        }
        for (idx, triples) in self.amr.iter().flatten().enumerate() {
            check_amr(triples).map_err(|r| invalid("amr", Some(idx), r))?;
        }
        for (cluster_idx, cluster) in self.dcr.iter().flatten().enumerate() {
            for m in &cluster.mentions {
                let tokens = self.tok.get(m.sentence).ok_or_else(|| {
                    invalid(
                        "dcr",
                        None,
                        format!("cluster {} refers to missing sentence {}", cluster_idx, m.sentence),
                    )
                })?;
                let span = EntitySpan {
                    label: String::new(),
                    start: m.start,
                    end: m.end,
                    form: m.text.clone(),
                };
                span.check(tokens).map_err(|r| invalid("dcr", Some(m.sentence), r))?;
            }
        }
        Ok(())
    }

    /// Serializes to compact JSON after validating.
    pub fn to_json(&self) -> Result<String, DocError> {
        self.validate()?;
        Ok(serde_json::to_string(self)?)
    }

    pub fn to_json_pretty(&self) -> Result<String, DocError> {
        self.validate()?;
        Ok(serde_json::to_string_pretty(self)?)
    }

    /// Parses and validates a document.
    pub fn from_json(text: &str) -> Result<Self, DocError> {
        let doc: Document = serde_json::from_str(text)?;
        doc.validate()?;
        Ok(doc)
    }

    /// Sentences `range` as a stand-alone document. Coreference mentions outside
    /// the range are dropped and the rest are re-indexed; clusters left empty
    /// are removed.
    pub fn slice(&self, range: Range<usize>) -> Option<Document> {
        if range.start > range.end || range.end > self.tok.len() {
            return None;
        }
        fn cut<T: Clone>(rows: &Option<Vec<T>>, range: &Range<usize>) -> Option<Vec<T>> {
            rows.as_ref().map(|rows| rows[range.clone()].to_vec())
        }
        let dcr = self.dcr.as_ref().map(|clusters| {
            clusters
                .iter()
                .map(|c| CorefCluster {
                    mentions: c
                        .mentions
                        .iter()
                        .filter(|m| range.contains(&m.sentence))
                        .map(|m| CorefMention {
                            sentence: m.sentence - range.start,
                            ..m.clone()
                        })
                        .collect(),
                })
                .filter(|c| !c.mentions.is_empty())
                .collect()
        });
        Some(Document {
            tok: self.tok[range.clone()].to_vec(),
            lem: cut(&self.lem, &range),
            pos: cut(&self.pos, &range),
            ner: cut(&self.ner, &range),
            srl: cut(&self.srl, &range),
            dep: cut(&self.dep, &range),
            sdp: cut(&self.sdp, &range),
            con: cut(&self.con, &range),
            amr: cut(&self.amr, &range),
            dcr,
        })
    }

    /// Bracketed rendering of every constituency tree, one per sentence.
    pub fn con_bracketed(&self) -> Option<Vec<String>> {
        self.con.as_ref().map(|trees| trees.iter().map(con_to_bracketed).collect())
    }

    /// Penman rendering of every AMR graph, one per sentence.
    pub fn amr_penman(&self) -> Option<Result<Vec<String>, PenmanError>> {
        self.amr
            .as_ref()
            .map(|graphs| graphs.iter().map(|g| amr_to_penman(g)).collect())
    }
}

impl fmt::Display for Document {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match serde_json::to_string_pretty(self) {
            Ok(s) => f.write_str(&s),
            Err(_) => Err(fmt::Error),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn toks(words: &[&str]) -> Vec<String> {
        words.iter().map(|w| w.to_string()).collect()
    }

    fn emory() -> Vec<String> {
        toks(&["Emory", "NLP", "is", "in", "Atlanta"])
    }

    #[test]
    fn ner_serializes_as_four_element_arrays() {
        let tok = emory();
        let mut doc = Document::new(vec![tok.clone()]);
        doc.ner = Some(vec![vec![
            EntitySpan::from_tokens("ORG", 0, 2, &tok),
            EntitySpan::from_tokens("GPE", 4, 5, &tok),
        ]]);
        let json = doc.to_json().unwrap();
        assert!(json.contains(r#""ner":[[["ORG",0,2,"Emory NLP"],["GPE",4,5,"Atlanta"]]]"#), "{}", json);
    }

    #[test]
    fn empty_document() {
        assert_eq!(Document::default().to_json().unwrap(), r#"{"tok":[]}"#);
        let doc = Document::from_json(r#"{"tok": [[]]}"#).unwrap();
        assert_eq!(doc.tok, vec![Vec::<String>::new()]);
    }

    #[test]
    fn key_order_is_fixed() {
        let tok = emory();
        let mut doc = Document::new(vec![tok.clone()]);
        doc.amr = Some(vec![vec![AmrTriple::new("c0", "instance", "x")]]);
        doc.dep = Some(vec![(0..5).map(|i| DepArc::new(if i == 3 { -1 } else { 3 }, "x")).collect()]);
        doc.lem = Some(vec![tok.clone()]);
        let json = doc.to_json().unwrap();
        let order: Vec<usize> = ["\"tok\"", "\"lem\"", "\"dep\"", "\"amr\""]
            .iter()
            .map(|k| json.find(k).unwrap())
            .collect();
        assert!(order.windows(2).all(|w| w[0] < w[1]), "{}", json);
    }

    #[test]
    fn rejects_unknown_key() {
        let err = Document::from_json(r#"{"tok": [], "xyz": []}"#).unwrap_err();
        assert!(matches!(err, DocError::Json(_)));
    }

    #[test]
    fn rejects_span_arity() {
        let err = Document::from_json(r#"{"tok": [["a"]], "ner": [[["ORG", 0, 1]]]}"#).unwrap_err();
        assert!(matches!(err, DocError::Json(_)));
    }

    #[test]
    fn missing_tok_rejected() {
        assert!(Document::from_json(r#"{"pos": []}"#).is_err());
    }

    #[test]
    fn diagnostic_names_sentence_and_task() {
        let mut doc = Document::new(vec![toks(&["a"]), toks(&["b", "c"])]);
        doc.pos = Some(vec![toks(&["X"]), toks(&["X"])]);
        let err = doc.to_json().unwrap_err().to_string();
        assert!(err.contains("`pos`") && err.contains("sentence 1"), "{}", err);
    }

    #[test]
    fn bad_span_form_rejected() {
        let mut doc = Document::new(vec![emory()]);
        doc.ner = Some(vec![vec![EntitySpan {
            label: "ORG".into(),
            start: 0,
            end: 2,
            form: "Emory".into(),
        }]]);
        assert!(doc.validate().is_err());
    }

    #[test]
    fn dep_self_loop_and_range() {
        let mut doc = Document::new(vec![toks(&["a", "b"])]);
        doc.dep = Some(vec![vec![DepArc::new(0, "x"), DepArc::new(-1, "root")]]);
        assert!(doc.validate().is_err());
        doc.dep = Some(vec![vec![DepArc::new(2, "x"), DepArc::new(-1, "root")]]);
        assert!(doc.validate().is_err());
        doc.dep = Some(vec![vec![DepArc::new(1, "x"), DepArc::new(-1, "root")]]);
        assert!(doc.validate().is_ok());
    }

    #[test]
    fn con_leaves_must_spell_sentence() {
        let mut doc = Document::new(vec![toks(&["a", "b"])]);
        doc.con = Some(vec![ConNode::node("X", vec![ConNode::leaf("a")])]);
        assert!(doc.validate().is_err());
        doc.con = Some(vec![ConNode::node("X", vec![])]);
        assert!(doc.validate().is_err());
    }

    #[test]
    fn amr_instance_rules() {
        let mut doc = Document::new(vec![toks(&["a"])]);
        doc.amr = Some(vec![vec![AmrTriple::new("c0", "ARG0", "c1"), AmrTriple::new("c1", "instance", "x")]]);
        assert!(doc.validate().is_err());
        doc.amr = Some(vec![vec![
            AmrTriple::new("c0", "instance", "x"),
            AmrTriple::new("c0", "instance", "y"),
        ]]);
        assert!(doc.validate().is_err());
    }

    #[test]
    fn coref_text_checked() {
        let tok = vec![emory(), toks(&["It", "is", "founded", "in", "2014"])];
        let mut doc = Document::new(tok.clone());
        doc.dcr = Some(vec![CorefCluster {
            mentions: vec![
                CorefMention::from_tokens(0, 0, 2, &tok),
                CorefMention::from_tokens(1, 0, 1, &tok),
            ],
        }]);
        let json = doc.to_json().unwrap();
        assert!(json.ends_with(r#""dcr":[[[0,0,2,"Emory NLP"],[1,0,1,"It"]]]}"#), "{}", json);
        doc.dcr.as_mut().unwrap()[0].mentions[1].text = "it".into();
        assert!(doc.validate().is_err());
    }

    #[test]
    fn slice_reindexes_coref() {
        let tok = vec![emory(), toks(&["It", "is"])];
        let mut doc = Document::new(tok.clone());
        doc.pos = Some(vec![toks(&["A", "B", "C", "D", "E"]), toks(&["F", "G"])]);
        doc.dcr = Some(vec![CorefCluster {
            mentions: vec![
                CorefMention::from_tokens(0, 0, 2, &tok),
                CorefMention::from_tokens(1, 0, 1, &tok),
            ],
        }]);
        let second = doc.slice(1..2).unwrap();
        assert_eq!(second.tok, vec![toks(&["It", "is"])]);
        assert_eq!(second.pos, Some(vec![toks(&["F", "G"])]));
        assert_eq!(second.dcr.unwrap()[0].mentions[0].sentence, 0);
        assert!(doc.slice(1..3).is_none());
    }
}
