//! Placeholder structures for tasks whose decoding happens inside the model
//! (constituency, semantic roles, AMR). They have valid shapes, so documents
//! built from them pass validation; a scorer that supplies a
//! [`Structure`] replaces them.

use std::str::FromStr;

use super::{DecodeError, Structure};
use crate::doc::{AmrTriple, ConNode, AMR_INSTANCE};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum StubTask {
    Con,
    Srl,
    Amr,
}

impl FromStr for StubTask {
    type Err = DecodeError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "con" => Ok(StubTask::Con),
            "srl" => Ok(StubTask::Srl),
            "amr" => Ok(StubTask::Amr),
            other => Err(DecodeError::UnknownTask(other.to_string())),
        }
    }
}

/// - con: `(TOP (S (XX tok) ...))`
/// - srl: no frames
/// - amr: a single node whose concept is the lowercased first token
pub fn stub_structure(tokens: &[String], task: StubTask) -> Result<Structure, DecodeError> {
    if tokens.is_empty() && task != StubTask::Srl {
        return Err(DecodeError::TokenCount { expected: 1, actual: 0 });
    }
    Ok(match task {
        StubTask::Con => {
            let preterminals = tokens
                .iter()
                .map(|t| ConNode::node("XX", vec![ConNode::leaf(t.clone())]))
                .collect();
            Structure::Con(ConNode::node("TOP", vec![ConNode::node("S", preterminals)]))
        }
        StubTask::Srl => Structure::Srl(Vec::new()),
        StubTask::Amr => Structure::Amr(vec![AmrTriple::new("c0", AMR_INSTANCE, tokens[0].to_lowercase())]),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::doc::{con_to_bracketed, Document};

    fn toks(words: &[&str]) -> Vec<String> {
        words.iter().map(|s| s.to_string()).collect()
    }

    #[test]
    fn con_is_flat() {
        let s = stub_structure(&toks(&["a"]), StubTask::Con).unwrap();
        match s {
            Structure::Con(tree) => assert_eq!(con_to_bracketed(&tree), "(TOP (S (XX a)))"),
            other => panic!("{:?}", other),
        }
    }

    #[test]
    fn srl_is_empty() {
        assert_eq!(stub_structure(&toks(&["x", "y"]), StubTask::Srl).unwrap(), Structure::Srl(vec![]));
    }

    #[test]
    fn unknown_task() {
        assert_eq!("pos".parse::<StubTask>(), Err(DecodeError::UnknownTask("pos".into())));
    }

    #[test]
    fn stubs_pass_document_validation() {
        let tok = toks(&["Emory", "NLP", "is", "in", "Atlanta", "."]);
        let mut doc = Document::new(vec![tok.clone()]);
        for task in [StubTask::Con, StubTask::Srl, StubTask::Amr] {
            match stub_structure(&tok, task).unwrap() {
                Structure::Con(t) => doc.con = Some(vec![t]),
                Structure::Srl(f) => doc.srl = Some(vec![f]),
                Structure::Amr(g) => doc.amr = Some(vec![g]),
            }
        }
        doc.validate().unwrap();
        assert_eq!(doc.amr_penman().unwrap().unwrap(), vec!["(c0 / emory)"]);
    }
}
