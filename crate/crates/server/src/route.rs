//! Splitting a batch result back into per-request documents.

use std::ops::Range;

use mtnlp_core::Document;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum RouteError {
    #[error("batch result has {actual} sentences, request needs {range:?}")]
    OutOfRange { range: Range<usize>, actual: usize },

    #[error("batch result does not hold this request's sentences at {0:?}")]
    Mismatch(Range<usize>),

    #[error("batch failed: {0}")]
    Batch(String),
}

/// One entry per member: the member's slice of `result`, checked against the
/// sentences it submitted. A bad range fails only the member it belongs to.
pub fn route_responses<'a>(
    result: &Result<Document, String>,
    members: impl IntoIterator<Item = (Range<usize>, &'a [Vec<String>])>,
) -> Vec<Result<Document, RouteError>> {
    members
        .into_iter()
        .map(|(range, submitted)| {
            let doc = result.as_ref().map_err(|e| RouteError::Batch(e.clone()))?;
            let slice = doc.slice(range.clone()).ok_or_else(|| RouteError::OutOfRange {
                range: range.clone(),
                actual: doc.tok.len(),
            })?;
            if slice.tok != submitted {
                return Err(RouteError::Mismatch(range));
            }
            Ok(slice)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sentences(prefix: &str, n: usize) -> Vec<Vec<String>> {
        (0..n).map(|i| vec![format!("{}{}", prefix, i), "x".to_string()]).collect()
    }

    fn batch(parts: &[&[Vec<String>]]) -> Document {
        let tok: Vec<Vec<String>> = parts.iter().flat_map(|p| p.iter().cloned()).collect();
        let mut doc = Document::new(tok.clone());
        doc.pos = Some(tok.iter().map(|s| s.iter().map(|t| t.to_uppercase()).collect()).collect());
        doc
    }

    #[test]
    fn single_member_passthrough() {
        let a = sentences("a", 3);
        let doc = batch(&[&a]);
        let out = route_responses(&Ok(doc.clone()), [(0..3, a.as_slice())]);
        assert_eq!(out, vec![Ok(doc)]);
    }

    #[test]
    fn two_members_split() {
        let (a, b) = (sentences("a", 2), sentences("b", 3));
        let out = route_responses(&Ok(batch(&[&a, &b])), [(0..2, a.as_slice()), (2..5, b.as_slice())]);
        let a_doc = out[0].as_ref().unwrap();
        let b_doc = out[1].as_ref().unwrap();
        assert_eq!((a_doc.tok.len(), b_doc.tok.len()), (2, 3));
        assert_eq!(b_doc.pos.as_ref().unwrap()[0][0], "B0");
    }

    #[test]
    fn bad_range_fails_alone() {
        let (a, b) = (sentences("a", 2), sentences("b", 3));
        let short = batch(&[&a, &b[..1]]);
        let out = route_responses(&Ok(short), [(0..2, a.as_slice()), (2..5, b.as_slice())]);
        assert!(out[0].is_ok());
        assert_eq!(out[1], Err(RouteError::OutOfRange { range: 2..5, actual: 3 }));
    }

    #[test]
    fn misrouted_content_is_caught() {
        let (a, b) = (sentences("a", 2), sentences("b", 2));
        let out = route_responses(&Ok(batch(&[&b, &a])), [(0..2, a.as_slice()), (2..4, b.as_slice())]);
        assert!(matches!(out[0], Err(RouteError::Mismatch(_))));
        assert!(matches!(out[1], Err(RouteError::Mismatch(_))));
    }

    #[test]
    fn batch_error_reaches_everyone() {
        let a = sentences("a", 1);
        let out = route_responses(&Err("boom".into()), [(0..1, a.as_slice())]);
        assert_eq!(out, vec![Err(RouteError::Batch("boom".into()))]);
    }
}
