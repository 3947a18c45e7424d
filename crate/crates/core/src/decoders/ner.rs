use std::cmp::Ordering;

use super::{argmax, DecodeError, SpanScores};
use crate::doc::EntitySpan;

/// Flat entity decoding.
///
/// A span is a candidate when its best non-null label outscores the null label
/// (index 0). Candidates are visited by descending score, ties by start and
/// then end, and kept when they do not overlap anything kept before. The result
/// is ordered by start.
pub fn decode_ner(scores: &SpanScores, tokens: &[String]) -> Result<Vec<EntitySpan>, DecodeError> {
    scores.validate(tokens.len())?;

    let mut candidates: Vec<(f64, usize, usize, usize)> = scores
        .spans()
        .filter_map(|(start, end)| {
            let row = scores.get(start, end)?;
            let label = 1 + argmax(&row[1..])?;
            (row[label] > row[0]).then_some((row[label], start, end, label))
        })
        .collect();
    candidates.sort_by(|a, b| match b.0.total_cmp(&a.0) {
        Ordering::Equal => (a.1, a.2).cmp(&(b.1, b.2)),
        other => other,
    });

    let mut taken = vec![false; tokens.len()];
    let mut accepted = Vec::new();
    for (_, start, end, label) in candidates {
        if taken[start..end].iter().any(|&t| t) {
            continue;
        }
        taken[start..end].iter_mut().for_each(|t| *t = true);
        accepted.push(EntitySpan::from_tokens(scores.labels[label].clone(), start, end, tokens));
    }
    accepted.sort_by_key(|s| (s.start, s.end));
    Ok(accepted)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tokens(words: &[&str]) -> Vec<String> {
        words.iter().map(|s| s.to_string()).collect()
    }

    fn labels() -> Vec<String> {
        ["O", "ORG", "GPE"].iter().map(|s| s.to_string()).collect()
    }

    #[test]
    fn all_null_is_empty() {
        let toks = tokens(&["a", "b", "c"]);
        let scores = SpanScores::null(labels(), 3, 3);
        assert!(decode_ner(&scores, &toks).unwrap().is_empty());
    }

    #[test]
    fn overlapping_loses_to_higher_score() {
        let toks = tokens(&["Emory", "NLP", "is", "in", "Atlanta"]);
        let mut scores = SpanScores::null(labels(), 5, 3);
        scores.get_mut(0, 2).unwrap().copy_from_slice(&[0.0, 3.0, 0.0]);
        scores.get_mut(1, 3).unwrap().copy_from_slice(&[0.0, 2.0, 0.0]);
        scores.get_mut(4, 5).unwrap().copy_from_slice(&[0.0, 0.0, 2.5]);
        let spans = decode_ner(&scores, &toks).unwrap();
        let got: Vec<_> = spans.iter().map(|s| (s.label.as_str(), s.start, s.end, s.form.as_str())).collect();
        assert_eq!(got, vec![("ORG", 0, 2, "Emory NLP"), ("GPE", 4, 5, "Atlanta")]);
    }

    #[test]
    fn equal_scores_prefer_leftmost() {
        let toks = tokens(&["a", "b", "c"]);
        let mut scores = SpanScores::null(labels(), 3, 2);
        scores.get_mut(0, 2).unwrap().copy_from_slice(&[0.0, 1.0, 0.0]);
        scores.get_mut(1, 3).unwrap().copy_from_slice(&[0.0, 1.0, 0.0]);
        let spans = decode_ner(&scores, &toks).unwrap();
        assert_eq!((spans[0].start, spans[0].end), (0, 2));
        assert_eq!(spans.len(), 1);
    }

    #[test]
    fn wrong_length_rejected() {
        let scores = SpanScores::null(labels(), 2, 2);
        assert!(decode_ner(&scores, &tokens(&["a"])).is_err());
    }
}
