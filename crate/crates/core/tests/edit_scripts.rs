use std::collections::HashSet;

use mtnlp_core::decoders::{apply_edit_script, derive_edit_script, EditScript};

const LEXICON: &str = include_str!("data/lemma_lexicon.tsv");

fn lexicon() -> Vec<(&'static str, &'static str)> {
    LEXICON
        .lines()
        .filter(|l| !l.starts_with('#'))
        .map(|l| l.split_once('\t').expect("form<TAB>lemma"))
        .collect()
}

/// Returns the number of pairs checked.
pub fn lexicon_round_trip() -> usize {
    let pairs = lexicon();
    assert!(pairs.len() >= 500, "{} pairs", pairs.len());
    assert!(pairs.contains(&("is", "be")));
    assert!(pairs.contains(&("Atlanta", "atlanta")));
    let failures: Vec<_> = pairs
        .iter()
        .filter(|(form, lemma)| apply_edit_script(&derive_edit_script(form, lemma), form).as_deref() != Ok(*lemma))
        .collect();
    assert!(failures.is_empty(), "{} of {} failed: {:?}", failures.len(), pairs.len(), failures);
    pairs.len()
}

#[test]
fn whole_lexicon_round_trips() {
    lexicon_round_trip();
}

#[test]
fn tags_round_trip() {
    for (form, lemma) in lexicon() {
        let script = derive_edit_script(form, lemma);
        let tag = script.to_string();
        assert_eq!(tag.parse::<EditScript>().unwrap(), script, "{:?}", tag);
    }
}

#[test]
fn regular_inflection_shares_scripts() {
    let pairs = lexicon();
    let scripts: HashSet<EditScript> = pairs.iter().map(|(f, l)| derive_edit_script(f, l)).collect();
    // the inventory is what makes lemmatization a tagging problem
    assert!(scripts.len() * 3 < pairs.len(), "{} scripts for {} pairs", scripts.len(), pairs.len());
    assert_eq!(derive_edit_script("walked", "walk"), derive_edit_script("talked", "talk"));
    assert_eq!(derive_edit_script("Walking", "walk"), derive_edit_script("Talking", "talk"));
}

#[test]
fn reference_scripts() {
    assert_eq!(derive_edit_script("is", "be").to_string(), "=|0||2|be");
    assert_eq!(derive_edit_script("NLP", "nlp").to_string(), "L|0||0|");
    assert_eq!(derive_edit_script("Atlanta", "atlanta").to_string(), "L|0||0|");
    assert!(derive_edit_script("in", "in").is_identity());
}

#[test]
fn scripts_generalize_to_unseen_forms() {
    let script = derive_edit_script("walked", "walk");
    assert_eq!(apply_edit_script(&script, "jumped").unwrap(), "jump");
    let script = derive_edit_script("studies", "study");
    assert_eq!(apply_edit_script(&script, "carries").unwrap(), "carry");
    // deleting more than the form holds is an error, not a panic
    assert!(apply_edit_script(&script, "ie").is_err());
}
