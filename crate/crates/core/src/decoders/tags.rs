use super::{argmax, apply_edit_script, DecodeError, EditScript, TagScores};

/// Per-token argmax over the tag inventory.
pub fn decode_tags(scores: &TagScores) -> Result<Vec<String>, DecodeError> {
    scores.validate(scores.scores.len())?;
    Ok(scores
        .scores
        .iter()
        .map(|row| scores.labels[argmax(row).expect("non-empty tag set")].clone())
        .collect())
}

/// Decodes edit-script tags and applies them to `tokens`.
///
/// Each token takes the best-scoring script that parses and fits its form;
/// scripts that would delete more characters than the form has are skipped.
pub fn decode_lemmas(tokens: &[String], scores: &TagScores) -> Result<Vec<String>, DecodeError> {
    scores.validate(tokens.len())?;
    let scripts: Vec<Option<EditScript>> = scores.labels.iter().map(|l| l.parse().ok()).collect();

    tokens
        .iter()
        .zip(&scores.scores)
        .map(|(form, row)| {
            let mut ranked: Vec<usize> = (0..row.len()).collect();
            // stable: equal scores keep the lower tag index first
            ranked.sort_by(|&a, &b| row[b].total_cmp(&row[a]));
            ranked
                .into_iter()
                .filter_map(|i| scripts[i].as_ref())
                .find_map(|script| apply_edit_script(script, form).ok())
                .ok_or_else(|| DecodeError::InapplicableScript {
                    script: scores.labels[argmax(row).expect("non-empty tag set")].clone(),
                    form: form.clone(),
                })
        })
        .collect()
}
