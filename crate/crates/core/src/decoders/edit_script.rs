//! Lemmatization as tagging: each token is tagged with a small program that
//! rewrites its form into its lemma.

use std::fmt;
use std::str::FromStr;

use thiserror::Error;

use super::DecodeError;

/// Optional lowercasing followed by a prefix edit and a suffix edit.
///
/// Applying the script keeps the lowercased form's characters
/// `prefix_delete..len - suffix_delete`, puts `prefix_insert` in front of them
/// and `suffix_insert` after them.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct EditScript {
    pub lowercase: bool,
    pub prefix_delete: usize,
    pub prefix_insert: String,
    pub suffix_delete: usize,
    pub suffix_insert: String,
}

impl EditScript {
    pub fn identity() -> Self {
        EditScript::default()
    }

    pub fn is_identity(&self) -> bool {
        *self == EditScript::identity()
    }

    fn cost(&self) -> usize {
        self.prefix_delete + self.prefix_insert.chars().count() + self.suffix_delete + self.suffix_insert.chars().count()
    }
}

/// Longest common substring of `a` and `b` as `(start_in_a, start_in_b, len)`.
/// Ties go to the leftmost match in `a`, then in `b`.
fn longest_common_substring(a: &[char], b: &[char]) -> (usize, usize, usize) {
    let mut best = (0, 0, 0);
    let mut prev = vec![0usize; b.len() + 1];
    let mut cur = vec![0usize; b.len() + 1];
    for i in 1..=a.len() {
        for j in 1..=b.len() {
            cur[j] = if a[i - 1] == b[j - 1] { prev[j - 1] + 1 } else { 0 };
            if cur[j] > best.2 {
                best = (i - cur[j], j - cur[j], cur[j]);
            }
        }
        std::mem::swap(&mut prev, &mut cur);
    }
    best
}

fn script_for(form: &[char], lemma: &[char], lowercase: bool) -> EditScript {
    let (fs, ls, len) = longest_common_substring(form, lemma);
    if len == 0 {
        return EditScript {
            lowercase,
            prefix_delete: 0,
            prefix_insert: String::new(),
            suffix_delete: form.len(),
            suffix_insert: lemma.iter().collect(),
        };
    }
    EditScript {
        lowercase,
        prefix_delete: fs,
        prefix_insert: lemma[..ls].iter().collect(),
        suffix_delete: form.len() - fs - len,
        suffix_insert: lemma[ls + len..].iter().collect(),
    }
}

/// Derives the cheapest script (fewest deleted plus inserted characters)
/// mapping `form` to `lemma`, trying the form both as is and lowercased. Ties
/// keep the original casing.
pub fn derive_edit_script(form: &str, lemma: &str) -> EditScript {
    let lemma: Vec<char> = lemma.chars().collect();
    let plain: Vec<char> = form.chars().collect();
    let mut best = script_for(&plain, &lemma, false);

    let lowered = form.to_lowercase();
    if lowered != form {
        let lowered: Vec<char> = lowered.chars().collect();
        let candidate = script_for(&lowered, &lemma, true);
        if candidate.cost() < best.cost() {
            best = candidate;
        }
    }
    best
}

pub fn apply_edit_script(script: &EditScript, form: &str) -> Result<String, DecodeError> {
    let chars: Vec<char> = if script.lowercase {
        form.to_lowercase().chars().collect()
    } else {
        form.chars().collect()
    };
    if script.prefix_delete + script.suffix_delete > chars.len() {
        return Err(DecodeError::InapplicableScript {
            script: script.to_string(),
            form: form.to_string(),
        });
    }
    let mut out = script.prefix_insert.clone();
    out.extend(&chars[script.prefix_delete..chars.len() - script.suffix_delete]);
    out.push_str(&script.suffix_insert);
    Ok(out)
}

fn push_escaped(s: &str, out: &mut String) {
    for c in s.chars() {
        if c == '|' || c == '\\' {
            out.push('\\');
        }
        out.push(c);
    }
}

/// Tag form: `casing|prefix_delete|prefix_insert|suffix_delete|suffix_insert`
/// where casing is `L` (lowercase) or `=`, e.g. `=|0||2|be` for is -> be.
impl fmt::Display for EditScript {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut out = String::new();
        out.push(if self.lowercase { 'L' } else { '=' });
        out.push('|');
        out.push_str(&self.prefix_delete.to_string());
        out.push('|');
        push_escaped(&self.prefix_insert, &mut out);
        out.push('|');
        out.push_str(&self.suffix_delete.to_string());
        out.push('|');
        push_escaped(&self.suffix_insert, &mut out);
        f.write_str(&out)
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
#[error("malformed edit script tag {0:?}")]
pub struct ScriptParseError(pub String);

impl FromStr for EditScript {
    type Err = ScriptParseError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let err = || ScriptParseError(s.to_string());
        let mut fields = vec![String::new()];
        let mut chars = s.chars();
        while let Some(c) = chars.next() {
            match c {
                '\\' => fields.last_mut().unwrap().push(chars.next().ok_or_else(err)?),
                '|' => fields.push(String::new()),
                c => fields.last_mut().unwrap().push(c),
            }
        }
        let [casing, pdel, pins, sdel, sins]: [String; 5] = fields.try_into().map_err(|_| err())?;
        let lowercase = match casing.as_str() {
            "L" => true,
            "=" => false,
            _ => return Err(err()),
        };
        Ok(EditScript {
            lowercase,
            prefix_delete: pdel.parse().map_err(|_| err())?,
            prefix_insert: pins,
            suffix_delete: sdel.parse().map_err(|_| err())?,
            suffix_insert: sins,
        })
    }
}
