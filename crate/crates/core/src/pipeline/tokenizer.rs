//! Rule-based tokenization and sentence segmentation for raw text.

use std::collections::HashSet;

const ABBREVIATIONS: &str = include_str!("../../data/abbreviations.txt");

const CLOSERS: &[char] = &['"', '\'', ')', ']', '}', '»', '”', '’'];

#[derive(Clone, Debug)]
pub struct Tokenizer {
    abbreviations: HashSet<String>,
}

impl Default for Tokenizer {
    fn default() -> Self {
        Tokenizer::new(std::iter::empty::<&str>())
    }
}

fn is_punct(c: char) -> bool {
    !c.is_alphanumeric()
}

fn is_terminator(token: &str) -> bool {
    !token.is_empty() && token.chars().all(|c| matches!(c, '.' | '!' | '?'))
}

fn is_closer(token: &str) -> bool {
    !token.is_empty() && token.chars().all(|c| CLOSERS.contains(&c))
}

/// Splits `chars` into runs of identical characters.
fn runs(chars: &[char]) -> Vec<String> {
    let mut out: Vec<String> = Vec::new();
    let mut prev = None;
    for &c in chars {
        if prev == Some(c) {
            out.last_mut().expect("run started").push(c);
        } else {
            out.push(c.to_string());
        }
        prev = Some(c);
    }
    out
}

impl Tokenizer {
    /// The shipped abbreviation list plus `extra` entries (e.g. `"Calif."`).
    pub fn new<I, S>(extra: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: AsRef<str>,
    {
        let mut abbreviations: HashSet<String> = ABBREVIATIONS
            .lines()
            .map(str::trim)
            .filter(|l| !l.is_empty() && !l.starts_with('#'))
            .map(str::to_lowercase)
            .collect();
        abbreviations.extend(extra.into_iter().map(|s| s.as_ref().trim().to_lowercase()));
        Tokenizer { abbreviations }
    }

    fn is_abbreviation(&self, word: &[char]) -> bool {
        if word.last() != Some(&'.') {
            return false;
        }
        let text: String = word.iter().collect();
        if self.abbreviations.contains(&text.to_lowercase()) {
            return true;
        }
        let core = &word[..word.len() - 1];
        // initials ("J.") and dotted acronyms ("U.S.A.")
        match core {
            [c] => c.is_uppercase(),
            _ => core.contains(&'.') && core.iter().all(|c| c.is_alphanumeric() || *c == '.'),
        }
    }

    fn split_chunk(&self, chunk: &str, out: &mut Vec<String>) {
        let chars: Vec<char> = chunk.chars().collect();
        if chars.iter().all(|&c| is_punct(c)) {
            out.extend(runs(&chars));
            return;
        }
        let mut start = 0;
        while is_punct(chars[start]) {
            start += 1;
        }
        let mut end = chars.len();
        while is_punct(chars[end - 1]) {
            if chars[end - 1] == '.' && self.is_abbreviation(&chars[start..end]) {
                break;
            }
            end -= 1;
        }
        out.extend(runs(&chars[..start]));
        out.push(chars[start..end].iter().collect());
        out.extend(runs(&chars[end..]));
    }

    /// Whitespace tokenization with punctuation detached from word edges,
    /// followed by sentence splitting after `.`, `!` or `?` (and any closing
    /// quotes or brackets) when the next token starts with an uppercase letter.
    pub fn tokenize(&self, text: &str) -> Vec<Vec<String>> {
        let mut tokens = Vec::new();
        for chunk in text.split_whitespace() {
            self.split_chunk(chunk, &mut tokens);
        }

        let mut sentences = Vec::new();
        let mut current = Vec::new();
        let mut i = 0;
        while i < tokens.len() {
            let token = std::mem::take(&mut tokens[i]);
            let ends = is_terminator(&token);
            current.push(token);
            i += 1;
            if ends {
                while i < tokens.len() && is_closer(&tokens[i]) {
                    current.push(std::mem::take(&mut tokens[i]));
                    i += 1;
                }
                let next_upper = tokens
                    .get(i)
                    .and_then(|t| t.chars().next())
                    .is_some_and(char::is_uppercase);
                if next_upper {
                    sentences.push(std::mem::take(&mut current));
                }
            }
        }
        if !current.is_empty() {
            sentences.push(current);
        }
        sentences
    }
}
