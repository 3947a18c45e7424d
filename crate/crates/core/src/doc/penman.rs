//! Conversion between AMR triples and Penman notation.
//!
//! Serialization starts at the source of the first triple and nests every
//! variable at its first mention; later mentions are written as bare variable
//! references. Concepts and constants are quoted when they would otherwise not
//! read back as a single symbol.

use std::collections::{HashMap, HashSet};

use thiserror::Error;

use super::{AmrTriple, AMR_INSTANCE};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum PenmanError {
    #[error("empty graph")]
    Empty,

    #[error("variable {0} has no instance triple")]
    MissingInstance(String),

    #[error("variable {0} has more than one instance")]
    DuplicateInstance(String),

    #[error("variables not reachable from root {root}: {unreachable:?}")]
    Unreachable { root: String, unreachable: Vec<String> },

    #[error("relation {0:?} cannot be written as a role")]
    BadRole(String),

    #[error("unbalanced parentheses at byte {0}")]
    Unbalanced(usize),

    #[error("syntax error at byte {offset}: expected {expected}")]
    Syntax { offset: usize, expected: &'static str },
}

const SPECIAL: &[char] = &['(', ')', '"', ':', '/', '~', '\\'];

fn needs_quotes(s: &str) -> bool {
    s.is_empty() || s.chars().any(|c| c.is_whitespace() || SPECIAL.contains(&c))
}

fn push_quoted(s: &str, out: &mut String) {
    out.push('"');
    for c in s.chars() {
        if c == '"' || c == '\\' {
            out.push('\\');
        }
        out.push(c);
    }
    out.push('"');
}

fn push_atom(s: &str, out: &mut String) {
    if needs_quotes(s) {
        push_quoted(s, out);
    } else {
        out.push_str(s);
    }
}

/// Serializes a rooted, connected graph on one line, e.g.
/// `(c0 / be-located-at-91 :ARG1 (c1 / "emory nlp") :ARG2 (c2 / atlanta))`.
pub fn amr_to_penman(triples: &[AmrTriple]) -> Result<String, PenmanError> {
    let root = triples.first().ok_or(PenmanError::Empty)?.source.clone();

    let mut concepts: HashMap<&str, &str> = HashMap::new();
    for t in triples.iter().filter(|t| t.is_instance()) {
        if concepts.insert(&t.source, &t.target).is_some() {
            return Err(PenmanError::DuplicateInstance(t.source.clone()));
        }
    }
    let mut edges: HashMap<&str, Vec<(&str, &str)>> = HashMap::new();
    for t in triples.iter().filter(|t| !t.is_instance()) {
        if !concepts.contains_key(t.source.as_str()) {
            return Err(PenmanError::MissingInstance(t.source.clone()));
        }
        if t.relation.is_empty() || needs_quotes(&t.relation) {
            return Err(PenmanError::BadRole(t.relation.clone()));
        }
        edges.entry(&t.source).or_default().push((&t.relation, &t.target));
    }
    if !concepts.contains_key(root.as_str()) {
        return Err(PenmanError::MissingInstance(root));
    }

    let mut out = String::new();
    let mut visited = HashSet::new();
    write_var(&root, &concepts, &edges, &mut visited, &mut out);

    if visited.len() != concepts.len() {
        let mut unreachable: Vec<String> = concepts
            .keys()
            .filter(|v| !visited.contains(*v))
            .map(|v| v.to_string())
            .collect();
        unreachable.sort();
        return Err(PenmanError::Unreachable { root, unreachable });
    }
    Ok(out)
}

fn write_var<'a>(
    var: &'a str,
    concepts: &HashMap<&'a str, &'a str>,
    edges: &HashMap<&'a str, Vec<(&'a str, &'a str)>>,
    visited: &mut HashSet<&'a str>,
    out: &mut String,
) {
    visited.insert(var);
    out.push('(');
    push_atom(var, out);
    out.push_str(" / ");
    push_atom(concepts[var], out);
    for &(role, target) in edges.get(var).into_iter().flatten() {
        out.push_str(" :");
        out.push_str(role);
        out.push(' ');
        if concepts.contains_key(target) {
            if visited.contains(target) {
                out.push_str(target);
            } else {
                write_var(target, concepts, edges, visited, out);
            }
        } else {
            push_atom(target, out);
        }
    }
    out.push(')');
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Tok {
    Open,
    Close,
    Slash,
    Role(String),
    Quoted(String),
    Symbol(String),
}

fn lex(text: &str) -> Result<Vec<(usize, Tok)>, PenmanError> {
    let mut toks = Vec::new();
    let mut chars = text.char_indices().peekable();
    while let Some(&(i, c)) = chars.peek() {
        match c {
            c if c.is_whitespace() => {
                chars.next();
            }
            '(' => {
                chars.next();
                toks.push((i, Tok::Open));
            }
            ')' => {
                chars.next();
                toks.push((i, Tok::Close));
            }
            '/' => {
                chars.next();
                toks.push((i, Tok::Slash));
            }
            '"' => {
                chars.next();
                let mut s = String::new();
                let mut closed = false;
                while let Some((_, c)) = chars.next() {
                    match c {
                        '\\' => {
                            if let Some((_, escaped)) = chars.next() {
                                s.push(escaped);
                            }
                        }
                        '"' => {
                            closed = true;
                            break;
                        }
                        c => s.push(c),
                    }
                }
                if !closed {
                    return Err(PenmanError::Syntax {
                        offset: i,
                        expected: "closing quote",
                    });
                }
                toks.push((i, Tok::Quoted(s)));
            }
            _ => {
                let mut s = String::new();
                while let Some(&(_, c)) = chars.peek() {
                    if c.is_whitespace() || matches!(c, '(' | ')' | '"' | '/') {
                        break;
                    }
                    s.push(c);
                    chars.next();
                }
                match s.strip_prefix(':') {
                    Some(role) if !role.is_empty() => toks.push((i, Tok::Role(role.to_string()))),
                    Some(_) => {
                        return Err(PenmanError::Syntax {
                            offset: i,
                            expected: "role name",
                        })
                    }
                    None => toks.push((i, Tok::Symbol(s))),
                }
            }
        }
    }
    Ok(toks)
}

struct Parser {
    toks: Vec<(usize, Tok)>,
    pos: usize,
    end: usize,
    triples: Vec<AmrTriple>,
    declared: HashSet<String>,
}

impl Parser {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|(_, t)| t)
    }

    fn offset(&self) -> usize {
        self.toks.get(self.pos).map(|(o, _)| *o).unwrap_or(self.end)
    }

    fn next(&mut self) -> Option<Tok> {
        let tok = self.toks.get(self.pos).map(|(_, t)| t.clone());
        self.pos += 1;
        tok
    }

    fn atom(&mut self, expected: &'static str) -> Result<String, PenmanError> {
        let offset = self.offset();
        match self.next() {
            Some(Tok::Symbol(s)) | Some(Tok::Quoted(s)) => Ok(s),
            None => Err(PenmanError::Unbalanced(offset)),
            _ => Err(PenmanError::Syntax { offset, expected }),
        }
    }

    // Returns the node's variable.
    fn node(&mut self) -> Result<String, PenmanError> {
        let offset = self.offset();
        if self.next() != Some(Tok::Open) {
            return Err(PenmanError::Syntax { offset, expected: "`(`" });
        }
        let var = self.atom("variable")?;
        let offset = self.offset();
        match self.next() {
            Some(Tok::Slash) => {}
            None => return Err(PenmanError::Unbalanced(offset)),
            _ => return Err(PenmanError::Syntax { offset, expected: "`/`" }),
        }
        let concept = self.atom("concept")?;
        if !self.declared.insert(var.clone()) {
            return Err(PenmanError::DuplicateInstance(var));
        }
        self.triples.push(AmrTriple::new(var.clone(), AMR_INSTANCE, concept));

        loop {
            let offset = self.offset();
            match self.next() {
                Some(Tok::Close) => return Ok(var),
                Some(Tok::Role(role)) => {
                    let target = match self.peek() {
                        Some(Tok::Open) => self.node()?,
                        _ => self.atom("role target")?,
                    };
                    self.triples.push(AmrTriple::new(var.clone(), role, target));
                }
                None => return Err(PenmanError::Unbalanced(offset)),
                Some(_) => {
                    return Err(PenmanError::Syntax {
                        offset,
                        expected: "role or `)`",
                    })
                }
            }
        }
    }
}

/// Parses one Penman graph. Instance triples come first for each node,
/// followed by its edges in written order.
pub fn penman_to_amr(text: &str) -> Result<Vec<AmrTriple>, PenmanError> {
    let toks = lex(text)?;
    if toks.is_empty() {
        return Err(PenmanError::Empty);
    }
    let mut parser = Parser {
        toks,
        pos: 0,
        end: text.len(),
        triples: Vec::new(),
        declared: HashSet::new(),
    };
    parser.node()?;
    if let Some((offset, tok)) = parser.toks.get(parser.pos) {
        return Err(match tok {
            Tok::Close => PenmanError::Unbalanced(*offset),
            _ => PenmanError::Syntax {
                offset: *offset,
                expected: "end of input",
            },
        });
    }
    Ok(parser.triples)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn t(s: &str, r: &str, o: &str) -> AmrTriple {
        AmrTriple::new(s, r, o)
    }

    #[test]
    fn single_instance() {
        assert_eq!(amr_to_penman(&[t("c0", "instance", "dog")]).unwrap(), "(c0 / dog)");
        assert_eq!(penman_to_amr("(c0 / dog)").unwrap(), vec![t("c0", "instance", "dog")]);
    }

    #[test]
    fn reentrancy_written_as_reference() {
        let g = vec![
            t("w", "instance", "want-01"),
            t("w", "ARG0", "b"),
            t("w", "ARG1", "g"),
            t("b", "instance", "boy"),
            t("g", "instance", "go-02"),
            t("g", "ARG0", "b"),
        ];
        let text = amr_to_penman(&g).unwrap();
        assert_eq!(text, "(w / want-01 :ARG0 (b / boy) :ARG1 (g / go-02 :ARG0 b))");
        let mut back = penman_to_amr(&text).unwrap();
        let mut expected = g.clone();
        back.sort();
        expected.sort();
        assert_eq!(back, expected);
    }

    #[test]
    fn constants_and_quoting() {
        let g = vec![
            t("n", "instance", "name"),
            t("n", "op1", "New York"),
            t("n", "op2", "x"),
            t("n", "polarity", "-"),
            t("x", "instance", "thing"),
            t("n", "quant", "say \"hi\""),
        ];
        let text = amr_to_penman(&g).unwrap();
        assert_eq!(
            text,
            r#"(n / name :op1 "New York" :op2 (x / thing) :polarity - :quant "say \"hi\"")"#
        );
        let mut back = penman_to_amr(&text).unwrap();
        let mut expected = g.clone();
        back.sort();
        expected.sort();
        assert_eq!(back, expected);
    }

    #[test]
    fn serializer_errors() {
        assert_eq!(amr_to_penman(&[]), Err(PenmanError::Empty));
        assert_eq!(
            amr_to_penman(&[t("a", "ARG0", "b"), t("b", "instance", "x")]),
            Err(PenmanError::MissingInstance("a".into()))
        );
        assert!(matches!(
            amr_to_penman(&[t("a", "instance", "x"), t("b", "instance", "y")]),
            Err(PenmanError::Unreachable { .. })
        ));
        assert!(matches!(
            amr_to_penman(&[t("a", "instance", "x"), t("a", "instance", "y")]),
            Err(PenmanError::DuplicateInstance(_))
        ));
        assert!(matches!(
            amr_to_penman(&[t("a", "instance", "x"), t("a", "has role", "y")]),
            Err(PenmanError::BadRole(_))
        ));
    }

    #[test]
    fn parser_errors() {
        assert!(matches!(penman_to_amr("(a / x"), Err(PenmanError::Unbalanced(_))));
        assert!(matches!(penman_to_amr("(a / x))"), Err(PenmanError::Unbalanced(7))));
        assert!(matches!(
            penman_to_amr("(a / x :ARG0 (a / y))"),
            Err(PenmanError::DuplicateInstance(_))
        ));
        assert!(matches!(penman_to_amr("(a x)"), Err(PenmanError::Syntax { .. })));
        assert!(matches!(penman_to_amr("(a / \"x)"), Err(PenmanError::Syntax { .. })));
        assert_eq!(penman_to_amr("  "), Err(PenmanError::Empty));
    }
}
