//! Penn-Treebank style bracketing for [`ConNode`] trees.

use thiserror::Error;

use super::ConNode;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum BracketError {
    #[error("unexpected end of input, {0} bracket(s) left open")]
    Unclosed(usize),

    #[error("unexpected `)` at byte {0}")]
    UnexpectedClose(usize),

    #[error("expected `(` at byte {0}")]
    ExpectedOpen(usize),

    #[error("missing label at byte {0}")]
    MissingLabel(usize),

    #[error("constituent {label} at byte {offset} has no children")]
    Childless { label: String, offset: usize },

    #[error("trailing input at byte {0}")]
    Trailing(usize),
}

fn escape(form: &str) -> &str {
    match form {
        "(" => "-LRB-",
        ")" => "-RRB-",
        other => other,
    }
}

fn unescape(form: &str) -> &str {
    match form {
        "-LRB-" => "(",
        "-RRB-" => ")",
        other => other,
    }
}

/// Renders `(LABEL child ...)`; terminals print as their form, with literal
/// round brackets written as `-LRB-`/`-RRB-`.
pub fn con_to_bracketed(tree: &ConNode) -> String {
    let mut out = String::new();
    write_node(tree, &mut out);
    out
}

fn write_node(node: &ConNode, out: &mut String) {
    match node {
        ConNode::Terminal(form) => out.push_str(escape(form)),
        ConNode::NonTerminal { label, children } => {
            out.push('(');
            out.push_str(label);
            for child in children {
                out.push(' ');
                write_node(child, out);
            }
            out.push(')');
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Tok<'a> {
    Open(usize),
    Close(usize),
    Atom(usize, &'a str),
}

fn lex(text: &str) -> Vec<Tok<'_>> {
    let mut toks = Vec::new();
    let mut start = None;
    for (i, c) in text.char_indices() {
        if c == '(' || c == ')' || c.is_whitespace() {
            if let Some(s) = start.take() {
                toks.push(Tok::Atom(s, &text[s..i]));
            }
            match c {
                '(' => toks.push(Tok::Open(i)),
                ')' => toks.push(Tok::Close(i)),
                _ => {}
            }
        } else if start.is_none() {
            start = Some(i);
        }
    }
    if let Some(s) = start {
        toks.push(Tok::Atom(s, &text[s..]));
    }
    toks
}

/// Parses a single bracketed tree.
pub fn bracketed_to_con(text: &str) -> Result<ConNode, BracketError> {
    let toks = lex(text);
    let mut pos = 0;
    let tree = match toks.first() {
        Some(Tok::Open(_)) => parse_node(&toks, &mut pos)?,
        Some(Tok::Close(off)) => return Err(BracketError::UnexpectedClose(*off)),
        Some(Tok::Atom(off, _)) => return Err(BracketError::ExpectedOpen(*off)),
        None => return Err(BracketError::ExpectedOpen(0)),
    };
    match toks.get(pos) {
        None => Ok(tree),
        Some(Tok::Close(off)) => Err(BracketError::UnexpectedClose(*off)),
        Some(Tok::Open(off)) | Some(Tok::Atom(off, _)) => Err(BracketError::Trailing(*off)),
    }
}

// `toks[*pos]` is an `Open`.
fn parse_node(toks: &[Tok<'_>], pos: &mut usize) -> Result<ConNode, BracketError> {
    let open_at = match toks[*pos] {
        Tok::Open(off) => off,
        _ => unreachable!(),
    };
    *pos += 1;
    let label = match toks.get(*pos) {
        Some(Tok::Atom(_, label)) => label.to_string(),
        Some(Tok::Open(off)) | Some(Tok::Close(off)) => return Err(BracketError::MissingLabel(*off)),
        None => return Err(BracketError::Unclosed(1)),
    };
    *pos += 1;

    let mut children = Vec::new();
    loop {
        match toks.get(*pos) {
            Some(Tok::Close(_)) => {
                *pos += 1;
                break;
            }
            Some(Tok::Open(_)) => children.push(parse_node(toks, pos).map_err(|e| match e {
                BracketError::Unclosed(n) => BracketError::Unclosed(n + 1),
                other => other,
            })?),
            Some(Tok::Atom(_, form)) => {
                children.push(ConNode::Terminal(unescape(form).to_string()));
                *pos += 1;
            }
            None => return Err(BracketError::Unclosed(1)),
        }
    }
    if children.is_empty() {
        return Err(BracketError::Childless { label, offset: open_at });
    }
    Ok(ConNode::NonTerminal { label, children })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn minimal_tree() {
        let tree = ConNode::node("X", vec![ConNode::leaf("a")]);
        assert_eq!(con_to_bracketed(&tree), "(X a)");
        assert_eq!(bracketed_to_con("(X a)").unwrap(), tree);
    }

    #[test]
    fn whitespace_is_insignificant_on_input() {
        let tree = bracketed_to_con("  (S\n\t(NP (DT the) (NN dog))\n  (VP (VBZ barks)))  ").unwrap();
        assert_eq!(con_to_bracketed(&tree), "(S (NP (DT the) (NN dog)) (VP (VBZ barks)))");
    }

    #[test]
    fn unbalanced_rejected() {
        assert_eq!(bracketed_to_con("(S (NP a)"), Err(BracketError::Unclosed(1)));
        assert_eq!(bracketed_to_con("(S (NP (X a"), Err(BracketError::Unclosed(3)));
        assert_eq!(bracketed_to_con("(S a))"), Err(BracketError::UnexpectedClose(5)));
        assert_eq!(bracketed_to_con(")"), Err(BracketError::UnexpectedClose(0)));
        assert!(matches!(bracketed_to_con("(S a) (S b)"), Err(BracketError::Trailing(_))));
        assert!(matches!(bracketed_to_con("a"), Err(BracketError::ExpectedOpen(0))));
        assert!(matches!(bracketed_to_con(""), Err(BracketError::ExpectedOpen(0))));
        assert!(matches!(bracketed_to_con("((a))"), Err(BracketError::MissingLabel(1))));
        assert!(matches!(bracketed_to_con("(S)"), Err(BracketError::Childless { .. })));
    }

    #[test]
    fn round_brackets_in_leaves_are_escaped() {
        let tree = ConNode::node("PRN", vec![ConNode::node("-LRB-", vec![ConNode::leaf("(")])]);
        let text = con_to_bracketed(&tree);
        assert_eq!(text, "(PRN (-LRB- -LRB-))");
        assert_eq!(bracketed_to_con(&text).unwrap(), tree);
    }
}
