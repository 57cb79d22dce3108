//! Line-oriented text formats for games, objectives, strategies and
//! reduction witnesses.
//!
//! All formats share one lexical layer: tokens are separated by
//! whitespace, `{` and `}` are always tokens of their own, and `#` starts
//! a comment that runs to the end of the line, except in `#g<digits>`,
//! which is a gadget action name.

mod game;
mod strategy;
mod witness;

use std::fmt;

use thiserror::Error;

pub use game::{parse_document, parse_game, parse_objective_spec, serialize_document, serialize_game, GameDocument};
pub use strategy::{parse_strategy, serialize_strategy};
pub use witness::{parse_witness, serialize_witness};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ParseErrorKind {
    #[error("{0}")]
    Syntax(String),
    #[error("weights sum to {0} ≠ 1")]
    ProbabilitySum(String),
    #[error("unknown {what} `{name}`")]
    UnknownIdentifier { what: &'static str, name: String },
    #[error("{0}")]
    Invalid(String),
}

/// A parse failure with a 1-based location. Column 0 means the whole line.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParseError {
    pub line: usize,
    pub col: usize,
    pub kind: ParseErrorKind,
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.col == 0 {
            write!(f, "{} at line {}", self.kind, self.line)
        } else {
            write!(f, "{} at line {}, column {}", self.kind, self.line, self.col)
        }
    }
}

impl std::error::Error for ParseError {}

impl ParseError {
    pub(crate) fn syntax(tok: &Token, msg: impl Into<String>) -> Self {
        ParseError { line: tok.line, col: tok.col, kind: ParseErrorKind::Syntax(msg.into()) }
    }

    pub(crate) fn at(line: usize, col: usize, kind: ParseErrorKind) -> Self {
        ParseError { line, col, kind }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub(crate) struct Token {
    pub text: String,
    pub line: usize,
    pub col: usize,
}

/// Splits one line into tokens, dropping comments.
pub(crate) fn tokenize_line(line: &str, line_no: usize) -> Vec<Token> {
    let chars: Vec<char> = line.chars().collect();
    let mut out = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        if c.is_whitespace() {
            i += 1;
            continue;
        }
        if c == '#' && !is_gadget_start(&chars[i..]) {
            break;
        }
        if c == '{' || c == '}' {
            out.push(Token { text: c.to_string(), line: line_no, col: i + 1 });
            i += 1;
            continue;
        }
        let start = i;
        while i < chars.len() && !chars[i].is_whitespace() && chars[i] != '{' && chars[i] != '}' {
            i += 1;
        }
        out.push(Token { text: chars[start..i].iter().collect(), line: line_no, col: start + 1 });
    }
    out
}

fn is_gadget_start(rest: &[char]) -> bool {
    rest.len() > 2 && rest[1] == 'g' && rest[2].is_ascii_digit()
}

/// Non-empty token lines of a document.
pub(crate) fn tokenize(text: &str) -> Vec<Vec<Token>> {
    text.lines()
        .enumerate()
        .map(|(i, l)| tokenize_line(l, i + 1))
        .filter(|t| !t.is_empty())
        .collect()
}

/// Identifiers may not contain `:` (weight separator), braces, or be one of
/// the reserved words used as placeholders.
pub(crate) fn check_ident(tok: &Token) -> Result<&str, ParseError> {
    let t = tok.text.as_str();
    if t.contains(':') || t == "_" || t == "*" || t == "->" || t == "full" {
        return Err(ParseError::syntax(tok, format!("`{t}` is not a valid identifier")));
    }
    Ok(t)
}
