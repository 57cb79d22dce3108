use std::fmt::Write as _;

use super::{tokenize, ParseError, ParseErrorKind, Token};
use crate::game::{Layer, Player};
use crate::reductions::{ReductionKind, ReductionWitness, Stutter};

fn layer_keyword(l: Layer) -> &'static str {
    match l {
        Layer::Action => "action",
        Layer::Probabilistic => "probabilistic",
    }
}

/// Canonical text of a witness. Every map is written in key order.
pub fn serialize_witness(w: &ReductionWitness) -> String {
    let mut out = format!("witness {}\nn {}\nstutter {}\n", w.kind, w.n, w.stutter.keyword());
    if let Some(l) = w.initial_layer {
        writeln!(out, "init-layer {}", layer_keyword(l)).unwrap();
    }
    if let Some(p) = w.chooser {
        writeln!(out, "chooser {p}").unwrap();
    }
    if let Some(s) = &w.sink {
        writeln!(out, "sink {s}").unwrap();
    }
    for (a, b) in &w.embedding {
        writeln!(out, "embed {a} {b}").unwrap();
    }
    for (x, s) in &w.aux {
        writeln!(out, "aux {x} {s}").unwrap();
    }
    for s in &w.probabilistic {
        writeln!(out, "probabilistic {s}").unwrap();
    }
    for (s, slots) in &w.succ {
        writeln!(out, "succ {s} {}", slots.join(" ")).unwrap();
    }
    out
}

fn arity(line: &[Token], n: usize) -> Result<(), ParseError> {
    if line.len() != n + 1 {
        return Err(ParseError::syntax(&line[0], format!("`{}` takes {n} argument(s)", line[0].text)));
    }
    Ok(())
}

fn bad(tok: &Token, what: &str) -> ParseError {
    ParseError::syntax(tok, format!("`{}` is not a valid {what}", tok.text))
}

pub fn parse_witness(text: &str) -> Result<ReductionWitness, ParseError> {
    let lines = tokenize(text);
    let Some(header) = lines.first() else {
        return Err(ParseError::at(1, 0, ParseErrorKind::Syntax("empty witness file".into())));
    };
    if header[0].text != "witness" || header.len() != 2 {
        return Err(ParseError::syntax(&header[0], "expected `witness <kind>`"));
    }
    let kind = ReductionKind::from_keyword(&header[1].text).ok_or_else(|| bad(&header[1], "reduction kind"))?;
    let mut w = ReductionWitness {
        kind,
        n: 1,
        embedding: Default::default(),
        aux: Default::default(),
        succ: Default::default(),
        probabilistic: Default::default(),
        initial_layer: None,
        chooser: None,
        sink: None,
        stutter: Stutter::None,
    };
    for line in &lines[1..] {
        let kw = &line[0];
        match kw.text.as_str() {
            "n" => {
                arity(line, 1)?;
                w.n = line[1].text.parse().map_err(|_| bad(&line[1], "arity"))?;
            }
            "stutter" => {
                arity(line, 1)?;
                w.stutter = Stutter::from_keyword(&line[1].text).ok_or_else(|| bad(&line[1], "stutter pattern"))?;
            }
            "init-layer" => {
                arity(line, 1)?;
                w.initial_layer = Some(match line[1].text.as_str() {
                    "action" => Layer::Action,
                    "probabilistic" => Layer::Probabilistic,
                    _ => return Err(bad(&line[1], "layer")),
                });
            }
            "chooser" => {
                arity(line, 1)?;
                w.chooser = Some(match line[1].text.as_str() {
                    "1" => Player::One,
                    "2" => Player::Two,
                    _ => return Err(bad(&line[1], "player")),
                });
            }
            "sink" => {
                arity(line, 1)?;
                w.sink = Some(line[1].text.clone());
            }
            "embed" => {
                arity(line, 2)?;
                w.embedding.insert(line[1].text.clone(), line[2].text.clone());
            }
            "aux" => {
                arity(line, 2)?;
                w.aux.insert(line[1].text.clone(), line[2].text.clone());
            }
            "probabilistic" => {
                arity(line, 1)?;
                w.probabilistic.insert(line[1].text.clone());
            }
            "succ" => {
                if line.len() < 3 {
                    return Err(ParseError::syntax(kw, "expected `succ <state> <slot>+`"));
                }
                w.succ.insert(line[1].text.clone(), line[2..].iter().map(|t| t.text.clone()).collect());
            }
            other => return Err(ParseError::syntax(kw, format!("unknown witness entry `{other}`"))),
        }
    }
    Ok(w)
}
