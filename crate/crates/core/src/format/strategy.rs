use std::fmt::Write as _;

use num_traits::{One, Signed};

use super::{tokenize, ParseError, ParseErrorKind, Token};
use crate::game::{Game, ObsId, Player};
use crate::rational::{format_rational, parse_rational, Rational};
use crate::strategy::{ActionDist, Strategy, StrategyError};

fn parse_player(tok: &Token) -> Result<Player, ParseError> {
    match tok.text.as_str() {
        "1" | "player1" => Ok(Player::One),
        "2" | "player2" => Ok(Player::Two),
        _ => Err(ParseError::syntax(tok, format!("expected a player (1 or 2), found `{}`", tok.text))),
    }
}

fn strategy_error(tok: &Token, e: StrategyError) -> ParseError {
    ParseError::at(tok.line, 0, ParseErrorKind::Invalid(e.to_string()))
}

/// Parses a strategy file against the game whose blocks and actions it
/// names.
///
/// ```text
/// strategy 1 horizon 4
/// at o1 -> a1:1/2 a2:1/2      # exact observation history
/// at o1 o2 -> a2              # pure choice
/// at * o3 -> a1               # any history ending in o3
/// ```
pub fn parse_strategy(text: &str, game: &Game) -> Result<Strategy, ParseError> {
    let lines = tokenize(text);
    let Some(header) = lines.first() else {
        return Err(ParseError::at(1, 0, ParseErrorKind::Syntax("empty strategy file".into())));
    };
    if header.len() != 4 || header[0].text != "strategy" || header[2].text != "horizon" {
        return Err(ParseError::syntax(&header[0], "expected `strategy <player> horizon <h>`"));
    }
    let player = parse_player(&header[1])?;
    let horizon: usize = header[3]
        .text
        .parse()
        .map_err(|_| ParseError::syntax(&header[3], format!("`{}` is not a horizon", header[3].text)))?;
    let mut strategy = Strategy::new(player, horizon);

    for line in &lines[1..] {
        if line[0].text != "at" {
            return Err(ParseError::syntax(&line[0], format!("expected `at`, found `{}`", line[0].text)));
        }
        let Some(arrow) = line.iter().position(|t| t.text == "->") else {
            return Err(ParseError::syntax(&line[0], "missing `->`"));
        };
        let (stationary, obs_toks) = match line.get(1) {
            Some(t) if t.text == "*" => (true, &line[2..arrow]),
            _ => (false, &line[1..arrow]),
        };
        if obs_toks.is_empty() || (stationary && obs_toks.len() != 1) {
            return Err(ParseError::syntax(&line[0], "expected `at <block>+ -> ...` or `at * <block> -> ...`"));
        }
        let mut history = Vec::with_capacity(obs_toks.len());
        for t in obs_toks {
            let o = game.block_id(player, &t.text).ok_or_else(|| {
                ParseError::at(t.line, t.col, ParseErrorKind::UnknownIdentifier { what: "observation block", name: t.text.clone() })
            })?;
            history.push(o);
        }
        let dist = parse_actions(&line[arrow + 1..], &line[arrow], game, player)?;
        if stationary {
            strategy.set_by_last(history[0], dist).map_err(|e| strategy_error(&line[0], e))?;
        } else {
            strategy.set(history, dist).map_err(|e| strategy_error(&line[0], e))?;
        }
    }
    Ok(strategy)
}

fn parse_actions(toks: &[Token], arrow: &Token, game: &Game, player: Player) -> Result<ActionDist, ParseError> {
    if toks.is_empty() {
        return Err(ParseError::syntax(arrow, "expected at least one action after `->`"));
    }
    let mut dist = Vec::new();
    let mut total = Rational::from_integer(0.into());
    for t in toks {
        let (name, w) = match t.text.rsplit_once(':') {
            Some((n, w)) => {
                let w = parse_rational(w)
                    .ok_or_else(|| ParseError::syntax(t, format!("`{w}` is not a rational number")))?;
                (n, w)
            }
            None if toks.len() == 1 => (t.text.as_str(), Rational::one()),
            None => return Err(ParseError::syntax(t, "weights are required when several actions are listed")),
        };
        if !w.is_positive() {
            return Err(ParseError::syntax(t, format!("weight {} must be positive", format_rational(&w))));
        }
        let a = game.action_id(player, name).ok_or_else(|| {
            ParseError::at(t.line, t.col, ParseErrorKind::UnknownIdentifier { what: "action", name: name.to_string() })
        })?;
        total += &w;
        dist.push((a, w));
    }
    if !total.is_one() {
        return Err(ParseError::at(arrow.line, 0, ParseErrorKind::ProbabilitySum(format_rational(&total))));
    }
    Ok(dist)
}

fn write_dist(out: &mut String, game: &Game, player: Player, dist: &ActionDist) {
    if let [(a, _)] = dist.as_slice() {
        out.push_str(game.action_name(player, *a));
        return;
    }
    let parts: Vec<String> =
        dist.iter().map(|(a, w)| format!("{}:{}", game.action_name(player, *a), format_rational(w))).collect();
    out.push_str(&parts.join(" "));
}

/// Canonical text: header, stationary entries by block, then exact
/// histories in lexicographic order of block indices.
pub fn serialize_strategy(strategy: &Strategy, game: &Game) -> String {
    use crate::strategy::Policy;
    let player = strategy.player();
    let mut out = format!("strategy {} horizon {}\n", player, strategy.horizon());
    let label = |o: &ObsId| game.block_label(player, *o).to_string();
    for (o, dist) in strategy.stationary_entries() {
        write!(out, "at * {} -> ", label(o)).unwrap();
        write_dist(&mut out, game, player, dist);
        out.push('\n');
    }
    for (h, dist) in strategy.entries() {
        let hist: Vec<String> = h.iter().map(label).collect();
        write!(out, "at {} -> ", hist.join(" ")).unwrap();
        write_dist(&mut out, game, player, dist);
        out.push('\n');
    }
    out
}
