use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt::Write as _;

use num_traits::{One, Signed, Zero};

use super::{check_ident, tokenize, ParseError, ParseErrorKind, Token};
use crate::game::{classify_state, validate, Game, GameBuilder, PartitionSpec, Player, Turn, Violation};
use crate::objective::Objective;
use crate::rational::{format_rational, parse_rational, Rational};

/// A game together with the objective stated in the same file, if any.
#[derive(Clone, Debug, PartialEq)]
pub struct GameDocument {
    pub game: Game,
    pub objective: Option<Objective>,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq)]
enum Declared {
    Player1,
    Player2,
    Probabilistic,
}

struct TransLine {
    a: Option<Token>,
    b: Option<Token>,
    dist: Vec<(Token, Rational)>,
    at: Token,
}

struct StateDecl {
    tok: Token,
    declared: Option<Declared>,
    trans: Vec<TransLine>,
}

#[derive(Default)]
struct ObsDecl {
    full: Option<Token>,
    blocks: Vec<(Option<Token>, Vec<Token>, Token)>,
    first: Option<Token>,
}

fn unknown(tok: &Token, what: &'static str) -> ParseError {
    ParseError::at(tok.line, tok.col, ParseErrorKind::UnknownIdentifier { what, name: tok.text.clone() })
}

fn expect_len(line: &[Token], min: usize, usage: &str) -> Result<(), ParseError> {
    if line.len() < min {
        let last = line.last().unwrap();
        return Err(ParseError::at(last.line, 0, ParseErrorKind::Syntax(format!("expected `{usage}`"))));
    }
    Ok(())
}

fn parse_weighted(tok: &Token) -> Result<(Token, Rational), ParseError> {
    let Some((name, weight)) = tok.text.rsplit_once(':') else {
        return Err(ParseError::syntax(tok, format!("expected `<state>:<p/q>`, found `{}`", tok.text)));
    };
    let w = parse_rational(weight)
        .ok_or_else(|| ParseError::syntax(tok, format!("`{weight}` is not a rational number")))?;
    if !w.is_positive() {
        return Err(ParseError::syntax(tok, format!("weight {weight} must be positive")));
    }
    let name_tok = Token { text: name.to_string(), line: tok.line, col: tok.col };
    check_ident(&name_tok)?;
    Ok((name_tok, w))
}

fn parse_block_list(line: &[Token]) -> Result<Vec<(Option<Token>, Vec<Token>, Token)>, ParseError> {
    let mut blocks = Vec::new();
    let mut i = 1;
    while i < line.len() {
        let start = line[i].clone();
        let label = if line[i].text != "{" {
            let l = line[i].clone();
            check_ident(&l)?;
            i += 1;
            Some(l)
        } else {
            None
        };
        if i >= line.len() || line[i].text != "{" {
            let t = line.get(i).unwrap_or(&start);
            return Err(ParseError::syntax(t, "expected `{` opening an observation block"));
        }
        i += 1;
        let mut members = Vec::new();
        while i < line.len() && line[i].text != "}" {
            check_ident(&line[i])?;
            members.push(line[i].clone());
            i += 1;
        }
        if i >= line.len() {
            return Err(ParseError::syntax(&start, "unterminated observation block"));
        }
        i += 1;
        if members.is_empty() {
            return Err(ParseError::syntax(&start, "empty observation block"));
        }
        blocks.push((label, members, start));
    }
    Ok(blocks)
}

/// Parses the tokens after the `objective` keyword.
fn parse_objective_tokens(kw: &Token, args: &[Token]) -> Result<(Objective, Vec<Token>), ParseError> {
    let names = |toks: &[Token]| -> Result<BTreeSet<String>, ParseError> {
        toks.iter().map(|t| check_ident(t).map(str::to_string)).collect()
    };
    let obj = match kw.text.as_str() {
        "reach" => Objective::Reach(names(args)?),
        "safety" => Objective::Safety(names(args)?),
        "buchi" => Objective::Buchi(names(args)?),
        "cobuchi" => Objective::CoBuchi(names(args)?),
        "bounded-reach" => {
            let Some(h) = args.first() else {
                return Err(ParseError::syntax(kw, "expected `bounded-reach <horizon> <state>*`"));
            };
            let horizon = h.text.parse().map_err(|_| ParseError::syntax(h, "horizon must be a natural number"))?;
            return Ok((Objective::BoundedReach { target: names(&args[1..])?, horizon }, args[1..].to_vec()));
        }
        "parity" => {
            let mut map = BTreeMap::new();
            let mut toks = Vec::new();
            for t in args {
                let Some((s, p)) = t.text.rsplit_once(':') else {
                    return Err(ParseError::syntax(t, "expected `<state>:<priority>`"));
                };
                let p: u32 = p.parse().map_err(|_| ParseError::syntax(t, "priority must be a natural number"))?;
                let st = Token { text: s.to_string(), line: t.line, col: t.col };
                check_ident(&st)?;
                map.insert(s.to_string(), p);
                toks.push(st);
            }
            return Ok((Objective::Parity(map), toks));
        }
        other => return Err(ParseError::syntax(kw, format!("unknown objective kind `{other}`"))),
    };
    Ok((obj, args.to_vec()))
}

/// Parses a command-line objective such as `reach:s1,s2`,
/// `bounded-reach:4:s1` or `parity:s=0,t=1`.
pub fn parse_objective_spec(spec: &str) -> Result<Objective, String> {
    let (kind, rest) = spec.split_once(':').unwrap_or((spec, ""));
    let list = |r: &str| -> BTreeSet<String> { r.split(',').filter(|x| !x.is_empty()).map(str::to_string).collect() };
    Ok(match kind {
        "reach" => Objective::Reach(list(rest)),
        "safety" => Objective::Safety(list(rest)),
        "buchi" => Objective::Buchi(list(rest)),
        "cobuchi" => Objective::CoBuchi(list(rest)),
        "bounded-reach" => {
            let (h, states) = rest.split_once(':').unwrap_or((rest, ""));
            let horizon = h.parse().map_err(|_| format!("bad horizon `{h}` in `{spec}`"))?;
            Objective::BoundedReach { target: list(states), horizon }
        }
        "parity" => {
            let mut map = BTreeMap::new();
            for item in rest.split(',').filter(|x| !x.is_empty()) {
                let (s, p) = item.split_once('=').ok_or_else(|| format!("expected `state=priority`, got `{item}`"))?;
                map.insert(s.to_string(), p.parse().map_err(|_| format!("bad priority in `{item}`"))?);
            }
            Objective::Parity(map)
        }
        _ => return Err(format!("unknown objective kind `{kind}`")),
    })
}

pub fn parse_game(text: &str) -> Result<Game, ParseError> {
    parse_document(text).map(|d| d.game)
}

pub fn parse_document(text: &str) -> Result<GameDocument, ParseError> {
    let lines = tokenize(text);
    let mut name: Option<Token> = None;
    let mut actions: [Option<Vec<Token>>; 2] = [None, None];
    let mut obs: [ObsDecl; 2] = Default::default();
    let mut init: Option<Token> = None;
    let mut sink: Option<Token> = None;
    let mut objective: Option<(Objective, Vec<Token>, Token)> = None;
    let mut states: Vec<StateDecl> = Vec::new();

    for line in &lines {
        let head = &line[0];
        match head.text.as_str() {
            "game" => {
                expect_len(line, 2, "game <name>")?;
                if name.is_some() {
                    return Err(ParseError::syntax(head, "duplicate `game` line"));
                }
                check_ident(&line[1])?;
                if line.len() > 2 {
                    return Err(ParseError::syntax(&line[2], "unexpected token after game name"));
                }
                name = Some(line[1].clone());
            }
            "actions1" | "actions2" => {
                let p = if head.text == "actions1" { 0 } else { 1 };
                expect_len(line, 2, &format!("{} <action>+", head.text))?;
                if actions[p].is_some() {
                    return Err(ParseError::syntax(head, format!("duplicate `{}` line", head.text)));
                }
                for t in &line[1..] {
                    check_ident(t)?;
                }
                actions[p] = Some(line[1..].to_vec());
            }
            "obs1" | "obs2" => {
                let p = if head.text == "obs1" { 0 } else { 1 };
                expect_len(line, 2, &format!("{} full | {} {{ <state>+ }}", head.text, head.text))?;
                let decl = &mut obs[p];
                decl.first.get_or_insert_with(|| head.clone());
                if line[1].text == "full" {
                    if line.len() > 2 {
                        return Err(ParseError::syntax(&line[2], "unexpected token after `full`"));
                    }
                    if decl.full.is_some() || !decl.blocks.is_empty() {
                        return Err(ParseError::syntax(&line[1], "`full` conflicts with other observation lines"));
                    }
                    decl.full = Some(line[1].clone());
                } else {
                    if decl.full.is_some() {
                        return Err(ParseError::syntax(head, "observation blocks after `full`"));
                    }
                    decl.blocks.extend(parse_block_list(line)?);
                }
            }
            "init" | "sink" => {
                expect_len(line, 2, &format!("{} <state>", head.text))?;
                if line.len() > 2 {
                    return Err(ParseError::syntax(&line[2], "unexpected token"));
                }
                check_ident(&line[1])?;
                let slot = if head.text == "init" { &mut init } else { &mut sink };
                if slot.is_some() {
                    return Err(ParseError::syntax(head, format!("duplicate `{}` line", head.text)));
                }
                *slot = Some(line[1].clone());
            }
            "objective" => {
                expect_len(line, 2, "objective <kind> <args>")?;
                if objective.is_some() {
                    return Err(ParseError::syntax(head, "duplicate `objective` line"));
                }
                let (o, toks) = parse_objective_tokens(&line[1], &line[2..])?;
                objective = Some((o, toks, head.clone()));
            }
            "state" => {
                expect_len(line, 2, "state <id> [player1|player2|probabilistic]")?;
                check_ident(&line[1])?;
                let declared = match line.get(2).map(|t| t.text.as_str()) {
                    None => None,
                    Some("player1") => Some(Declared::Player1),
                    Some("player2") => Some(Declared::Player2),
                    Some("probabilistic") => Some(Declared::Probabilistic),
                    Some(_) => return Err(ParseError::syntax(&line[2], "expected `player1`, `player2` or `probabilistic`")),
                };
                if line.len() > 3 {
                    return Err(ParseError::syntax(&line[3], "unexpected token"));
                }
                if let Some(prev) = states.iter().find(|s| s.tok.text == line[1].text) {
                    return Err(ParseError::syntax(
                        &line[1],
                        format!("state `{}` already declared at line {}", line[1].text, prev.tok.line),
                    ));
                }
                states.push(StateDecl { tok: line[1].clone(), declared, trans: Vec::new() });
            }
            "trans" => {
                let Some(current) = states.last_mut() else {
                    return Err(ParseError::syntax(head, "`trans` before any `state`"));
                };
                expect_len(line, 5, "trans <a1> <a2> -> <state>:<p/q>+")?;
                if line[3].text != "->" {
                    return Err(ParseError::syntax(&line[3], "expected `->`"));
                }
                let pick = |t: &Token| -> Result<Option<Token>, ParseError> {
                    if t.text == "_" {
                        Ok(None)
                    } else {
                        check_ident(t)?;
                        Ok(Some(t.clone()))
                    }
                };
                let dist = line[4..].iter().map(parse_weighted).collect::<Result<Vec<_>, _>>()?;
                current.trans.push(TransLine { a: pick(&line[1])?, b: pick(&line[2])?, dist, at: head.clone() });
            }
            other => return Err(ParseError::syntax(head, format!("unknown directive `{other}`"))),
        }
    }

    let first_line = lines.first().map(|l| l[0].clone()).unwrap_or(Token { text: String::new(), line: 1, col: 0 });
    let missing = |what: &str| ParseError::at(first_line.line, 0, ParseErrorKind::Syntax(format!("missing `{what}` line")));
    let name = name.ok_or_else(|| missing("game"))?;
    let a1 = actions[0].take().ok_or_else(|| missing("actions1"))?;
    let a2 = actions[1].take().ok_or_else(|| missing("actions2"))?;
    if states.is_empty() {
        return Err(ParseError::at(first_line.line, 0, ParseErrorKind::Syntax("no states declared".into())));
    }

    let state_set: HashMap<&str, &Token> = states.iter().map(|s| (s.tok.text.as_str(), &s.tok)).collect();
    let known_state = |t: &Token| if state_set.contains_key(t.text.as_str()) { Ok(()) } else { Err(unknown(t, "state")) };
    for (p, alphabet) in [&a1, &a2].into_iter().enumerate() {
        let mut seen = BTreeSet::new();
        for t in alphabet {
            if !seen.insert(t.text.as_str()) {
                return Err(ParseError::syntax(t, format!("action `{}` of player {} listed twice", t.text, p + 1)));
            }
        }
    }
    let a1_names: Vec<String> = a1.iter().map(|t| t.text.clone()).collect();
    let a2_names: Vec<String> = a2.iter().map(|t| t.text.clone()).collect();

    let mut b = GameBuilder::new(&name.text);
    b.actions(Player::One, a1_names.iter().cloned()).actions(Player::Two, a2_names.iter().cloned());
    for st in &states {
        b.state(&st.tok.text);
        let mut table: BTreeMap<(usize, usize), Vec<(String, Rational)>> = BTreeMap::new();
        for tl in &st.trans {
            let ai = match &tl.a {
                None => None,
                Some(t) => Some(a1_names.iter().position(|x| *x == t.text).ok_or_else(|| unknown(t, "action"))?),
            };
            let bi = match &tl.b {
                None => None,
                Some(t) => Some(a2_names.iter().position(|x| *x == t.text).ok_or_else(|| unknown(t, "action"))?),
            };
            let mut total = Rational::zero();
            let mut seen = BTreeSet::new();
            for (t, w) in &tl.dist {
                known_state(t)?;
                if !seen.insert(t.text.as_str()) {
                    return Err(ParseError::syntax(t, format!("successor `{}` listed twice", t.text)));
                }
                total += w;
            }
            if !total.is_one() {
                return Err(ParseError::at(
                    tl.at.line,
                    0,
                    ParseErrorKind::ProbabilitySum(format_rational(&total)),
                ));
            }
            let dist: Vec<(String, Rational)> = tl.dist.iter().map(|(t, w)| (t.text.clone(), w.clone())).collect();
            let rows: Vec<usize> = ai.map(|x| vec![x]).unwrap_or_else(|| (0..a1_names.len()).collect());
            let cols: Vec<usize> = bi.map(|x| vec![x]).unwrap_or_else(|| (0..a2_names.len()).collect());
            for &x in &rows {
                for &y in &cols {
                    if table.insert((x, y), dist.clone()).is_some() {
                        return Err(ParseError::syntax(
                            &tl.at,
                            format!("transition for ({}, {}) at state {} given twice", a1_names[x], a2_names[y], st.tok.text),
                        ));
                    }
                }
            }
        }
        if let Some(kind) = st.declared {
            fill_declared(&mut table, kind, a1_names.len(), a2_names.len());
        }
        for x in 0..a1_names.len() {
            for y in 0..a2_names.len() {
                match table.get(&(x, y)) {
                    Some(d) => {
                        b.transition(&st.tok.text, &a1_names[x], &a2_names[y], d.clone());
                    }
                    None => {
                        return Err(ParseError::at(
                            st.tok.line,
                            0,
                            ParseErrorKind::Invalid(format!(
                                "no transition for actions ({}, {}) at state {}",
                                a1_names[x], a2_names[y], st.tok.text
                            )),
                        ))
                    }
                }
            }
        }
    }

    for (p, player) in [Player::One, Player::Two].into_iter().enumerate() {
        let decl = &obs[p];
        if decl.full.is_some() || decl.blocks.is_empty() {
            continue;
        }
        let mut owner: HashMap<&str, &Token> = HashMap::new();
        let mut blocks = Vec::new();
        for (label, members, _) in &decl.blocks {
            for m in members {
                known_state(m)?;
                if let Some(prev) = owner.insert(m.text.as_str(), m) {
                    let _ = prev;
                    return Err(ParseError::at(
                        m.line,
                        m.col,
                        ParseErrorKind::Invalid(format!("blocks overlap at {}", m.text)),
                    ));
                }
            }
            blocks.push((label.as_ref().map(|l| l.text.clone()), members.iter().map(|m| m.text.clone()).collect()));
        }
        for st in &states {
            if !owner.contains_key(st.tok.text.as_str()) {
                let first = decl.first.as_ref().unwrap();
                return Err(ParseError::at(
                    first.line,
                    0,
                    ParseErrorKind::Invalid(format!("state {} is in no obs{} block", st.tok.text, p + 1)),
                ));
            }
        }
        b.observation(player, PartitionSpec::Blocks(blocks));
    }

    if let Some(t) = &init {
        known_state(t)?;
        b.initial(&t.text);
    }
    if let Some(t) = &sink {
        known_state(t)?;
        b.sink(&t.text);
    }
    let game = b.build_unchecked().map_err(|e| ParseError::at(name.line, 0, ParseErrorKind::Invalid(e.to_string())))?;
    let report = validate(&game);
    if let Some(v) = report.violations.first() {
        let line = match v {
            Violation::BlockOverlap { player, .. }
            | Violation::Unobserved { player, .. }
            | Violation::EmptyBlock { player, .. }
            | Violation::DuplicateBlockLabel { player, .. } => {
                obs[player.index()].first.as_ref().map(|t| t.line).unwrap_or(name.line)
            }
            Violation::SinkNotAbsorbing(_) => sink.as_ref().map(|t| t.line).unwrap_or(name.line),
            _ => name.line,
        };
        return Err(ParseError::at(line, 0, ParseErrorKind::Invalid(v.to_string())));
    }

    let objective = match objective {
        None => None,
        Some((o, toks, _)) => {
            for t in &toks {
                known_state(t)?;
            }
            if let Err(e) = o.check(&game) {
                let kw = objective_line(&lines);
                return Err(ParseError::at(kw, 0, ParseErrorKind::Invalid(e.to_string())));
            }
            Some(o)
        }
    };
    Ok(GameDocument { game, objective })
}

fn objective_line(lines: &[Vec<Token>]) -> usize {
    lines.iter().find(|l| l[0].text == "objective").map(|l| l[0].line).unwrap_or(1)
}

/// Completes the omitted action pairs of a state declared turn-based by
/// copying the row, column or any given entry.
fn fill_declared(table: &mut BTreeMap<(usize, usize), Vec<(String, Rational)>>, kind: Declared, n1: usize, n2: usize) {
    let given: Vec<((usize, usize), Vec<(String, Rational)>)> = table.iter().map(|(k, v)| (*k, v.clone())).collect();
    for x in 0..n1 {
        for y in 0..n2 {
            if table.contains_key(&(x, y)) {
                continue;
            }
            let source = given.iter().find(|((gx, gy), _)| match kind {
                Declared::Player1 => *gx == x,
                Declared::Player2 => *gy == y,
                Declared::Probabilistic => true,
            });
            if let Some((_, d)) = source {
                table.insert((x, y), d.clone());
            }
        }
    }
}

pub fn serialize_game(game: &Game) -> String {
    serialize_document(game, None)
}

/// Canonical text of a game: states, actions and blocks in lexicographic
/// order, one `trans` line per distinct action dependency.
pub fn serialize_document(game: &Game, objective: Option<&Objective>) -> String {
    let mut out = String::new();
    writeln!(out, "game {}", game.name()).unwrap();
    writeln!(out, "actions1 {}", game.actions(Player::One).join(" ")).unwrap();
    writeln!(out, "actions2 {}", game.actions(Player::Two).join(" ")).unwrap();
    for (p, player) in [Player::One, Player::Two].into_iter().enumerate() {
        match game.partition_spec(player) {
            PartitionSpec::Full => writeln!(out, "obs{} full", p + 1).unwrap(),
            PartitionSpec::Blocks(blocks) => {
                for (label, members) in blocks {
                    let label = label.unwrap_or_default();
                    writeln!(out, "obs{} {} {{ {} }}", p + 1, label, members.join(" ")).unwrap();
                }
            }
        }
    }
    if let Some(s) = game.initial() {
        writeln!(out, "init {}", game.state_name(s)).unwrap();
    }
    if let Some(s) = game.sink() {
        writeln!(out, "sink {}", game.state_name(s)).unwrap();
    }
    if let Some(o) = objective {
        writeln!(out, "objective {o}").unwrap();
    }
    let a1 = game.actions(Player::One);
    let a2 = game.actions(Player::Two);
    for s in game.states() {
        writeln!(out, "\nstate {}", game.state_name(s)).unwrap();
        let turn = classify_state(game, s).map(|k| k.turn).unwrap_or(Turn::Concurrent);
        let dist = |a: usize, b: usize| {
            game.transition(s, crate::ActionId(a), crate::ActionId(b))
                .iter()
                .map(|(t, w)| format!("{}:{}", game.state_name(t), format_rational(w)))
                .collect::<Vec<_>>()
                .join(" ")
        };
        match turn {
            Turn::Probabilistic => writeln!(out, "  trans _ _ -> {}", dist(0, 0)).unwrap(),
            Turn::Player1 => {
                for (x, a) in a1.iter().enumerate() {
                    writeln!(out, "  trans {a} _ -> {}", dist(x, 0)).unwrap();
                }
            }
            Turn::Player2 => {
                for (y, bn) in a2.iter().enumerate() {
                    writeln!(out, "  trans _ {bn} -> {}", dist(0, y)).unwrap();
                }
            }
            Turn::Concurrent => {
                for (x, a) in a1.iter().enumerate() {
                    for (y, bn) in a2.iter().enumerate() {
                        writeln!(out, "  trans {a} {bn} -> {}", dist(x, y)).unwrap();
                    }
                }
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::game::{classify_game, Interaction, ObservationClass, Players};

    const FIG1: &str = "\
# Player 1 cannot tell the primed states apart.
game hidden_switch
actions1 a1 a2
actions2 b1 b2
obs1 o1 { s1 } o2 { s2 s2' }
obs1 o3 { s3 s3' } o4 { s4 }
obs2 full
init s1

state s1 player2
  trans a1 b1 -> s2:1
  trans a1 b2 -> s2':1
state s2
  trans a1 _ -> s3:1
  trans a2 _ -> s3':1
state s2'
  trans a1 _ -> s3':1
  trans a2 _ -> s3:1
state s3
  trans _ _ -> s1:1
state s3'
  trans _ _ -> s4:1
state s4 probabilistic
  trans a1 b1 -> s4:1
";

    #[test]
    fn hidden_switch_transcription_parses_and_classifies() {
        let g = parse_game(FIG1).unwrap();
        assert_eq!(g, fixtures::hidden_switch());
        let c = classify_game(&g);
        assert_eq!(c.observation, ObservationClass::Os2);
        assert_eq!(c.interaction, Interaction::TurnBased);
        assert_eq!(c.players, Players::TwoAndHalf);
    }

    #[test]
    fn bad_sum_reports_line() {
        let text = "game g\nactions1 a\nactions2 x\nstate s1\n  trans a x -> s2:1\nstate s2\n  trans a x -> s1:1/2 s2:1/3\n";
        let err = parse_game(text).unwrap_err();
        assert_eq!(err.kind, ParseErrorKind::ProbabilitySum("5/6".into()));
        assert_eq!(err.line, 7);
        assert_eq!(err.to_string(), "weights sum to 5/6 ≠ 1 at line 7");
    }

    #[test]
    fn unknown_identifiers_have_locations() {
        let text = "game g\nactions1 a\nactions2 x\nstate s\n  trans a y -> s:1\n";
        let err = parse_game(text).unwrap_err();
        assert_eq!(err.kind, ParseErrorKind::UnknownIdentifier { what: "action", name: "y".into() });
        assert_eq!((err.line, err.col), (5, 11));
        let text = "game g\nactions1 a\nactions2 x\nstate s\n  trans a x -> t:1\n";
        let err = parse_game(text).unwrap_err();
        assert_eq!((err.line, err.col), (5, 16));
    }

    #[test]
    fn overlapping_blocks_rejected() {
        let text = "game g\nactions1 a\nactions2 x\nobs1 { s1 } { s1 s2 }\nstate s1\n trans _ _ -> s2:1\nstate s2\n trans _ _ -> s1:1\n";
        let err = parse_game(text).unwrap_err();
        assert!(err.to_string().contains("blocks overlap at s1"), "{err}");
    }

    #[test]
    fn canonical_round_trip() {
        for g in [fixtures::hidden_switch(), fixtures::skewed_coins(), fixtures::third_split(), fixtures::matching_pennies()] {
            let text = serialize_game(&g);
            let back = parse_game(&text).unwrap();
            assert_eq!(back, g);
            assert_eq!(serialize_game(&back), text);
        }
        let canon = serialize_game(&parse_game(FIG1).unwrap());
        assert!(canon.starts_with("game hidden_switch\nactions1 a1 a2\n"));
        assert!(canon.contains("obs1 o2 { s2 s2' }\n"));
        assert!(!canon.contains("objective"));
    }

    #[test]
    fn objective_section() {
        let text = format!("{FIG1}objective bounded-reach 4 s4\n");
        let doc = parse_document(&text).unwrap();
        assert_eq!(doc.objective, Some(Objective::bounded_reach(["s4"], 4)));
        let again = serialize_document(&doc.game, doc.objective.as_ref());
        assert_eq!(parse_document(&again).unwrap(), doc);
        assert!(parse_document(&format!("{FIG1}objective reach nowhere\n")).is_err());
    }

    #[test]
    fn objective_specs() {
        assert_eq!(parse_objective_spec("reach:s4").unwrap(), Objective::reach(["s4"]));
        assert_eq!(parse_objective_spec("bounded-reach:3:a,b").unwrap(), Objective::bounded_reach(["a", "b"], 3));
        assert!(parse_objective_spec("nonsense:x").is_err());
    }
}
