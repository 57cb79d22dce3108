use std::collections::{BTreeSet, VecDeque};
use std::fmt;

use num_traits::{One, Signed};

use super::classify::{classify_state, Turn};
use super::{Game, ObservationPartition, Player};
use crate::rational::{format_rational, Rational};

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Violation {
    DuplicateState(String),
    EmptyStateSet,
    EmptyAlphabet(Player),
    DuplicateAction { player: Player, name: String },
    MissingTransition { state: String, a1: String, a2: String },
    NonPositiveWeight { state: String, a1: String, a2: String, target: String, weight: Rational },
    RepeatedSuccessor { state: String, a1: String, a2: String, target: String },
    SumNotOne { state: String, a1: String, a2: String, sum: Rational },
    BlockOverlap { player: Player, state: String },
    Unobserved { player: Player, state: String },
    EmptyBlock { player: Player, label: String },
    DuplicateBlockLabel { player: Player, label: String },
    SinkNotAbsorbing(String),
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::DuplicateState(s) => write!(f, "state `{s}` declared twice"),
            Violation::EmptyStateSet => write!(f, "no states"),
            Violation::EmptyAlphabet(p) => write!(f, "action alphabet of player {p} is empty"),
            Violation::DuplicateAction { player, name } => {
                write!(f, "action `{name}` of player {player} declared twice")
            }
            Violation::MissingTransition { state, a1, a2 } => {
                write!(f, "missing transition at ({state}, {a1}, {a2})")
            }
            Violation::NonPositiveWeight { state, a1, a2, target, weight } => write!(
                f,
                "non-positive weight {} for {target} at ({state}, {a1}, {a2})",
                format_rational(weight)
            ),
            Violation::RepeatedSuccessor { state, a1, a2, target } => {
                write!(f, "successor {target} listed twice at ({state}, {a1}, {a2})")
            }
            Violation::SumNotOne { state, a1, a2, sum } => {
                write!(f, "sum {} ≠ 1 at ({state}, {a1}, {a2})", format_rational(sum))
            }
            Violation::BlockOverlap { player, state } => {
                write!(f, "observation blocks of player {player} overlap at {state}")
            }
            Violation::Unobserved { player, state } => {
                write!(f, "state {state} is in no observation block of player {player}")
            }
            Violation::EmptyBlock { player, label } => {
                write!(f, "observation block `{label}` of player {player} is empty")
            }
            Violation::DuplicateBlockLabel { player, label } => {
                write!(f, "observation label `{label}` of player {player} used twice")
            }
            Violation::SinkNotAbsorbing(s) => write!(f, "sink {s} is not absorbing"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
    /// The state set splits into action states with point-mass transitions
    /// into probabilistic states, and probabilistic states with
    /// action-independent distributions back into action states.
    pub interaction_separated: bool,
    /// Conventions in force that are not violations.
    pub notes: Vec<String>,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }
}

pub fn validate(game: &Game) -> ValidationReport {
    let mut violations = Vec::new();

    if game.num_states() == 0 {
        violations.push(Violation::EmptyStateSet);
    }
    for w in game.state_names().windows(2) {
        if w[0] == w[1] {
            violations.push(Violation::DuplicateState(w[0].clone()));
        }
    }
    for p in [Player::One, Player::Two] {
        let alphabet = game.actions(p);
        if alphabet.is_empty() {
            violations.push(Violation::EmptyAlphabet(p));
        }
        for w in alphabet.windows(2) {
            if w[0] == w[1] {
                violations.push(Violation::DuplicateAction { player: p, name: w[0].clone() });
            }
        }
    }

    for s in game.states() {
        for a in game.action_ids(Player::One) {
            for b in game.action_ids(Player::Two) {
                let coords = || {
                    (
                        game.state_name(s).to_string(),
                        game.action_name(Player::One, a).to_string(),
                        game.action_name(Player::Two, b).to_string(),
                    )
                };
                let d = game.transition(s, a, b);
                if d.is_empty() {
                    let (state, a1, a2) = coords();
                    violations.push(Violation::MissingTransition { state, a1, a2 });
                    continue;
                }
                let mut seen = BTreeSet::new();
                for (t, w) in d.iter() {
                    if !w.is_positive() {
                        let (state, a1, a2) = coords();
                        violations.push(Violation::NonPositiveWeight {
                            state,
                            a1,
                            a2,
                            target: game.state_name(t).to_string(),
                            weight: w.clone(),
                        });
                    }
                    if !seen.insert(t) {
                        let (state, a1, a2) = coords();
                        violations.push(Violation::RepeatedSuccessor {
                            state,
                            a1,
                            a2,
                            target: game.state_name(t).to_string(),
                        });
                    }
                }
                let sum = d.total();
                if !sum.is_one() {
                    let (state, a1, a2) = coords();
                    violations.push(Violation::SumNotOne { state, a1, a2, sum });
                }
            }
        }
    }

    for p in [Player::One, Player::Two] {
        if let ObservationPartition::Blocks(blocks) = game.observation(p) {
            let mut count = vec![0usize; game.num_states()];
            let mut labels = BTreeSet::new();
            for blk in blocks {
                if blk.states.is_empty() {
                    violations.push(Violation::EmptyBlock { player: p, label: blk.label.clone() });
                }
                if !labels.insert(blk.label.as_str()) {
                    violations.push(Violation::DuplicateBlockLabel { player: p, label: blk.label.clone() });
                }
                let mut members = blk.states.clone();
                members.dedup();
                for s in members {
                    count[s.0] += 1;
                }
            }
            for s in game.states() {
                let name = game.state_name(s).to_string();
                match count[s.0] {
                    0 => violations.push(Violation::Unobserved { player: p, state: name }),
                    1 => {}
                    _ => violations.push(Violation::BlockOverlap { player: p, state: name }),
                }
            }
        }
    }

    if let Some(sink) = game.sink() {
        let absorbing = game.action_ids(Player::One).all(|a| {
            game.action_ids(Player::Two)
                .all(|b| game.transition(sink, a, b).point_mass() == Some(sink))
        });
        if !absorbing {
            violations.push(Violation::SinkNotAbsorbing(game.state_name(sink).to_string()));
        }
    }

    let interaction_separated = violations.is_empty() && interaction_layers(game).is_some();

    let mut notes = Vec::new();
    for p in [Player::One, Player::Two] {
        let gadgets = game.gadget_actions(p);
        if !gadgets.is_empty() && gadgets.len() < game.num_actions(p) {
            notes.push(format!(
                "player {p} has gadget actions; outside gadget states they act as the smallest original action, inside gadget states original actions act as {}",
                game.action_name(p, gadgets[0])
            ));
        }
    }

    ValidationReport { violations, interaction_separated, notes }
}

/// Side of the interaction-separation split a state belongs to.
#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Layer {
    /// Players interact here; every transition is a point mass.
    Action,
    /// Action-independent distribution.
    Probabilistic,
}

impl Layer {
    pub fn flip(self) -> Layer {
        match self {
            Layer::Action => Layer::Probabilistic,
            Layer::Probabilistic => Layer::Action,
        }
    }
}

/// Finds a split of the states into action and probabilistic layers that
/// witnesses interaction separation, or `None` if none exists.
///
/// States that are both action-independent and deterministic could sit on
/// either side; their layer is fixed by propagation from constrained
/// states, or, in an unconstrained component, by putting the initial state
/// (else the smallest state) on the action side.
pub fn interaction_layers(game: &Game) -> Option<Vec<Layer>> {
    let n = game.num_states();
    let mut forced = vec![None; n];
    for s in game.states() {
        let kind = classify_state(game, s).ok()?;
        let independent = kind.turn == Turn::Probabilistic;
        forced[s.0] = match (independent, kind.deterministic) {
            (false, false) => return None,
            (false, true) => Some(Layer::Action),
            (true, false) => Some(Layer::Probabilistic),
            (true, true) => None,
        };
    }
    let mut adjacency: Vec<Vec<usize>> = vec![Vec::new(); n];
    for s in game.states() {
        for t in game.successors(s) {
            if t == s {
                return None;
            }
            adjacency[s.0].push(t.0);
            adjacency[t.0].push(s.0);
        }
    }

    let mut seeds: Vec<(usize, Layer)> = (0..n).filter_map(|s| forced[s].map(|l| (s, l))).collect();
    if let Some(init) = game.initial() {
        seeds.push((init.0, Layer::Action));
    }
    seeds.extend((0..n).map(|s| (s, Layer::Action)));

    let mut layer: Vec<Option<Layer>> = vec![None; n];
    for (seed, l) in seeds {
        if layer[seed].is_some() {
            continue;
        }
        layer[seed] = Some(l);
        let mut queue = VecDeque::from([seed]);
        while let Some(u) = queue.pop_front() {
            let lu = layer[u].unwrap();
            if forced[u].is_some_and(|f| f != lu) {
                return None;
            }
            for &v in &adjacency[u] {
                match layer[v] {
                    None => {
                        layer[v] = Some(lu.flip());
                        queue.push_back(v);
                    }
                    Some(lv) if lv == lu => return None,
                    Some(_) => {}
                }
            }
        }
    }
    Some(layer.into_iter().map(|l| l.unwrap()).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::game::tests::one;
    use crate::game::{GameBuilder, PartitionSpec};
    use crate::rational::rat;

    fn two_state() -> GameBuilder {
        let mut b = GameBuilder::new("g");
        b.state("s").state("s1").state("s2");
        b.actions(Player::One, ["a"]).actions(Player::Two, ["b"]);
        b.uniform_transition("s1", one("s"));
        b.uniform_transition("s2", one("s"));
        b
    }

    #[test]
    fn reports_bad_sum() {
        let mut b = two_state();
        b.transition("s", "a", "b", vec![("s1".into(), rat(1, 2)), ("s2".into(), rat(1, 3))]);
        let g = b.build_unchecked().unwrap();
        let report = validate(&g);
        assert_eq!(report.violations.len(), 1);
        let msg = report.violations[0].to_string();
        assert!(msg.contains("sum 5/6 ≠ 1 at (s, a, b)"), "{msg}");
        assert!(!report.interaction_separated);
    }

    #[test]
    fn reports_overlapping_blocks() {
        let mut b = two_state();
        b.transition("s", "a", "b", vec![("s1".into(), rat(1, 2)), ("s2".into(), rat(1, 2))]);
        b.observation(
            Player::One,
            PartitionSpec::Blocks(vec![
                (None, vec!["s1".into()]),
                (Some("x".into()), vec!["s1".into(), "s2".into()]),
                (Some("y".into()), vec!["s".into()]),
            ]),
        );
        let g = b.build_unchecked().unwrap();
        let report = validate(&g);
        assert_eq!(
            report.violations,
            vec![Violation::BlockOverlap { player: Player::One, state: "s1".into() }]
        );
    }

    #[test]
    fn reports_missing_and_nonpositive() {
        let mut b = two_state();
        b.transition("s", "a", "b", vec![("s1".into(), rat(3, 2)), ("s2".into(), rat(-1, 2))]);
        b.uniform_transition("s1", vec![]);
        let g = b.build_unchecked().unwrap();
        let v = validate(&g).violations;
        assert!(v.iter().any(|x| matches!(x, Violation::NonPositiveWeight { .. })));
        assert!(v.iter().any(|x| matches!(x, Violation::MissingTransition { .. })));
    }

    #[test]
    fn separated_game_has_layers() {
        let mut b = two_state();
        b.transition("s", "a", "b", vec![("s1".into(), rat(1, 3)), ("s2".into(), rat(2, 3))]);
        let g = b.build().unwrap();
        let report = validate(&g);
        assert!(report.interaction_separated);
        let layers = interaction_layers(&g).unwrap();
        assert_eq!(layers[g.state_id("s").unwrap().0], Layer::Probabilistic);
        assert_eq!(layers[g.state_id("s1").unwrap().0], Layer::Action);
    }

    #[test]
    fn self_loops_break_separation() {
        let g = fixtures::hidden_switch();
        assert!(validate(&g).is_valid());
        assert!(!validate(&g).interaction_separated);
    }
}
