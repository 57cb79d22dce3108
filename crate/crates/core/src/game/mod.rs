//! Concurrent stochastic games of partial observation.
//!
//! A [`Game`] holds a finite state set, one action alphabet per player, a
//! total transition function to exact rational [`Distribution`]s and one
//! [`ObservationPartition`] per player. Identifiers are strings kept in
//! lexicographic order; [`StateId`], [`ActionId`] and [`ObsId`] index into
//! those sorted tables.

mod classify;
mod play;
mod validate;

use std::collections::{BTreeSet, HashMap};
use std::fmt;

use num_traits::{One, Zero};
use thiserror::Error;

use crate::rational::{format_rational, Rational};

pub use classify::{classify_game, classify_state, GameClass, Interaction, ObservationClass, Players, StateKind, Turn};
pub use play::observation_sequence;
pub use validate::{interaction_layers, validate, Layer, ValidationReport, Violation};

/// Prefix reserved for actions introduced by the gadget constructions.
pub const GADGET_ACTION_PREFIX: &str = "#g";

#[derive(Copy, Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct StateId(pub usize);

#[derive(Copy, Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ActionId(pub usize);

/// Index of an observation block in a player's partition.
#[derive(Copy, Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ObsId(pub usize);

#[derive(Copy, Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Player {
    One,
    Two,
}

impl Player {
    pub fn index(self) -> usize {
        match self {
            Player::One => 0,
            Player::Two => 1,
        }
    }

    pub fn opponent(self) -> Player {
        match self {
            Player::One => Player::Two,
            Player::Two => Player::One,
        }
    }
}

impl fmt::Display for Player {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Player::One => f.write_str("1"),
            Player::Two => f.write_str("2"),
        }
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GameError {
    #[error("unknown state `{0}`")]
    UnknownState(String),
    #[error("unknown action `{name}` for player {player}")]
    UnknownAction { player: Player, name: String },
    #[error("invalid game: {}", .0.iter().map(|v| v.to_string()).collect::<Vec<_>>().join("; "))]
    Invalid(Vec<Violation>),
    #[error("states {from} and {to} at prefix index {index} are not connected by any transition")]
    Disconnected { index: usize, from: String, to: String },
}

/// A probability distribution over states with exact weights.
///
/// Valid distributions are sorted by state, have no repeated states, only
/// positive weights, and weights summing to exactly one. Construction does
/// not enforce this so that [`validate`] can report the defects.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Default)]
pub struct Distribution {
    support: Vec<(StateId, Rational)>,
}

impl Distribution {
    pub fn point(s: StateId) -> Self {
        Distribution { support: vec![(s, Rational::one())] }
    }

    /// Sorts by state and merges repeated entries by summing their weights.
    pub fn from_weights<I: IntoIterator<Item = (StateId, Rational)>>(items: I) -> Self {
        let mut support: Vec<(StateId, Rational)> = Vec::new();
        let mut items: Vec<_> = items.into_iter().collect();
        items.sort_by_key(|(s, _)| *s);
        for (s, w) in items {
            match support.last_mut() {
                Some((last, acc)) if *last == s => *acc += w,
                _ => support.push((s, w)),
            }
        }
        Distribution { support }
    }

    /// Keeps the entries exactly as given (used for malformed input).
    pub fn raw(mut support: Vec<(StateId, Rational)>) -> Self {
        support.sort_by_key(|(s, _)| *s);
        Distribution { support }
    }

    pub fn iter(&self) -> impl Iterator<Item = (StateId, &Rational)> + '_ {
        self.support.iter().map(|(s, w)| (*s, w))
    }

    pub fn len(&self) -> usize {
        self.support.len()
    }

    pub fn is_empty(&self) -> bool {
        self.support.is_empty()
    }

    pub fn weight(&self, s: StateId) -> Rational {
        self.support
            .iter()
            .filter(|(t, _)| *t == s)
            .fold(Rational::zero(), |acc, (_, w)| acc + w)
    }

    pub fn total(&self) -> Rational {
        self.support.iter().fold(Rational::zero(), |acc, (_, w)| acc + w)
    }

    pub fn point_mass(&self) -> Option<StateId> {
        match self.support.as_slice() {
            [(s, w)] if w.is_one() => Some(*s),
            _ => None,
        }
    }

    pub fn support(&self) -> impl Iterator<Item = StateId> + '_ {
        self.support.iter().map(|(s, _)| *s)
    }
}

/// One block of an explicit observation partition.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ObsBlock {
    pub label: String,
    pub states: Vec<StateId>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ObservationPartition {
    /// Every state is its own observation.
    Full,
    Blocks(Vec<ObsBlock>),
}

/// Observation partition described by state names, as accepted by
/// [`GameBuilder`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum PartitionSpec {
    Full,
    /// `(label, states)`; a missing label defaults to the smallest state.
    Blocks(Vec<(Option<String>, Vec<String>)>),
}

#[derive(Clone, Debug)]
pub struct Game {
    name: String,
    states: Vec<String>,
    actions: [Vec<String>; 2],
    delta: Vec<Distribution>,
    obs: [ObservationPartition; 2],
    initial: Option<StateId>,
    sink: Option<StateId>,
    lookup: HashMap<String, StateId>,
    /// Block of each state, per player. `None` when the partition is broken.
    block_index: [Vec<Option<ObsId>>; 2],
}

impl PartialEq for Game {
    fn eq(&self, other: &Self) -> bool {
        self.name == other.name
            && self.states == other.states
            && self.actions == other.actions
            && self.delta == other.delta
            && self.obs == other.obs
            && self.initial == other.initial
            && self.sink == other.sink
    }
}

impl Game {
    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn num_states(&self) -> usize {
        self.states.len()
    }

    pub fn states(&self) -> impl Iterator<Item = StateId> {
        (0..self.states.len()).map(StateId)
    }

    pub fn state_names(&self) -> &[String] {
        &self.states
    }

    pub fn state_name(&self, s: StateId) -> &str {
        &self.states[s.0]
    }

    pub fn state_id(&self, name: &str) -> Option<StateId> {
        self.lookup.get(name).copied()
    }

    pub fn require_state(&self, name: &str) -> Result<StateId, GameError> {
        self.state_id(name).ok_or_else(|| GameError::UnknownState(name.to_string()))
    }

    pub fn actions(&self, player: Player) -> &[String] {
        &self.actions[player.index()]
    }

    pub fn num_actions(&self, player: Player) -> usize {
        self.actions[player.index()].len()
    }

    pub fn action_name(&self, player: Player, a: ActionId) -> &str {
        &self.actions[player.index()][a.0]
    }

    pub fn action_id(&self, player: Player, name: &str) -> Option<ActionId> {
        self.actions[player.index()]
            .binary_search_by(|x| x.as_str().cmp(name))
            .ok()
            .map(ActionId)
    }

    pub fn action_ids(&self, player: Player) -> impl Iterator<Item = ActionId> {
        (0..self.num_actions(player)).map(ActionId)
    }

    /// Index of a gadget action (`#g<k>`), if `a` is one.
    pub fn gadget_index(&self, player: Player, a: ActionId) -> Option<usize> {
        gadget_action_index(self.action_name(player, a))
    }

    /// Actions that are not gadget actions, in canonical order.
    pub fn original_actions(&self, player: Player) -> Vec<ActionId> {
        self.action_ids(player)
            .filter(|&a| self.gadget_index(player, a).is_none())
            .collect()
    }

    /// Gadget actions sorted by their numeric index.
    pub fn gadget_actions(&self, player: Player) -> Vec<ActionId> {
        let mut v: Vec<(usize, ActionId)> = self
            .action_ids(player)
            .filter_map(|a| self.gadget_index(player, a).map(|k| (k, a)))
            .collect();
        v.sort();
        v.into_iter().map(|(_, a)| a).collect()
    }

    pub fn transition(&self, s: StateId, a: ActionId, b: ActionId) -> &Distribution {
        let n1 = self.actions[0].len();
        let n2 = self.actions[1].len();
        &self.delta[(s.0 * n1 + a.0) * n2 + b.0]
    }

    pub fn observation(&self, player: Player) -> &ObservationPartition {
        &self.obs[player.index()]
    }

    /// True when the player observes every state exactly.
    pub fn has_full_observation(&self, player: Player) -> bool {
        match &self.obs[player.index()] {
            ObservationPartition::Full => true,
            ObservationPartition::Blocks(blocks) => blocks.iter().all(|b| b.states.len() == 1),
        }
    }

    pub fn num_blocks(&self, player: Player) -> usize {
        match &self.obs[player.index()] {
            ObservationPartition::Full => self.states.len(),
            ObservationPartition::Blocks(blocks) => blocks.len(),
        }
    }

    /// Block containing `s`. Panics on games whose partition is broken,
    /// which [`Game`] values produced by [`GameBuilder::build`] never are.
    pub fn block_of(&self, player: Player, s: StateId) -> ObsId {
        self.block_index[player.index()][s.0].expect("state outside every observation block")
    }

    pub fn block_label(&self, player: Player, o: ObsId) -> &str {
        match &self.obs[player.index()] {
            ObservationPartition::Full => &self.states[o.0],
            ObservationPartition::Blocks(blocks) => &blocks[o.0].label,
        }
    }

    pub fn block_id(&self, player: Player, label: &str) -> Option<ObsId> {
        match &self.obs[player.index()] {
            ObservationPartition::Full => self.state_id(label).map(|s| ObsId(s.0)),
            ObservationPartition::Blocks(blocks) => {
                blocks.iter().position(|b| b.label == label).map(ObsId)
            }
        }
    }

    pub fn block_states(&self, player: Player, o: ObsId) -> Vec<StateId> {
        match &self.obs[player.index()] {
            ObservationPartition::Full => vec![StateId(o.0)],
            ObservationPartition::Blocks(blocks) => blocks[o.0].states.clone(),
        }
    }

    pub fn initial(&self) -> Option<StateId> {
        self.initial
    }

    pub fn sink(&self) -> Option<StateId> {
        self.sink
    }

    /// Returns a copy with a different initial state.
    pub fn with_initial(&self, s: StateId) -> Game {
        let mut g = self.clone();
        g.initial = Some(s);
        g
    }

    /// States reachable in one step with positive probability.
    pub fn successors(&self, s: StateId) -> BTreeSet<StateId> {
        let mut out = BTreeSet::new();
        for a in self.action_ids(Player::One) {
            for b in self.action_ids(Player::Two) {
                out.extend(self.transition(s, a, b).support());
            }
        }
        out
    }

    /// An action is illegal for `player` at `s` when the game has a sink
    /// and the action sends the play to the sink whatever the opponent
    /// does.
    pub fn is_illegal(&self, player: Player, s: StateId, a: ActionId) -> bool {
        let Some(sink) = self.sink else { return false };
        if s == sink {
            return false;
        }
        let to_sink = |d: &Distribution| d.point_mass() == Some(sink);
        match player {
            Player::One => self.action_ids(Player::Two).all(|b| to_sink(self.transition(s, a, b))),
            Player::Two => self.action_ids(Player::One).all(|x| to_sink(self.transition(s, x, a))),
        }
    }

    /// Converts back into a name-based builder, the starting point of every
    /// reduction.
    pub fn to_builder(&self) -> GameBuilder {
        let mut b = GameBuilder::new(&self.name);
        for s in &self.states {
            b.state(s);
        }
        b.actions(Player::One, self.actions[0].iter().cloned());
        b.actions(Player::Two, self.actions[1].iter().cloned());
        for s in self.states() {
            for a in self.action_ids(Player::One) {
                for x in self.action_ids(Player::Two) {
                    let dist = self
                        .transition(s, a, x)
                        .iter()
                        .map(|(t, w)| (self.state_name(t).to_string(), w.clone()))
                        .collect();
                    b.transition(self.state_name(s), self.action_name(Player::One, a), self.action_name(Player::Two, x), dist);
                }
            }
        }
        for p in [Player::One, Player::Two] {
            b.observation(p, self.partition_spec(p));
        }
        if let Some(s) = self.initial {
            b.initial(self.state_name(s));
        }
        if let Some(s) = self.sink {
            b.sink(self.state_name(s));
        }
        b
    }

    pub fn partition_spec(&self, player: Player) -> PartitionSpec {
        match &self.obs[player.index()] {
            ObservationPartition::Full => PartitionSpec::Full,
            ObservationPartition::Blocks(blocks) => PartitionSpec::Blocks(
                blocks
                    .iter()
                    .map(|blk| {
                        (
                            Some(blk.label.clone()),
                            blk.states.iter().map(|&s| self.states[s.0].clone()).collect(),
                        )
                    })
                    .collect(),
            ),
        }
    }

    pub fn describe_distribution(&self, d: &Distribution) -> String {
        d.iter()
            .map(|(s, w)| format!("{}:{}", self.state_name(s), format_rational(w)))
            .collect::<Vec<_>>()
            .join(" ")
    }
}

pub fn gadget_action_index(name: &str) -> Option<usize> {
    name.strip_prefix(GADGET_ACTION_PREFIX)?.parse().ok()
}

pub fn gadget_action_name(k: usize) -> String {
    format!("{GADGET_ACTION_PREFIX}{k}")
}

/// Name-based construction of a [`Game`].
///
/// States and actions may be declared in any order; [`build`](Self::build)
/// sorts them into canonical order, resolves names and validates.
#[derive(Clone, Debug)]
pub struct GameBuilder {
    name: String,
    states: Vec<String>,
    actions: [Vec<String>; 2],
    trans: HashMap<(String, String, String), Vec<(String, Rational)>>,
    obs: [PartitionSpec; 2],
    initial: Option<String>,
    sink: Option<String>,
}

impl GameBuilder {
    pub fn new(name: &str) -> Self {
        GameBuilder {
            name: name.to_string(),
            states: Vec::new(),
            actions: [Vec::new(), Vec::new()],
            trans: HashMap::new(),
            obs: [PartitionSpec::Full, PartitionSpec::Full],
            initial: None,
            sink: None,
        }
    }

    pub fn name(&mut self, name: &str) -> &mut Self {
        self.name = name.to_string();
        self
    }

    pub fn state(&mut self, name: &str) -> &mut Self {
        self.states.push(name.to_string());
        self
    }

    pub fn has_state(&self, name: &str) -> bool {
        self.states.iter().any(|s| s == name)
    }

    pub fn actions<I, S>(&mut self, player: Player, names: I) -> &mut Self
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        self.actions[player.index()].extend(names.into_iter().map(Into::into));
        self
    }

    pub fn transition(&mut self, s: &str, a: &str, b: &str, dist: Vec<(String, Rational)>) -> &mut Self {
        self.trans.insert((s.to_string(), a.to_string(), b.to_string()), dist);
        self
    }

    /// Sets the same distribution for every action pair at `s`.
    pub fn uniform_transition(&mut self, s: &str, dist: Vec<(String, Rational)>) -> &mut Self {
        let (a1, a2) = (self.actions[0].clone(), self.actions[1].clone());
        for a in &a1 {
            for b in &a2 {
                self.transition(s, a, b, dist.clone());
            }
        }
        self
    }

    pub fn has_transition(&self, s: &str, a: &str, b: &str) -> bool {
        self.trans.contains_key(&(s.to_string(), a.to_string(), b.to_string()))
    }

    pub fn observation(&mut self, player: Player, spec: PartitionSpec) -> &mut Self {
        self.obs[player.index()] = spec;
        self
    }

    pub fn initial(&mut self, s: &str) -> &mut Self {
        self.initial = Some(s.to_string());
        self
    }

    pub fn sink(&mut self, s: &str) -> &mut Self {
        self.sink = Some(s.to_string());
        self
    }

    /// Builds and validates.
    pub fn build(&self) -> Result<Game, GameError> {
        let game = self.build_unchecked()?;
        let report = validate(&game);
        if report.violations.is_empty() {
            Ok(game)
        } else {
            Err(GameError::Invalid(report.violations))
        }
    }

    /// Builds without checking distributions or partitions; unknown names
    /// are still rejected. Missing transitions become empty distributions.
    pub fn build_unchecked(&self) -> Result<Game, GameError> {
        let mut states = self.states.clone();
        states.sort();
        let mut lookup = HashMap::new();
        for (i, s) in states.iter().enumerate() {
            lookup.entry(s.clone()).or_insert(StateId(i));
        }
        let mut actions = self.actions.clone();
        for alphabet in actions.iter_mut() {
            alphabet.sort();
        }
        let resolve = |name: &str| lookup.get(name).copied().ok_or_else(|| GameError::UnknownState(name.to_string()));

        for ((s, a, b), dist) in &self.trans {
            resolve(s)?;
            for (t, _) in dist {
                resolve(t)?;
            }
            if actions[0].binary_search(a).is_err() {
                return Err(GameError::UnknownAction { player: Player::One, name: a.clone() });
            }
            if actions[1].binary_search(b).is_err() {
                return Err(GameError::UnknownAction { player: Player::Two, name: b.clone() });
            }
        }

        let mut delta = Vec::with_capacity(states.len() * actions[0].len() * actions[1].len());
        for s in &states {
            for a in &actions[0] {
                for b in &actions[1] {
                    let key = (s.clone(), a.clone(), b.clone());
                    let dist = match self.trans.get(&key) {
                        Some(entries) => Distribution::raw(
                            entries.iter().map(|(t, w)| (lookup[t], w.clone())).collect(),
                        ),
                        None => Distribution::default(),
                    };
                    delta.push(dist);
                }
            }
        }

        let mut obs = [ObservationPartition::Full, ObservationPartition::Full];
        for p in 0..2 {
            if let PartitionSpec::Blocks(spec) = &self.obs[p] {
                let mut blocks = Vec::with_capacity(spec.len());
                for (label, members) in spec {
                    let mut ids = members.iter().map(|m| resolve(m)).collect::<Result<Vec<_>, _>>()?;
                    ids.sort();
                    let label = match label {
                        Some(l) => l.clone(),
                        None => ids.first().map(|s| states[s.0].clone()).unwrap_or_default(),
                    };
                    blocks.push(ObsBlock { label, states: ids });
                }
                blocks.sort_by(|x, y| x.label.cmp(&y.label).then_with(|| x.states.cmp(&y.states)));
                obs[p] = ObservationPartition::Blocks(blocks);
            }
        }

        let block_index = [0, 1].map(|p| {
            let mut index = vec![None; states.len()];
            match &obs[p] {
                ObservationPartition::Full => {
                    for (i, slot) in index.iter_mut().enumerate() {
                        *slot = Some(ObsId(i));
                    }
                }
                ObservationPartition::Blocks(blocks) => {
                    for (k, blk) in blocks.iter().enumerate() {
                        for s in &blk.states {
                            index[s.0].get_or_insert(ObsId(k));
                        }
                    }
                }
            }
            index
        });

        let initial = self.initial.as_deref().map(resolve).transpose()?;
        let sink = self.sink.as_deref().map(resolve).transpose()?;

        Ok(Game {
            name: self.name.clone(),
            states,
            actions,
            delta,
            obs,
            initial,
            sink,
            lookup,
            block_index,
        })
    }
}

#[cfg(test)]
pub(crate) mod tests {
    use super::*;
    use crate::rational::{int, rat};

    pub fn one(s: &str) -> Vec<(String, Rational)> {
        vec![(s.to_string(), int(1))]
    }

    #[test]
    fn builder_sorts_and_indexes() {
        let mut b = GameBuilder::new("g");
        b.state("z").state("a");
        b.actions(Player::One, ["y", "x"]).actions(Player::Two, ["b"]);
        b.uniform_transition("z", one("a"));
        b.uniform_transition("a", vec![("a".into(), rat(1, 2)), ("z".into(), rat(1, 2))]);
        let g = b.build().unwrap();
        assert_eq!(g.state_names(), ["a", "z"]);
        assert_eq!(g.actions(Player::One), ["x", "y"]);
        let a = g.state_id("a").unwrap();
        let d = g.transition(a, ActionId(0), ActionId(0));
        assert_eq!(d.weight(g.state_id("z").unwrap()), rat(1, 2));
    }

    #[test]
    fn unknown_names_are_errors() {
        let mut b = GameBuilder::new("g");
        b.state("s").actions(Player::One, ["a"]).actions(Player::Two, ["b"]);
        b.transition("s", "a", "b", one("t"));
        assert_eq!(b.build_unchecked().unwrap_err(), GameError::UnknownState("t".into()));
    }

    #[test]
    fn gadget_names() {
        assert_eq!(gadget_action_index("#g12"), Some(12));
        assert_eq!(gadget_action_index("a"), None);
        assert_eq!(gadget_action_name(3), "#g3");
    }
}
