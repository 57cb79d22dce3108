//! Observation-based strategies over a finite horizon.
//!
//! A strategy is consulted with the sequence of observation blocks its
//! owner has seen so far (the current one included). It never sees raw
//! states, so every strategy here is observation-based by construction.

use std::collections::BTreeMap;

use num_traits::{One, Signed, Zero};
use thiserror::Error;

use crate::game::{ActionId, Game, ObsId, Player};
use crate::rational::{format_rational, Rational};

/// Sorted by action, positive weights summing to one.
pub type ActionDist = Vec<(ActionId, Rational)>;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum StrategyError {
    #[error("strategy of player {player} is undefined at observation history [{history}]")]
    Undefined { player: Player, history: String },
    #[error("observation history of length {len} exceeds strategy horizon {horizon}")]
    BeyondHorizon { len: usize, horizon: usize },
    #[error("action weights must be positive and sum to 1 (got {0})")]
    BadDistribution(String),
    #[error("strategy horizon {strategy} is shorter than the objective horizon {objective}")]
    HorizonMismatch { strategy: usize, objective: usize },
    #[error("strategy of player {player} is for the other player")]
    WrongPlayer { player: Player },
    #[error("player {player} puts weight on illegal action {action} at state {state}")]
    Inadmissible { player: Player, action: String, state: String },
}

/// Anything that maps observation histories to action distributions.
pub trait Policy {
    fn player(&self) -> Player;

    /// Longest observation history the policy is defined on.
    fn horizon(&self) -> usize;

    fn decide(&self, history: &[ObsId]) -> Result<ActionDist, StrategyError>;
}

impl<P: Policy + ?Sized> Policy for &P {
    fn player(&self) -> Player {
        (**self).player()
    }
    fn horizon(&self) -> usize {
        (**self).horizon()
    }
    fn decide(&self, history: &[ObsId]) -> Result<ActionDist, StrategyError> {
        (**self).decide(history)
    }
}

impl<P: Policy + ?Sized> Policy for Box<P> {
    fn player(&self) -> Player {
        (**self).player()
    }
    fn horizon(&self) -> usize {
        (**self).horizon()
    }
    fn decide(&self, history: &[ObsId]) -> Result<ActionDist, StrategyError> {
        (**self).decide(history)
    }
}

#[derive(Copy, Clone, Debug, PartialEq, Eq)]
pub enum StrategyKind {
    Pure,
    Randomized,
}

/// Table-driven strategy.
///
/// Exact histories take precedence; `by_last` entries apply to any history
/// ending in the given observation and make stationary strategies cheap to
/// write down.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Strategy {
    player: Player,
    horizon: usize,
    table: BTreeMap<Vec<ObsId>, ActionDist>,
    by_last: BTreeMap<ObsId, ActionDist>,
}

pub fn normalize(dist: ActionDist) -> Result<ActionDist, StrategyError> {
    let mut merged: BTreeMap<ActionId, Rational> = BTreeMap::new();
    for (a, w) in dist {
        *merged.entry(a).or_insert_with(Rational::zero) += w;
    }
    let total = merged.values().fold(Rational::zero(), |acc, w| acc + w);
    if !total.is_one() || merged.values().any(|w| !w.is_positive()) {
        let shown = merged
            .iter()
            .map(|(a, w)| format!("#{}:{}", a.0, format_rational(w)))
            .collect::<Vec<_>>()
            .join(" ");
        return Err(StrategyError::BadDistribution(shown));
    }
    Ok(merged.into_iter().collect())
}

pub fn point(a: ActionId) -> ActionDist {
    vec![(a, Rational::one())]
}

pub fn uniform(actions: &[ActionId]) -> ActionDist {
    let w = Rational::new(1.into(), (actions.len() as i64).into());
    let mut v: ActionDist = actions.iter().map(|&a| (a, w.clone())).collect();
    v.sort_by_key(|(a, _)| *a);
    v
}

impl Strategy {
    pub fn new(player: Player, horizon: usize) -> Self {
        Strategy { player, horizon, table: BTreeMap::new(), by_last: BTreeMap::new() }
    }

    /// Same distribution everywhere.
    pub fn stationary(game: &Game, player: Player, horizon: usize, dist: ActionDist) -> Result<Self, StrategyError> {
        let mut s = Strategy::new(player, horizon);
        for o in 0..game.num_blocks(player) {
            s.set_by_last(ObsId(o), dist.clone())?;
        }
        Ok(s)
    }

    pub fn set(&mut self, history: Vec<ObsId>, dist: ActionDist) -> Result<(), StrategyError> {
        if history.len() > self.horizon {
            return Err(StrategyError::BeyondHorizon { len: history.len(), horizon: self.horizon });
        }
        self.table.insert(history, normalize(dist)?);
        Ok(())
    }

    pub fn set_by_last(&mut self, obs: ObsId, dist: ActionDist) -> Result<(), StrategyError> {
        self.by_last.insert(obs, normalize(dist)?);
        Ok(())
    }

    pub fn entries(&self) -> impl Iterator<Item = (&Vec<ObsId>, &ActionDist)> {
        self.table.iter()
    }

    pub fn stationary_entries(&self) -> impl Iterator<Item = (&ObsId, &ActionDist)> {
        self.by_last.iter()
    }

    pub fn kind(&self) -> StrategyKind {
        let pure = self.table.values().chain(self.by_last.values()).all(|d| d.len() == 1);
        if pure {
            StrategyKind::Pure
        } else {
            StrategyKind::Randomized
        }
    }

    pub fn is_pure(&self) -> bool {
        self.kind() == StrategyKind::Pure
    }

    pub fn with_horizon(mut self, horizon: usize) -> Self {
        self.horizon = horizon;
        self.table.retain(|h, _| h.len() <= horizon);
        self
    }
}

impl Policy for Strategy {
    fn player(&self) -> Player {
        self.player
    }

    fn horizon(&self) -> usize {
        self.horizon
    }

    fn decide(&self, history: &[ObsId]) -> Result<ActionDist, StrategyError> {
        if history.len() > self.horizon {
            return Err(StrategyError::BeyondHorizon { len: history.len(), horizon: self.horizon });
        }
        if let Some(d) = self.table.get(history) {
            return Ok(d.clone());
        }
        if let Some(d) = history.last().and_then(|o| self.by_last.get(o)) {
            return Ok(d.clone());
        }
        Err(StrategyError::Undefined {
            player: self.player,
            history: history.iter().map(|o| o.0.to_string()).collect::<Vec<_>>().join(" "),
        })
    }
}

/// A player with a single action needs no strategy file.
#[derive(Clone, Debug)]
pub struct TrivialPolicy {
    pub player: Player,
    pub horizon: usize,
}

impl Policy for TrivialPolicy {
    fn player(&self) -> Player {
        self.player
    }
    fn horizon(&self) -> usize {
        self.horizon
    }
    fn decide(&self, _history: &[ObsId]) -> Result<ActionDist, StrategyError> {
        Ok(point(ActionId(0)))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::rational::rat;

    #[test]
    fn exact_history_beats_stationary() {
        let g = fixtures::hidden_switch();
        let mut s = Strategy::stationary(&g, Player::One, 5, point(ActionId(0))).unwrap();
        s.set(vec![ObsId(0), ObsId(1)], point(ActionId(1))).unwrap();
        assert_eq!(s.decide(&[ObsId(0), ObsId(1)]).unwrap(), point(ActionId(1)));
        assert_eq!(s.decide(&[ObsId(1)]).unwrap(), point(ActionId(0)));
        assert!(s.is_pure());
    }

    #[test]
    fn rejects_bad_weights_and_long_histories() {
        let mut s = Strategy::new(Player::One, 1);
        assert!(s.set(vec![ObsId(0)], vec![(ActionId(0), rat(1, 2))]).is_err());
        assert!(s.set(vec![ObsId(0), ObsId(0)], point(ActionId(0))).is_err());
        s.set(vec![ObsId(0)], vec![(ActionId(1), rat(1, 2)), (ActionId(0), rat(1, 2))]).unwrap();
        assert_eq!(s.kind(), StrategyKind::Randomized);
        assert!(matches!(s.decide(&[ObsId(3)]), Err(StrategyError::Undefined { .. })));
    }

    #[test]
    fn normalize_merges_and_sorts() {
        let d = normalize(vec![(ActionId(2), rat(1, 4)), (ActionId(0), rat(1, 2)), (ActionId(2), rat(1, 4))]).unwrap();
        assert_eq!(d, vec![(ActionId(0), rat(1, 2)), (ActionId(2), rat(1, 2))]);
    }
}
