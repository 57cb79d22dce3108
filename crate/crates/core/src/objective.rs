//! Winning conditions for Player 1, stated over state names so that they
//! can be carried across reductions by a witness alone.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use thiserror::Error;

use crate::game::{Game, StateId};

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Objective {
    Reach(BTreeSet<String>),
    Safety(BTreeSet<String>),
    Buchi(BTreeSet<String>),
    CoBuchi(BTreeSet<String>),
    /// Minimum priority seen infinitely often must be even.
    Parity(BTreeMap<String, u32>),
    /// Reach the target within `horizon` steps.
    BoundedReach { target: BTreeSet<String>, horizon: usize },
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ObjectiveError {
    #[error("objective mentions unknown state `{0}`")]
    UnknownState(String),
    #[error("parity objective has no priority for state `{0}`")]
    MissingPriority(String),
    #[error("expected a {expected} objective")]
    WrongKind { expected: &'static str },
}

impl Objective {
    pub fn reach<I: IntoIterator<Item = S>, S: Into<String>>(states: I) -> Self {
        Objective::Reach(states.into_iter().map(Into::into).collect())
    }

    pub fn bounded_reach<I: IntoIterator<Item = S>, S: Into<String>>(states: I, horizon: usize) -> Self {
        Objective::BoundedReach { target: states.into_iter().map(Into::into).collect(), horizon }
    }

    pub fn keyword(&self) -> &'static str {
        match self {
            Objective::Reach(_) => "reach",
            Objective::Safety(_) => "safety",
            Objective::Buchi(_) => "buchi",
            Objective::CoBuchi(_) => "cobuchi",
            Objective::Parity(_) => "parity",
            Objective::BoundedReach { .. } => "bounded-reach",
        }
    }

    pub fn target_set(&self) -> Option<&BTreeSet<String>> {
        match self {
            Objective::Reach(t)
            | Objective::Safety(t)
            | Objective::Buchi(t)
            | Objective::CoBuchi(t)
            | Objective::BoundedReach { target: t, .. } => Some(t),
            Objective::Parity(_) => None,
        }
    }

    /// Checks that every mentioned state exists and parity is total.
    pub fn check(&self, game: &Game) -> Result<(), ObjectiveError> {
        match self {
            Objective::Parity(p) => {
                for name in p.keys() {
                    game.state_id(name).ok_or_else(|| ObjectiveError::UnknownState(name.clone()))?;
                }
                for name in game.state_names() {
                    if !p.contains_key(name) {
                        return Err(ObjectiveError::MissingPriority(name.clone()));
                    }
                }
                Ok(())
            }
            _ => self.target_ids(game).map(|_| ()),
        }
    }

    pub fn target_ids(&self, game: &Game) -> Result<BTreeSet<StateId>, ObjectiveError> {
        resolve(game, self.target_set().ok_or(ObjectiveError::WrongKind { expected: "target-set" })?)
    }
}

pub fn resolve(game: &Game, names: &BTreeSet<String>) -> Result<BTreeSet<StateId>, ObjectiveError> {
    names
        .iter()
        .map(|n| game.state_id(n).ok_or_else(|| ObjectiveError::UnknownState(n.clone())))
        .collect()
}

impl fmt::Display for Objective {
    /// Canonical one-line form used in game documents.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.keyword())?;
        match self {
            Objective::Parity(p) => {
                for (s, k) in p {
                    write!(f, " {s}:{k}")?;
                }
            }
            Objective::BoundedReach { target, horizon } => {
                write!(f, " {horizon}")?;
                for s in target {
                    write!(f, " {s}")?;
                }
            }
            other => {
                for s in other.target_set().unwrap() {
                    write!(f, " {s}")?;
                }
            }
        }
        Ok(())
    }
}
