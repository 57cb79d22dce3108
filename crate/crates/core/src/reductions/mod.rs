//! Game transformations with a certified correspondence of states,
//! objectives and strategies.
//!
//! Every reduction returns the reduced [`Game`] and a [`ReductionWitness`]
//! recording how original states embed, which fresh states stand in for
//! which original state, and how plays are stretched. The witness alone is
//! enough to lift objectives ([`lift_objective`]) and translate strategies
//! ([`translate_policy`]).

mod coc;
mod lift;
mod naive;
mod ost;
mod separate;
mod translate;
mod uniformize;

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use thiserror::Error;

use crate::game::{interaction_layers, Game, GameError, Layer, Player, StateId};
use crate::rational::{rational_gcd, Rational};

pub use coc::{coc_gadget, coc_gadget_with_arity, coc_step, gadget_successor};
pub use lift::{lift_horizon, lift_objective};
pub use naive::{naive_binary_reduction, unresolved_after};
pub use ost::{ost_gadget, ost_gadget_with_arity};
pub use separate::{separate, separate_interaction};
pub use translate::{translate_policy, TranslatedPolicy};
pub use uniformize::{collapse_slots, gcd_of_probabilities, slots_of, uniformize};

#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ReductionKind {
    Separate,
    Uniformize,
    CocGadget,
    OstGadget,
    NaiveBinary,
}

impl ReductionKind {
    pub fn keyword(self) -> &'static str {
        match self {
            ReductionKind::Separate => "separate",
            ReductionKind::Uniformize => "uniformize",
            ReductionKind::CocGadget => "coc",
            ReductionKind::OstGadget => "ost",
            ReductionKind::NaiveBinary => "naive-binary",
        }
    }

    pub fn from_keyword(s: &str) -> Option<Self> {
        Some(match s {
            "separate" => ReductionKind::Separate,
            "uniformize" => ReductionKind::Uniformize,
            "coc" => ReductionKind::CocGadget,
            "ost" => ReductionKind::OstGadget,
            "naive-binary" => ReductionKind::NaiveBinary,
            _ => return None,
        })
    }
}

impl fmt::Display for ReductionKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.keyword())
    }
}

/// How a play of the original game is stretched in the reduced game.
#[derive(Copy, Clone, Debug, PartialEq, Eq)]
pub enum Stutter {
    /// Plays correspond step by step.
    None,
    /// Every original step becomes two: `s0 s0' s1 s1' ...`.
    Double,
    /// One extra step after every visit to a probabilistic state:
    /// `o1 o2 o2 o3 o4 o4 ...` when play starts at an action state.
    AfterProbabilistic,
    /// Data-dependent number of extra steps (only for the binary
    /// counterexample).
    Variable,
}

impl Stutter {
    pub fn keyword(self) -> &'static str {
        match self {
            Stutter::None => "none",
            Stutter::Double => "double",
            Stutter::AfterProbabilistic => "after-probabilistic",
            Stutter::Variable => "variable",
        }
    }

    pub fn from_keyword(s: &str) -> Option<Self> {
        Some(match s {
            "none" => Stutter::None,
            "double" => Stutter::Double,
            "after-probabilistic" => Stutter::AfterProbabilistic,
            "variable" => Stutter::Variable,
            _ => return None,
        })
    }
}

/// Certificate of a reduction, stated over state names so that it can be
/// serialized next to the reduced game.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ReductionWitness {
    pub kind: ReductionKind,
    /// Arity of the uniform distributions involved (1 when not applicable).
    pub n: usize,
    /// Original state name to reduced state name.
    pub embedding: BTreeMap<String, String>,
    /// Fresh reduced state to the original state it belongs to.
    pub aux: BTreeMap<String, String>,
    /// Slot tuple of every probabilistic state, in canonical order.
    pub succ: BTreeMap<String, Vec<String>>,
    /// Probabilistic states of the (separated) original game.
    pub probabilistic: BTreeSet<String>,
    /// Layer of the initial state, for reductions of separated games.
    pub initial_layer: Option<Layer>,
    /// Player choosing the slot offset first in the turn-based gadget.
    pub chooser: Option<Player>,
    pub sink: Option<String>,
    pub stutter: Stutter,
}

impl ReductionWitness {
    pub(crate) fn identity(kind: ReductionKind, game: &Game) -> Self {
        ReductionWitness {
            kind,
            n: 1,
            embedding: game.state_names().iter().map(|s| (s.clone(), s.clone())).collect(),
            aux: BTreeMap::new(),
            succ: BTreeMap::new(),
            probabilistic: BTreeSet::new(),
            initial_layer: None,
            chooser: None,
            sink: None,
            stutter: Stutter::None,
        }
    }

    /// Checks the structural invariants against the reduced game.
    pub fn check(&self, reduced: &Game) -> Result<(), String> {
        if self.n == 0 {
            return Err("witness arity must be at least 1".into());
        }
        let mut image = BTreeSet::new();
        for (orig, red) in &self.embedding {
            if reduced.state_id(red).is_none() {
                return Err(format!("embedding maps {orig} to unknown state {red}"));
            }
            if !image.insert(red) {
                return Err(format!("embedding is not injective at {red}"));
            }
        }
        for (red, orig) in &self.aux {
            if reduced.state_id(red).is_none() {
                return Err(format!("auxiliary state {red} is not in the reduced game"));
            }
            if !self.embedding.contains_key(orig) {
                return Err(format!("auxiliary state {red} refers to unknown source {orig}"));
            }
        }
        for (s, slots) in &self.succ {
            if slots.len() != self.n {
                return Err(format!("slot tuple of {s} has {} entries, expected {}", slots.len(), self.n));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ReductionError {
    #[error("game does not satisfy interaction separation")]
    NotSeparated,
    #[error("distribution at state {state} is not a multiple of 1/{n}")]
    NotUniform { state: String, n: usize },
    #[error("game already has gadget actions of a different arity")]
    GadgetClash,
    #[error("no initial state")]
    NoInitial,
    #[error("{kind} witness cannot be used for {what}")]
    IncompatibleWitness { kind: ReductionKind, what: &'static str },
    #[error(transparent)]
    Game(#[from] GameError),
}

/// Separation layers plus the global arity `n = 1/r` where `r` is the gcd
/// of every probability in the game.
pub(crate) fn separated_arity(game: &Game) -> Result<(Vec<Layer>, usize), ReductionError> {
    let layers = interaction_layers(game).ok_or(ReductionError::NotSeparated)?;
    let mut weights: Vec<Rational> = Vec::new();
    for s in game.states() {
        if layers[s.0] == Layer::Probabilistic {
            let d = game.transition(s, crate::ActionId(0), crate::ActionId(0));
            weights.extend(d.iter().map(|(_, w)| w.clone()));
        }
    }
    let n = match rational_gcd(weights.iter()) {
        None => 1,
        Some(r) => {
            let inv = r.recip();
            usize::try_from(inv.to_integer()).map_err(|_| ReductionError::NotUniform { state: String::new(), n: 0 })?
        }
    };
    Ok((layers, n))
}

pub(crate) fn probabilistic_states(game: &Game, layers: &[Layer]) -> Vec<StateId> {
    game.states().filter(|s| layers[s.0] == Layer::Probabilistic).collect()
}

/// Returns `base` or `base` with enough primes appended to avoid `taken`.
pub(crate) fn fresh_name(base: &str, taken: &dyn Fn(&str) -> bool) -> String {
    let mut name = base.to_string();
    while taken(&name) {
        name.push('\'');
    }
    name
}

pub(crate) fn initial_layer(game: &Game, layers: &[Layer]) -> Option<Layer> {
    game.initial().map(|s| layers[s.0])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;

    #[test]
    fn arity_of_fixtures() {
        assert_eq!(separated_arity(&fixtures::third_split()).unwrap().1, 3);
        assert_eq!(separated_arity(&fixtures::skewed_coins()).unwrap().1, 12);
        assert!(matches!(separated_arity(&fixtures::hidden_switch()), Err(ReductionError::NotSeparated)));
    }

    #[test]
    fn kind_keywords_round_trip() {
        for k in [
            ReductionKind::Separate,
            ReductionKind::Uniformize,
            ReductionKind::CocGadget,
            ReductionKind::OstGadget,
            ReductionKind::NaiveBinary,
        ] {
            assert_eq!(ReductionKind::from_keyword(k.keyword()), Some(k));
        }
    }
}
