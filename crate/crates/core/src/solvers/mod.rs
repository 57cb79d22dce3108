//! Oracles used to certify the reductions: exact matrix games, Shapley
//! iteration for complete-observation concurrent games, exact MDP analysis
//! and exact finite-horizon evaluation of fixed strategy pairs.

mod evaluate;
mod matrix;
mod mdp;
mod shapley;

use thiserror::Error;

use crate::game::StateId;
use crate::objective::ObjectiveError;
use crate::rational::{to_f64, Rational};
use crate::strategy::StrategyError;

pub use evaluate::evaluate_fixed;
pub use matrix::{is_saddle, matrix_game_value, MatrixSolution};
pub use mdp::{maximal_end_components, mdp_almost_sure, mdp_reach, mdp_reach_value};
pub use shapley::{concurrent_reach_value, DEFAULT_MAX_ITER, DEFAULT_TOL};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SolverError {
    #[error("game is not complete-observation")]
    NotCompleteObservation,
    #[error("game is not an MDP controlled by player 1 (player 2 must have a single action)")]
    NotMdp,
    #[error("target set is empty")]
    EmptyTarget,
    #[error("game has no initial state")]
    NoInitial,
    #[error("objective `{0}` is not supported here")]
    UnsupportedObjective(&'static str),
    #[error(transparent)]
    Objective(#[from] ObjectiveError),
    #[error(transparent)]
    Strategy(#[from] StrategyError),
}

/// Value of every state, exact or approximate.
#[derive(Clone, Debug, PartialEq)]
pub enum ValueVector {
    Exact(Vec<Rational>),
    Approx { values: Vec<f64>, tol: f64, iterations: usize },
}

impl ValueVector {
    pub fn len(&self) -> usize {
        match self {
            ValueVector::Exact(v) => v.len(),
            ValueVector::Approx { values, .. } => values.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn get_f64(&self, s: StateId) -> f64 {
        match self {
            ValueVector::Exact(v) => to_f64(&v[s.0]),
            ValueVector::Approx { values, .. } => values[s.0],
        }
    }

    pub fn exact(&self, s: StateId) -> Option<&Rational> {
        match self {
            ValueVector::Exact(v) => Some(&v[s.0]),
            ValueVector::Approx { .. } => None,
        }
    }
}
