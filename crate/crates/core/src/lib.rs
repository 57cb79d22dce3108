//! Exact data model, reductions, solvers and derandomization for two-player
//! stochastic games of partial observation.

pub mod derandomize;
pub mod fixtures;
pub mod format;
pub mod game;
pub mod linalg;
pub mod objective;
pub mod random;
pub mod rational;
pub mod reductions;
pub mod solvers;
pub mod strategy;
pub mod tables;
pub mod verify;

pub use game::{ActionId, Distribution, Game, GameBuilder, GameError, ObsId, Player, StateId};
pub use objective::Objective;
pub use rational::Rational;
pub use strategy::{Policy, Strategy};
