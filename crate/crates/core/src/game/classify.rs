use std::fmt;

use super::{Game, GameError, Player, StateId};

/// Which player's action the transition function depends on.
#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash)]
pub enum Turn {
    Player1,
    Player2,
    /// Independent of both actions (both turn conditions hold).
    Probabilistic,
    Concurrent,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash)]
pub struct StateKind {
    pub turn: Turn,
    /// Every transition out of the state is a point mass.
    pub deterministic: bool,
}

impl StateKind {
    pub fn is_turn_based(&self) -> bool {
        self.turn != Turn::Concurrent
    }
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ObservationClass {
    /// Partial observation for both players.
    Pa,
    /// Player 1 observes everything, Player 2 does not.
    Os1,
    /// Player 2 observes everything, Player 1 does not.
    Os2,
    /// Complete observation.
    Co,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Interaction {
    Concurrent,
    TurnBased,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Players {
    TwoAndHalf,
    OneAndHalf,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct GameClass {
    pub observation: ObservationClass,
    pub interaction: Interaction,
    pub players: Players,
}

impl fmt::Display for GameClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let obs = match self.observation {
            ObservationClass::Pa => "Pa",
            ObservationClass::Os1 => "Os1",
            ObservationClass::Os2 => "Os2",
            ObservationClass::Co => "Co",
        };
        let inter = match self.interaction {
            Interaction::Concurrent => "C",
            Interaction::TurnBased => "T",
        };
        let players = match self.players {
            Players::TwoAndHalf => "2.5-player",
            Players::OneAndHalf => "1.5-player",
        };
        write!(f, "{obs}{inter} {players}")
    }
}

impl fmt::Display for StateKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let turn = match self.turn {
            Turn::Player1 => "player1",
            Turn::Player2 => "player2",
            Turn::Probabilistic => "probabilistic",
            Turn::Concurrent => "concurrent",
        };
        if self.deterministic {
            write!(f, "{turn} deterministic")
        } else {
            write!(f, "{turn}")
        }
    }
}

pub(crate) fn player1_condition(game: &Game, s: StateId) -> bool {
    // delta(s,a,b) = delta(s,a,b') for all a, b, b'
    game.action_ids(Player::One).all(|a| {
        let first = game.transition(s, a, super::ActionId(0));
        game.action_ids(Player::Two).all(|b| game.transition(s, a, b) == first)
    })
}

pub(crate) fn player2_condition(game: &Game, s: StateId) -> bool {
    game.action_ids(Player::Two).all(|b| {
        let first = game.transition(s, super::ActionId(0), b);
        game.action_ids(Player::One).all(|a| game.transition(s, a, b) == first)
    })
}

pub fn classify_state(game: &Game, s: StateId) -> Result<StateKind, GameError> {
    if s.0 >= game.num_states() {
        return Err(GameError::UnknownState(format!("#{}", s.0)));
    }
    let turn = match (player1_condition(game, s), player2_condition(game, s)) {
        (true, true) => Turn::Probabilistic,
        (true, false) => Turn::Player1,
        (false, true) => Turn::Player2,
        (false, false) => Turn::Concurrent,
    };
    let deterministic = game
        .action_ids(Player::One)
        .all(|a| game.action_ids(Player::Two).all(|b| game.transition(s, a, b).point_mass().is_some()));
    Ok(StateKind { turn, deterministic })
}

pub fn classify_game(game: &Game) -> GameClass {
    let full1 = game.has_full_observation(Player::One);
    let full2 = game.has_full_observation(Player::Two);
    let observation = match (full1, full2) {
        (true, true) => ObservationClass::Co,
        (true, false) => ObservationClass::Os1,
        (false, true) => ObservationClass::Os2,
        (false, false) => ObservationClass::Pa,
    };
    let turn_based = game
        .states()
        .all(|s| classify_state(game, s).map(|k| k.is_turn_based()).unwrap_or(false));
    let interaction = if turn_based { Interaction::TurnBased } else { Interaction::Concurrent };
    let players = if game.num_actions(Player::One) == 1 || game.num_actions(Player::Two) == 1 {
        Players::OneAndHalf
    } else {
        Players::TwoAndHalf
    };
    GameClass { observation, interaction, players }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::game::{GameBuilder, PartitionSpec};
    use crate::game::tests::one;

    #[test]
    fn hidden_switch_states() {
        let g = fixtures::hidden_switch();
        let s1 = g.state_id("s1").unwrap();
        let s4 = g.state_id("s4").unwrap();
        let s2 = g.state_id("s2").unwrap();
        assert_eq!(
            classify_state(&g, s1).unwrap(),
            StateKind { turn: Turn::Player2, deterministic: true }
        );
        assert_eq!(
            classify_state(&g, s4).unwrap(),
            StateKind { turn: Turn::Probabilistic, deterministic: true }
        );
        assert_eq!(classify_state(&g, s2).unwrap().turn, Turn::Player1);
        assert!(classify_state(&g, StateId(99)).is_err());
    }

    #[test]
    fn latin_square_state_is_concurrent() {
        let mut b = GameBuilder::new("latin");
        b.state("s1").state("s2");
        b.actions(Player::One, ["a1", "a2"]).actions(Player::Two, ["b1", "b2"]);
        for s in ["s1", "s2"] {
            b.transition(s, "a1", "b1", one("s1"));
            b.transition(s, "a2", "b2", one("s1"));
            b.transition(s, "a1", "b2", one("s2"));
            b.transition(s, "a2", "b1", one("s2"));
        }
        let g = b.build().unwrap();
        for s in g.states() {
            assert_eq!(
                classify_state(&g, s).unwrap(),
                StateKind { turn: Turn::Concurrent, deterministic: true }
            );
        }
        assert_eq!(
            classify_game(&g),
            GameClass {
                observation: ObservationClass::Co,
                interaction: Interaction::Concurrent,
                players: Players::TwoAndHalf
            }
        );
    }

    #[test]
    fn hidden_switch_class() {
        let g = fixtures::hidden_switch();
        assert_eq!(
            classify_game(&g),
            GameClass {
                observation: ObservationClass::Os2,
                interaction: Interaction::TurnBased,
                players: Players::TwoAndHalf
            }
        );
    }

    #[test]
    fn mdp_class() {
        let mut b = GameBuilder::new("mdp");
        b.state("s").state("t");
        b.actions(Player::One, ["a", "c"]).actions(Player::Two, ["-b"]);
        b.transition("s", "a", "-b", one("t"));
        b.transition("s", "c", "-b", one("s"));
        b.uniform_transition("t", one("t"));
        b.observation(Player::One, PartitionSpec::Blocks(vec![(None, vec!["s".into()]), (None, vec!["t".into()])]));
        let g = b.build().unwrap();
        // all-singleton explicit blocks count as complete observation
        assert_eq!(
            classify_game(&g),
            GameClass {
                observation: ObservationClass::Co,
                interaction: Interaction::TurnBased,
                players: Players::OneAndHalf
            }
        );
    }
}
