use super::{Game, GameError, ObsId, Player, StateId};

/// Maps a play prefix to the sequence of observation blocks `player` sees.
///
/// Consecutive states must be connected by some positive-probability
/// transition.
pub fn observation_sequence(game: &Game, prefix: &[StateId], player: Player) -> Result<Vec<ObsId>, GameError> {
    for s in prefix {
        if s.0 >= game.num_states() {
            return Err(GameError::UnknownState(format!("#{}", s.0)));
        }
    }
    for (i, w) in prefix.windows(2).enumerate() {
        if !game.successors(w[0]).contains(&w[1]) {
            return Err(GameError::Disconnected {
                index: i + 1,
                from: game.state_name(w[0]).to_string(),
                to: game.state_name(w[1]).to_string(),
            });
        }
    }
    Ok(prefix.iter().map(|&s| game.block_of(player, s)).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;

    fn ids(g: &Game, names: &[&str]) -> Vec<StateId> {
        names.iter().map(|n| g.state_id(n).unwrap()).collect()
    }

    fn labels(g: &Game, p: Player, obs: &[ObsId]) -> Vec<String> {
        obs.iter().map(|&o| g.block_label(p, o).to_string()).collect()
    }

    #[test]
    fn hidden_switch_sequences() {
        let g = fixtures::hidden_switch();
        let seq = observation_sequence(&g, &ids(&g, &["s1", "s2", "s3", "s1"]), Player::One).unwrap();
        assert_eq!(labels(&g, Player::One, &seq), ["o1", "o2", "o3", "o1"]);
        let seq = observation_sequence(&g, &ids(&g, &["s1", "s2'", "s3'", "s4"]), Player::One).unwrap();
        assert_eq!(labels(&g, Player::One, &seq), ["o1", "o2", "o3", "o4"]);
        let seq = observation_sequence(&g, &ids(&g, &["s1", "s2'", "s3'"]), Player::One).unwrap();
        assert_eq!(labels(&g, Player::One, &seq), ["o1", "o2", "o3"]);
    }

    #[test]
    fn full_observation_is_identity() {
        let g = fixtures::hidden_switch();
        let prefix = ids(&g, &["s1", "s2", "s3'", "s4", "s4"]);
        let seq = observation_sequence(&g, &prefix, Player::Two).unwrap();
        assert_eq!(labels(&g, Player::Two, &seq), ["s1", "s2", "s3'", "s4", "s4"]);
    }

    #[test]
    fn disconnected_prefix_names_index() {
        let g = fixtures::hidden_switch();
        let err = observation_sequence(&g, &ids(&g, &["s1", "s2", "s4"]), Player::One).unwrap_err();
        assert!(matches!(err, GameError::Disconnected { index: 2, .. }), "{err}");
    }
}
