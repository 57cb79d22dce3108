use super::{
    initial_layer, probabilistic_states, separated_arity, slots_of, ReductionError, ReductionKind, ReductionWitness,
};
use crate::game::{gadget_action_name, Game, GameBuilder, Player, StateId};
use crate::rational::int;
use crate::ActionId;

/// Replaces every probabilistic state by a concurrent deterministic state
/// whose action matrix is the circulant Latin square of its slots.
pub fn coc_gadget(game: &Game) -> Result<(Game, ReductionWitness), ReductionError> {
    let (_, n) = separated_arity(game)?;
    coc_gadget_with_arity(game, n)
}

/// As [`coc_gadget`] with a prescribed arity; fails with `NotUniform` if a
/// probability is not a multiple of `1/n`.
pub fn coc_gadget_with_arity(game: &Game, n: usize) -> Result<(Game, ReductionWitness), ReductionError> {
    let (layers, _) = separated_arity(game)?;
    let mut w = ReductionWitness::identity(ReductionKind::CocGadget, game);
    w.n = n;
    w.initial_layer = initial_layer(game, &layers);
    let targets = probabilistic_states(game, &layers);
    let mut plan = Vec::new();
    for &s in &targets {
        let slots = slots_of(game, s, n)
            .ok_or_else(|| ReductionError::NotUniform { state: game.state_name(s).to_string(), n })?;
        let names: Vec<String> = slots.iter().map(|&t| game.state_name(t).to_string()).collect();
        w.succ.insert(game.state_name(s).to_string(), names.clone());
        w.probabilistic.insert(game.state_name(s).to_string());
        plan.push((game.state_name(s).to_string(), names));
    }
    // One state at a time; each step leaves every other state unchanged.
    let mut current = game.clone();
    for (s, slots) in plan {
        current = coc_step(&current, &s, &slots)?;
    }
    Ok((current, w))
}

fn gadget_index_or_zero(game: &Game, p: Player, a: ActionId) -> usize {
    game.gadget_index(p, a).unwrap_or(0)
}

/// Turns the single state `s` into a Latin-square gadget over `slots`.
///
/// Gadget actions `#g0..#g(n-1)` are added to both alphabets if missing.
/// At every other state a gadget action behaves as the player's smallest
/// original action; at the gadget state original actions behave as `#g0`.
pub fn coc_step(game: &Game, s: &str, slots: &[String]) -> Result<Game, ReductionError> {
    let n = slots.len();
    let existing = game.gadget_actions(Player::One).len();
    if existing != 0 && existing != n {
        return Err(ReductionError::GadgetClash);
    }
    game.require_state(s)?;
    let mut b = game.to_builder();
    if existing == 0 {
        b = with_gadget_actions(game, n);
    }
    let probe = b.build_unchecked()?;
    for x in probe.action_ids(Player::One) {
        for y in probe.action_ids(Player::Two) {
            let i = gadget_index_or_zero(&probe, Player::One, x);
            let j = gadget_index_or_zero(&probe, Player::Two, y);
            let target = &slots[(i + j) % n];
            b.transition(
                s,
                probe.action_name(Player::One, x),
                probe.action_name(Player::Two, y),
                vec![(target.clone(), int(1))],
            );
        }
    }
    Ok(b.build()?)
}

/// Builder for `game` with gadget actions appended to both alphabets,
/// acting as the smallest original action everywhere.
fn with_gadget_actions(game: &Game, n: usize) -> GameBuilder {
    let mut b = game.to_builder();
    let gadgets: Vec<String> = (0..n).map(gadget_action_name).collect();
    b.actions(Player::One, gadgets.iter().cloned()).actions(Player::Two, gadgets.iter().cloned());
    let a1: Vec<String> = game.actions(Player::One).to_vec();
    let a2: Vec<String> = game.actions(Player::Two).to_vec();
    let first1 = &a1[0];
    let first2 = &a2[0];
    for s in game.states() {
        let dist = |x: &str, y: &str| -> Vec<(String, crate::Rational)> {
            let a = game.action_id(Player::One, x).unwrap();
            let bb = game.action_id(Player::Two, y).unwrap();
            game.transition(s, a, bb).iter().map(|(t, w)| (game.state_name(t).to_string(), w.clone())).collect()
        };
        let sn = game.state_name(s);
        for g1 in &gadgets {
            for y in &a2 {
                b.transition(sn, g1, y, dist(first1, y));
            }
            for g2 in &gadgets {
                b.transition(sn, g1, g2, dist(first1, first2));
            }
        }
        for x in &a1 {
            for g2 in &gadgets {
                b.transition(sn, x, g2, dist(x, first2));
            }
        }
    }
    b
}

/// Successor of gadget state `s` under gadget indices `(i, j)`.
pub fn gadget_successor(game: &Game, s: StateId, i: usize, j: usize) -> StateId {
    let g1 = game.gadget_actions(Player::One);
    let g2 = game.gadget_actions(Player::Two);
    game.transition(s, g1[i], g2[j]).point_mass().expect("gadget states are deterministic")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::game::{classify_state, validate, Turn};
    use crate::rational::rat;

    fn two_slot_game() -> Game {
        let mut b = GameBuilder::new("binary");
        for s in ["s*", "s1", "s2"] {
            b.state(s);
        }
        b.actions(Player::One, ["a"]).actions(Player::Two, ["b"]);
        b.uniform_transition("s*", vec![("s1".into(), rat(1, 2)), ("s2".into(), rat(1, 2))]);
        b.uniform_transition("s1", crate::game::tests::one("s*"));
        b.uniform_transition("s2", crate::game::tests::one("s*"));
        b.initial("s1");
        b.build().unwrap()
    }

    #[test]
    fn binary_gadget_matches_matching_pennies_layout() {
        let (r, w) = coc_gadget(&two_slot_game()).unwrap();
        assert_eq!(w.n, 2);
        let s = r.state_id("s*").unwrap();
        let name = |i, j| r.state_name(gadget_successor(&r, s, i, j)).to_string();
        assert_eq!((name(0, 0), name(1, 1)), ("s1".into(), "s1".into()));
        assert_eq!((name(0, 1), name(1, 0)), ("s2".into(), "s2".into()));
        assert_eq!(classify_state(&r, s).unwrap().turn, Turn::Concurrent);
        assert!(classify_state(&r, s).unwrap().deterministic);
        assert!(validate(&r).is_valid());
    }

    #[test]
    fn four_slots_give_the_circulant_matrix() {
        let mut b = GameBuilder::new("four");
        for s in ["h", "s0", "s1", "s2", "s3"] {
            b.state(s);
        }
        b.actions(Player::One, ["a"]).actions(Player::Two, ["b"]);
        let q = rat(1, 4);
        b.uniform_transition("h", ["s0", "s1", "s2", "s3"].iter().map(|s| (s.to_string(), q.clone())).collect());
        for s in ["s0", "s1", "s2", "s3"] {
            b.uniform_transition(s, crate::game::tests::one("h"));
        }
        b.initial("s0");
        let (r, _) = coc_gadget(&b.build().unwrap()).unwrap();
        let h = r.state_id("h").unwrap();
        for i in 0..4 {
            let row: Vec<String> = (0..4).map(|j| r.state_name(gadget_successor(&r, h, i, j)).to_string()).collect();
            let expect: Vec<String> = (0..4).map(|j| format!("s{}", (i + j) % 4)).collect();
            assert_eq!(row, expect);
        }
    }

    #[test]
    fn old_states_ignore_gadget_actions() {
        let g = fixtures::third_split();
        let (r, _) = coc_gadget(&g).unwrap();
        let t = r.state_id("s'0").unwrap();
        let s = r.state_id("s").unwrap();
        for x in r.action_ids(Player::One) {
            for y in r.action_ids(Player::Two) {
                assert_eq!(r.transition(t, x, y).point_mass(), Some(s));
            }
        }
    }

    #[test]
    fn arity_mismatch_is_not_uniform() {
        let g = fixtures::third_split();
        assert!(matches!(coc_gadget_with_arity(&g, 2), Err(ReductionError::NotUniform { .. })));
    }
}
