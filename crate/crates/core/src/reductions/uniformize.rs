use num_traits::ToPrimitive;

use super::{initial_layer, probabilistic_states, separated_arity, ReductionError, ReductionKind, ReductionWitness};
use crate::game::{Distribution, Game, StateId};
use crate::rational::{rational_gcd, Rational};
use crate::ActionId;

/// Largest `r` such that every value is an integer multiple of `r`.
pub fn gcd_of_probabilities(values: &[Rational]) -> Option<Rational> {
    rational_gcd(values.iter())
}

/// The `n`-tuple of successors of `s`: each successor `t` appears
/// `n * delta(s)(t)` times, in canonical state order. `None` if some weight
/// is not a multiple of `1/n`.
pub fn slots_of(game: &Game, s: StateId, n: usize) -> Option<Vec<StateId>> {
    let d = game.transition(s, ActionId(0), ActionId(0));
    let mut slots = Vec::with_capacity(n);
    for (t, w) in d.iter() {
        let k = w * Rational::from_integer(n.into());
        if !k.is_integer() {
            return None;
        }
        slots.extend(std::iter::repeat(t).take(k.to_integer().to_usize()?));
    }
    (slots.len() == n).then_some(slots)
}

/// Merges duplicate slots back into a distribution.
pub fn collapse_slots(slots: &[StateId]) -> Distribution {
    let w = Rational::new(1.into(), slots.len().into());
    Distribution::from_weights(slots.iter().map(|&s| (s, w.clone())))
}

/// Views every probabilistic state as `n` equally likely slots, with `n`
/// the inverse of the gcd of all probabilities.
///
/// The transition function is unchanged (distributions are stored with
/// merged duplicates); the slot tuples live in the witness.
pub fn uniformize(game: &Game) -> Result<(Game, ReductionWitness), ReductionError> {
    let (layers, n) = separated_arity(game)?;
    let mut w = ReductionWitness::identity(ReductionKind::Uniformize, game);
    w.n = n;
    w.initial_layer = initial_layer(game, &layers);
    for s in probabilistic_states(game, &layers) {
        let slots = slots_of(game, s, n)
            .ok_or_else(|| ReductionError::NotUniform { state: game.state_name(s).to_string(), n })?;
        let name = game.state_name(s).to_string();
        w.succ.insert(name.clone(), slots.iter().map(|&t| game.state_name(t).to_string()).collect());
        w.probabilistic.insert(name);
    }
    Ok((game.clone(), w))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::rational::rat;

    #[test]
    fn gcd_examples() {
        assert_eq!(gcd_of_probabilities(&[rat(1, 3), rat(2, 3)]), Some(rat(1, 3)));
        assert_eq!(gcd_of_probabilities(&[rat(1, 2)]), Some(rat(1, 2)));
        assert_eq!(gcd_of_probabilities(&[rat(1, 4), rat(1, 3)]), Some(rat(1, 12)));
        assert_eq!(gcd_of_probabilities(&[]), None);
    }

    #[test]
    fn third_split_slots() {
        let g = fixtures::third_split();
        let (r, w) = uniformize(&g).unwrap();
        assert_eq!(w.n, 3);
        assert_eq!(w.succ["s"], ["s'0", "s'1", "s'1"]);
        let s = r.state_id("s").unwrap();
        let slots = slots_of(&r, s, 3).unwrap();
        assert_eq!(&collapse_slots(&slots), r.transition(s, ActionId(0), ActionId(0)));
    }

    #[test]
    fn quarter_and_point_masses() {
        let g = fixtures::skewed_coins();
        let (_, w) = uniformize(&g).unwrap();
        assert_eq!(w.n, 12);
        assert_eq!(w.succ["s1"].iter().filter(|x| *x == "s1'").count(), 3);
        let mut b = crate::GameBuilder::new("det");
        b.state("x").state("y");
        b.actions(crate::Player::One, ["a"]).actions(crate::Player::Two, ["b"]);
        b.uniform_transition("x", crate::game::tests::one("y"));
        b.uniform_transition("y", crate::game::tests::one("x"));
        b.initial("x");
        let (_, w) = uniformize(&b.build().unwrap()).unwrap();
        assert_eq!(w.n, 1);
        assert_eq!(w.succ["y"], ["x"]);
    }
}
