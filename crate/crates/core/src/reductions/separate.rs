use std::collections::BTreeSet;

use super::{fresh_name, lift_objective, ReductionError, ReductionKind, ReductionWitness, Stutter};
use crate::game::{classify_state, Game, GameBuilder, Layer, PartitionSpec, Player, Turn};
use crate::objective::Objective;
use crate::ActionId;

pub(crate) fn pair_name(s: &str, a: &str, b: &str) -> String {
    format!("({s},{a},{b})")
}

/// Splits every state `s` into an action state `s` and probabilistic
/// states `(s,a,b)`, and lifts the objective to the stuttered plays.
pub fn separate_interaction(
    game: &Game,
    objective: &Objective,
) -> Result<(Game, Objective, ReductionWitness), ReductionError> {
    let (reduced, witness) = separate(game)?;
    let lifted = lift_objective(objective, &witness)?;
    Ok((reduced, lifted, witness))
}

pub fn separate(game: &Game) -> Result<(Game, ReductionWitness), ReductionError> {
    let a1 = game.actions(Player::One);
    let a2 = game.actions(Player::Two);
    let originals: BTreeSet<&str> = game.state_names().iter().map(String::as_str).collect();
    let mut taken: BTreeSet<String> = originals.iter().map(|s| s.to_string()).collect();
    let mut pair = vec![vec![vec![String::new(); a2.len()]; a1.len()]; game.num_states()];
    for s in game.states() {
        for (x, a) in a1.iter().enumerate() {
            for (y, b) in a2.iter().enumerate() {
                let name = fresh_name(&pair_name(game.state_name(s), a, b), &|n| taken.contains(n));
                taken.insert(name.clone());
                pair[s.0][x][y] = name;
            }
        }
    }

    let mut bld = GameBuilder::new(game.name());
    bld.actions(Player::One, a1.iter().cloned()).actions(Player::Two, a2.iter().cloned());
    let mut witness = ReductionWitness::identity(ReductionKind::Separate, game);
    witness.stutter = Stutter::Double;
    witness.initial_layer = Some(Layer::Action);

    for s in game.states() {
        let sn = game.state_name(s);
        bld.state(sn);
        let turn = classify_state(game, s)?.turn;
        for (x, a) in a1.iter().enumerate() {
            for (y, b) in a2.iter().enumerate() {
                // Turn-based states keep depending on one action only.
                let (tx, ty) = match turn {
                    Turn::Player1 | Turn::Probabilistic => (x, 0),
                    Turn::Player2 => (0, y),
                    Turn::Concurrent => (x, y),
                };
                bld.transition(sn, a, b, vec![(pair[s.0][tx][ty].clone(), crate::rational::int(1))]);
                let p = &pair[s.0][x][y];
                bld.state(p);
                let dist: Vec<_> = game
                    .transition(s, ActionId(x), ActionId(y))
                    .iter()
                    .map(|(t, w)| (game.state_name(t).to_string(), w.clone()))
                    .collect();
                bld.uniform_transition(p, dist);
                witness.aux.insert(p.clone(), sn.to_string());
                witness.probabilistic.insert(p.clone());
            }
        }
    }

    for p in [Player::One, Player::Two] {
        let spec = match game.partition_spec(p) {
            PartitionSpec::Full => PartitionSpec::Full,
            PartitionSpec::Blocks(blocks) => PartitionSpec::Blocks(
                blocks
                    .into_iter()
                    .map(|(label, members)| {
                        let mut all = members.clone();
                        for m in &members {
                            let s = game.state_id(m).unwrap();
                            for row in &pair[s.0] {
                                all.extend(row.iter().cloned());
                            }
                        }
                        (label, all)
                    })
                    .collect(),
            ),
        };
        bld.observation(p, spec);
    }
    if let Some(s) = game.initial() {
        bld.initial(game.state_name(s));
    }
    let reduced = bld.build()?;
    Ok((reduced, witness))
}
