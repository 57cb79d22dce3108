use std::collections::{BTreeSet, HashMap};

use num_traits::Zero;

use super::SolverError;
use crate::game::{Game, ObsId, Player, StateId};
use crate::objective::Objective;
use crate::rational::Rational;
use crate::strategy::{ActionDist, Policy, StrategyError};

/// Exact probability that play from the initial state reaches the target
/// within the objective's horizon when Player 1 follows `sigma` and
/// Player 2 follows `pi`.
///
/// The measure is pushed forward over triples (state, Player-1 history,
/// Player-2 history); mass that enters the target is banked and stops.
pub fn evaluate_fixed(game: &Game, sigma: &dyn Policy, pi: &dyn Policy, objective: &Objective) -> Result<Rational, SolverError> {
    let Objective::BoundedReach { horizon, .. } = objective else {
        return Err(SolverError::UnsupportedObjective(objective.keyword()));
    };
    let target = objective.target_ids(game)?;
    let init = game.initial().ok_or(SolverError::NoInitial)?;
    evaluate_from(game, init, sigma, pi, &target, *horizon)
}

fn evaluate_from(
    game: &Game,
    init: StateId,
    sigma: &dyn Policy,
    pi: &dyn Policy,
    target: &BTreeSet<StateId>,
    horizon: usize,
) -> Result<Rational, SolverError> {
    for (p, policy) in [(Player::One, sigma), (Player::Two, pi)] {
        if policy.player() != p {
            return Err(StrategyError::WrongPlayer { player: policy.player() }.into());
        }
        if policy.horizon() < horizon {
            return Err(StrategyError::HorizonMismatch { strategy: policy.horizon(), objective: horizon }.into());
        }
    }
    if target.contains(&init) {
        return Ok(Rational::from_integer(1.into()));
    }
    let mut cache: [HashMap<Vec<ObsId>, ActionDist>; 2] = [HashMap::new(), HashMap::new()];
    let mut decide = |p: Player, policy: &dyn Policy, h: &[ObsId]| -> Result<ActionDist, SolverError> {
        if let Some(d) = cache[p.index()].get(h) {
            return Ok(d.clone());
        }
        let d = policy.decide(h)?;
        cache[p.index()].insert(h.to_vec(), d.clone());
        Ok(d)
    };

    type Key = (StateId, Vec<ObsId>, Vec<ObsId>);
    let mut reached = Rational::zero();
    let mut frontier: HashMap<Key, Rational> = HashMap::new();
    frontier.insert(
        (init, vec![game.block_of(Player::One, init)], vec![game.block_of(Player::Two, init)]),
        Rational::from_integer(1.into()),
    );
    for _ in 0..horizon {
        let mut next: HashMap<Key, Rational> = HashMap::new();
        let mut keys: Vec<&Key> = frontier.keys().collect();
        keys.sort();
        for key in keys {
            let (s, h1, h2) = key;
            let mass = &frontier[key];
            let d1 = decide(Player::One, sigma, h1)?;
            let d2 = decide(Player::Two, pi, h2)?;
            check_admissible(game, Player::One, *s, &d1)?;
            check_admissible(game, Player::Two, *s, &d2)?;
            for (a, pa) in &d1 {
                for (b, pb) in &d2 {
                    let w = mass * pa * pb;
                    for (t, pt) in game.transition(*s, *a, *b).iter() {
                        let m = &w * pt;
                        if target.contains(&t) {
                            reached += m;
                            continue;
                        }
                        let mut n1 = h1.clone();
                        n1.push(game.block_of(Player::One, t));
                        let mut n2 = h2.clone();
                        n2.push(game.block_of(Player::Two, t));
                        *next.entry((t, n1, n2)).or_insert_with(Rational::zero) += m;
                    }
                }
            }
        }
        frontier = next;
    }
    Ok(reached)
}

fn check_admissible(game: &Game, p: Player, s: StateId, d: &ActionDist) -> Result<(), SolverError> {
    for (a, _) in d {
        if a.0 >= game.num_actions(p) {
            return Err(StrategyError::BadDistribution(format!("action index {} out of range", a.0)).into());
        }
        if game.is_illegal(p, s, *a) {
            return Err(StrategyError::Inadmissible {
                player: p,
                action: game.action_name(p, *a).to_string(),
                state: game.state_name(s).to_string(),
            }
            .into());
        }
    }
    Ok(())
}
