//! Seeded generators for games and strategies. Everything is a function of
//! the seed, so batch checks are reproducible byte for byte.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::game::{ActionId, Game, GameBuilder, ObsId, PartitionSpec, Player};
use crate::rational::{rat, Rational};
use crate::strategy::{point, ActionDist, Policy, Strategy, StrategyError};

pub type Rng64 = ChaCha8Rng;

pub fn rng(seed: u64) -> Rng64 {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Seed for the `index`-th trial of a batch.
pub fn trial_seed(seed: u64, index: u64) -> u64 {
    mix(seed ^ mix(index.wrapping_add(0x9e37_79b9_7f4a_7c15)))
}

/// SplitMix64 finalizer.
fn mix(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Random distribution over `targets` with weights that are multiples of
/// `1/den`.
pub fn random_distribution(rng: &mut Rng64, targets: &[String], den: i64) -> Vec<(String, Rational)> {
    let mut counts = vec![0i64; targets.len()];
    for _ in 0..den {
        counts[rng.gen_range(0..targets.len())] += 1;
    }
    targets.iter().zip(counts).filter(|(_, c)| *c > 0).map(|(t, c)| (t.clone(), rat(c, den))).collect()
}

fn names(prefix: &str, n: usize) -> Vec<String> {
    (0..n).map(|i| format!("{prefix}{i}")).collect()
}

/// Partition of `states` into at most `max_blocks` non-empty blocks.
fn random_blocks(rng: &mut Rng64, states: &[String], max_blocks: usize) -> PartitionSpec {
    let k = rng.gen_range(1..=max_blocks.min(states.len()));
    let mut order: Vec<usize> = (0..states.len()).collect();
    order.shuffle(rng);
    let mut blocks: Vec<Vec<String>> = vec![Vec::new(); k];
    for (pos, &i) in order.iter().enumerate() {
        let b = if pos < k { pos } else { rng.gen_range(0..k) };
        blocks[b].push(states[i].clone());
    }
    PartitionSpec::Blocks(blocks.into_iter().enumerate().map(|(i, m)| (Some(format!("o{i}")), m)).collect())
}

/// Complete-observation concurrent game with probabilities in `{k/4}`.
/// Returns the game and a non-empty target set (state `q0` is initial).
pub fn random_concurrent_game(rng: &mut Rng64, max_states: usize, max_actions: usize) -> (Game, Vec<String>) {
    let n = rng.gen_range(2..=max_states.max(2));
    let states = names("q", n);
    let a1 = names("a", rng.gen_range(1..=max_actions));
    let a2 = names("b", rng.gen_range(1..=max_actions));
    let mut b = GameBuilder::new("random");
    for s in &states {
        b.state(s);
    }
    b.actions(Player::One, a1.iter().cloned()).actions(Player::Two, a2.iter().cloned());
    for s in &states {
        for x in &a1 {
            for y in &a2 {
                let d = random_distribution(rng, &states, 4);
                b.transition(s, x, y, d);
            }
        }
    }
    b.initial(&states[0]);
    let target = vec![states[rng.gen_range(1..n)].clone()];
    (b.build().expect("random games are valid"), target)
}

/// Game of partial observation for both players (or one, with
/// `full_for`), concurrent, probabilities in `{k/4}`.
pub fn random_partial_game(
    rng: &mut Rng64,
    max_states: usize,
    max_actions: usize,
    full_for: Option<Player>,
) -> (Game, Vec<String>) {
    let (g, target) = random_concurrent_game(rng, max_states, max_actions);
    let mut b = g.to_builder();
    let states: Vec<String> = g.state_names().to_vec();
    for p in [Player::One, Player::Two] {
        if full_for != Some(p) {
            b.observation(p, random_blocks(rng, &states, 3));
        }
    }
    (b.build().expect("random games are valid"), target)
}

/// Separated game whose probabilistic states are uniform over `n` slots.
///
/// Action states `c*` are concurrent or turn-based at random and move
/// deterministically to probabilistic states `p*`; those pick `n` slots
/// among the action states. Player 1 observes through `obs1` blocks over
/// all states; Player 2 observes everything.
pub fn random_uniform_game(rng: &mut Rng64, n: usize, max_states: usize, max_actions: usize) -> Game {
    let na = rng.gen_range(1..=max_states.max(1));
    let np = rng.gen_range(1..=max_states.max(1));
    let cs = names("c", na);
    let ps = names("p", np);
    let a1 = names("a", rng.gen_range(1..=max_actions));
    let a2 = names("b", rng.gen_range(1..=max_actions));
    let mut b = GameBuilder::new("uniform");
    for s in cs.iter().chain(&ps) {
        b.state(s);
    }
    b.actions(Player::One, a1.iter().cloned()).actions(Player::Two, a2.iter().cloned());
    let one = |t: &String| vec![(t.clone(), rat(1, 1))];
    for c in &cs {
        match rng.gen_range(0..3) {
            0 => {
                for x in &a1 {
                    let t = ps.choose(rng).unwrap().clone();
                    for y in &a2 {
                        b.transition(c, x, y, one(&t));
                    }
                }
            }
            1 => {
                for y in &a2 {
                    let t = ps.choose(rng).unwrap().clone();
                    for x in &a1 {
                        b.transition(c, x, y, one(&t));
                    }
                }
            }
            _ => {
                for x in &a1 {
                    for y in &a2 {
                        b.transition(c, x, y, one(ps.choose(rng).unwrap()));
                    }
                }
            }
        }
    }
    for p in &ps {
        let mut counts: Vec<(String, i64)> = Vec::new();
        for _ in 0..n {
            let t = cs.choose(rng).unwrap().clone();
            match counts.iter_mut().find(|(u, _)| *u == t) {
                Some((_, k)) => *k += 1,
                None => counts.push((t, 1)),
            }
        }
        b.uniform_transition(p, counts.into_iter().map(|(t, k)| (t, rat(k, n as i64))).collect());
    }
    let all: Vec<String> = cs.iter().chain(&ps).cloned().collect();
    b.observation(Player::One, random_blocks(rng, &all, 3));
    b.initial(if rng.gen_bool(0.5) { &cs[0] } else { &ps[0] });
    b.build().expect("random uniform games are valid")
}

/// POMDP for Player 1 (Player 2 has one action) with probabilities in
/// `{k/4}` or `{k/6}`.
pub fn random_pomdp(rng: &mut Rng64, max_states: usize, max_obs: usize, max_actions: usize) -> (Game, Vec<String>) {
    let n = rng.gen_range(2..=max_states.max(2));
    let states = names("q", n);
    let a1 = names("a", rng.gen_range(1..=max_actions));
    let den = if rng.gen_bool(0.5) { 4 } else { 6 };
    let mut b = GameBuilder::new("pomdp");
    for s in &states {
        b.state(s);
    }
    b.actions(Player::One, a1.iter().cloned()).actions(Player::Two, ["z"]);
    for s in &states {
        for x in &a1 {
            let d = random_distribution(rng, &states, den);
            b.transition(s, x, "z", d);
        }
    }
    b.observation(Player::One, random_blocks(rng, &states, max_obs));
    b.initial(&states[0]);
    let target = vec![states[rng.gen_range(1..n)].clone()];
    (b.build().expect("random POMDPs are valid"), target)
}

/// Observation-based policy whose choice at each history is drawn from a
/// generator seeded by the history itself; no table is stored.
#[derive(Clone, Debug)]
pub struct HashedPolicy {
    pub player: Player,
    pub horizon: usize,
    pub seed: u64,
    /// Number of actions to choose from (`ActionId(0)..`).
    pub actions: usize,
    pub pure: bool,
}

impl HashedPolicy {
    pub fn new(game: &Game, player: Player, horizon: usize, seed: u64, pure: bool) -> Self {
        HashedPolicy { player, horizon, seed, actions: game.original_actions(player).len(), pure }
    }
}

/// Random distribution over the first `k` actions with weights in
/// `{1/d, ..., d/d}` for small `d`.
pub fn random_action_dist(rng: &mut Rng64, k: usize, pure: bool) -> ActionDist {
    if pure || k == 1 {
        return point(ActionId(rng.gen_range(0..k)));
    }
    loop {
        let w: Vec<i64> = (0..k).map(|_| rng.gen_range(0..4)).collect();
        let total: i64 = w.iter().sum();
        if total == 0 {
            continue;
        }
        return w
            .iter()
            .enumerate()
            .filter(|(_, x)| **x > 0)
            .map(|(i, x)| (ActionId(i), rat(*x, total)))
            .collect();
    }
}

impl Policy for HashedPolicy {
    fn player(&self) -> Player {
        self.player
    }

    fn horizon(&self) -> usize {
        self.horizon
    }

    fn decide(&self, history: &[ObsId]) -> Result<ActionDist, StrategyError> {
        if history.len() > self.horizon {
            return Err(StrategyError::BeyondHorizon { len: history.len(), horizon: self.horizon });
        }
        let key = history.iter().fold(mix(self.seed), |h, o| mix(h ^ (o.0 as u64 + 1)));
        let mut r = rng(key);
        Ok(random_action_dist(&mut r, self.actions, self.pure))
    }
}

/// Writes a policy out as a table over every history of length `1..=h`.
pub fn materialize(game: &Game, policy: &dyn Policy) -> Result<Strategy, StrategyError> {
    let p = policy.player();
    let mut s = Strategy::new(p, policy.horizon());
    let k = game.num_blocks(p);
    let mut current: Vec<Vec<ObsId>> = vec![Vec::new()];
    for _ in 0..policy.horizon() {
        let mut next = Vec::with_capacity(current.len() * k);
        for h in &current {
            for o in 0..k {
                let mut h2 = h.clone();
                h2.push(ObsId(o));
                s.set(h2.clone(), policy.decide(&h2)?)?;
                next.push(h2);
            }
        }
        current = next;
    }
    Ok(s)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::game::{classify_game, interaction_layers, validate, ObservationClass};

    #[test]
    fn generators_are_deterministic_and_valid() {
        let (g1, t1) = random_concurrent_game(&mut rng(5), 5, 3);
        let (g2, t2) = random_concurrent_game(&mut rng(5), 5, 3);
        assert_eq!((g1.clone(), t1), (g2, t2));
        assert!(validate(&g1).is_valid());
        assert_eq!(classify_game(&g1).observation, ObservationClass::Co);
        for seed in 0..20 {
            let g = random_uniform_game(&mut rng(seed), 4, 3, 2);
            assert!(interaction_layers(&g).is_some());
            let (p, _) = random_pomdp(&mut rng(seed), 4, 3, 3);
            assert_eq!(p.num_actions(Player::Two), 1);
        }
    }

    #[test]
    fn hashed_policies_are_stable() {
        let (g, _) = random_pomdp(&mut rng(1), 4, 3, 3);
        let p = HashedPolicy::new(&g, Player::One, 3, 99, false);
        let h = [ObsId(0), ObsId(0)];
        assert_eq!(p.decide(&h).unwrap(), p.decide(&h).unwrap());
        let table = materialize(&g, &p).unwrap();
        assert_eq!(table.decide(&h).unwrap(), p.decide(&h).unwrap());
        assert!(p.decide(&[ObsId(0); 4]).is_err());
    }
}
