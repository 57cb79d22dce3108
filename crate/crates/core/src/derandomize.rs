//! Coin-fixing derandomization of observation-based strategies in POMDPs,
//! carried out exactly at a finite horizon.
//!
//! A sequence `x = (x_0, x_1, ...)` in `[0,1]` fixes the outcome of every
//! coin Player 1 will toss: at a history of length `n+1` the pure strategy
//! `σ_x` plays the action whose cumulative-probability interval contains
//! `x_n`. Every history of the same length shares `x_n`. Cutting each
//! `[0,1]` at all thresholds that occur at step `n` leaves finitely many
//! cells on which `σ_x` is constant, so the integral of `Pr^{σ_x}` over `x`
//! becomes a finite weighted sum.

use std::collections::{BTreeMap, BTreeSet};

use num_traits::{One, Signed, Zero};
use rayon::prelude::*;
use thiserror::Error;

use crate::game::{ActionId, Game, ObsId, Player, StateId};
use crate::objective::Objective;
use crate::rational::Rational;
use crate::solvers::{evaluate_fixed, SolverError};
use crate::strategy::{point, ActionDist, Policy, Strategy, StrategyError, TrivialPolicy};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum DerandError {
    #[error("game is not a POMDP: player 2 has several actions and no fixed strategy was given")]
    NotPomdp,
    #[error("coin value {0} is outside [0, 1]")]
    CoinOutOfRange(String),
    #[error("need {needed} coin values, got {got}")]
    TooFewCoins { needed: usize, got: usize },
    #[error("objective must be bounded reachability")]
    NotBounded,
    #[error(transparent)]
    Solver(#[from] SolverError),
    #[error(transparent)]
    Strategy(#[from] StrategyError),
}

/// One pure strategy and the measure of the coin sequences producing it.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DerandCell {
    pub pure: Strategy,
    pub weight: Rational,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CellDecomposition {
    pub cells: Vec<DerandCell>,
    pub horizon: usize,
    /// Thresholds strictly inside `(0, 1)` used at each step, sorted.
    pub breakpoints: Vec<Vec<Rational>>,
}

impl CellDecomposition {
    pub fn total_weight(&self) -> Rational {
        self.cells.iter().fold(Rational::zero(), |acc, c| acc + &c.weight)
    }
}

/// The action whose cumulative interval `(c_{k-1}, c_k]` contains `x`;
/// `x = 0` selects the first action.
pub fn pick(dist: &ActionDist, x: &Rational) -> ActionId {
    let mut acc = Rational::zero();
    for (a, w) in dist {
        acc += w;
        if *x <= acc {
            return *a;
        }
    }
    dist.last().expect("distributions are non-empty").0
}

/// Cumulative thresholds of a distribution, excluding the final 1.
fn thresholds(dist: &ActionDist) -> impl Iterator<Item = Rational> + '_ {
    let mut acc = Rational::zero();
    dist.iter().take(dist.len().saturating_sub(1)).map(move |(_, w)| {
        acc += w;
        acc.clone()
    })
}

/// Player-1 observation histories of each length `1..=horizon`.
pub type HistorySets = Vec<BTreeSet<Vec<ObsId>>>;

/// Every sequence of Player-1 blocks of length `1..=horizon`.
pub fn all_histories(game: &Game, horizon: usize) -> HistorySets {
    let k = game.num_blocks(Player::One);
    let mut out: HistorySets = Vec::with_capacity(horizon);
    let mut current: Vec<Vec<ObsId>> = vec![Vec::new()];
    for _ in 0..horizon {
        current = current
            .iter()
            .flat_map(|h| {
                (0..k).map(move |o| {
                    let mut h = h.clone();
                    h.push(ObsId(o));
                    h
                })
            })
            .collect();
        out.push(current.iter().cloned().collect());
    }
    out
}

/// Player-1 histories of length `1..=horizon` at which Player 1 must
/// decide with positive probability: reached before the target, with
/// Player 1 restricted to the support of `sigma` (`None` means any action).
pub fn reachable_histories(
    game: &Game,
    sigma: Option<&dyn Policy>,
    opponent: &dyn Policy,
    target: &BTreeSet<StateId>,
    horizon: usize,
) -> Result<HistorySets, DerandError> {
    let init = game.initial().ok_or(SolverError::NoInitial)?;
    let mut out: HistorySets = vec![BTreeSet::new(); horizon];
    if horizon == 0 || target.contains(&init) {
        return Ok(out);
    }
    let all1: Vec<ActionId> = game.action_ids(Player::One).collect();
    let mut frontier: BTreeSet<(StateId, Vec<ObsId>, Vec<ObsId>)> = BTreeSet::new();
    frontier.insert((init, vec![game.block_of(Player::One, init)], vec![game.block_of(Player::Two, init)]));
    for n in 0..horizon {
        let mut next = BTreeSet::new();
        for (s, h1, h2) in &frontier {
            out[n].insert(h1.clone());
            if n + 1 == horizon {
                continue;
            }
            let acts1: Vec<ActionId> = match sigma {
                Some(p) => p.decide(h1)?.into_iter().map(|(a, _)| a).collect(),
                None => all1.clone(),
            };
            let acts2: Vec<ActionId> = opponent.decide(h2)?.into_iter().map(|(b, _)| b).collect();
            for &a in &acts1 {
                for &b in &acts2 {
                    for t in game.transition(*s, a, b).support() {
                        if target.contains(&t) {
                            continue;
                        }
                        let mut n1 = h1.clone();
                        n1.push(game.block_of(Player::One, t));
                        let mut n2 = h2.clone();
                        n2.push(game.block_of(Player::Two, t));
                        next.insert((t, n1, n2));
                    }
                }
            }
        }
        frontier = next;
    }
    Ok(out)
}

/// The pure strategy `σ_x` on the given histories.
pub fn sigma_x(sigma: &dyn Policy, x: &[Rational], histories: &HistorySets) -> Result<Strategy, DerandError> {
    if let Some(bad) = x.iter().find(|v| v.is_negative() || **v > Rational::one()) {
        return Err(DerandError::CoinOutOfRange(crate::rational::format_rational(bad)));
    }
    if x.len() < histories.len() {
        return Err(DerandError::TooFewCoins { needed: histories.len(), got: x.len() });
    }
    let mut out = Strategy::new(Player::One, histories.len());
    for (n, hs) in histories.iter().enumerate() {
        for h in hs {
            let d = sigma.decide(h)?;
            out.set(h.clone(), point(pick(&d, &x[n])))?;
        }
    }
    Ok(out)
}

/// Refines `[0,1]` at every step by the thresholds of all histories of
/// that length and returns one cell per product of sub-intervals, with
/// identical pure strategies merged.
pub fn threshold_refinement(sigma: &dyn Policy, histories: &HistorySets) -> Result<CellDecomposition, DerandError> {
    let horizon = histories.len();
    let mut breakpoints: Vec<Vec<Rational>> = Vec::with_capacity(horizon);
    let mut dists: Vec<Vec<(Vec<ObsId>, ActionDist)>> = Vec::with_capacity(horizon);
    for hs in histories {
        let mut cuts: BTreeSet<Rational> = BTreeSet::new();
        let mut ds = Vec::with_capacity(hs.len());
        for h in hs {
            let d = sigma.decide(h)?;
            cuts.extend(thresholds(&d).filter(|c| c.is_positive() && *c < Rational::one()));
            ds.push((h.clone(), d));
        }
        breakpoints.push(cuts.into_iter().collect());
        dists.push(ds);
    }

    // Per step: (interval length, choice at every history of that step).
    // Intervals with the same choices are merged right away.
    let mut steps: Vec<Vec<(Rational, Vec<ActionId>)>> = Vec::with_capacity(horizon);
    for (n, cuts) in breakpoints.iter().enumerate() {
        let mut pieces: Vec<(Rational, Vec<ActionId>)> = Vec::new();
        let mut left = Rational::zero();
        for right in cuts.iter().cloned().chain(std::iter::once(Rational::one())) {
            let choice: Vec<ActionId> = dists[n].iter().map(|(_, d)| pick(d, &right)).collect();
            let len = &right - &left;
            match pieces.iter_mut().find(|(_, c)| *c == choice) {
                Some((w, _)) => *w += len,
                None => pieces.push((len, choice)),
            }
            left = right;
        }
        steps.push(pieces);
    }

    let mut merged: BTreeMap<Vec<Vec<ActionId>>, Rational> = BTreeMap::new();
    let mut stack: Vec<(usize, Rational, Vec<Vec<ActionId>>)> = vec![(0, Rational::one(), Vec::new())];
    while let Some((n, w, choices)) = stack.pop() {
        if n == horizon {
            *merged.entry(choices).or_insert_with(Rational::zero) += w;
            continue;
        }
        for (len, choice) in &steps[n] {
            let mut c = choices.clone();
            c.push(choice.clone());
            stack.push((n + 1, &w * len, c));
        }
    }

    let mut cells = Vec::with_capacity(merged.len());
    for (choices, weight) in merged {
        let mut pure = Strategy::new(Player::One, horizon);
        for (n, step) in choices.iter().enumerate() {
            for ((h, _), a) in dists[n].iter().zip(step) {
                pure.set(h.clone(), point(*a))?;
            }
        }
        cells.push(DerandCell { pure, weight });
    }
    Ok(CellDecomposition { cells, horizon, breakpoints })
}

/// Result of checking `Pr^σ = Σ_cells ν(cell) · Pr^{σ_cell}`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IntegralIdentity {
    pub lhs: Rational,
    pub rhs: Rational,
    pub equal: bool,
    pub decomposition: CellDecomposition,
    /// Value of each cell's pure strategy, in cell order.
    pub cell_values: Vec<Rational>,
}

/// Turns the game into a POMDP for Player 1: either Player 2 has a single
/// action or `opponent` fixes Player 2's play.
fn opponent_of<'a>(
    game: &Game,
    opponent: Option<&'a (dyn Policy + Sync)>,
    horizon: usize,
) -> Result<OpponentRef<'a>, DerandError> {
    match opponent {
        Some(p) => Ok(OpponentRef::Given(p)),
        None if game.num_actions(Player::Two) == 1 => Ok(OpponentRef::Trivial(TrivialPolicy { player: Player::Two, horizon })),
        None => Err(DerandError::NotPomdp),
    }
}

enum OpponentRef<'a> {
    Given(&'a (dyn Policy + Sync)),
    Trivial(TrivialPolicy),
}

impl OpponentRef<'_> {
    fn get(&self) -> &(dyn Policy + Sync) {
        match self {
            OpponentRef::Given(p) => *p,
            OpponentRef::Trivial(t) => t,
        }
    }
}

/// Options for [`verify_integral_identity`] and [`best_pure`].
#[derive(Copy, Clone, Debug, Default)]
pub struct DerandOptions {
    /// Take thresholds from every history, reachable or not.
    pub strict: bool,
}

fn bounded(objective: &Objective) -> Result<usize, DerandError> {
    match objective {
        Objective::BoundedReach { horizon, .. } => Ok(*horizon),
        _ => Err(DerandError::NotBounded),
    }
}

pub fn decompose(
    game: &Game,
    sigma: &dyn Policy,
    opponent: Option<&(dyn Policy + Sync)>,
    objective: &Objective,
    options: DerandOptions,
) -> Result<CellDecomposition, DerandError> {
    let h = bounded(objective)?;
    if sigma.player() != Player::One {
        return Err(StrategyError::WrongPlayer { player: sigma.player() }.into());
    }
    if sigma.horizon() < h {
        return Err(StrategyError::HorizonMismatch { strategy: sigma.horizon(), objective: h }.into());
    }
    let opp = opponent_of(game, opponent, h)?;
    let target = objective.target_ids(game).map_err(SolverError::from)?;
    let histories = if options.strict {
        all_histories(game, h)
    } else {
        reachable_histories(game, Some(sigma), opp.get(), &target, h)?
    };
    threshold_refinement(sigma, &histories)
}

/// Evaluates both sides of the coin-fixing identity exactly.
pub fn verify_integral_identity(
    game: &Game,
    sigma: &dyn Policy,
    opponent: Option<&(dyn Policy + Sync)>,
    objective: &Objective,
    options: DerandOptions,
) -> Result<IntegralIdentity, DerandError> {
    let h = bounded(objective)?;
    let decomposition = decompose(game, sigma, opponent, objective, options)?;
    let opp = opponent_of(game, opponent, h)?;
    let lhs = evaluate_fixed(game, sigma, opp.get(), objective)?;
    let cell_values: Vec<Rational> = decomposition
        .cells
        .par_iter()
        .map(|c| evaluate_fixed(game, &c.pure, opp.get(), objective))
        .collect::<Result<_, _>>()?;
    let rhs = decomposition
        .cells
        .iter()
        .zip(&cell_values)
        .fold(Rational::zero(), |acc, (c, v)| acc + &c.weight * v);
    Ok(IntegralIdentity { equal: lhs == rhs, lhs, rhs, decomposition, cell_values })
}

/// The best cell strategy. Its value is at least the value of `sigma`,
/// since the latter is a weighted average of the cell values.
pub fn best_pure(
    game: &Game,
    sigma: &dyn Policy,
    opponent: Option<&(dyn Policy + Sync)>,
    objective: &Objective,
) -> Result<(Strategy, Rational), DerandError> {
    let id = verify_integral_identity(game, sigma, opponent, objective, DerandOptions::default())?;
    let (k, _) = id
        .cell_values
        .iter()
        .enumerate()
        .fold((0, None::<&Rational>), |(bk, bv), (k, v)| match bv {
            Some(b) if b >= v => (bk, bv),
            _ => (k, Some(v)),
        });
    Ok((id.decomposition.cells[k].pure.clone(), id.cell_values[k].clone()))
}

/// Every pure Player-1 strategy on the histories Player 1 can reach under
/// some action choice, with their values; used as a brute-force oracle.
pub fn enumerate_pure(
    game: &Game,
    opponent: Option<&(dyn Policy + Sync)>,
    objective: &Objective,
) -> Result<Vec<(Strategy, Rational)>, DerandError> {
    let h = bounded(objective)?;
    let opp = opponent_of(game, opponent, h)?;
    let target = objective.target_ids(game).map_err(SolverError::from)?;
    let histories: Vec<Vec<ObsId>> =
        reachable_histories(game, None, opp.get(), &target, h)?.into_iter().flatten().collect();
    let k = game.num_actions(Player::One);
    let count = k.checked_pow(histories.len() as u32).expect("too many pure strategies to enumerate");
    (0..count)
        .into_par_iter()
        .map(|mut code| {
            let mut s = Strategy::new(Player::One, h);
            for hist in &histories {
                s.set(hist.clone(), point(ActionId(code % k)))?;
                code /= k;
            }
            let v = evaluate_fixed(game, &s, opp.get(), objective)?;
            Ok((s, v))
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::game::tests::one;
    use crate::rational::rat;
    use crate::strategy::uniform;
    use crate::GameBuilder;

    fn dist(ws: &[Rational]) -> ActionDist {
        ws.iter().enumerate().map(|(i, w)| (ActionId(i), w.clone())).collect()
    }

    #[test]
    fn pick_follows_cumulative_intervals() {
        let half = dist(&[rat(1, 2), rat(1, 2)]);
        assert_eq!(pick(&half, &rat(3, 10)), ActionId(0));
        assert_eq!(pick(&half, &rat(1, 2)), ActionId(0));
        assert_eq!(pick(&half, &rat(7, 10)), ActionId(1));
        assert_eq!(pick(&vec![(ActionId(1), rat(1, 1))], &rat(0, 1)), ActionId(1));
        let three = dist(&[rat(1, 4), rat(1, 4), rat(1, 2)]);
        assert_eq!(pick(&three, &rat(3, 10)), ActionId(1));
        assert_eq!(pick(&three, &rat(0, 1)), ActionId(0));
    }

    #[test]
    fn pick_matches_sampling_frequencies() {
        use rand::{Rng, SeedableRng};
        let three = dist(&[rat(1, 4), rat(1, 4), rat(1, 2)]);
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        let mut counts = [0usize; 3];
        let trials = 20_000;
        for _ in 0..trials {
            let x = rat(rng.gen_range(0..=10_000), 10_000);
            counts[pick(&three, &x).0] += 1;
        }
        for (c, p) in counts.iter().zip([0.25, 0.25, 0.5]) {
            assert!((*c as f64 / trials as f64 - p).abs() < 0.02);
        }
    }

    #[test]
    fn sigma_x_rejects_bad_coins() {
        let g = fixtures::third_split();
        let s = Strategy::stationary(&g, Player::One, 1, uniform(&[ActionId(0), ActionId(1)])).unwrap();
        let hs = all_histories(&g, 1);
        assert!(matches!(sigma_x(&s, &[rat(3, 2)], &hs), Err(DerandError::CoinOutOfRange(_))));
        assert!(matches!(sigma_x(&s, &[], &hs), Err(DerandError::TooFewCoins { .. })));
        let p = sigma_x(&s, &[rat(3, 10)], &hs).unwrap();
        assert!(p.is_pure());
    }

    #[test]
    fn one_breakpoint_two_cells() {
        let g = fixtures::third_split();
        let s = Strategy::stationary(&g, Player::One, 1, uniform(&[ActionId(0), ActionId(1)])).unwrap();
        let hs: HistorySets = vec![[vec![ObsId(0)]].into()];
        let d = threshold_refinement(&s, &hs).unwrap();
        assert_eq!(d.cells.len(), 2);
        assert!(d.cells.iter().all(|c| c.weight == rat(1, 2)));
        assert_eq!(d.breakpoints, vec![vec![rat(1, 2)]]);
    }

    #[test]
    fn shared_coin_across_histories() {
        let mut s = Strategy::new(Player::One, 1);
        s.set(vec![ObsId(0)], dist(&[rat(1, 2), rat(1, 2)])).unwrap();
        s.set(vec![ObsId(1)], dist(&[rat(1, 3), rat(2, 3)])).unwrap();
        let hs: HistorySets = vec![[vec![ObsId(0)], vec![ObsId(1)]].into()];
        let d = threshold_refinement(&s, &hs).unwrap();
        assert_eq!(d.breakpoints, vec![vec![rat(1, 3), rat(1, 2)]]);
        let mut weights: Vec<Rational> = d.cells.iter().map(|c| c.weight.clone()).collect();
        weights.sort();
        assert_eq!(weights, vec![rat(1, 6), rat(1, 3), rat(1, 2)]);
        assert_eq!(d.total_weight(), rat(1, 1));
    }

    #[test]
    fn pure_strategy_is_one_cell() {
        let g = fixtures::third_split();
        let s = Strategy::stationary(&g, Player::One, 2, point(ActionId(1))).unwrap();
        let d = threshold_refinement(&s, &all_histories(&g, 2)).unwrap();
        assert_eq!(d.cells.len(), 1);
        assert_eq!(d.cells[0].weight, rat(1, 1));
    }

    fn one_shot() -> Game {
        let mut b = GameBuilder::new("one-shot");
        for s in ["s", "t", "x"] {
            b.state(s);
        }
        b.actions(Player::One, ["good", "bad"]).actions(Player::Two, ["z"]);
        b.transition("s", "good", "z", one("t"));
        b.transition("s", "bad", "z", one("x"));
        b.uniform_transition("t", one("t"));
        b.uniform_transition("x", one("x"));
        b.initial("s");
        b.build().unwrap()
    }

    #[test]
    fn identity_and_best_pure_on_one_shot() {
        let g = one_shot();
        let s = Strategy::stationary(&g, Player::One, 1, uniform(&[ActionId(0), ActionId(1)])).unwrap();
        let obj = Objective::bounded_reach(["t"], 1);
        let id = verify_integral_identity(&g, &s, None, &obj, DerandOptions::default()).unwrap();
        assert_eq!((id.lhs.clone(), id.rhs.clone()), (rat(1, 2), rat(1, 2)));
        assert!(id.equal);
        let (p, v) = best_pure(&g, &s, None, &obj).unwrap();
        assert_eq!(v, rat(1, 1));
        let good = g.action_id(Player::One, "good").unwrap();
        assert_eq!(p.decide(&[ObsId(g.block_of(Player::One, g.initial().unwrap()).0)]).unwrap(), point(good));
    }

    #[test]
    fn pure_input_is_returned_unchanged_in_value() {
        let g = one_shot();
        let bad = g.action_id(Player::One, "bad").unwrap();
        let s = Strategy::stationary(&g, Player::One, 1, point(bad)).unwrap();
        let obj = Objective::bounded_reach(["t"], 1);
        let (_, v) = best_pure(&g, &s, None, &obj).unwrap();
        assert_eq!(v, rat(0, 1));
    }

    #[test]
    fn hidden_switch_with_fixed_opponent() {
        let g = fixtures::hidden_switch();
        let pi = Strategy::stationary(&g, Player::Two, 4, point(ActionId(0))).unwrap();
        let s = Strategy::stationary(&g, Player::One, 4, uniform(&[ActionId(0), ActionId(1)])).unwrap();
        let obj = Objective::bounded_reach(["s4"], 4);
        let id = verify_integral_identity(&g, &s, Some(&pi), &obj, DerandOptions::default()).unwrap();
        assert_eq!(id.lhs, rat(1, 2));
        assert!(id.equal);
        let strict = verify_integral_identity(&g, &s, Some(&pi), &obj, DerandOptions { strict: true }).unwrap();
        assert!(strict.equal);
        assert!(matches!(verify_integral_identity(&g, &s, None, &obj, DerandOptions::default()), Err(DerandError::NotPomdp)));
    }

    #[test]
    fn enumeration_finds_the_optimum() {
        let g = one_shot();
        let all = enumerate_pure(&g, None, &Objective::bounded_reach(["t"], 1)).unwrap();
        assert_eq!(all.len(), 2);
        assert_eq!(all.iter().map(|(_, v)| v.clone()).max().unwrap(), rat(1, 1));
    }
}
