use std::collections::BTreeSet;

use super::matrix::matrix_game_value;
use super::{SolverError, ValueVector};
use crate::game::{ActionId, Game, Player, StateId};
use crate::rational::to_f64;

pub const DEFAULT_TOL: f64 = 1e-9;
pub const DEFAULT_MAX_ITER: usize = 100_000;

/// Per-state action matrix with duplicate rows and columns merged once,
/// since they stay duplicates under every valuation.
struct Local {
    rows: Vec<ActionId>,
    cols: Vec<ActionId>,
    /// `succ[i][j]` = successors of `(rows[i], cols[j])` with probabilities.
    succ: Vec<Vec<Vec<(usize, f64)>>>,
}

fn local(game: &Game, s: StateId) -> Local {
    let same_row = |a: ActionId, b: ActionId| game.action_ids(Player::Two).all(|y| game.transition(s, a, y) == game.transition(s, b, y));
    let same_col = |a: ActionId, b: ActionId| game.action_ids(Player::One).all(|x| game.transition(s, x, a) == game.transition(s, x, b));
    let mut rows: Vec<ActionId> = Vec::new();
    for a in game.action_ids(Player::One) {
        if !rows.iter().any(|&r| same_row(a, r)) {
            rows.push(a);
        }
    }
    let mut cols: Vec<ActionId> = Vec::new();
    for b in game.action_ids(Player::Two) {
        if !cols.iter().any(|&c| same_col(b, c)) {
            cols.push(b);
        }
    }
    let succ = rows
        .iter()
        .map(|&a| {
            cols.iter()
                .map(|&b| game.transition(s, a, b).iter().map(|(t, p)| (t.0, to_f64(p))).collect())
                .collect()
        })
        .collect();
    Local { rows, cols, succ }
}

/// Shapley value iteration for reachability in a complete-observation
/// concurrent game, starting from the indicator of the target.
///
/// Iterates are monotone non-decreasing; this is asserted at every step up
/// to floating-point slack.
pub fn concurrent_reach_value(
    game: &Game,
    target: &BTreeSet<StateId>,
    tol: f64,
    max_iter: usize,
) -> Result<ValueVector, SolverError> {
    if !game.has_full_observation(Player::One) || !game.has_full_observation(Player::Two) {
        return Err(SolverError::NotCompleteObservation);
    }
    if target.is_empty() {
        return Err(SolverError::EmptyTarget);
    }
    let n = game.num_states();
    let locals: Vec<Option<Local>> =
        game.states().map(|s| (!target.contains(&s)).then(|| local(game, s))).collect();
    let mut v: Vec<f64> = (0..n).map(|i| if target.contains(&StateId(i)) { 1.0 } else { 0.0 }).collect();
    let mut iterations = 0;
    while iterations < max_iter {
        iterations += 1;
        let mut next = v.clone();
        for (i, loc) in locals.iter().enumerate() {
            let Some(loc) = loc else { continue };
            let payoff: Vec<Vec<f64>> = loc
                .succ
                .iter()
                .map(|row| row.iter().map(|d| d.iter().map(|&(t, p)| p * v[t]).sum()).collect())
                .collect();
            next[i] = matrix_game_value(&payoff).value.clamp(0.0, 1.0);
        }
        let mut change: f64 = 0.0;
        for i in 0..n {
            // The exact iteration is monotone; rounding in the local
            // solves must not undo progress.
            next[i] = next[i].max(v[i]);
            change = change.max((next[i] - v[i]).abs());
        }
        v = next;
        if change < tol {
            break;
        }
    }
    debug_assert!(locals.iter().flatten().all(|l| !l.rows.is_empty() && !l.cols.is_empty()));
    Ok(ValueVector::Approx { values: v, tol, iterations })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;

    fn ids(g: &Game, names: &[&str]) -> BTreeSet<StateId> {
        names.iter().map(|n| g.state_id(n).unwrap()).collect()
    }

    #[test]
    fn pennies_value_is_half() {
        let g = fixtures::matching_pennies();
        let v = concurrent_reach_value(&g, &ids(&g, &["goal"]), DEFAULT_TOL, DEFAULT_MAX_ITER).unwrap();
        assert!((v.get_f64(g.state_id("s").unwrap()) - 0.5).abs() < 1e-9);
        assert_eq!(v.get_f64(g.state_id("goal").unwrap()), 1.0);
        assert_eq!(v.get_f64(g.state_id("miss").unwrap()), 0.0);
    }

    #[test]
    fn partial_observation_is_rejected() {
        let g = fixtures::hidden_switch();
        let err = concurrent_reach_value(&g, &ids(&g, &["s4"]), DEFAULT_TOL, 10).unwrap_err();
        assert_eq!(err, SolverError::NotCompleteObservation);
    }

    #[test]
    fn geometric_retry_converges() {
        // Player 1 flips between a 1/2 attempt and waiting; value 1.
        let mut b = crate::GameBuilder::new("retry");
        for s in ["s", "t"] {
            b.state(s);
        }
        b.actions(Player::One, ["try", "wait"]).actions(Player::Two, ["b"]);
        b.transition("s", "try", "b", vec![("t".into(), crate::rational::rat(1, 2)), ("s".into(), crate::rational::rat(1, 2))]);
        b.transition("s", "wait", "b", crate::game::tests::one("s"));
        b.uniform_transition("t", crate::game::tests::one("t"));
        let g = b.build().unwrap();
        let v = concurrent_reach_value(&g, &ids(&g, &["t"]), 1e-12, DEFAULT_MAX_ITER).unwrap();
        assert!((v.get_f64(StateId(0)) - 1.0).abs() < 1e-9);
    }
}
