use std::collections::{BTreeSet, VecDeque};

use num_traits::{One, Zero};
use petgraph::algo::tarjan_scc;
use petgraph::graph::DiGraph;

use super::{SolverError, ValueVector};
use crate::game::{ActionId, Game, Player, StateId};
use crate::linalg::solve;
use crate::objective::Objective;
use crate::rational::Rational;

/// Player 1 controls an MDP when Player 2 has a single action and both
/// players see the state.
fn check_mdp(game: &Game) -> Result<(), SolverError> {
    if game.num_actions(Player::Two) != 1 {
        return Err(SolverError::NotMdp);
    }
    if !game.has_full_observation(Player::One) {
        return Err(SolverError::NotCompleteObservation);
    }
    Ok(())
}

fn step(game: &Game, s: StateId, a: ActionId) -> &crate::Distribution {
    game.transition(s, a, ActionId(0))
}

/// States from which `target` is reachable with positive probability,
/// staying inside `allowed` and using only `usable` actions.
fn can_reach(
    game: &Game,
    target: &BTreeSet<StateId>,
    allowed: &[bool],
    usable: &dyn Fn(StateId, ActionId) -> bool,
) -> Vec<bool> {
    let n = game.num_states();
    let mut preds: Vec<Vec<StateId>> = vec![Vec::new(); n];
    for s in game.states().filter(|s| allowed[s.0]) {
        for a in game.action_ids(Player::One).filter(|&a| usable(s, a)) {
            for t in step(game, s, a).support() {
                preds[t.0].push(s);
            }
        }
    }
    let mut seen = vec![false; n];
    let mut queue: VecDeque<StateId> = target.iter().copied().filter(|t| allowed[t.0]).collect();
    for t in &queue {
        seen[t.0] = true;
    }
    while let Some(t) = queue.pop_front() {
        for &p in &preds[t.0] {
            if !seen[p.0] {
                seen[p.0] = true;
                queue.push_back(p);
            }
        }
    }
    seen
}

/// Optimal reachability values and a memoryless optimal selector.
///
/// States that cannot reach the target get value 0 up front. Policy
/// iteration then starts from an attractor policy (every state moves
/// closer to the target with positive probability), solves each policy's
/// linear system exactly and switches only on strict improvement, which
/// keeps every policy free of target-avoiding end components.
pub fn mdp_reach(game: &Game, target: &BTreeSet<StateId>) -> Result<(Vec<Rational>, Vec<ActionId>), SolverError> {
    check_mdp(game)?;
    let n = game.num_states();
    let all = vec![true; n];
    let positive = can_reach(game, target, &all, &|_, _| true);

    // BFS distance to the target over the positive region.
    let mut dist = vec![usize::MAX; n];
    let mut policy = vec![ActionId(0); n];
    for t in target {
        dist[t.0] = 0;
    }
    let mut changed = true;
    while changed {
        changed = false;
        let pending: Vec<StateId> = game.states().filter(|s| positive[s.0] && dist[s.0] == usize::MAX).collect();
        for s in pending {
            for a in game.action_ids(Player::One) {
                let best = step(game, s, a).support().map(|t| dist[t.0]).min().unwrap_or(usize::MAX);
                if best != usize::MAX && best + 1 < dist[s.0] {
                    dist[s.0] = best + 1;
                    policy[s.0] = a;
                    changed = true;
                }
            }
        }
    }

    let unknown: Vec<StateId> = game.states().filter(|s| positive[s.0] && !target.contains(s)).collect();
    let index: Vec<Option<usize>> = {
        let mut idx = vec![None; n];
        for (k, s) in unknown.iter().enumerate() {
            idx[s.0] = Some(k);
        }
        idx
    };
    let base = |s: StateId| -> Rational {
        if target.contains(&s) {
            Rational::one()
        } else {
            Rational::zero()
        }
    };
    let evaluate = |policy: &[ActionId]| -> Vec<Rational> {
        let k = unknown.len();
        let mut a = vec![vec![Rational::zero(); k]; k];
        let mut b = vec![Rational::zero(); k];
        for (r, &s) in unknown.iter().enumerate() {
            a[r][r] = Rational::one();
            for (t, p) in step(game, s, policy[s.0]).iter() {
                match index[t.0] {
                    Some(c) => a[r][c] -= p,
                    None => b[r] += p * base(t),
                }
            }
        }
        let x = solve(a, b).expect("policies reached by strict improvement are proper");
        let mut v: Vec<Rational> = game.states().map(base).collect();
        for (r, s) in unknown.iter().enumerate() {
            v[s.0] = x[r].clone();
        }
        v
    };

    let mut values = evaluate(&policy);
    loop {
        let mut improved = false;
        for &s in &unknown {
            let q = |a: ActionId| step(game, s, a).iter().fold(Rational::zero(), |acc, (t, p)| acc + p * &values[t.0]);
            let current = q(policy[s.0]);
            let mut best = (current, policy[s.0]);
            for a in game.action_ids(Player::One) {
                let qa = q(a);
                if qa > best.0 {
                    best = (qa, a);
                }
            }
            if best.1 != policy[s.0] {
                policy[s.0] = best.1;
                improved = true;
            }
        }
        if !improved {
            break;
        }
        values = evaluate(&policy);
    }
    Ok((values, policy))
}

pub fn mdp_reach_value(game: &Game, target: &BTreeSet<StateId>) -> Result<ValueVector, SolverError> {
    Ok(ValueVector::Exact(mdp_reach(game, target)?.0))
}

/// States winning almost surely for a reachability or Büchi objective.
pub fn mdp_almost_sure(game: &Game, objective: &Objective) -> Result<BTreeSet<StateId>, SolverError> {
    check_mdp(game)?;
    let target = objective.target_ids(game)?;
    match objective {
        Objective::Reach(_) => Ok(almost_sure_reach(game, &target)),
        Objective::Buchi(_) => {
            let good: BTreeSet<StateId> = maximal_end_components(game)
                .into_iter()
                .filter(|mec| mec.iter().any(|s| target.contains(s)))
                .flatten()
                .collect();
            Ok(almost_sure_reach(game, &good))
        }
        _ => Err(SolverError::UnsupportedObjective(objective.keyword())),
    }
}

/// Repeatedly discards states that cannot reach the target while never
/// risking a move outside the current candidate set.
fn almost_sure_reach(game: &Game, target: &BTreeSet<StateId>) -> BTreeSet<StateId> {
    let n = game.num_states();
    let mut alive = vec![true; n];
    loop {
        let snapshot = alive.clone();
        let safe = |s: StateId, a: ActionId| step(game, s, a).support().all(|t| snapshot[t.0]);
        let reach = can_reach(game, target, &snapshot, &safe);
        if reach == alive {
            break;
        }
        alive = reach;
    }
    game.states().filter(|s| alive[s.0]).collect()
}

/// Maximal end components, each as a set of states.
pub fn maximal_end_components(game: &Game) -> Vec<BTreeSet<StateId>> {
    let n = game.num_states();
    let mut enabled: Vec<Vec<ActionId>> = game.states().map(|_| game.action_ids(Player::One).collect()).collect();
    loop {
        let mut graph = DiGraph::<usize, ()>::new();
        let nodes: Vec<_> = (0..n).map(|i| graph.add_node(i)).collect();
        for s in game.states() {
            for &a in &enabled[s.0] {
                for t in step(game, s, a).support() {
                    graph.add_edge(nodes[s.0], nodes[t.0], ());
                }
            }
        }
        let mut comp = vec![usize::MAX; n];
        let sccs = tarjan_scc(&graph);
        for (c, scc) in sccs.iter().enumerate() {
            for v in scc {
                comp[graph[*v]] = c;
            }
        }
        let mut changed = false;
        for s in game.states() {
            let before = enabled[s.0].len();
            enabled[s.0].retain(|&a| step(game, s, a).support().all(|t| comp[t.0] == comp[s.0]));
            changed |= enabled[s.0].len() != before;
        }
        if !changed {
            let mut out: Vec<BTreeSet<StateId>> = Vec::new();
            for scc in sccs {
                let states: BTreeSet<StateId> =
                    scc.iter().map(|v| StateId(graph[*v])).filter(|s| !enabled[s.0].is_empty()).collect();
                if !states.is_empty() {
                    out.push(states);
                }
            }
            out.sort();
            return out;
        }
    }
}
