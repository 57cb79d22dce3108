//! Randomized batch checks of the reductions. Trial `i` of a batch is a
//! function of `(seed, i)` alone, and reports come back in trial order, so
//! the rendered output is reproducible.

use std::collections::BTreeSet;
use std::fmt::Write as _;

use rand::Rng;
use rayon::prelude::*;

use crate::format::{serialize_document, serialize_strategy, serialize_witness};
use crate::game::{Game, Player, StateId};
use crate::objective::Objective;
use crate::random::{self, HashedPolicy};
use crate::rational::Rational;
use crate::reductions::{
    coc_gadget, gadget_successor, ost_gadget, separate, translate_policy, uniformize, ReductionError, ReductionKind,
    ReductionWitness,
};
use crate::solvers::{concurrent_reach_value, evaluate_fixed, DEFAULT_MAX_ITER};

/// Largest difference tolerated between approximate values of a game and
/// its reduction.
pub const VALUE_TOLERANCE: f64 = 1e-6;
const SHAPLEY_TOL: f64 = 1e-9;

#[derive(Clone, Debug)]
pub struct VerifyOptions {
    pub trials: usize,
    pub seed: u64,
    pub max_states: usize,
    pub max_actions: usize,
    pub max_horizon: usize,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        VerifyOptions { trials: 25, seed: 0, max_states: 5, max_actions: 2, max_horizon: 4 }
    }
}

#[derive(Clone, Debug)]
pub struct TrialOutcome {
    pub index: usize,
    pub seed: u64,
    /// One line per check performed, `Err` for a failed one.
    pub checks: Vec<Result<String, String>>,
    /// Serialized inputs of the first failed check.
    pub counterexample: Option<String>,
}

impl TrialOutcome {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.is_ok())
    }
}

#[derive(Clone, Debug)]
pub struct VerifyReport {
    pub kind: ReductionKind,
    pub trials: Vec<TrialOutcome>,
}

impl VerifyReport {
    pub fn passed(&self) -> bool {
        self.trials.iter().all(|t| t.passed())
    }

    pub fn first_failure(&self) -> Option<&TrialOutcome> {
        self.trials.iter().find(|t| !t.passed())
    }

    pub fn render(&self) -> String {
        let mut out = String::new();
        for t in &self.trials {
            let status = if t.passed() { "PASS" } else { "FAIL" };
            writeln!(out, "trial {} seed {:016x}: {status}", t.index, t.seed).unwrap();
            for c in &t.checks {
                match c {
                    Ok(msg) => writeln!(out, "  ok   {msg}").unwrap(),
                    Err(msg) => writeln!(out, "  FAIL {msg}").unwrap(),
                }
            }
        }
        let ok = self.trials.iter().filter(|t| t.passed()).count();
        let status = if self.passed() { "PASS" } else { "FAIL" };
        writeln!(out, "{status} {}: {ok}/{} trials", self.kind, self.trials.len()).unwrap();
        if let Some(t) = self.first_failure() {
            writeln!(out, "first counterexample (trial {}):", t.index).unwrap();
            if let Some(cx) = &t.counterexample {
                out.push_str(cx);
            }
        }
        out
    }
}

pub fn verify_reduction(kind: ReductionKind, options: &VerifyOptions) -> Result<VerifyReport, ReductionError> {
    if matches!(kind, ReductionKind::NaiveBinary) {
        return Err(ReductionError::IncompatibleWitness { kind, what: "batch verification" });
    }
    let trials = (0..options.trials)
        .into_par_iter()
        .map(|i| {
            let seed = random::trial_seed(options.seed, i as u64);
            let mut t = TrialOutcome { index: i, seed, checks: Vec::new(), counterexample: None };
            run_trial(kind, options, &mut t);
            t
        })
        .collect();
    Ok(VerifyReport { kind, trials })
}

fn record(t: &mut TrialOutcome, check: Result<String, (String, String)>) {
    match check {
        Ok(msg) => t.checks.push(Ok(msg)),
        Err((msg, cx)) => {
            t.checks.push(Err(msg));
            if t.counterexample.is_none() {
                t.counterexample = Some(cx);
            }
        }
    }
}

fn run_trial(kind: ReductionKind, o: &VerifyOptions, t: &mut TrialOutcome) {
    let mut rng = random::rng(t.seed);
    let fail = |msg: String| -> Result<String, (String, String)> { Err((msg, String::new())) };
    match kind {
        ReductionKind::Separate => {
            let (g, target) = random::random_partial_game(&mut rng, o.max_states, o.max_actions.max(2), None);
            let pair = separate(&g);
            match pair {
                Ok((r, w)) => record(t, strategy_pairs(&g, &r, &w, &target, &mut rng, o)),
                Err(e) => record(t, fail(format!("separate failed: {e}"))),
            }
        }
        ReductionKind::Uniformize => {
            let (g0, target) = random::random_partial_game(&mut rng, o.max_states, o.max_actions.max(2), None);
            let g = match separate(&g0) {
                Ok((g, _)) => g,
                Err(e) => return record(t, fail(format!("separate failed: {e}"))),
            };
            match uniformize(&g) {
                Ok((r, w)) => {
                    record(t, slot_check(&r, &w));
                    record(t, strategy_pairs(&g, &r, &w, &target, &mut rng, o));
                }
                Err(e) => record(t, fail(format!("uniformize failed: {e}"))),
            }
        }
        ReductionKind::CocGadget => {
            let n = rng.gen_range(2..=4);
            let g = random::random_uniform_game(&mut rng, n, o.max_states, o.max_actions);
            let target = vec![g.state_names()[0].clone()];
            match coc_gadget(&g) {
                Ok((r, w)) => {
                    record(t, latin_square_check(&r, &w));
                    record(t, strategy_pairs(&g, &r, &w, &target, &mut rng, o));
                }
                Err(e) => record(t, fail(format!("coc failed: {e}"))),
            }
            let (c, target) = random::random_concurrent_game(&mut rng, o.max_states, o.max_actions);
            record(t, coc_value_check(&c, &target));
        }
        ReductionKind::OstGadget => {
            let n = rng.gen_range(2..=4);
            let g = random::random_uniform_game(&mut rng, n, o.max_states, o.max_actions);
            let target = vec![g.state_names()[0].clone()];
            match ost_gadget(&g, Player::Two) {
                Ok((r, w)) => {
                    record(t, ost_simulation_check(&r, &w));
                    record(t, strategy_pairs(&g, &r, &w, &target, &mut rng, o));
                }
                Err(e) => record(t, fail(format!("ost failed: {e}"))),
            }
        }
        ReductionKind::NaiveBinary => unreachable!(),
    }
}

fn ids(game: &Game, names: &[String]) -> Vec<StateId> {
    names.iter().map(|s| game.state_id(s).expect("witness names reduced states")).collect()
}

/// Slot tuples of a uniformized game reproduce its distributions.
pub fn slot_check(reduced: &Game, w: &ReductionWitness) -> Result<String, (String, String)> {
    for (s, slots) in &w.succ {
        let sid = reduced.state_id(s).expect("witness names reduced states");
        let collapsed = crate::reductions::collapse_slots(&ids(reduced, slots));
        let actual = reduced.transition(sid, crate::ActionId(0), crate::ActionId(0));
        if &collapsed != actual {
            return Err((format!("slots of {s} do not match its distribution"), serialize_witness(w)));
        }
    }
    Ok(format!("{} slot tuples of arity {} match", w.succ.len(), w.n))
}

/// Every row and every column of each gadget matrix hits each slot
/// position exactly once.
pub fn latin_square_check(reduced: &Game, w: &ReductionWitness) -> Result<String, (String, String)> {
    let n = w.n;
    for (s, slots) in &w.succ {
        let sid = reduced.state_id(s).expect("witness names reduced states");
        let want = sorted(ids(reduced, slots));
        for i in 0..n {
            let row = sorted((0..n).map(|j| gadget_successor(reduced, sid, i, j)).collect());
            let col = sorted((0..n).map(|j| gadget_successor(reduced, sid, j, i)).collect());
            if row != want || col != want {
                let cx = format!("{}{}", serialize_document(reduced, None), serialize_witness(w));
                return Err((format!("gadget at {s} is not a Latin square (line {i})"), cx));
            }
        }
    }
    Ok(format!("{} gadgets of arity {n} are Latin squares", w.succ.len()))
}

fn sorted(mut v: Vec<StateId>) -> Vec<StateId> {
    v.sort();
    v
}

/// With one player fixed to any gadget action and the other mixing
/// uniformly, each slot position of a two-step gadget is reached with
/// probability exactly `1/n`.
pub fn ost_simulation_check(reduced: &Game, w: &ReductionWitness) -> Result<String, (String, String)> {
    let n = w.n;
    let chooser = w.chooser.unwrap_or(Player::Two);
    let mover = chooser.opponent();
    let g_ch = reduced.gadget_actions(chooser);
    let g_mv = reduced.gadget_actions(mover);
    let filler_ch = reduced.original_actions(chooser)[0];
    let filler_mv = reduced.original_actions(mover)[0];
    let step = |s: StateId, ch: crate::ActionId, mv: crate::ActionId| -> StateId {
        let (a, b) = match chooser {
            Player::One => (ch, mv),
            Player::Two => (mv, ch),
        };
        reduced.transition(s, a, b).point_mass().expect("gadget states are deterministic")
    };
    let unit = Rational::new(1.into(), (n as i64).into());
    let cx = || format!("{}{}", serialize_document(reduced, None), serialize_witness(w));
    for (s, slots) in &w.succ {
        let sid = reduced.state_id(s).expect("witness names reduced states");
        let slot_ids = ids(reduced, slots);
        // reached[k] counts the paths ending on slot position k.
        let tally = |pairs: Vec<(usize, usize)>| -> Option<Vec<usize>> {
            let mut counts = vec![0usize; n];
            for (i, j) in pairs {
                let mid = step(sid, g_ch[i], filler_mv);
                let end = step(mid, filler_ch, g_mv[j]);
                let k = (0..n).find(|&k| slot_ids[k] == end && k == (i + j) % n)?;
                counts[k] += 1;
            }
            Some(counts)
        };
        for fixed in 0..n {
            for pairs in [(0..n).map(|j| (fixed, j)).collect::<Vec<_>>(), (0..n).map(|i| (i, fixed)).collect()] {
                let Some(counts) = tally(pairs) else {
                    return Err((format!("gadget at {s} leaves its slots"), cx()));
                };
                for (k, c) in counts.iter().enumerate() {
                    let p = &unit * Rational::from_integer((*c as i64).into());
                    if p != unit {
                        return Err((format!("slot {k} of {s} reached with probability {p}, expected {unit}"), cx()));
                    }
                }
            }
        }
    }
    Ok(format!("{} gadgets of arity {n} simulate the uniform choice", w.succ.len()))
}

/// Reduced-game embedding of an original state through a chain of
/// witnesses.
fn embed_chain(witnesses: &[&ReductionWitness], s: &str) -> Option<String> {
    let mut cur = s.to_string();
    for w in witnesses {
        cur = w.embedding.get(&cur)?.clone();
    }
    Some(cur)
}

/// Values of a complete-observation game agree (up to the Shapley
/// tolerance) with those of `coc(uniformize(separate(G)))` at every
/// embedded state.
pub fn coc_value_check(game: &Game, target: &[String]) -> Result<String, (String, String)> {
    let cx = || serialize_document(game, Some(&Objective::reach(target.iter().cloned())));
    let run = || -> Result<(Game, Vec<ReductionWitness>), ReductionError> {
        let (g1, w1) = separate(game)?;
        let (g2, w2) = uniformize(&g1)?;
        let (g3, w3) = coc_gadget(&g2)?;
        Ok((g3, vec![w1, w2, w3]))
    };
    let (reduced, ws) = run().map_err(|e| (format!("reduction chain failed: {e}"), cx()))?;
    let wrefs: Vec<&ReductionWitness> = ws.iter().collect();
    let t0: BTreeSet<StateId> = target.iter().filter_map(|s| game.state_id(s)).collect();
    let t1: BTreeSet<StateId> = target
        .iter()
        .filter_map(|s| embed_chain(&wrefs, s))
        .filter_map(|s| reduced.state_id(&s))
        .collect();
    let v0 = concurrent_reach_value(game, &t0, SHAPLEY_TOL, DEFAULT_MAX_ITER).map_err(|e| (e.to_string(), cx()))?;
    let v1 =
        concurrent_reach_value(&reduced, &t1, SHAPLEY_TOL, DEFAULT_MAX_ITER).map_err(|e| (e.to_string(), cx()))?;
    let mut worst = 0.0f64;
    for s in game.states() {
        let r = embed_chain(&wrefs, game.state_name(s)).and_then(|x| reduced.state_id(&x));
        let Some(r) = r else {
            return Err((format!("state {} is not embedded", game.state_name(s)), cx()));
        };
        let d = (v0.get_f64(s) - v1.get_f64(r)).abs();
        worst = worst.max(d);
        if d > VALUE_TOLERANCE {
            return Err((
                format!("value at {} is {} but {} after reduction", game.state_name(s), v0.get_f64(s), v1.get_f64(r)),
                cx(),
            ));
        }
    }
    Ok(format!("values of {} states preserved (max error {worst:.1e})", game.num_states()))
}

/// A few random strategy pairs give the same bounded-reachability
/// probability in the original and, translated, in the reduced game.
pub fn strategy_pairs(
    original: &Game,
    reduced: &Game,
    w: &ReductionWitness,
    target: &[String],
    rng: &mut random::Rng64,
    o: &VerifyOptions,
) -> Result<String, (String, String)> {
    const PAIRS: usize = 3;
    for k in 0..PAIRS {
        let h = rng.gen_range(1..=o.max_horizon.max(1));
        let pure = rng.gen_bool(0.3);
        let sigma = HashedPolicy::new(original, Player::One, h, rng.gen(), pure);
        let pi = HashedPolicy::new(original, Player::Two, h, rng.gen(), !pure && rng.gen_bool(0.5));
        let obj = Objective::bounded_reach(target.iter().cloned(), h);
        let cx = || {
            let mut s = serialize_document(original, Some(&obj));
            for p in [&sigma, &pi] {
                if let Ok(table) = random::materialize(original, p) {
                    s.push_str(&serialize_strategy(&table, original));
                }
            }
            s
        };
        let lhs = evaluate_fixed(original, &sigma, &pi, &obj).map_err(|e| (e.to_string(), cx()))?;
        let lifted = crate::reductions::lift_objective(&obj, w).map_err(|e| (e.to_string(), cx()))?;
        let ts = translate_policy(original, reduced, w, sigma.clone()).map_err(|e| (e.to_string(), cx()))?;
        let tp = translate_policy(original, reduced, w, pi.clone()).map_err(|e| (e.to_string(), cx()))?;
        let rhs = evaluate_fixed(reduced, &ts, &tp, &lifted).map_err(|e| (e.to_string(), cx()))?;
        if lhs != rhs {
            return Err((format!("pair {k} (h={h}): {lhs} in the original, {rhs} after reduction"), cx()));
        }
    }
    Ok(format!("{PAIRS} strategy pairs give equal probabilities"))
}
