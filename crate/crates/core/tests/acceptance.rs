//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! with status 1 if any criterion fails.

use std::collections::BTreeSet;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::Path;
use std::time::{Duration, Instant};

use num_traits::{One, Zero};
use rand::Rng;
use rayon::prelude::*;

use gadgetry::derandomize::{self, DerandOptions};
use gadgetry::format::{parse_document, parse_strategy, parse_witness, serialize_document, serialize_strategy, serialize_witness};
use gadgetry::game::{GameClass, Interaction, ObservationClass, Players};
use gadgetry::random::{self, HashedPolicy};
use gadgetry::rational::rat;
use gadgetry::reductions::{coc_gadget, gadget_successor, naive_binary_reduction, ost_gadget, unresolved_after, ReductionKind};
use gadgetry::solvers::evaluate_fixed;
use gadgetry::strategy::{point, uniform, ActionDist, StrategyError, TrivialPolicy};
use gadgetry::tables::{cell_text, randomness_tables, Axis, Column};
use gadgetry::verify::{coc_value_check, latin_square_check, ost_simulation_check, verify_reduction, VerifyOptions};
use gadgetry::{fixtures, ActionId, Distribution, Game, ObsId, Objective, Player, Policy, Rational, Strategy};

type Outcome = Result<String, String>;

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn run(id: usize, name: &str, budget: Option<Duration>, f: impl FnOnce() -> Outcome) -> bool {
    let start = Instant::now();
    let result = catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|e| {
        let msg = e
            .downcast_ref::<String>()
            .cloned()
            .or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()))
            .unwrap_or_default();
        Err(format!("panicked: {msg}"))
    });
    let elapsed = start.elapsed();
    let result = match (result, budget) {
        (Ok(_), Some(b)) if elapsed > b => Err(format!("took {:.2}s, budget {:.0}s", elapsed.as_secs_f64(), b.as_secs_f64())),
        (r, _) => r,
    };
    let (status, detail) = match &result {
        Ok(d) => ("PASS", d),
        Err(d) => ("FAIL", d),
    };
    println!("{status} [{id:>2}] {name}: {detail} ({:.2}s)", elapsed.as_secs_f64());
    result.is_ok()
}

fn criterion_latin_squares() -> Outcome {
    let mut gadgets = 0;
    for i in 0..100u64 {
        let mut rng = random::rng(random::trial_seed(1, i));
        let n = rng.gen_range(2..=8);
        let g = random::random_uniform_game(&mut rng, n, 3, 2);
        let (r, w) = coc_gadget(&g).map_err(|e| format!("game {i}: {e}"))?;
        latin_square_check(&r, &w).map_err(|(m, _)| format!("game {i}: {m}"))?;
        let k = w.n;
        let unit = rat(1, k as i64);
        for (s, slots) in &w.succ {
            let sid = r.state_id(s).unwrap();
            let want = gadgetry::reductions::collapse_slots(
                &slots.iter().map(|t| r.state_id(t).unwrap()).collect::<Vec<_>>(),
            );
            // Uniform play by one player against every action of the other.
            for fixed in 0..k {
                let by_p1 = Distribution::from_weights((0..k).map(|i| (gadget_successor(&r, sid, i, fixed), unit.clone())));
                let by_p2 = Distribution::from_weights((0..k).map(|j| (gadget_successor(&r, sid, fixed, j), unit.clone())));
                ensure(by_p1 == want && by_p2 == want, || format!("game {i}: gadget {s} is not uniform against {fixed}"))?;
            }
            gadgets += 1;
        }
    }
    Ok(format!("{gadgets} gadgets in 100 games"))
}

fn criterion_value_preservation() -> Outcome {
    let mut states = 0;
    for i in 0..50u64 {
        let mut rng = random::rng(random::trial_seed(2, i));
        let (g, target) = random::random_concurrent_game(&mut rng, 5, 3);
        coc_value_check(&g, &target).map_err(|(m, cx)| format!("game {i}: {m}\n{cx}"))?;
        states += g.num_states();
    }
    Ok(format!("{states} embedded states within 1e-6 over 50 games"))
}

fn criterion_ost_simulation() -> Outcome {
    let g = fixtures::third_split();
    let (r, w) = ost_gadget(&g, Player::Two).map_err(|e| e.to_string())?;
    ost_simulation_check(&r, &w).map_err(|(m, _)| format!("third_split: {m}"))?;
    for i in 0..50u64 {
        let mut rng = random::rng(random::trial_seed(3, i));
        let n = rng.gen_range(2..=8);
        let g = random::random_uniform_game(&mut rng, n, 3, 2);
        let (r, w) = ost_gadget(&g, Player::Two).map_err(|e| format!("game {i}: {e}"))?;
        ost_simulation_check(&r, &w).map_err(|(m, _)| format!("game {i}: {m}"))?;
    }
    Ok("third_split and 50 random games: every slot has probability exactly 1/n".into())
}

fn criterion_strategy_pairs() -> Outcome {
    let mut summary = Vec::new();
    for kind in [ReductionKind::Separate, ReductionKind::Uniformize, ReductionKind::CocGadget, ReductionKind::OstGadget] {
        let o = VerifyOptions { trials: 25, seed: 4, max_horizon: 4, ..Default::default() };
        let report = verify_reduction(kind, &o).map_err(|e| e.to_string())?;
        if !report.passed() {
            return Err(report.render());
        }
        summary.push(format!("{kind} 25x3"));
    }
    Ok(format!("exact equality for {} pairs", summary.join(", ")))
}

fn criterion_naive_binary() -> Outcome {
    let (r, w) = naive_binary_reduction(&fixtures::skewed_coins()).map_err(|e| e.to_string())?;
    let thirds = unresolved_after(&r, &w, "s2", 2).ok_or("s2 is not a gadget source")?;
    let quarters = unresolved_after(&r, &w, "s1", 2).ok_or("s1 is not a gadget source")?;
    ensure(thirds == rat(1, 4), || format!("<1/3,2/3>: {thirds} unresolved after 2 steps"))?;
    ensure(quarters.is_zero(), || format!("<1/4,3/4>: {quarters} unresolved after 2 steps"))?;
    Ok(format!("<1/3,2/3> needs more than 2 steps with probability {thirds}, <1/4,3/4> with {quarters}"))
}

/// Pure Player-2 policy for the hidden switch: the choice at the `r`-th
/// visit to `s1` is `choices[r]`. Along a play Player 2 reaches `s1` at
/// most once per round and sees everything, so these cover every pure
/// strategy up to choices at unreachable histories.
struct RoundPolicy {
    s1: ObsId,
    choices: Vec<ActionId>,
    horizon: usize,
}

impl Policy for RoundPolicy {
    fn player(&self) -> Player {
        Player::Two
    }
    fn horizon(&self) -> usize {
        self.horizon
    }
    fn decide(&self, history: &[ObsId]) -> Result<ActionDist, StrategyError> {
        let visits = history.iter().filter(|o| **o == self.s1).count();
        Ok(point(self.choices.get(visits.saturating_sub(1)).copied().unwrap_or(ActionId(0))))
    }
}

fn criterion_hidden_switch() -> Outcome {
    let g = fixtures::hidden_switch();
    let s1 = g.block_of(Player::Two, g.state_id("s1").unwrap());
    let both = [g.action_id(Player::One, "a1").unwrap(), g.action_id(Player::One, "a2").unwrap()];
    let mut checked = 0;
    for k in 1..=3u32 {
        let h = 3 * k as usize + 1;
        let expect = Rational::one() - rat(1, 1 << k);
        let sigma = Strategy::stationary(&g, Player::One, h, uniform(&both)).unwrap();
        let obj = Objective::bounded_reach(["s4"], h);
        let rounds = k as usize + 1;
        for code in 0..(1usize << rounds) {
            let choices = (0..rounds).map(|r| ActionId((code >> r) & 1)).collect();
            let pi = RoundPolicy { s1, choices, horizon: h };
            let v = evaluate_fixed(&g, &sigma, &pi, &obj).map_err(|e| e.to_string())?;
            ensure(v == expect, || format!("k={k}, choices {code:b}: {v} instead of {expect}"))?;
            checked += 1;
        }
    }
    Ok(format!("1/2, 3/4, 7/8 against all {checked} pure opponents"))
}

fn criterion_integral_identity() -> Outcome {
    let results: Vec<Result<(), String>> = (0..200u64)
        .into_par_iter()
        .map(|i| {
            let mut rng = random::rng(random::trial_seed(7, i));
            let (g, target) = random::random_pomdp(&mut rng, 4, 3, 3);
            let h = rng.gen_range(1..=3);
            let sigma = HashedPolicy::new(&g, Player::One, h, rng.gen(), false);
            let obj = Objective::bounded_reach(target, h);
            let id = derandomize::verify_integral_identity(&g, &sigma, None, &obj, DerandOptions::default())
                .map_err(|e| format!("pomdp {i}: {e}"))?;
            ensure(id.equal, || format!("pomdp {i}: {} != {}", id.lhs, id.rhs))?;
            let (_, best) = derandomize::best_pure(&g, &sigma, None, &obj).map_err(|e| format!("pomdp {i}: {e}"))?;
            ensure(best >= id.lhs, || format!("pomdp {i}: best pure {best} < randomized {}", id.lhs))
        })
        .collect();
    results.into_iter().collect::<Result<Vec<_>, _>>()?;
    Ok("identity exact and best pure dominates on 200 POMDPs".into())
}

/// Randomized strategy on `histories` with `P(a0)` from the 5-point grid
/// `{0, 1/4, 1/2, 3/4, 1}` chosen digit by digit from `code`.
fn grid_strategy(histories: &[Vec<ObsId>], code: usize, h: usize) -> Strategy {
    let mut s = Strategy::new(Player::One, h);
    let mut c = code;
    for hist in histories {
        let p = rat((c % 5) as i64, 4);
        c /= 5;
        let mut d: ActionDist = Vec::new();
        if !p.is_zero() {
            d.push((ActionId(0), p.clone()));
        }
        if p != Rational::one() {
            d.push((ActionId(1), Rational::one() - p));
        }
        s.set(hist.clone(), d).unwrap();
    }
    s
}

fn criterion_pure_suffices() -> Outcome {
    let h = 2;
    let mut games = 0;
    let mut points = 0usize;
    let mut seed = 0u64;
    while games < 20 {
        let mut rng = random::rng(random::trial_seed(8, seed));
        seed += 1;
        let (g, target) = random::random_pomdp(&mut rng, 3, 2, 2);
        if g.num_actions(Player::One) != 2 {
            continue;
        }
        let obj = Objective::bounded_reach(target, h);
        let pure = derandomize::enumerate_pure(&g, None, &obj).map_err(|e| e.to_string())?;
        let pure_max = pure.iter().map(|(_, v)| v.clone()).max().ok_or("no pure strategies")?;
        let targets: BTreeSet<_> = obj.target_ids(&g).unwrap();
        let trivial = TrivialPolicy { player: Player::Two, horizon: h };
        let histories: Vec<Vec<ObsId>> = derandomize::reachable_histories(&g, None, &trivial, &targets, h)
            .map_err(|e| e.to_string())?
            .into_iter()
            .flatten()
            .collect();
        let count = 5usize.pow(histories.len() as u32);
        let grid: Vec<Result<Rational, String>> = (0..count)
            .into_par_iter()
            .map(|code| {
                let sigma = grid_strategy(&histories, code, h);
                let v = evaluate_fixed(&g, &sigma, &trivial, &obj).map_err(|e| e.to_string())?;
                let (_, best) = derandomize::best_pure(&g, &sigma, None, &obj).map_err(|e| e.to_string())?;
                ensure(best <= pure_max && best >= v, || {
                    format!("game {games}, grid point {code}: best pure {best}, value {v}, pure max {pure_max}")
                })?;
                Ok(v)
            })
            .collect();
        let mut grid_max = Rational::zero();
        for v in grid {
            grid_max = grid_max.max(v?);
        }
        ensure(grid_max == pure_max, || format!("game {games}: grid max {grid_max}, pure max {pure_max}"))?;
        points += count;
        games += 1;
    }
    Ok(format!("pure maximum attains the grid maximum on 20 POMDPs ({points} grid points)"))
}

fn criterion_tables() -> Outcome {
    let expected = [
        (Axis::Transitions, Interaction::TurnBased, ["not", "free", "free", "not", "not"]),
        (Axis::Transitions, Interaction::Concurrent, ["free", "free", "free", "(NA)", "(NA)"]),
        (Axis::Strategies, Interaction::TurnBased, ["ε > 0", "not", "not", "ε ≥ 0", "ε ≥ 0"]),
        (Axis::Strategies, Interaction::Concurrent, ["not", "not", "not", "(NA)", "(NA)"]),
    ];
    let mut cells = 0;
    for (axis, interaction, row) in expected {
        for (column, want) in Column::ALL.into_iter().zip(row) {
            let (observation, players) = match column {
                Column::Complete => (ObservationClass::Co, Players::TwoAndHalf),
                Column::OneSided => (ObservationClass::Os2, Players::TwoAndHalf),
                Column::Partial => (ObservationClass::Pa, Players::TwoAndHalf),
                Column::Mdp => (ObservationClass::Co, Players::OneAndHalf),
                Column::Pomdp => (ObservationClass::Os2, Players::OneAndHalf),
            };
            let class = GameClass { observation, interaction, players };
            let got = cell_text(axis, randomness_tables(axis, class).verdict);
            ensure(got == want, || format!("{axis} {interaction:?} {}: {got} instead of {want}", column.heading()))?;
            cells += 1;
        }
    }
    Ok(format!("{cells} cells reproduced"))
}

fn criterion_round_trip() -> Outcome {
    let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/corpus");
    let mut files: Vec<_> = std::fs::read_dir(&dir).map_err(|e| e.to_string())?.map(|e| e.unwrap().path()).collect();
    files.sort();
    let mut games: Vec<(String, Game)> = Vec::new();
    let mut pending = Vec::new();
    for path in &files {
        let name = path.file_name().unwrap().to_string_lossy().to_string();
        let text = std::fs::read_to_string(path).map_err(|e| e.to_string())?;
        match path.extension().and_then(|e| e.to_str()) {
            Some("game") => {
                let doc = parse_document(&text).map_err(|e| format!("{name}: {e}"))?;
                let once = serialize_document(&doc.game, doc.objective.as_ref());
                let again = parse_document(&once).map_err(|e| format!("{name} (reparsed): {e}"))?;
                ensure(serialize_document(&again.game, again.objective.as_ref()) == once, || format!("{name}: not a fixpoint"))?;
                ensure(again.game == doc.game && again.objective == doc.objective, || format!("{name}: changed on reparse"))?;
                if !name.starts_with("coin_race") {
                    ensure(once == text, || format!("{name}: canonical file is not reproduced byte for byte"))?;
                }
                games.push((name.trim_end_matches(".game").to_string(), doc.game));
            }
            Some("witness") => {
                let w = parse_witness(&text).map_err(|e| format!("{name}: {e}"))?;
                ensure(serialize_witness(&w) == text, || format!("{name}: witness differs"))?;
            }
            Some("strategy") => pending.push((name, text)),
            _ => {}
        }
    }
    for (name, text) in pending {
        let base = name.split('.').next().unwrap();
        let (_, g) = games.iter().find(|(n, _)| n == base).ok_or(format!("{name}: no game {base}"))?;
        let s = parse_strategy(&text, g).map_err(|e| format!("{name}: {e}"))?;
        ensure(serialize_strategy(&s, g) == text, || format!("{name}: strategy differs"))?;
    }
    let o = VerifyOptions { trials: 25, seed: 42, ..Default::default() };
    let mut outputs = Vec::new();
    for _ in 0..2 {
        let mut text = String::new();
        for kind in [ReductionKind::Separate, ReductionKind::Uniformize, ReductionKind::CocGadget, ReductionKind::OstGadget] {
            text.push_str(&verify_reduction(kind, &o).map_err(|e| e.to_string())?.render());
        }
        outputs.push(text);
    }
    ensure(outputs[0] == outputs[1], || "verify output differs between runs".into())?;
    Ok(format!("{} corpus files round-trip; verify --seed 42 output identical ({} bytes)", files.len(), outputs[0].len()))
}

fn main() {
    let secs = Duration::from_secs;
    let results = [
        run(1, "latin-square uniformity", Some(secs(5)), criterion_latin_squares),
        run(2, "value preservation (coc chain)", Some(secs(60)), criterion_value_preservation),
        run(3, "turn-based gadget simulation", None, criterion_ost_simulation),
        run(4, "strategy-pair preservation", None, criterion_strategy_pairs),
        run(5, "binary-coin counterexample", None, criterion_naive_binary),
        run(6, "hidden switch 1 - 2^-k", None, criterion_hidden_switch),
        run(7, "integral identity on POMDPs", Some(secs(60)), criterion_integral_identity),
        run(8, "pure strategies at horizon 2", None, criterion_pure_suffices),
        run(9, "randomness tables", None, criterion_tables),
        run(10, "round-trip and determinism", None, criterion_round_trip),
    ];
    let passed = results.iter().filter(|r| **r).count();
    println!("acceptance: {passed}/{} criteria passed", results.len());
    if passed != results.len() {
        std::process::exit(1);
    }
}
