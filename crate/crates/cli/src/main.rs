use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use gadgetry::derandomize::{self, DerandOptions};
use gadgetry::format::{
    parse_document, parse_objective_spec, parse_strategy, parse_witness, serialize_document, serialize_strategy,
    serialize_witness, GameDocument, ParseErrorKind,
};
use gadgetry::game::{classify_game, classify_state, validate};
use gadgetry::reductions::{
    coc_gadget, lift_objective, naive_binary_reduction, ost_gadget, separate, translate_policy, uniformize,
    ReductionKind,
};
use gadgetry::solvers::{concurrent_reach_value, evaluate_fixed, mdp_almost_sure, mdp_reach, DEFAULT_MAX_ITER, DEFAULT_TOL};
use gadgetry::strategy::TrivialPolicy;
use gadgetry::verify::{verify_reduction, VerifyOptions};
use gadgetry::{Game, Objective, Player, Policy, Strategy};

#[derive(Parser)]
#[command(name = "gadgetry", version, about = "Reductions, solvers and derandomization for stochastic games")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Check a game file; exit 0 iff it is valid.
    Validate { file: PathBuf },
    /// Print the class of a game and the kind of every state.
    Classify { file: PathBuf },
    /// Apply a reduction and write the reduced game and its witness.
    Reduce {
        /// separate, uniformize, coc, ost or naive-binary
        #[arg(long)]
        kind: String,
        /// Player picking the offset first in the ost gadget.
        #[arg(long, default_value_t = 2)]
        chooser: u8,
        #[arg(short, long)]
        output: Option<PathBuf>,
        /// Witness path; defaults to `<output>.witness`.
        #[arg(long)]
        witness: Option<PathBuf>,
        file: PathBuf,
    },
    /// Compute values (exact for MDPs, by value iteration otherwise).
    Solve {
        /// e.g. `reach:s1,s2`; defaults to the objective in the file.
        #[arg(long)]
        objective: Option<String>,
        #[arg(long, default_value_t = DEFAULT_TOL)]
        tol: f64,
        #[arg(long, default_value_t = DEFAULT_MAX_ITER)]
        max_iter: usize,
        file: PathBuf,
    },
    /// Exact probability of reaching the target within the horizon.
    Evaluate {
        #[arg(long)]
        s1: PathBuf,
        #[arg(long)]
        s2: Option<PathBuf>,
        #[arg(long)]
        horizon: usize,
        /// Comma-separated target states.
        #[arg(long)]
        target: String,
        /// Original game: strategies belong to it and are translated into
        /// FILE through `--witness`; both values are printed and compared.
        #[arg(long, requires = "witness")]
        original: Option<PathBuf>,
        #[arg(long, requires = "original")]
        witness: Option<PathBuf>,
        file: PathBuf,
    },
    /// Split a randomized Player-1 strategy into pure strategies.
    Derandomize {
        #[arg(long)]
        strategy: PathBuf,
        /// Fixed Player-2 strategy, needed unless Player 2 has one action.
        #[arg(long)]
        opponent: Option<PathBuf>,
        #[arg(long)]
        horizon: usize,
        #[arg(long)]
        target: String,
        /// Cut at the thresholds of every history, reachable or not.
        #[arg(long)]
        strict: bool,
        /// Where to write the best pure strategy.
        #[arg(short, long)]
        output: Option<PathBuf>,
        file: PathBuf,
    },
    /// Check a reduction on seeded random games.
    Verify {
        /// separate, uniformize, coc or ost
        #[arg(long)]
        reduction: String,
        #[arg(long, default_value_t = 25)]
        trials: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 5)]
        max_states: usize,
        #[arg(long, default_value_t = 2)]
        max_actions: usize,
        #[arg(long, default_value_t = 4)]
        max_horizon: usize,
    },
    /// Print the randomness tables.
    Tables,
}

enum Failure {
    /// A check ran and failed: exit 1.
    Check(String),
    /// Bad input or arguments: exit 2.
    Usage(String),
}

type Outcome = Result<String, Failure>;

fn usage(e: impl ToString) -> Failure {
    Failure::Usage(e.to_string())
}

fn read(path: &Path) -> Result<String, Failure> {
    std::fs::read_to_string(path).map_err(|e| usage(format!("{}: {e}", path.display())))
}

fn write(path: &Path, text: &str) -> Result<(), Failure> {
    std::fs::write(path, text).map_err(|e| usage(format!("{}: {e}", path.display())))
}

fn load(path: &Path) -> Result<GameDocument, Failure> {
    parse_document(&read(path)?).map_err(|e| usage(format!("{}: {e}", path.display())))
}

fn load_strategy(path: &Path, game: &Game, player: Player) -> Result<Strategy, Failure> {
    let s = parse_strategy(&read(path)?, game).map_err(|e| usage(format!("{}: {e}", path.display())))?;
    if s.player() != player {
        return Err(usage(format!("{}: expected a strategy of player {player}", path.display())));
    }
    Ok(s)
}

fn targets(spec: &str) -> Vec<String> {
    spec.split(',').filter(|s| !s.is_empty()).map(str::to_string).collect()
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(out) => {
            print!("{out}");
            ExitCode::SUCCESS
        }
        Err(Failure::Check(out)) => {
            print!("{out}");
            ExitCode::from(1)
        }
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}

fn run(command: Command) -> Outcome {
    match command {
        Command::Validate { file } => cmd_validate(&file),
        Command::Classify { file } => cmd_classify(&file),
        Command::Reduce { kind, chooser, output, witness, file } => cmd_reduce(&kind, chooser, output, witness, &file),
        Command::Solve { objective, tol, max_iter, file } => cmd_solve(objective.as_deref(), tol, max_iter, &file),
        Command::Evaluate { s1, s2, horizon, target, original, witness, file } => {
            cmd_evaluate(&s1, s2.as_deref(), horizon, &target, original.as_deref(), witness.as_deref(), &file)
        }
        Command::Derandomize { strategy, opponent, horizon, target, strict, output, file } => {
            cmd_derandomize(&strategy, opponent.as_deref(), horizon, &target, strict, output.as_deref(), &file)
        }
        Command::Verify { reduction, trials, seed, max_states, max_actions, max_horizon } => {
            let kind = ReductionKind::from_keyword(&reduction)
                .filter(|k| *k != ReductionKind::NaiveBinary)
                .ok_or_else(|| usage(format!("unknown reduction `{reduction}` (separate, uniformize, coc, ost)")))?;
            let options = VerifyOptions { trials, seed, max_states, max_actions, max_horizon };
            let report = verify_reduction(kind, &options).map_err(usage)?;
            let text = report.render();
            if report.passed() {
                Ok(text)
            } else {
                Err(Failure::Check(text))
            }
        }
        Command::Tables => Ok(gadgetry::tables::render_tables()),
    }
}

fn cmd_validate(file: &Path) -> Outcome {
    match parse_document(&read(file)?) {
        Ok(doc) => {
            let report = validate(&doc.game);
            let mut out = String::from("valid\n");
            let sep = if report.interaction_separated { "yes" } else { "no" };
            writeln!(out, "interaction-separated {sep}").unwrap();
            for note in &report.notes {
                writeln!(out, "note {note}").unwrap();
            }
            Ok(out)
        }
        Err(e) if matches!(e.kind, ParseErrorKind::Invalid(_) | ParseErrorKind::ProbabilitySum(_)) => {
            Err(Failure::Check(format!("invalid\nviolation {e}\n")))
        }
        Err(e) => Err(usage(format!("{}: {e}", file.display()))),
    }
}

fn cmd_classify(file: &Path) -> Outcome {
    let g = load(file)?.game;
    let mut out = String::new();
    writeln!(out, "class {}", classify_game(&g)).unwrap();
    for s in g.states() {
        let kind = classify_state(&g, s).map_err(usage)?;
        writeln!(out, "state {} {kind}", g.state_name(s)).unwrap();
    }
    Ok(out)
}

fn cmd_reduce(kind: &str, chooser: u8, output: Option<PathBuf>, witness: Option<PathBuf>, file: &Path) -> Outcome {
    let doc = load(file)?;
    let kind = ReductionKind::from_keyword(kind).ok_or_else(|| usage(format!("unknown reduction `{kind}`")))?;
    let chooser = match chooser {
        1 => Player::One,
        2 => Player::Two,
        _ => return Err(usage("--chooser must be 1 or 2")),
    };
    let (reduced, w) = match kind {
        ReductionKind::Separate => separate(&doc.game),
        ReductionKind::Uniformize => uniformize(&doc.game),
        ReductionKind::CocGadget => coc_gadget(&doc.game),
        ReductionKind::OstGadget => ost_gadget(&doc.game, chooser),
        ReductionKind::NaiveBinary => naive_binary_reduction(&doc.game),
    }
    .map_err(usage)?;
    let mut notes = String::new();
    let objective = match &doc.objective {
        Some(o) => match lift_objective(o, &w) {
            Ok(l) => Some(l),
            Err(e) => {
                writeln!(notes, "objective dropped: {e}").unwrap();
                None
            }
        },
        None => None,
    };
    let game_text = serialize_document(&reduced, objective.as_ref());
    let witness_text = serialize_witness(&w);
    match output {
        Some(out) => {
            let wpath = witness.unwrap_or_else(|| {
                let mut p = out.clone().into_os_string();
                p.push(".witness");
                PathBuf::from(p)
            });
            write(&out, &game_text)?;
            write(&wpath, &witness_text)?;
            Ok(format!(
                "{notes}wrote {} ({} states) and {} (n {}, stutter {})\n",
                out.display(),
                reduced.num_states(),
                wpath.display(),
                w.n,
                w.stutter.keyword()
            ))
        }
        None => {
            if let Some(wpath) = witness {
                write(&wpath, &witness_text)?;
                Ok(format!("{notes}{game_text}"))
            } else {
                Ok(format!("{notes}{game_text}\n{witness_text}"))
            }
        }
    }
}

fn fmt_rational(r: &gadgetry::Rational) -> String {
    gadgetry::rational::format_rational(r)
}

fn cmd_solve(objective: Option<&str>, tol: f64, max_iter: usize, file: &Path) -> Outcome {
    let doc = load(file)?;
    let g = &doc.game;
    let objective = match objective {
        Some(spec) => parse_objective_spec(spec).map_err(usage)?,
        None => doc.objective.clone().ok_or_else(|| usage("no --objective and none in the file"))?,
    };
    let is_mdp = g.num_actions(Player::Two) == 1 && g.has_full_observation(Player::One);
    let mut out = String::new();
    match &objective {
        Objective::Reach(_) => {
            let target = objective.target_ids(g).map_err(usage)?;
            if is_mdp {
                let (values, policy) = mdp_reach(g, &target).map_err(usage)?;
                writeln!(out, "method policy-iteration exact").unwrap();
                for s in g.states() {
                    let a = g.action_name(Player::One, policy[s.0]);
                    writeln!(out, "{} {} {a}", g.state_name(s), fmt_rational(&values[s.0])).unwrap();
                }
            } else {
                let v = concurrent_reach_value(g, &target, tol, max_iter).map_err(usage)?;
                if let gadgetry::solvers::ValueVector::Approx { iterations, .. } = &v {
                    writeln!(out, "method value-iteration tol {tol:e} iterations {iterations}").unwrap();
                }
                for s in g.states() {
                    writeln!(out, "{} {:.10}", g.state_name(s), v.get_f64(s)).unwrap();
                }
            }
        }
        Objective::Buchi(_) if is_mdp => {
            let win = mdp_almost_sure(g, &objective).map_err(usage)?;
            writeln!(out, "method end-components almost-sure").unwrap();
            for s in g.states() {
                writeln!(out, "{} {}", g.state_name(s), if win.contains(&s) { 1 } else { 0 }).unwrap();
            }
        }
        other => return Err(usage(format!("solve supports reach (and buchi on MDPs), not {}", other.keyword()))),
    }
    Ok(out)
}

/// Player-2 strategy from a file, or the trivial one if Player 2 has a
/// single action.
fn opponent(path: Option<&Path>, game: &Game, horizon: usize) -> Result<Box<dyn Policy + Sync>, Failure> {
    match path {
        Some(p) => Ok(Box::new(load_strategy(p, game, Player::Two)?)),
        None if game.num_actions(Player::Two) == 1 => Ok(Box::new(TrivialPolicy { player: Player::Two, horizon })),
        None => Err(usage("player 2 has several actions; pass a strategy with --s2/--opponent")),
    }
}

fn cmd_evaluate(
    s1: &Path,
    s2: Option<&Path>,
    horizon: usize,
    target: &str,
    original: Option<&Path>,
    witness: Option<&Path>,
    file: &Path,
) -> Outcome {
    let game = load(file)?.game;
    let objective = Objective::bounded_reach(targets(target), horizon);
    let (Some(original), Some(witness)) = (original, witness) else {
        let sigma = load_strategy(s1, &game, Player::One)?;
        let pi = opponent(s2, &game, horizon)?;
        let v = evaluate_fixed(&game, &sigma, pi.as_ref(), &objective).map_err(usage)?;
        return Ok(format!("{}\n", fmt_rational(&v)));
    };
    let orig = load(original)?.game;
    let w = parse_witness(&read(witness)?).map_err(|e| usage(format!("{}: {e}", witness.display())))?;
    w.check(&game).map_err(usage)?;
    let sigma = load_strategy(s1, &orig, Player::One)?;
    let pi = opponent(s2, &orig, horizon)?;
    let lhs = evaluate_fixed(&orig, &sigma, pi.as_ref(), &objective).map_err(usage)?;
    let lifted = lift_objective(&objective, &w).map_err(usage)?;
    let ts = translate_policy(&orig, &game, &w, sigma).map_err(usage)?;
    let tp = translate_policy(&orig, &game, &w, pi).map_err(usage)?;
    let rhs = evaluate_fixed(&game, &ts, &tp, &lifted).map_err(usage)?;
    let out = format!("original {}\nreduced {}\n", fmt_rational(&lhs), fmt_rational(&rhs));
    if lhs == rhs {
        Ok(out + "equal\n")
    } else {
        Err(Failure::Check(out + "different\n"))
    }
}

fn cmd_derandomize(
    strategy: &Path,
    opp: Option<&Path>,
    horizon: usize,
    target: &str,
    strict: bool,
    output: Option<&Path>,
    file: &Path,
) -> Outcome {
    let game = load(file)?.game;
    let objective = Objective::bounded_reach(targets(target), horizon);
    let sigma = load_strategy(strategy, &game, Player::One)?;
    let opp_box = match opp {
        Some(_) => Some(opponent(opp, &game, horizon)?),
        None => None,
    };
    let id = derandomize::verify_integral_identity(&game, &sigma, opp_box.as_deref(), &objective, DerandOptions { strict })
        .map_err(usage)?;
    let mut out = String::new();
    for (n, cuts) in id.decomposition.breakpoints.iter().enumerate() {
        let cuts: Vec<String> = cuts.iter().map(fmt_rational).collect();
        writeln!(out, "step {} breakpoints {}", n + 1, if cuts.is_empty() { "-".into() } else { cuts.join(" ") }).unwrap();
    }
    writeln!(out, "cells {}", id.decomposition.cells.len()).unwrap();
    for (k, (cell, v)) in id.decomposition.cells.iter().zip(&id.cell_values).enumerate() {
        writeln!(out, "cell {k} weight {} value {}", fmt_rational(&cell.weight), fmt_rational(v)).unwrap();
    }
    writeln!(out, "lhs {}", fmt_rational(&id.lhs)).unwrap();
    writeln!(out, "rhs {}", fmt_rational(&id.rhs)).unwrap();
    let best = id.cell_values.iter().enumerate().max_by(|a, b| a.1.cmp(b.1).then(b.0.cmp(&a.0)));
    if let Some((k, v)) = best {
        writeln!(out, "best cell {k} value {}", fmt_rational(v)).unwrap();
        let text = serialize_strategy(&id.decomposition.cells[k].pure, &game);
        match output {
            Some(p) => {
                write(p, &text)?;
                writeln!(out, "wrote {}", p.display()).unwrap();
            }
            None => out.push_str(&text),
        }
    }
    if id.equal {
        Ok(out + "identity holds\n")
    } else {
        Err(Failure::Check(out + "identity FAILS\n"))
    }
}
