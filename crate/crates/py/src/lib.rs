//! Python bindings. Games, strategies and witnesses cross the boundary in
//! their text formats; exact values come back as `fractions.Fraction`.

use std::collections::BTreeMap;

use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;

use gadgetry::derandomize::{self, DerandOptions};
use gadgetry::format::{parse_document, parse_strategy, serialize_document};
use gadgetry::game::{classify_game, classify_state, validate};
use gadgetry::rational::format_rational;
use gadgetry::reductions::{coc_gadget, lift_objective, naive_binary_reduction, ost_gadget, separate, uniformize, ReductionKind};
use gadgetry::solvers::{concurrent_reach_value, evaluate_fixed, mdp_reach};
use gadgetry::strategy::TrivialPolicy;
use gadgetry::verify::{verify_reduction, VerifyOptions};
use gadgetry::{fixtures, Game, Objective, Player, Policy, Rational, Strategy};

fn err(e: impl ToString) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn fraction(py: Python<'_>, r: &Rational) -> PyResult<PyObject> {
    let cls = py.import("fractions")?.getattr("Fraction")?;
    Ok(cls.call1((format_rational(r),))?.unbind())
}

fn player(p: u8) -> PyResult<Player> {
    match p {
        1 => Ok(Player::One),
        2 => Ok(Player::Two),
        _ => Err(err("player must be 1 or 2")),
    }
}

/// A validated game, optionally with the objective of its document.
#[pyclass(name = "Game", module = "pygadgetry")]
#[derive(Clone)]
pub struct PyGame {
    game: Game,
    objective: Option<Objective>,
}

impl PyGame {
    fn strategy(&self, text: &str, p: Player) -> PyResult<Strategy> {
        let s = parse_strategy(text, &self.game).map_err(err)?;
        if s.player() != p {
            return Err(err(format!("expected a strategy of player {p}")));
        }
        Ok(s)
    }

    fn opponent(&self, text: Option<&str>, horizon: usize) -> PyResult<Box<dyn Policy + Sync>> {
        match text {
            Some(t) => Ok(Box::new(self.strategy(t, Player::Two)?)),
            None if self.game.num_actions(Player::Two) == 1 => {
                Ok(Box::new(TrivialPolicy { player: Player::Two, horizon }))
            }
            None => Err(err("player 2 has several actions; pass its strategy")),
        }
    }
}

#[pymethods]
impl PyGame {
    #[staticmethod]
    fn parse(text: &str) -> PyResult<Self> {
        let doc = parse_document(text).map_err(err)?;
        Ok(PyGame { game: doc.game, objective: doc.objective })
    }

    /// One of `hidden_switch`, `skewed_coins`, `third_split`, `pennies`.
    #[staticmethod]
    fn fixture(name: &str) -> PyResult<Self> {
        let game = match name {
            "hidden_switch" => fixtures::hidden_switch(),
            "skewed_coins" => fixtures::skewed_coins(),
            "third_split" => fixtures::third_split(),
            "pennies" => fixtures::matching_pennies(),
            _ => return Err(err(format!("unknown fixture `{name}`"))),
        };
        Ok(PyGame { game, objective: None })
    }

    fn serialize(&self) -> String {
        serialize_document(&self.game, self.objective.as_ref())
    }

    #[getter]
    fn name(&self) -> String {
        self.game.name().to_string()
    }

    #[getter]
    fn states(&self) -> Vec<String> {
        self.game.state_names().to_vec()
    }

    #[getter]
    fn objective(&self) -> Option<String> {
        self.objective.as_ref().map(|o| o.to_string())
    }

    fn actions(&self, p: u8) -> PyResult<Vec<String>> {
        Ok(self.game.actions(player(p)?).to_vec())
    }

    fn classify(&self) -> String {
        classify_game(&self.game).to_string()
    }

    fn state_kinds(&self) -> PyResult<BTreeMap<String, String>> {
        self.game
            .states()
            .map(|s| Ok((self.game.state_name(s).to_string(), classify_state(&self.game, s).map_err(err)?.to_string())))
            .collect()
    }

    fn is_separated(&self) -> bool {
        validate(&self.game).interaction_separated
    }

    /// Returns the reduced game and the serialized witness.
    #[pyo3(signature = (kind, chooser = 2))]
    fn reduce(&self, kind: &str, chooser: u8) -> PyResult<(PyGame, String)> {
        let kind = ReductionKind::from_keyword(kind).ok_or_else(|| err(format!("unknown reduction `{kind}`")))?;
        let (game, w) = match kind {
            ReductionKind::Separate => separate(&self.game),
            ReductionKind::Uniformize => uniformize(&self.game),
            ReductionKind::CocGadget => coc_gadget(&self.game),
            ReductionKind::OstGadget => ost_gadget(&self.game, player(chooser)?),
            ReductionKind::NaiveBinary => naive_binary_reduction(&self.game),
        }
        .map_err(err)?;
        let objective = self.objective.as_ref().and_then(|o| lift_objective(o, &w).ok());
        Ok((PyGame { game, objective }, gadgetry::format::serialize_witness(&w)))
    }

    /// Reachability values per state: exact fractions for Player-1 MDPs,
    /// floats from value iteration for complete-observation games.
    #[pyo3(signature = (target, tol = 1e-9, max_iter = 100_000))]
    fn solve_reach(&self, py: Python<'_>, target: Vec<String>, tol: f64, max_iter: usize) -> PyResult<BTreeMap<String, PyObject>> {
        let t = Objective::reach(target).target_ids(&self.game).map_err(err)?;
        let g = &self.game;
        let mut out = BTreeMap::new();
        if g.num_actions(Player::Two) == 1 && g.has_full_observation(Player::One) {
            let (v, _) = mdp_reach(g, &t).map_err(err)?;
            for s in g.states() {
                out.insert(g.state_name(s).to_string(), fraction(py, &v[s.0])?);
            }
        } else {
            let v = concurrent_reach_value(g, &t, tol, max_iter).map_err(err)?;
            for s in g.states() {
                out.insert(g.state_name(s).to_string(), v.get_f64(s).into_pyobject(py)?.into_any().unbind());
            }
        }
        Ok(out)
    }

    /// Exact probability of reaching `target` within `horizon` steps.
    #[pyo3(signature = (s1, horizon, target, s2 = None))]
    fn evaluate(&self, py: Python<'_>, s1: &str, horizon: usize, target: Vec<String>, s2: Option<&str>) -> PyResult<PyObject> {
        let sigma = self.strategy(s1, Player::One)?;
        let pi = self.opponent(s2, horizon)?;
        let v = evaluate_fixed(&self.game, &sigma, pi.as_ref(), &Objective::bounded_reach(target, horizon)).map_err(err)?;
        fraction(py, &v)
    }

    #[pyo3(signature = (strategy, horizon, target, opponent = None, strict = false))]
    fn derandomize(
        &self,
        strategy: &str,
        horizon: usize,
        target: Vec<String>,
        opponent: Option<&str>,
        strict: bool,
    ) -> PyResult<Derandomization> {
        let sigma = self.strategy(strategy, Player::One)?;
        let opp = match opponent {
            Some(_) => Some(self.opponent(opponent, horizon)?),
            None => None,
        };
        let obj = Objective::bounded_reach(target, horizon);
        let id = derandomize::verify_integral_identity(&self.game, &sigma, opp.as_deref(), &obj, DerandOptions { strict })
            .map_err(err)?;
        let best = (0..id.cell_values.len()).max_by(|&a, &b| id.cell_values[a].cmp(&id.cell_values[b]).then(b.cmp(&a)));
        Ok(Derandomization {
            lhs: id.lhs.clone(),
            rhs: id.rhs.clone(),
            equal: id.equal,
            cells: id.decomposition.cells.iter().map(|c| c.weight.clone()).zip(id.cell_values.iter().cloned()).collect(),
            best_strategy: best
                .map(|k| gadgetry::format::serialize_strategy(&id.decomposition.cells[k].pure, &self.game))
                .unwrap_or_default(),
            best_value: best.map(|k| id.cell_values[k].clone()).unwrap_or_default(),
        })
    }

    fn __repr__(&self) -> String {
        format!("Game({:?}, {} states, {})", self.game.name(), self.game.num_states(), classify_game(&self.game))
    }
}

/// Outcome of splitting a randomized strategy into pure ones.
#[pyclass(module = "pygadgetry")]
pub struct Derandomization {
    lhs: Rational,
    rhs: Rational,
    #[pyo3(get)]
    equal: bool,
    cells: Vec<(Rational, Rational)>,
    #[pyo3(get)]
    best_strategy: String,
    best_value: Rational,
}

#[pymethods]
impl Derandomization {
    #[getter]
    fn lhs(&self, py: Python<'_>) -> PyResult<PyObject> {
        fraction(py, &self.lhs)
    }

    #[getter]
    fn rhs(&self, py: Python<'_>) -> PyResult<PyObject> {
        fraction(py, &self.rhs)
    }

    #[getter]
    fn best_value(&self, py: Python<'_>) -> PyResult<PyObject> {
        fraction(py, &self.best_value)
    }

    /// `(weight, value)` of every cell.
    #[getter]
    fn cells(&self, py: Python<'_>) -> PyResult<Vec<(PyObject, PyObject)>> {
        self.cells.iter().map(|(w, v)| Ok((fraction(py, w)?, fraction(py, v)?))).collect()
    }
}

/// Runs the seeded batch check; returns `(passed, report)`.
#[pyfunction]
#[pyo3(signature = (reduction, trials = 25, seed = 0, max_states = 5))]
fn verify(reduction: &str, trials: usize, seed: u64, max_states: usize) -> PyResult<(bool, String)> {
    let kind = ReductionKind::from_keyword(reduction).ok_or_else(|| err(format!("unknown reduction `{reduction}`")))?;
    let report =
        verify_reduction(kind, &VerifyOptions { trials, seed, max_states, ..Default::default() }).map_err(err)?;
    Ok((report.passed(), report.render()))
}

#[pyfunction]
fn tables() -> String {
    gadgetry::tables::render_tables()
}

pub fn register(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyGame>()?;
    m.add_class::<Derandomization>()?;
    m.add_function(wrap_pyfunction!(verify, m)?)?;
    m.add_function(wrap_pyfunction!(tables, m)?)?;
    Ok(())
}

#[pymodule]
fn pygadgetry(m: &Bound<'_, PyModule>) -> PyResult<()> {
    register(m)
}
