use pyo3::ffi::c_str;
use pyo3::prelude::*;
use pyo3::types::PyDict;

fn with_module(code: &std::ffi::CStr) {
    Python::with_gil(|py| {
        let m = PyModule::new(py, "pygadgetry").unwrap();
        pygadgetry::register(&m).unwrap();
        py.import("sys").unwrap().getattr("modules").unwrap().set_item("pygadgetry", &m).unwrap();
        let globals = PyDict::new(py);
        if let Err(e) = py.run(code, Some(&globals), None) {
            e.print(py);
            panic!("python snippet failed");
        }
    });
}

#[test]
fn evaluate_and_reduce() {
    with_module(c_str!(
        r#"
from fractions import Fraction
import pygadgetry as pg
g = pg.Game.fixture("hidden_switch")
assert g.classify() == "Os2T 2.5-player", g.classify()
s1 = "strategy 1 horizon 4\nat * o1 -> a1:1/2 a2:1/2\nat * o2 -> a1:1/2 a2:1/2\nat * o3 -> a1\nat * o4 -> a1\n"
s2 = "strategy 2 horizon 4\nat * s1 -> b1\nat * s2 -> b1\nat * s2' -> b1\nat * s3 -> b1\nat * s3' -> b1\nat * s4 -> b1\n"
assert g.evaluate(s1, 4, ["s4"], s2) == Fraction(1, 2)
r, w = pg.Game.fixture("third_split").reduce("uniformize")
assert "n 3" in w.splitlines()
assert pg.Game.parse(g.serialize()).serialize() == g.serialize()
"#
    ));
}

#[test]
fn derandomize_and_solve() {
    with_module(c_str!(
        r#"
from fractions import Fraction
import pygadgetry as pg
g = pg.Game.fixture("third_split")
d = g.derandomize("strategy 1 horizon 3\nat * o -> a1:1/3 a2:2/3\nat * o' -> a2\n", 3, ["s'0"])
assert d.equal and d.lhs == d.rhs == Fraction(5, 9)
assert sum(w for w, _ in d.cells) == 1
v = pg.Game.fixture("pennies").solve_reach(["goal"])
assert abs(v["s"] - 0.5) < 1e-9
ok, text = pg.verify("ost", trials=3, seed=1)
assert ok and text.endswith("PASS ost: 3/3 trials\n")
assert "turn-based: not free free not not" in pg.tables()
"#
    ));
}
