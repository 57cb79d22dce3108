"""Quick check that the extension module imports and its main calls work."""

from fractions import Fraction

import pygadgetry as pg


def main():
    g = pg.Game.fixture("third_split")
    print(g)
    print("class", g.classify())

    reduced, witness = g.reduce("coc")
    print("coc actions", reduced.actions(1))
    assert pg.Game.parse(reduced.serialize()).serialize() == reduced.serialize()
    assert witness.startswith("witness")

    s1 = "strategy 1 horizon 3\nat * o -> a1:1/3 a2:2/3\nat * o' -> a2\n"
    v = g.evaluate(s1, 3, ["s'0"])
    assert v == Fraction(5, 9), v
    d = g.derandomize(s1, 3, ["s'0"])
    assert d.equal and d.lhs == v
    assert d.best_value >= v
    print("derandomize lhs", d.lhs, "best", d.best_value)

    values = pg.Game.fixture("pennies").solve_reach(["goal"])
    assert abs(values["s"] - 0.5) < 1e-9

    ok, report = pg.verify("coc", trials=4, seed=42)
    assert ok, report
    print(report.splitlines()[-1])

    try:
        pg.Game.parse("game g\nactions1\n")
    except ValueError as e:
        print("rejected:", e)
    else:
        raise AssertionError("bad input accepted")
    print("smoke test passed")


if __name__ == "__main__":
    main()
