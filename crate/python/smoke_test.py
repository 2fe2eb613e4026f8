"""Smoke test for the Python bindings; run with pytest or directly."""

import json
import math
from fractions import Fraction
from pathlib import Path

import lifted_mln

DATA = Path(__file__).resolve().parent.parent / "data"


def test_statistics_of_example_world():
    model = lifted_mln.Model.from_file(DATA / "smokers.mln")
    world = model.parse_database((DATA / "example1.db").read_text())
    assert world.domain == ["Alice", "Bob", "Eve"]
    assert model.statistics(world) == [Fraction(1, 2)]


def test_counting_and_expectations():
    model = lifted_mln.Model("predicate sm/1\npredicate fr/2\n1.0 :: fr(x,y) => sm(y)\n")
    assert model.world_count(3) == 4096
    assert math.isclose(model.log_z(3, [0.0]), 12 * math.log(2), rel_tol=1e-12)
    assert math.isclose(model.expectations(3, [0.0])[0], 0.75, rel_tol=1e-12)


def test_polytope():
    poly = lifted_mln.Model("predicate sm/1\n1.0 :: sm(x)\n").polytope(2)
    assert poly.points == [[Fraction(0)], [Fraction(1, 2)], [Fraction(1)]]
    assert poly.vertices == [[Fraction(0)], [Fraction(1)]]
    assert poly.membership([Fraction(1, 2)]) == "inside"
    assert poly.interiority([Fraction(1, 2)]) == 0.5


def test_learning():
    model = lifted_mln.Model("predicate sm/1\n1.0 :: sm(x)\n")
    for optimizer in ("pgd", "ellipsoid"):
        report = model.learn(1, [Fraction(3, 4)], optimizer=optimizer)
        assert report.converged
        assert abs(report.lam[0] - math.log(3)) < 0.05
        assert report.moment_gap <= math.sqrt(1e-3)


def test_refusals():
    model = lifted_mln.Model("predicate e/2\n1.0 :: e(x,y)\n")
    try:
        model.learn(3, [Fraction(1)])
    except lifted_mln.ZeroInteriorityError:
        pass
    else:
        raise AssertionError("boundary target accepted")
    try:
        model.learn(3, [Fraction(2)])
    except lifted_mln.InfeasibleError:
        pass
    else:
        raise AssertionError("infeasible target accepted")


def test_run_command():
    report, summary, code = lifted_mln.run_command(
        "learn", DATA / "smokers.mln", db=DATA / "example1.db", optimizer="ellipsoid"
    )
    assert code == 0
    assert json.loads(report)["status"] == "converged"
    assert summary.startswith("converged")


if __name__ == "__main__":
    for name, fn in sorted(globals().items()):
        if name.startswith("test_") and callable(fn):
            fn()
            print(f"{name}: ok")
