import random
from fractions import Fraction

import pytest

from stabef.corpus import odd_cycle
from stabef.extform import fix_variables, make_row, simple_form
from stabef.formulations import tu_formulation, xname
from stabef.graph import build_graph
from stabef.lp import (
    CertifiedLP,
    Infeasible,
    LinearProgram,
    Optimal,
    Simplex,
    Unbounded,
    check_farkas,
    check_feasible_point,
    check_optimal,
    check_ray,
    feasible_lift,
    rational_rank,
    solve,
)
from stabef.oracle import alpha


def test_bounded_max():
    f = simple_form(["x"], [make_row({"x": 1}, 3)])
    res = Simplex(f).maximize({"x": 1})
    assert isinstance(res, Optimal) and res.value == 3


def test_unbounded():
    f = simple_form(["x"], [make_row({"x": -1}, 0)])
    res = Simplex(f).maximize({"x": 1})
    assert isinstance(res, Unbounded)
    check_ray(f, {"x": 1}, res)


def test_infeasible_with_certificate():
    f = simple_form(["x"], [make_row({"x": 1}, 0), make_row({"x": -1}, -1)])
    res = solve(LinearProgram(f, {"x": 1}))
    assert isinstance(res, Infeasible)
    check_farkas(f, res)


def test_fractional_vertex():
    # max x + y  s.t.  2x + y <= 4, x + 3y <= 6, x, y >= 0 -> (6/5, 8/5)
    f = simple_form(
        ["x", "y"],
        [make_row({"x": 2, "y": 1}, 4), make_row({"x": 1, "y": 3}, 6), make_row({"x": -1}, 0), make_row({"y": -1}, 0)],
    )
    res = Simplex(f).maximize({"x": 1, "y": 1})
    assert res.value == Fraction(14, 5)
    assert res.primal["x"] == Fraction(6, 5) and res.primal["y"] == Fraction(8, 5)
    check_optimal(f, {"x": 1, "y": 1}, res)
    assert Simplex(f).minimize({"x": 1}).value == 0


def test_equations_and_free_variables():
    f = simple_form(["x"], [make_row({"a": 1}, 2), make_row({"a": -1}, 0)], [make_row({"x": 1, "a": -3}, 1)], ["a"])
    assert Simplex(f).maximize({"x": 1}).value == 7
    assert Simplex(f).minimize({"x": 1}).value == 1


@pytest.mark.parametrize("rule", ["bland", "dantzig"])
def test_rules_agree_on_random_lps(rule):
    rng = random.Random(7)
    for _ in range(30):
        names = ["a", "b", "c"]
        rows = [make_row({v: rng.randint(-3, 5) for v in names}, rng.randint(0, 9)) for _ in range(5)]
        rows += [make_row({v: -1}, 0) for v in names] + [make_row({v: 1}, 10) for v in names]
        f = simple_form(names, rows)
        obj = {v: rng.randint(-4, 6) for v in names}
        a = Simplex(f, "bland").maximize(obj)
        b = Simplex(f, rule).maximize(obj)
        assert type(a) is type(b)
        if isinstance(a, Optimal):
            assert a.value == b.value


def test_certified_matches_exact():
    g = build_graph([(0, 1), (1, 2), (2, 3), (3, 4), (4, 5), (5, 0), (0, 3)])
    f = tu_formulation(g)
    lp = CertifiedLP(f)
    rng = random.Random(3)
    for _ in range(20):
        w = {v: rng.randint(-5, 10) for v in g.nodes}
        obj = {xname(v): c for v, c in w.items()}
        assert lp.maximize(obj).value == Simplex(f).maximize(obj).value == alpha(g, w)


def test_lift_examples():
    c6 = build_graph([(i, (i + 1) % 6) for i in range(6)])
    f = tu_formulation(c6)
    point = {xname(v): int(v % 2 == 0) for v in c6.nodes}
    lift = feasible_lift(f, point)
    assert lift is not None and check_feasible_point(f, lift)
    k3 = build_graph([(0, 1), (1, 2), (2, 0)])
    kf = simple_form([xname(v) for v in range(3)], [make_row({xname(u): 1, xname(v): 1}, 1) for _, u, v in k3.edges])
    cert = feasible_lift(kf, {xname(v): 1 for v in range(3)})
    assert isinstance(cert, Infeasible)
    fixed = fix_variables(f, {xname(0): 1})
    assert isinstance(feasible_lift(fixed, {xname(v): int(v in (0, 2)) for v in c6.nodes}), dict)
    assert isinstance(feasible_lift(fixed, {xname(v): int(v in (1, 3)) for v in c6.nodes}), Infeasible)


def test_rational_rank():
    assert rational_rank([[1, 0, 0], [0, 1, 0], [0, 0, 1]]) == 3
    assert rational_rank([[0, 0], [0, 0]]) == 0
    c5 = odd_cycle(2)
    inc = [[1 if v in c5.ends(e) else 0 for v in c5.nodes] for e in c5.edge_ids()]
    assert rational_rank(inc) == 5
    c4 = build_graph([(0, 1), (1, 2), (2, 3), (3, 0)])
    inc = [[1 if v in c4.ends(e) else 0 for v in c4.nodes] for e in c4.edge_ids()]
    assert rational_rank(inc) == 3
