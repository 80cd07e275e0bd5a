from fractions import Fraction

import pytest

from stabef.corpus import odd_cycle
from stabef.extform import (
    ExtForm,
    FormError,
    affine_substitute,
    balas_union,
    compact_auxiliaries,
    demote,
    extform_from_json,
    extform_to_json,
    fix_variables,
    format_extform,
    glue_shared,
    intersect_box,
    make_row,
    parse_extform,
    parse_extform_with_objective,
    rename,
    simple_form,
)
from stabef.formulations import tu_formulation, xname
from stabef.graph import build_graph
from stabef.lp import Infeasible, Optimal, Simplex, Unbounded


def interval(a, b, v="y"):
    return simple_form([v], [make_row({v: -1}, -a), make_row({v: 1}, b)])


def span(form, v):
    hi = Simplex(form).maximize({v: 1})
    lo = Simplex(form).minimize({v: 1})
    return (
        lo.value if isinstance(lo, Optimal) else None,
        hi.value if isinstance(hi, Optimal) else None,
    )


def test_union_of_segments():
    assert span(balas_union([interval(0, 1), interval(2, 3)]), "y") == (0, 3)


def test_union_of_points():
    pt = lambda c: simple_form(["y"], eqs=[make_row({"y": 1}, c)])
    assert span(balas_union([pt(0), pt(1)]), "y") == (0, 1)


def test_union_of_rays_in_cone_mode():
    ray = lambda a: simple_form(["y"], [make_row({"y": -1}, -a)])
    u = balas_union([ray(1), ray(3)], "shared-recession-cone")
    assert span(u, "y") == (1, None)


def test_union_rejects_mismatched_originals():
    with pytest.raises(FormError):
        balas_union([interval(0, 1, "a"), interval(0, 1, "b")])


def test_single_branch_is_identity():
    f = interval(0, 1)
    assert balas_union([f]) == f
    assert glue_shared([f]) == f


def test_glue_disjoint_is_product():
    f = glue_shared([interval(0, 1, "a"), interval(2, 5, "b")])
    assert set(f.originals) == {"a", "b"}
    assert span(f, "a") == (0, 1) and span(f, "b") == (2, 5)


def test_glue_shared_variable_intersects():
    f = glue_shared([interval(0, 4, "a"), interval(2, 6, "a")])
    assert span(f, "a") == (2, 4)


def test_demote_hides_variable():
    f = demote(simple_form(["a", "b"], [make_row({"a": 1, "b": 1}, 1)]), ["b"], "h.")
    assert f.originals == ("a",) and f.auxiliaries == ("h.b",)


def test_affine_identity_and_reflection():
    f = interval(0, 1, "x")
    ident = affine_substitute(f, {"x": ({"x": 1}, 0)})
    assert span(ident, "x") == (0, 1)
    refl = affine_substitute(interval(Fraction(1, 4), 1, "x"), {"y": ({"x": -1}, 1)})
    assert span(refl, "y") == (0, Fraction(3, 4))


def test_affine_rejects_unknown_source():
    with pytest.raises(FormError):
        affine_substitute(interval(0, 1, "x"), {"y": ({"z": 1}, 0)})


def test_intersect_box():
    f = simple_form(["a"], [make_row({"a": 1}, 5)])
    assert span(intersect_box(f), "a") == (0, 1)
    bounded = interval(0, 1, "a")
    assert span(intersect_box(bounded), "a") == (0, 1)
    assert intersect_box(simple_form([])).size == 0


def test_fix_variables():
    c4 = build_graph([(0, 1), (1, 2), (2, 3), (3, 0)])
    f = tu_formulation(c4)
    g = fix_variables(f, {xname(0): 1})
    assert Simplex(g).maximize({xname(1): 1, xname(3): 1}).value == 0
    assert fix_variables(f, {}) == f
    bad = fix_variables(fix_variables(f, {xname(0): 1}), {xname(0): 0})
    assert isinstance(Simplex(bad).maximize({}), Infeasible)


def test_text_round_trip():
    f = tu_formulation(odd_cycle(2).remove_nodes([0]))
    text = format_extform(f)
    assert format_extform(parse_extform(text)) == text
    obj = ("max", {"x1": Fraction(2), "x3": Fraction(-1, 3)})
    g, o = parse_extform_with_objective(format_extform(f, obj))
    assert g == f and o == obj


def test_json_round_trip():
    f = balas_union([interval(0, 1), interval(Fraction(5, 2), 3)])
    assert extform_from_json(extform_to_json(f)) == f


def test_rename_and_compact():
    f = balas_union([interval(0, 1), interval(2, 3)])
    c = compact_auxiliaries(f)
    assert len(c.auxiliaries) == len(f.auxiliaries)
    assert span(c, "y") == (0, 3)
    r = rename(interval(0, 1), {"y": "z"})
    assert r.originals == ("z",)


def test_undeclared_variable_rejected():
    with pytest.raises(FormError):
        ExtForm(("a",), (), (make_row({"b": 1}, 0),), ())
