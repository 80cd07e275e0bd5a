import itertools
import random

import pytest

from conftest import random_graph
from stabef.circulation import stab_ef_projective
from stabef.corpus import complete, odd_cycle
from stabef.decomposition import Flap, StarStructure, assign_gadgets, build_core
from stabef.embedding import find_even_face_embedding
from stabef.extform import FormError
from stabef.formulations import (
    compose_separation,
    oct3_formulation,
    restricted_patterns,
    restricted_stab_bar,
    stable_assignments,
    tu_formulation,
    xname,
)
from stabef.graph import Graph, build_graph, is_bipartite
from stabef.lp import CertifiedLP
from stabef.oracle import alpha, ef_equals_stab, slack_edges, stable_sets
from stabef.parity import SignedGraph
from stabef.pipeline import compose_flaps

P3 = ([0, 1, 2], [(0, 0, 1), (1, 1, 2)])
P4 = ([0, 1, 2, 3], [(0, 0, 1), (1, 1, 2), (2, 2, 3)])
S222 = ([0, 1, 2, 3, 4, 5, 6], [(0, 0, 1), (1, 1, 2), (2, 0, 3), (3, 3, 4), (4, 0, 5), (5, 5, 6)])
S233 = (list(range(9)), [(0, 0, 1), (1, 1, 2), (2, 0, 3), (3, 3, 4), (4, 4, 5), (5, 0, 6), (6, 6, 7), (7, 7, 8)])


def brute_patterns(nodes, edges):
    out = 0
    for bits in itertools.product((0, 1), repeat=len(nodes)):
        a = dict(zip(nodes, bits))
        stable = not any(a[u] and a[v] for _, u, v in edges)
        slack = sum(1 for _, u, v in edges if not a[u] and not a[v])
        out += stable and slack <= 1
    return out


def test_p3_patterns():
    pats = restricted_patterns(*P3)
    assert sorted(tuple(p[v] for v in (0, 1, 2)) for p in pats) == [(0, 0, 1), (0, 1, 0), (1, 0, 0), (1, 0, 1)]


@pytest.mark.parametrize("gadget,count", [(P3, 4), (P4, 5), (S222, 8), (S233, 10)])
def test_pattern_counts(gadget, count):
    assert len(restricted_patterns(*gadget)) == count == brute_patterns(*gadget)


def test_forbidden_pair_prunes():
    pats = restricted_patterns(*P3, forbid_pairs=[(0, 2)])
    assert all(not (p[0] and p[2]) for p in pats) and len(pats) == 3


def test_tu_is_exact_on_bipartite():
    for seed in range(15):
        g = random_graph(8, 0.3, seed)
        if is_bipartite(g):
            assert ef_equals_stab(g, tu_formulation(g), trials=20, seed=seed).exact


def test_tu_with_fixings():
    c6 = build_graph([(i, (i + 1) % 6) for i in range(6)])
    f = tu_formulation(c6, {0: 1})
    lp = CertifiedLP(f)
    assert lp.maximize({xname(1): 1}).value == 0
    assert lp.maximize({xname(v): 1 for v in range(6)}).value == 3
    with pytest.raises(FormError):
        tu_formulation(odd_cycle(2))


def test_stable_assignments():
    assert len(stable_assignments(odd_cycle(2), [0, 1, 2])) == 5
    assert len(stable_assignments(complete(5), [0, 1, 2])) == 4


def _branches(form):
    return sum(1 for v in form.auxiliaries if v.endswith("#lam")) or 1


def test_oct3_c5():
    f = oct3_formulation(odd_cycle(2), [0])
    assert _branches(f) == 2
    assert CertifiedLP(f).maximize({xname(v): 1 for v in range(5)}).value == 2
    assert ef_equals_stab(odd_cycle(2), f).exact


def test_oct3_k5():
    f = oct3_formulation(complete(5), [0, 1, 2])
    assert _branches(f) <= 8
    assert CertifiedLP(f).maximize({xname(v): 1 for v in range(5)}).value == 1
    assert ef_equals_stab(complete(5), f).exact


def test_oct3_bipartite_single_system():
    c4 = build_graph([(0, 1), (1, 2), (2, 3), (3, 0)])
    f = oct3_formulation(c4, [])
    assert f == tu_formulation(c4)


def test_oct3_rejects_non_transversal():
    with pytest.raises(FormError):
        oct3_formulation(complete(4), [0])


def test_restricted_stab_bar_hull():
    # flap = even path 1-5-6-7-3 glued to a P3 gadget 1-9-3
    g1p = build_graph([(1, 5), (5, 6), (6, 7), (7, 3), (1, 9), (9, 3)])
    gadget = [(e, u, v) for e, u, v in g1p.edges if 9 in (u, v)]
    f = restricted_stab_bar(g1p, [1, 9, 3], gadget)
    H = {e for e, _, _ in gadget}
    ok = [S for S in stable_sets(g1p) if len(set(slack_edges(g1p, S)) & H) <= 1]
    rng = random.Random(0)
    lp = CertifiedLP(f)
    for _ in range(25):
        w = {v: rng.randint(-5, 10) for v in g1p.nodes}
        best = max(sum(w[v] for v in S) for S in ok)
        assert lp.maximize({xname(v): c for v, c in w.items()}).value == best


def test_compose_checks_shared_set():
    a = tu_formulation(build_graph([(0, 1)]))
    b = tu_formulation(build_graph([(0, 1), (1, 2)]))
    with pytest.raises(FormError):
        compose_separation(a, b, [0], [], "h0")


def test_compose_c5_even_path_flap():
    # C5 plus the even path 1-5-6-7-3 as an order-2 flap
    g = build_graph([(0, 1), (1, 2), (2, 3), (3, 4), (4, 0), (1, 5), (5, 6), (6, 7), (7, 3)])
    flap_edges = frozenset(e for e, u, v in g.edges if {u, v} & {5, 6, 7})
    st = StarStructure(tuple(range(5)), tuple(e for e in g.edge_ids() if e not in flap_edges), (Flap(flap_edges, (1, 3), ((1, 5, 6, 7, 3),)),))
    gadgets = assign_gadgets(g, st)
    assert [gd.kind for gd in gadgets] == ["P3"]
    core = build_core(g, st, gadgets)
    rs = find_even_face_embedding(SignedGraph.ordinary(core))
    assert rs is not None
    form = compose_flaps(g, st, gadgets, stab_ef_projective(core, rs))
    assert set(form.originals) == {xname(v) for v in g.nodes}
    assert ef_equals_stab(g, form, trials=50, seed=11).exact
    direct = oct3_formulation(g, [0])
    rng = random.Random(8)
    a, b = CertifiedLP(form), CertifiedLP(direct)
    for _ in range(10):
        obj = {xname(v): rng.randint(-5, 10) for v in g.nodes}
        assert a.maximize(obj).value == b.maximize(obj).value
