import pytest

from stabef.corpus import FLAPPED_KINDS, complete, flapped_core, odd_cycle
from stabef.decomposition import (
    Flap,
    StarStructure,
    assign_gadgets,
    build_core,
    build_h_plus,
    candidate_flaps,
    chain_graph,
    find_star_structure,
    gadget_kind,
    select_gadget,
    signed_clique,
    star_structure_from_json,
    star_structure_to_json,
    validate_star_structure,
)
from stabef.embedding import find_even_face_embedding, is_even_face_projective
from stabef.graph import GraphError, build_graph, is_bipartite
from stabef.parity import SignedGraph, classify_ocp, classify_ocp_signed

PATH2 = build_graph([(0, 1), (1, 2)])
PATH3 = build_graph([(0, 1), (1, 2), (2, 3)])
SPIDER = build_graph([(0, 1), (1, 2), (0, 3), (3, 4), (0, 5), (5, 6)])


def c5_with_flaps(*flaps):
    """C5 on 0..4 plus one path per (u, v, length); returns graph and structure."""
    pairs = [(i, (i + 1) % 5) for i in range(5)]
    nxt = 5
    spans = []
    for u, v, length in flaps:
        inner = list(range(nxt, nxt + length - 1))
        nxt += length - 1
        walk = [u] + inner + [v]
        spans.append((len(pairs), walk))
        pairs += list(zip(walk, walk[1:]))
    g = build_graph(pairs)
    out = []
    for start, walk in spans:
        out.append(Flap(frozenset(range(start, start + len(walk) - 1)), (walk[0], walk[-1]), (tuple(walk),)))
    st = StarStructure(tuple(range(5)), tuple(range(5)), tuple(out))
    return g, st


def test_signed_clique_examples():
    assert signed_clique(PATH2, [0, 2]).sigma == frozenset()
    assert signed_clique(PATH3, [0, 3]).sigma == {(0, 3)}
    sc = signed_clique(SPIDER, [2, 4, 6])
    assert sc.pairs == ((2, 4), (2, 6), (4, 6)) and sc.sigma == frozenset()


def test_gadget_kinds():
    assert gadget_kind(PATH2, [0, 2])[0] == "P3"
    assert gadget_kind(PATH3, [0, 3])[0] == "P4"
    assert gadget_kind(SPIDER, [2, 4, 6])[0] == "S222"
    kind, leaves = gadget_kind(build_graph([(0, 1), (0, 2), (0, 3), (3, 4)]), [1, 2, 4])
    assert kind == "S233" and leaves[0] == 4


def test_select_gadget_uses_fresh_ids():
    gd = select_gadget(SPIDER, [2, 4, 6], next_node=100, next_edge=50)
    assert gd.kind == "S222"
    assert min(gd.internal) >= 100 and min(e for e, _, _ in gd.edges) >= 50
    assert len(gd.internal) == 4 and len(gd.edges) == 6
    assert is_bipartite(gd.graph())


def test_h_plus_trivial():
    k4 = complete(4)
    st = StarStructure(tuple(k4.nodes), tuple(k4.edge_ids()), ())
    sg, origin = build_h_plus(k4, st)
    assert origin == {} and sg.signature == frozenset(k4.edge_ids())


def test_h_plus_chord():
    g, st = c5_with_flaps((1, 3, 2))
    sg, origin = build_h_plus(g, st)
    (chord,) = origin
    assert sorted(sg.graph.ends(chord)) == [1, 3]
    assert chord not in sg.signature
    assert sg.signature == frozenset(range(5))


def test_h_plus_order3_triangle():
    g = build_graph([(i, (i + 1) % 5) for i in range(5)] + [(0, 5), (5, 1), (5, 7), (7, 3)])
    flap = Flap(frozenset({5, 6, 7, 8}), (0, 1, 3), ((0, 5, 1), (0, 5, 7, 3), (1, 5, 7, 3)))
    st = StarStructure(tuple(range(5)), tuple(range(5)), (flap,))
    sg, origin = build_h_plus(g, st)
    assert len(origin) == 3


def test_core_examples():
    k4 = complete(4)
    st = StarStructure(tuple(k4.nodes), tuple(k4.edge_ids()), ())
    assert build_core(k4, st, []).edges == k4.edges
    g, st = c5_with_flaps((1, 3, 4))
    gadgets = assign_gadgets(g, st)
    core = build_core(g, st, gadgets)
    assert gadgets[0].kind == "P3" and core.n == 6 and core.m == 7
    assert is_even_face_projective(SignedGraph.ordinary(core), find_even_face_embedding(SignedGraph.ordinary(core)))
    assert chain_graph(g, st, gadgets, 0).m == g.m
    assert chain_graph(g, st, gadgets, 1).m == core.m


def test_two_flaps_share_only_h0_nodes():
    g, st = c5_with_flaps((1, 3, 4), (1, 4, 3))
    gadgets = assign_gadgets(g, st)
    assert [gd.kind for gd in gadgets] == ["P3", "P4"]
    a, b = (set(gd.internal) for gd in gadgets)
    assert not a & b and not (a | b) & set(g.nodes)
    core = build_core(g, st, gadgets)
    assert core.n == 5 + 1 + 2


@pytest.mark.parametrize(
    "kind,expected",
    [
        ("k4-even-pair", ["P3"]),
        ("k4-odd-pair", ["P4"]),
        ("k4-triple", ["S233"]),
        ("k4path-blob", ["P3"]),
        ("quad8-blob", ["S222"]),
        ("k4-two-flaps", ["P3", "P4"]),
    ],
)
def test_flapped_cores(kind, expected):
    g = flapped_core(kind)
    st, gadgets, core, rs = find_star_structure(g, check_preconditions=False)
    assert sorted(gd.kind for gd in gadgets) == sorted(expected)
    assert validate_star_structure(g, st) == []
    assert is_even_face_projective(SignedGraph.ordinary(core), rs)
    sg, _ = build_h_plus(g, st)
    assert classify_ocp_signed(sg).cls == classify_ocp(g).cls == "One"
    back, gads = star_structure_from_json(star_structure_to_json(st, gadgets))
    assert back == st and gads == list(gadgets)


def test_embeddable_graph_gets_trivial_structure():
    st, gadgets, core, _ = find_star_structure(complete(4), check_preconditions=False)
    assert st.ell == 0 and gadgets == [] and core.m == 6
    # the path 1-5-6-3 is no larger than its P4 gadget, so it is not peeled
    g, _ = c5_with_flaps((1, 3, 3))
    st, _, _, _ = find_star_structure(g, check_preconditions=False)
    assert st.ell == 0


def test_preconditions():
    with pytest.raises(GraphError):
        find_star_structure(build_graph([(0, 1), (1, 2), (2, 0), (3, 4), (4, 5), (5, 3)]))
    with pytest.raises(GraphError):
        find_star_structure(odd_cycle(2))


def test_validator_reports_problems():
    g, st = c5_with_flaps((1, 3, 4))
    broken = StarStructure(st.h0_nodes, st.h0_edges[:-1], st.flaps)
    assert validate_star_structure(g, broken)


def test_candidate_flaps_are_bipartite_and_large():
    g = flapped_core("k4-even-pair")
    cands = candidate_flaps(g)
    assert cands
    for f in cands:
        t = g.edge_subgraph(f.edges)
        assert is_bipartite(t) and f.order in (2, 3)
