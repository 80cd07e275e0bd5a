import itertools

import networkx as nx
import pytest

from conftest import random_graph
from stabef.corpus import complete, odd_cycle, odd_wheel
from stabef.graph import build_graph, is_bipartite
from stabef.parity import (
    CapExceeded,
    SignedGraph,
    classify_ocp,
    classify_ocp_signed,
    cycle_parity,
    format_signed_graph,
    is_balanced,
    odd_cycle_transversal,
    odd_cycle_transversal_signed,
    parse_signed_graph,
    shortest_odd_cycle,
)

K3K3 = build_graph([(0, 1), (1, 2), (2, 0), (3, 4), (4, 5), (5, 3)])
C4 = build_graph([(0, 1), (1, 2), (2, 3), (3, 0)])
C6 = build_graph([(i, (i + 1) % 6) for i in range(6)])


def brute_ocp(g):
    """0, 1 or 2 (meaning >= 2) from all simple cycles."""
    h = nx.Graph([(u, v) for _, u, v in g.edges])
    odd = [frozenset(c) for c in nx.simple_cycles(h) if len(c) % 2]
    if not odd:
        return 0
    return 2 if any(not (a & b) for a, b in itertools.combinations(odd, 2)) else 1


def brute_oct(g, cap):
    for k in range(cap + 1):
        for X in itertools.combinations(g.nodes, k):
            if is_bipartite(g.remove_nodes(X)):
                return k
    return None


def test_classify_examples():
    v = classify_ocp(odd_cycle(2))
    assert v.cls == "One"
    assert sorted(v.witnesses[0].nodes) == [0, 1, 2, 3, 4]
    assert classify_ocp(K3K3).cls == "AtLeastTwo"
    assert len(classify_ocp(K3K3).witnesses) == 2
    assert classify_ocp(C6).cls == "Zero"


@pytest.mark.parametrize("rim", [3, 5, 7, 9])
def test_odd_wheels_have_ocp_one(rim):
    assert classify_ocp(odd_wheel(rim)).cls == "One"


def test_classify_against_enumeration():
    for seed in range(80):
        g = random_graph(8, 0.3, seed)
        assert classify_ocp(g).value == brute_ocp(g), seed


def test_witnesses_are_disjoint_odd_cycles():
    for seed in range(40):
        g = random_graph(9, 0.35, seed)
        v = classify_ocp(g)
        if v.cls != "AtLeastTwo":
            continue
        a, b = v.witnesses[:2]
        assert len(a) % 2 and len(b) % 2
        assert not set(a.nodes) & set(b.nodes)


def test_transversal_examples():
    assert odd_cycle_transversal(odd_cycle(2), 3) == (0,)
    assert len(odd_cycle_transversal(complete(4), 3)) == 2
    assert len(odd_cycle_transversal(complete(5), 3)) == 3
    assert odd_cycle_transversal(complete(5), 2) is None


def test_transversal_is_minimum():
    for seed in range(40):
        g = random_graph(8, 0.35, seed)
        X = odd_cycle_transversal(g, 3)
        k = brute_oct(g, 3)
        if k is None:
            assert X is None
        else:
            assert len(X) == k and is_bipartite(g.remove_nodes(X))


def test_balance_examples():
    k3 = complete(3)
    assert is_balanced(SignedGraph(C4, frozenset()))[0]
    ok, witness = is_balanced(SignedGraph(k3, frozenset({0})))
    assert not ok and sorted(witness.nodes) == [0, 1, 2]
    assert cycle_parity(SignedGraph(k3, frozenset({0})), witness.edges) == 1
    assert is_balanced(SignedGraph(k3, frozenset({0, 1})))[0]


def test_signed_classify_examples():
    c5 = odd_cycle(2)
    assert classify_ocp_signed(SignedGraph(c5, frozenset(c5.edge_ids()))).cls == "One"
    assert classify_ocp_signed(SignedGraph(c5, frozenset())).cls == "Zero"
    assert classify_ocp_signed(SignedGraph.ordinary(K3K3)).cls == "AtLeastTwo"


def test_signed_transversal_on_ordinary_matches_plain():
    for seed in range(20):
        g = random_graph(8, 0.3, seed)
        a = odd_cycle_transversal(g, 3)
        b = odd_cycle_transversal_signed(SignedGraph.ordinary(g), 3)
        assert (a is None) == (b is None)
        if a is not None:
            assert len(a) == len(b)


def test_cap():
    with pytest.raises(CapExceeded):
        classify_ocp(odd_cycle(20), cap=10)


def test_shortest_odd_cycle():
    assert len(shortest_odd_cycle(complete(4))) == 3
    assert len(shortest_odd_cycle(odd_cycle(4))) == 9
    assert shortest_odd_cycle(C6) is None


def test_signed_format_round_trip():
    sg = SignedGraph(complete(4), frozenset({0, 3}))
    text = format_signed_graph(sg)
    back = parse_signed_graph(text)
    assert back.signature == sg.signature
    assert format_signed_graph(back) == text
