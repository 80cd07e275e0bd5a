"""
Odd-parity circulation polyhedra and the projective stable set formulation.

For a digraph D and a parity arc set X, the convex hull of nonnegative
integer circulations y with y(X) odd is the image of a union of unit-flow
polyhedra in the parity double cover: nodes (v, p), an arc (v,p)->(w,p)
for every arc outside X and (v,p)->(w,1-p) for every arc in X. Summing the
two copies of each arc maps flows back to D.
"""

from __future__ import annotations

from collections import deque
from fractions import Fraction
from typing import Mapping

from .embedding import SignedRotationSystem, build_dual
from .extform import ExtForm, affine_substitute, balas_union, intersect_box, make_row, simple_form
from .formulations import tu_formulation, xname, yname
from .graph import Graph, is_bipartite
from .parity import Cycle, shortest_odd_cycle


class CirculationError(ValueError):
    pass


def zname(a: int, p: int) -> str:
    return f"z{a}_{p}"


def double_cover_arcs(arcs: Mapping[int, tuple[int, int]], X) -> dict:
    """(arc, layer) -> ((tail, layer), (head, layer'))."""
    out = {}
    for a, (t, h) in arcs.items():
        for p in (0, 1):
            q = 1 - p if a in X else p
            out[(a, p)] = ((t, p), (h, q))
    return out


def unit_flow_form(num_nodes: int, arcs: Mapping[int, tuple[int, int]], X, root: int) -> ExtForm:
    """Unit flow from (root, 0) to (root, 1) in the double cover."""
    cover = double_cover_arcs(arcs, X)
    names = [zname(a, p) for a, p in cover]
    balance: dict[tuple, dict] = {(v, p): {} for v in range(num_nodes) for p in (0, 1)}
    for (a, p), (tail, head) in cover.items():
        if tail == head:
            continue  # loops in the cover do not affect conservation
        balance[tail][zname(a, p)] = balance[tail].get(zname(a, p), 0) + 1
        balance[head][zname(a, p)] = balance[head].get(zname(a, p), 0) - 1
    eqs = []
    for node, coeffs in balance.items():
        rhs = 1 if node == (root, 0) else (-1 if node == (root, 1) else 0)
        row = make_row(coeffs, rhs)
        if row[0] or row[1] != 0:
            eqs.append(row)
    ineqs = [make_row({n: -1}, 0) for n in names]
    return simple_form(names, ineqs, eqs)


def parity_circulation_ef(num_nodes: int, arcs: Mapping[int, tuple[int, int]], X, name=yname) -> ExtForm:
    """Formulation of conv{y >= 0 integer circulation, y(X) odd}.

    The union is taken without multiplier sign rows: a negative multiplier
    on branch v yields a flow from (v,1) to (v,0), whose image is again an
    odd circulation, so the projection only gains points of the form
    s * q + c with s >= 1, q in the hull and c a nonnegative circulation,
    all of which already lie in the polyhedron.

    Only tails of parity arcs serve as roots: every odd closed walk uses an
    arc of X and can be rotated to start at its tail.
    """
    X = set(X)
    arcs = dict(sorted(arcs.items()))
    roots = sorted({arcs[a][0] for a in X if a in arcs})
    if not roots:
        raise CirculationError("parity set has no arcs in the digraph")
    branches = [unit_flow_form(num_nodes, arcs, X, v) for v in roots]
    union = balas_union(branches, "shared-recession-cone", lambda_rows="none")
    mapping = {name(a): ({zname(a, 0): 1, zname(a, 1): 1}, 0) for a in arcs}
    return affine_substitute(union, mapping, old_prefix="s.")


def sigma_inverse(g: Graph, cycle: Cycle) -> dict:
    """x as an affine function of y = 1 - Mx on a connected non-bipartite graph.

    Along the odd cycle v0 e1 v1 ... e_{2k+1} v0 the alternating sum of y
    equals 2 x_{v0} - 1; the rest follows from x_w = 1 - y_e - x_v along
    a BFS tree.
    """
    v0 = cycle.nodes[0]
    expr: dict[int, tuple[dict, Fraction]] = {}
    coeffs = {}
    for i, e in enumerate(cycle.edges, 1):
        coeffs[yname(e)] = coeffs.get(yname(e), Fraction(0)) + Fraction((-1) ** i, 2)
    expr[v0] = (coeffs, Fraction(1, 2))
    queue = deque([v0])
    while queue:
        v = queue.popleft()
        cv, kv = expr[v]
        for e, w in g.incident(v):
            if w in expr:
                continue
            cw = {k: -c for k, c in cv.items()}
            cw[yname(e)] = cw.get(yname(e), Fraction(0)) - 1
            expr[w] = ({k: c for k, c in cw.items() if c}, 1 - kv)
            queue.append(w)
    if len(expr) != g.n:
        raise CirculationError("graph is not connected")
    return {xname(v): expr[v] for v in g.nodes}


def sigma(g: Graph, x: Mapping[int, object]) -> dict:
    """Edge vector y_e = 1 - x_u - x_v."""
    return {e: 1 - Fraction(x[u]) - Fraction(x[v]) for e, u, v in g.edges}


def parity_identity(cycle: Cycle, y: Mapping[int, object]) -> Fraction:
    """Alternating sum sum_i (-1)^i y_{e_i} over the cycle (i from 1)."""
    return sum((Fraction((-1) ** i) * Fraction(y[e]) for i, e in enumerate(cycle.edges, 1)), Fraction(0))


def q_of_g_ef(g: Graph, scheme: SignedRotationSystem):
    """Formulation of Q(G) in edge variables, plus the dual and cycle used."""
    if not g.is_connected() or is_bipartite(g):
        raise CirculationError("need a connected non-bipartite graph")
    dual = build_dual(g, scheme)
    cycle = shortest_odd_cycle(g)
    form = parity_circulation_ef(dual.num_nodes, dual.arcs, set(cycle.edges))
    return form, dual, cycle


def stab_ef_projective(g: Graph, scheme: SignedRotationSystem | None) -> ExtForm:
    """STAB(G) for a connected graph with an even-face projective scheme.

    Bipartite graphs bypass to the TU system. Upper bounds x <= 1 are
    implied (every node has an edge and y = 1 - Mx >= 0 holds on Q(G)),
    so only x >= 0 is added.
    """
    if is_bipartite(g):
        return tu_formulation(g)
    if scheme is None:
        raise CirculationError("non-bipartite input needs a scheme")
    qform, dual, cycle = q_of_g_ef(g, scheme)
    pform = affine_substitute(qform, sigma_inverse(g, cycle), old_prefix="q.")
    return intersect_box(pform, lower=True, upper=False)
