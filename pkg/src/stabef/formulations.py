"""
Stable set formulations built from totally unimodular pieces: bipartite
graphs, the odd-cycle-transversal branch, the restricted polytope of a flap
plus gadget, and the composition along a separation.
"""

from __future__ import annotations

from itertools import product
from typing import Iterable, Mapping, Optional

from .extform import ExtForm, FormError, balas_union, demote, glue_shared, make_row, simple_form
from .graph import Graph, is_bipartite


def xname(v: int) -> str:
    return f"x{v}"


def yname(e: int) -> str:
    return f"y{e}"


def tu_formulation(g: Graph, fixed: Optional[Mapping[int, int]] = None) -> ExtForm:
    """STAB(g) intersected with the face ``x_v = fixed[v]``.

    The free part (nodes neither fixed nor adjacent to a node fixed at 1)
    must induce a bipartite graph; its edge and nonnegativity rows are then
    totally unimodular. Only rows that define facets of the face are
    emitted: ``x <= 1`` appears only for free nodes without free neighbours.
    """
    fixed = dict(fixed or {})
    for v, val in fixed.items():
        if val not in (0, 1) or not g.has_node(v):
            raise FormError(f"bad fixing {v}={val}")
    value: dict[int, int] = dict(fixed)
    ones = [v for v in g.nodes if fixed.get(v) == 1]
    conflict = False
    for v in ones:
        for w in g.neighbors(v):
            if value.get(w) == 1:
                conflict = True
            value.setdefault(w, 0)
    names = [xname(v) for v in g.nodes]
    if conflict:
        return simple_form(names, [make_row({}, -1)])
    free = [v for v in g.nodes if v not in value]
    sub = g.induced_subgraph(free)
    if not is_bipartite(sub):
        raise FormError("free part is not bipartite")
    ineqs = []
    for v in free:
        ineqs.append(make_row({xname(v): -1}, 0))
    for e, u, v in sub.edges:
        ineqs.append(make_row({xname(u): 1, xname(v): 1}, 1))
    for v in free:
        if sub.degree(v) == 0:
            ineqs.append(make_row({xname(v): 1}, 1))
    ineqs = list(dict.fromkeys(ineqs))
    eqs = [make_row({xname(v): 1}, value[v]) for v in g.nodes if v in value]
    return simple_form(names, ineqs, eqs)


def stable_assignments(g: Graph, nodes: Iterable[int]) -> list[dict]:
    nodes = list(nodes)
    out = []
    node_set = set(nodes)
    inner = [(u, v) for _, u, v in g.edges if u in node_set and v in node_set]
    for bits in product((0, 1), repeat=len(nodes)):
        a = dict(zip(nodes, bits))
        if all(not (a[u] and a[v]) for u, v in inner):
            out.append(a)
    return out


def oct3_formulation(g: Graph, X: Iterable[int]) -> ExtForm:
    """Union over the stable 0/1 patterns on X of the TU faces."""
    X = sorted(X)
    if len(X) > 3:
        raise FormError("transversal larger than 3")
    if not is_bipartite(g.remove_nodes(X)):
        raise FormError("G - X is not bipartite")
    branches = [tu_formulation(g, a) for a in stable_assignments(g, X)]
    return balas_union(branches, "polytopes", lambda_rows="needed")


def restricted_patterns(
    gadget_nodes: Iterable[int],
    gadget_edges: Iterable[tuple[int, int, int]],
    forbid_pairs: Iterable[tuple[int, int]] = (),
) -> list[dict]:
    """0/1 patterns on the gadget nodes that are stable on the gadget and
    leave at most one gadget edge slack (neither end chosen)."""
    nodes = sorted(gadget_nodes)
    edges = [(u, v) for _, u, v in gadget_edges]
    forbid = list(forbid_pairs)
    out = []
    for bits in product((0, 1), repeat=len(nodes)):
        a = dict(zip(nodes, bits))
        if any(a[u] and a[v] for u, v in edges):
            continue
        if sum(1 for u, v in edges if not a[u] and not a[v]) > 1:
            continue
        if any(a.get(u) and a.get(v) for u, v in forbid):
            continue
        out.append(a)
    return out


def restricted_stab_bar(
    g1p: Graph,
    gadget_nodes: Iterable[int],
    gadget_edges: Iterable[tuple[int, int, int]],
    forbid_pairs: Iterable[tuple[int, int]] = (),
) -> ExtForm:
    """Convex hull of stable sets of ``g1p`` with at most one slack gadget edge.

    ``forbid_pairs`` lists boundary pairs adjacent on the other side of the
    separation; patterns choosing both ends are dropped since they cannot
    occur in any stable set of the whole graph.
    """
    if not is_bipartite(g1p):
        raise FormError("flap plus gadget must be bipartite")
    pats = restricted_patterns(gadget_nodes, gadget_edges, forbid_pairs)
    if not pats:
        raise FormError("no admissible gadget pattern")
    return balas_union([tu_formulation(g1p, p) for p in pats], "polytopes", lambda_rows="needed")


def compose_separation(ef0: ExtForm, efbar1: ExtForm, boundary: Iterable[int], hidden: Iterable[int], tag: str) -> ExtForm:
    """Glue the core-side formulation with the restricted flap formulation
    and project out the gadget-internal variables."""
    boundary = [xname(v) for v in boundary]
    hidden = [xname(v) for v in hidden]
    shared = set(ef0.originals) & set(efbar1.originals)
    if shared != set(boundary) | set(hidden):
        raise FormError("shared variables must be exactly the boundary and the gadget internals")
    glued = glue_shared([ef0, efbar1])
    return demote(glued, hidden, f"{tag}.")
