"""
Star structures: a central subgraph H0 with bipartite flaps attached along
linked separations of order 2 or 3, the signed graph H+ obtained by
replacing each flap with a signed clique on its boundary, and the core in
which each flap is replaced by its gadget.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from itertools import combinations
from typing import Optional, Sequence

from .embedding import SearchBudgetExceeded, find_even_face_embedding
from .graph import (
    Graph,
    GraphError,
    biconnected_blocks,
    bipartition,
    enumerate_separations,
    is_bipartite,
    is_linked,
    make_separation,
)
from .parity import SignedGraph, classify_ocp, odd_cycle_transversal

GADGET_INTERNAL = {"P3": 1, "P4": 2, "S222": 4, "S233": 6}


class DecompositionError(RuntimeError):
    pass


@dataclass(frozen=True)
class Flap:
    edges: frozenset
    boundary: tuple
    paths: tuple  # one boundary-avoiding path per boundary pair, as node tuples

    @property
    def order(self) -> int:
        return len(self.boundary)


@dataclass(frozen=True)
class StarStructure:
    h0_nodes: tuple
    h0_edges: tuple
    flaps: tuple

    @property
    def ell(self) -> int:
        return len(self.flaps)


@dataclass(frozen=True)
class Gadget:
    kind: str
    leaves: tuple  # boundary nodes, in leg order
    internal: tuple  # fresh node ids
    edges: tuple  # (eid, u, v) with fresh edge ids

    @property
    def nodes(self) -> tuple:
        return tuple(sorted(self.leaves + self.internal))

    def graph(self) -> Graph:
        return Graph(self.nodes, self.edges)


@dataclass(frozen=True)
class SignedClique:
    boundary: tuple
    pairs: tuple  # all boundary pairs (u, v) with u < v
    sigma: frozenset  # pairs whose clique edge is signed


# flaps and gadgets


def flap_graph(g: Graph, flap: Flap) -> Graph:
    return g.edge_subgraph(flap.edges)


def internal_nodes(g: Graph, flap: Flap) -> list[int]:
    return sorted(set(flap_graph(g, flap).nodes) - set(flap.boundary))


def _path_avoiding(t: Graph, u: int, v: int, avoid: set) -> Optional[tuple]:
    prev = {u: None}
    order = [u]
    for x in order:
        if x == v:
            break
        for _, y in t.incident(x):
            if y in prev or (y in avoid and y != v):
                continue
            prev[y] = x
            order.append(y)
    if v not in prev:
        return None
    path = [v]
    while prev[path[-1]] is not None:
        path.append(prev[path[-1]])
    return tuple(reversed(path))


def linkage_paths(t: Graph, boundary: Sequence[int]) -> Optional[tuple]:
    out = []
    for u, v in combinations(sorted(boundary), 2):
        p = _path_avoiding(t, u, v, set(boundary) - {u, v})
        if p is None:
            return None
        out.append(p)
    return tuple(out)


def signed_clique(t: Graph, boundary: Sequence[int]) -> SignedClique:
    """Sign boundary pair uv iff u and v lie in different colour classes of t."""
    col = bipartition(t)
    if col is None:
        raise DecompositionError("flap is not bipartite")
    bnd = tuple(sorted(boundary))
    paths = linkage_paths(t, bnd)
    if paths is None:
        raise DecompositionError("flap is not linked at its boundary")
    pairs = tuple(combinations(bnd, 2))
    return SignedClique(bnd, pairs, frozenset(p for p in pairs if col[p[0]] != col[p[1]]))


def gadget_kind(t: Graph, boundary: Sequence[int]) -> tuple[str, tuple]:
    """Kind of the attachable gadget and the leaf order used to build it."""
    col = bipartition(t)
    if col is None:
        raise DecompositionError("flap is not bipartite")
    bnd = sorted(boundary)
    if len(bnd) == 2:
        u, v = bnd
        return ("P3" if col[u] == col[v] else "P4"), (u, v)
    if len(bnd) == 3:
        classes = [col[b] for b in bnd]
        if len(set(classes)) == 1:
            return "S222", tuple(bnd)
        single = [b for b in bnd if classes.count(col[b]) == 1][0]
        rest = [b for b in bnd if b != single]
        return "S233", (single, *rest)
    raise DecompositionError(f"boundary of size {len(bnd)} has no gadget")


def select_gadget(t: Graph, boundary: Sequence[int], next_node: int, next_edge: int) -> Gadget:
    """Attachable gadget with fresh internal ids starting at the given counters."""
    if linkage_paths(t, boundary) is None:
        raise DecompositionError("flap is not linked at its boundary")
    kind, leaves = gadget_kind(t, boundary)
    legs = {"P3": None, "P4": None, "S222": (2, 2, 2), "S233": (2, 3, 3)}[kind]
    nodes = iter(range(next_node, next_node + GADGET_INTERNAL[kind]))
    edges = []
    eid = [next_edge]

    def add(u, v):
        edges.append((eid[0], u, v))
        eid[0] += 1

    internal = []
    if kind in ("P3", "P4"):
        u, v = leaves
        prev = u
        for _ in range(GADGET_INTERNAL[kind]):
            x = next(nodes)
            internal.append(x)
            add(prev, x)
            prev = x
        add(prev, v)
    else:
        c = next(nodes)
        internal.append(c)
        for leaf, length in zip(leaves, legs):
            prev = c
            for _ in range(length - 1):
                x = next(nodes)
                internal.append(x)
                add(prev, x)
                prev = x
            add(prev, leaf)
    gad = Gadget(kind, tuple(leaves), tuple(internal), tuple(edges))
    combined = Graph(sorted(set(t.nodes) | set(gad.internal)), list(t.edges) + list(gad.edges))
    if not is_bipartite(combined):
        raise DecompositionError("gadget does not keep the flap bipartite")
    return gad


def assign_gadgets(g: Graph, st: StarStructure) -> list[Gadget]:
    nn = g.max_node() + 1
    ne = g.max_edge_id() + 1
    out = []
    for flap in st.flaps:
        gad = select_gadget(flap_graph(g, flap), flap.boundary, nn, ne)
        nn += len(gad.internal)
        ne += len(gad.edges)
        out.append(gad)
    return out


# H+, core


def build_h_plus(g: Graph, st: StarStructure) -> tuple[SignedGraph, dict]:
    """Signed graph H0 plus one signed clique per flap.

    Clique edges get fresh ids (parallel to H0 edges where those exist).
    Returns the signed graph and a map from clique edge id to (flap, pair).
    """
    edges = [(e, *g.ends(e)) for e in st.h0_edges]
    sig = set(st.h0_edges)
    nxt = g.max_edge_id() + 1
    origin = {}
    for i, flap in enumerate(st.flaps):
        sc = signed_clique(flap_graph(g, flap), flap.boundary)
        for pair in sc.pairs:
            edges.append((nxt, *pair))
            if pair in sc.sigma:
                sig.add(nxt)
            origin[nxt] = (i, pair)
            nxt += 1
    return SignedGraph(Graph(st.h0_nodes, edges), frozenset(sig)), origin


def build_core(g: Graph, st: StarStructure, gadgets: Sequence[Gadget]) -> Graph:
    inner = [set(gd.internal) for gd in gadgets]
    for a, b in combinations(range(len(inner)), 2):
        if inner[a] & inner[b]:
            raise DecompositionError("gadget internals overlap")
    nodes = set(st.h0_nodes)
    edges = [(e, *g.ends(e)) for e in st.h0_edges]
    for gd in gadgets:
        nodes.update(gd.internal)
        edges.extend(gd.edges)
    return Graph(sorted(nodes), edges)


def chain_graph(g: Graph, st: StarStructure, gadgets: Sequence[Gadget], i: int) -> Graph:
    """H0 plus gadgets 1..i plus flaps i+1..l (i = 0 gives G, i = l the core)."""
    nodes = set(st.h0_nodes)
    edges = [(e, *g.ends(e)) for e in st.h0_edges]
    for k, (flap, gd) in enumerate(zip(st.flaps, gadgets)):
        if k < i:
            nodes.update(gd.internal)
            edges.extend(gd.edges)
        else:
            t = flap_graph(g, flap)
            nodes.update(t.nodes)
            edges.extend(t.edges)
    return Graph(sorted(nodes), edges)


# validation


def validate_star_structure(g: Graph, st: StarStructure) -> list[str]:
    """Problems with the structure (empty list when valid)."""
    problems = []
    flap_edges = set()
    for i, flap in enumerate(st.flaps):
        t = flap_graph(g, flap)
        if not is_bipartite(t):
            problems.append(f"flap {i} is not bipartite")
        if flap.order not in (2, 3):
            problems.append(f"flap {i} has order {flap.order}")
        if flap_edges & flap.edges:
            problems.append(f"flap {i} shares edges with another flap")
        flap_edges |= flap.edges
        rest = frozenset(e for e in g.edge_ids() if e not in flap.edges)
        sep = make_separation(g, flap.edges)
        if sep is None or sep.part0 != rest or sep.boundary != frozenset(flap.boundary):
            problems.append(f"flap {i} is not a separation with the stated boundary")
        elif not is_linked(g, sep):
            problems.append(f"flap {i} is not linked")
        if set(t.nodes) & set(flap.boundary) != set(flap.boundary):
            problems.append(f"flap {i} misses boundary nodes")
    for i, j in combinations(range(st.ell), 2):
        ti = set(flap_graph(g, st.flaps[i]).nodes)
        tj = set(flap_graph(g, st.flaps[j]).nodes)
        if not (ti & tj) <= set(st.h0_nodes):
            problems.append(f"flaps {i} and {j} share non-H0 nodes")
    for i, j in combinations(range(st.ell), 2):
        si, sj = set(st.flaps[i].boundary), set(st.flaps[j].boundary)
        if si <= sj or sj <= si:
            problems.append(f"boundaries of flaps {i} and {j} are nested")
    if set(st.h0_edges) | flap_edges != set(g.edge_ids()) or set(st.h0_edges) & flap_edges:
        problems.append("H0 and flap edges do not partition E(G)")
    h0 = Graph(st.h0_nodes, [(e, *g.ends(e)) for e in st.h0_edges])
    for flap in st.flaps:
        if not set(flap.boundary) <= set(h0.nodes):
            problems.append("flap boundary not contained in H0")
    return problems


# search


def _structure(g: Graph, flaps: Sequence[Flap]) -> StarStructure:
    fe = set()
    inner = set()
    for f in flaps:
        fe |= f.edges
        inner |= set(flap_graph(g, f).nodes) - set(f.boundary)
    h0_edges = tuple(e for e in g.edge_ids() if e not in fe)
    h0_nodes = tuple(v for v in g.nodes if v not in inner)
    return StarStructure(h0_nodes, h0_edges, tuple(sorted(flaps, key=lambda f: (f.boundary, sorted(f.edges)))))


def candidate_flaps(g: Graph) -> list[Flap]:
    """Bipartite linked flaps of order 2 or 3 worth replacing by a gadget."""
    out = []
    for sep in enumerate_separations(g, 3):
        if sep.order < 2:
            continue
        t = g.edge_subgraph(sep.part1)
        if not is_bipartite(t):
            continue
        paths = linkage_paths(t, sep.boundary)
        if paths is None:
            continue
        flap = Flap(sep.part1, tuple(sorted(sep.boundary)), paths)
        kind, _ = gadget_kind(t, flap.boundary)
        # only peel when the gadget is smaller than what it replaces
        if len(internal_nodes(g, flap)) <= GADGET_INTERNAL[kind]:
            continue
        out.append(flap)
    out.sort(key=lambda f: (-len(internal_nodes(g, f)), f.order, f.boundary, sorted(f.edges)))
    return out


def _compatible(g: Graph, chosen: Sequence[Flap], f: Flap) -> bool:
    fn = set(flap_graph(g, f).nodes)
    fi = fn - set(f.boundary)
    for c in chosen:
        cn = set(flap_graph(g, c).nodes)
        ci = cn - set(c.boundary)
        if c.edges & f.edges or fi & cn or ci & fn:
            return False
        sb, cb = set(f.boundary), set(c.boundary)
        if sb <= cb or cb <= sb:
            return False
    return True


@dataclass
class SearchLog:
    tried: int = 0
    failures: list = field(default_factory=list)


def find_star_structure(
    g: Graph,
    max_tries: int = 64,
    embed_budget: int = 2_000_000,
    check_preconditions: bool = True,
    log: Optional[SearchLog] = None,
):
    """Star structure whose core has an even-face projective embedding.

    Returns ``(structure, gadgets, core, scheme)``. The trivial structure is
    tried first; otherwise flaps are chosen greedily (largest first) with a
    depth-first fallback over alternative flap sets.
    """
    log = log if log is not None else SearchLog()
    if check_preconditions:
        if g.n < 3 or len(biconnected_blocks(g)) != 1 or not g.is_connected():
            raise GraphError("input must be 2-connected")
        if classify_ocp(g).cls != "One":
            raise GraphError("input must have ocp = 1")
        if odd_cycle_transversal(g, 3) is not None:
            raise GraphError("input has oct <= 3")

    def attempt(flaps):
        log.tried += 1
        st = _structure(g, flaps)
        if validate_star_structure(g, st):
            return None
        gadgets = assign_gadgets(g, st)
        core = build_core(g, st, gadgets)
        if not core.is_connected():
            return None
        try:
            scheme = find_even_face_embedding(SignedGraph.ordinary(core), budget=embed_budget)
        except SearchBudgetExceeded:
            log.failures.append(("budget", [f.boundary for f in flaps]))
            return None
        if scheme is None:
            log.failures.append(("no-embedding", [f.boundary for f in flaps]))
            return None
        return st, gadgets, core, scheme

    found = attempt([])
    if found:
        return found
    cands = candidate_flaps(g)

    def dfs(start, chosen):
        if log.tried >= max_tries:
            return None
        extended = False
        for k in range(start, len(cands)):
            if _compatible(g, chosen, cands[k]):
                extended = True
                res = dfs(k + 1, chosen + [cands[k]])
                if res:
                    return res
                if log.tried >= max_tries:
                    return None
        if not extended and chosen:
            return attempt(chosen)
        return None

    res = dfs(0, [])
    if res is None:
        raise DecompositionError(f"no star structure with an embeddable core after {log.tried} attempts")
    return res


# serialization


def star_structure_to_json(st: StarStructure, gadgets: Sequence[Gadget] = ()) -> str:
    data = {
        "h0_nodes": list(st.h0_nodes),
        "h0_edges": list(st.h0_edges),
        "flaps": [
            {"edges": sorted(f.edges), "boundary": list(f.boundary), "paths": [list(p) for p in f.paths]}
            for f in st.flaps
        ],
        "gadgets": [
            {"kind": gd.kind, "leaves": list(gd.leaves), "internal": list(gd.internal), "edges": [list(e) for e in gd.edges]}
            for gd in gadgets
        ],
    }
    return json.dumps(data, indent=1, sort_keys=True)


def star_structure_from_json(text: str) -> tuple[StarStructure, list[Gadget]]:
    d = json.loads(text)
    flaps = tuple(
        Flap(frozenset(f["edges"]), tuple(f["boundary"]), tuple(tuple(p) for p in f["paths"])) for f in d["flaps"]
    )
    st = StarStructure(tuple(d["h0_nodes"]), tuple(d["h0_edges"]), flaps)
    gadgets = [
        Gadget(x["kind"], tuple(x["leaves"]), tuple(x["internal"]), tuple(tuple(e) for e in x["edges"]))
        for x in d.get("gadgets", [])
    ]
    return st, gadgets
