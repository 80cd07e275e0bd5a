"""
Odd cycle packing and transversal analysis for graphs and signed graphs.

Parity is always taken with respect to a signature: a cycle is odd when it
uses an odd number of signed edges. Ordinary parity is the signature that
contains every edge.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from itertools import combinations
from typing import Iterable, Optional

from .graph import Graph

DEFAULT_CAP = 24


class CapExceeded(RuntimeError):
    """Instance is larger than the configured exact-analysis cap."""


@dataclass(frozen=True)
class SignedGraph:
    graph: Graph
    signature: frozenset = field(default_factory=frozenset)

    def __post_init__(self):
        bad = [e for e in self.signature if not self.graph.has_edge(e)]
        if bad:
            raise ValueError(f"signature mentions unknown edges {sorted(bad)[:5]}")

    @classmethod
    def ordinary(cls, g: Graph) -> "SignedGraph":
        return cls(g, frozenset(g.edge_ids()))

    def sign(self, e: int) -> int:
        return 1 if e in self.signature else 0

    def restrict(self, sub: Graph) -> "SignedGraph":
        return SignedGraph(sub, frozenset(e for e in self.signature if sub.has_edge(e)))


@dataclass(frozen=True)
class Cycle:
    nodes: tuple
    edges: tuple

    def __len__(self) -> int:
        return len(self.edges)


@dataclass(frozen=True)
class OcpVerdict:
    cls: str  # "Zero" | "One" | "AtLeastTwo"
    witnesses: tuple = ()

    @property
    def value(self) -> int:
        return {"Zero": 0, "One": 1, "AtLeastTwo": 2}[self.cls]


# balance


def _tree_path(parent: dict, v: int) -> list[tuple[int, int]]:
    """Path from v up to its root as (node, edge to parent) pairs."""
    out = []
    while parent[v] is not None:
        e, p = parent[v]
        out.append((v, e))
        v = p
    out.append((v, -1))
    return out


def is_balanced(sg: SignedGraph) -> tuple[bool, Optional[Cycle]]:
    """Signed 2-colouring along a BFS forest.

    Returns ``(True, None)`` or ``(False, cycle)`` with a signature-odd cycle.
    """
    g = sg.graph
    colour: dict[int, int] = {}
    parent: dict[int, Optional[tuple[int, int]]] = {}
    depth: dict[int, int] = {}
    for s in g.nodes:
        if s in colour:
            continue
        colour[s] = 0
        parent[s] = None
        depth[s] = 0
        queue = deque([s])
        while queue:
            v = queue.popleft()
            for e, w in g.incident(v):
                want = colour[v] ^ sg.sign(e)
                if w not in colour:
                    colour[w] = want
                    parent[w] = (e, v)
                    depth[w] = depth[v] + 1
                    queue.append(w)
                elif colour[w] != want:
                    return False, _close_cycle(parent, depth, v, w, e)
    return True, None


def _close_cycle(parent, depth, v, w, e) -> Cycle:
    pv = _tree_path(parent, v)
    pw = _tree_path(parent, w)
    on_v = {node: i for i, (node, _) in enumerate(pv)}
    j = 0
    while pw[j][0] not in on_v:
        j += 1
    i = on_v[pw[j][0]]
    # walk v -> lca, then lca -> w, then edge e back to v
    nodes = [node for node, _ in pv[: i + 1]]
    edges = [ed for _, ed in pv[:i]]
    down = pw[:j]
    for node, ed in reversed(down):
        edges.append(ed)
        nodes.append(node)
    edges.append(e)
    return Cycle(tuple(nodes), tuple(edges))


def cycle_parity(sg: SignedGraph, edges: Iterable[int]) -> int:
    """Number of signature edges on the cycle, mod 2."""
    return sum(sg.sign(e) for e in edges) % 2


# minimal unbalanced node sets


def _pair_signs(sg: SignedGraph) -> dict[tuple[int, int], set[int]]:
    out: dict[tuple[int, int], set[int]] = {}
    for e, u, v in sg.graph.edges:
        key = (u, v) if u < v else (v, u)
        out.setdefault(key, set()).add(sg.sign(e))
    return out


def minimal_unbalanced_sets(sg: SignedGraph) -> Iterable[tuple]:
    """Yield node sets of unbalanced digons and chordless signature-odd cycles.

    Every inclusion-minimal node set inducing an unbalanced subgraph occurs.
    """
    g = sg.graph
    signs = _pair_signs(sg)
    for (u, v), s in sorted(signs.items()):
        if len(s) == 2:
            yield (u, v)
    nbr = {v: set(g.neighbors(v)) for v in g.nodes}
    psign = {k: next(iter(s)) for k, s in signs.items() if len(s) == 1}

    def ps(a, b):
        return psign.get((a, b) if a < b else (b, a))

    # chordless cycles with smallest node s, extended through larger nodes
    for s in g.nodes:
        for a in sorted(nbr[s]):
            if a <= s:
                continue
            sa = ps(s, a)
            if sa is None:
                continue
            stack = [([s, a], sa)]
            while stack:
                path, par = stack.pop()
                last = path[-1]
                for b in sorted(nbr[last], reverse=True):
                    if b <= s or b in path:
                        continue
                    sb = ps(last, b)
                    if sb is None:
                        continue
                    inner = path[1:-1]
                    if any(b in nbr[x] for x in inner):
                        continue
                    if b in nbr[s]:
                        # b closes a chordless cycle; require orientation a < b
                        close = ps(b, s)
                        if close is None or len(path) < 2 or a > b:
                            continue
                        if (par + sb + close) % 2 == 1:
                            yield tuple(path + [b])
                        continue
                    stack.append((path + [b], par + sb))


def classify_ocp_signed(sg: SignedGraph, cap: int = DEFAULT_CAP) -> OcpVerdict:
    """Zero, One or AtLeastTwo disjoint signature-odd cycles."""
    g = sg.graph
    if g.n > cap:
        raise CapExceeded(f"{g.n} nodes exceed the exact classification cap {cap}")
    ok, cyc = is_balanced(sg)
    if ok:
        return OcpVerdict("Zero")
    # quick accept: some node meets every odd cycle
    for v in g.nodes:
        if is_balanced(sg.restrict(g.remove_nodes([v])))[0]:
            return OcpVerdict("One", (cyc,))
    # quick reject: greedy disjoint pair from the witness cycle
    rest = sg.restrict(g.remove_nodes(cyc.nodes))
    ok2, cyc2 = is_balanced(rest)
    if not ok2:
        return OcpVerdict("AtLeastTwo", (cyc, cyc2))
    for nodes in minimal_unbalanced_sets(sg):
        rest = sg.restrict(g.remove_nodes(nodes))
        ok2, cyc2 = is_balanced(rest)
        if not ok2:
            first = is_balanced(sg.restrict(g.induced_subgraph(nodes)))[1]
            return OcpVerdict("AtLeastTwo", (first, cyc2))
    return OcpVerdict("One", (cyc,))


def classify_ocp(g: Graph, cap: int = DEFAULT_CAP) -> OcpVerdict:
    return classify_ocp_signed(SignedGraph.ordinary(g), cap)


def odd_cycle_transversal_signed(sg: SignedGraph, cap: int) -> Optional[tuple]:
    """Lexicographically first minimum transversal of size at most cap."""
    g = sg.graph
    for size in range(0, cap + 1):
        for nodes in combinations(g.nodes, size):
            if is_balanced(sg.restrict(g.remove_nodes(nodes)))[0]:
                return nodes
    return None


def odd_cycle_transversal(g: Graph, cap: int) -> Optional[tuple]:
    return odd_cycle_transversal_signed(SignedGraph.ordinary(g), cap)


def shortest_odd_cycle(g: Graph) -> Optional[Cycle]:
    """Shortest odd cycle; ties broken by the canonical node sequence
    (rotated to start at its smallest node, smaller direction first)."""
    best = None
    for r in g.nodes:
        dist = {r: 0}
        parent: dict[int, tuple[int, int]] = {}
        queue = deque([r])
        order = []
        while queue:
            v = queue.popleft()
            order.append(v)
            for e, w in g.incident(v):
                if w not in dist:
                    dist[w] = dist[v] + 1
                    parent[w] = (e, v)
                    queue.append(w)
        for e, u, w in g.edges:
            if u not in dist or w not in dist or dist[u] != dist[w]:
                continue
            length = 2 * dist[u] + 1
            if best is not None and length > best[0]:
                continue
            pu = [u]
            eu = []
            while pu[-1] != r:
                ed, p = parent[pu[-1]]
                eu.append(ed)
                pu.append(p)
            pw = [w]
            ew = []
            while pw[-1] != r:
                ed, p = parent[pw[-1]]
                ew.append(ed)
                pw.append(p)
            if set(pu[:-1]) & set(pw[:-1]):
                continue
            # r .. u, e, w .. r
            nodes = list(reversed(pu)) + pw[:-1]
            edges = list(reversed(eu)) + [e] + ew
            cand = _canonical_cycle(nodes, edges)
            key = (length, cand.nodes, cand.edges)
            if best is None or key < best:
                best = key
    if best is None:
        return None
    return Cycle(best[1], best[2])


def _canonical_cycle(nodes: list[int], edges: list[int]) -> Cycle:
    """Rotate so the smallest node is first; edges[i] joins nodes[i], nodes[i+1]."""
    k = len(nodes)
    i = nodes.index(min(nodes))
    fn = nodes[i:] + nodes[:i]
    fe = edges[i:] + edges[:i]
    # reversed orientation
    rn = [fn[0]] + fn[1:][::-1]
    re_ = fe[::-1]
    if k > 2 and (rn, re_) < (fn, fe):
        return Cycle(tuple(rn), tuple(re_))
    return Cycle(tuple(fn), tuple(fe))


# signed text format


def format_signed_graph(sg: SignedGraph) -> str:
    g = sg.graph
    lines = [f"p stab {g.n} {g.m}"]
    for e, u, v in g.edges:
        lines.append(f"e {u} {v} {'-' if e in sg.signature else '+'}")
    return "\n".join(lines) + "\n"


def parse_signed_graph(text: str) -> SignedGraph:
    from .graph import GraphError, build_graph

    n = None
    pairs = []
    sig = []
    for raw in text.splitlines():
        tok = raw.split()
        if not tok or tok[0] == "c":
            continue
        if tok[0] == "p":
            n, m = int(tok[2]), int(tok[3])
        elif tok[0] == "e":
            if len(tok) != 4 or tok[3] not in "+-":
                raise GraphError(f"bad signed edge line {raw!r}")
            if tok[3] == "-":
                sig.append(len(pairs))
            pairs.append((int(tok[1]), int(tok[2])))
    if n is None:
        raise GraphError("missing header")
    return SignedGraph(build_graph(pairs, n), frozenset(sig))
