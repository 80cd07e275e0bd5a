"""
Multigraphs with stable edge identities, separations and linkedness.

Nodes are integers. A graph built from an edge list has nodes 0..n-1 and
edge ids 0..m-1 in input order; subgraphs keep the ids of their parent so
that variables named after nodes and edges survive decomposition.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from itertools import combinations
from typing import Iterable, Iterator, Optional


class GraphError(ValueError):
    """Raised for malformed graph input."""


class Graph:
    """Undirected multigraph without loops.

    ``edges`` is a tuple of ``(eid, u, v)``. Parallel edges are allowed.
    """

    __slots__ = ("nodes", "edges", "_adj", "_ends", "_node_set")

    def __init__(self, nodes: Iterable[int], edges: Iterable[tuple[int, int, int]]):
        self.nodes = tuple(sorted(set(nodes)))
        self._node_set = frozenset(self.nodes)
        self.edges = tuple((int(e), int(u), int(v)) for e, u, v in edges)
        self._ends: dict[int, tuple[int, int]] = {}
        self._adj: dict[int, list[tuple[int, int]]] = {v: [] for v in self.nodes}
        for e, u, v in self.edges:
            if e in self._ends:
                raise GraphError(f"duplicate edge id {e}")
            if u == v:
                raise GraphError(f"loop at node {u}")
            if u not in self._node_set or v not in self._node_set:
                raise GraphError(f"edge {e} has an endpoint outside the node set")
            self._ends[e] = (u, v)
            self._adj[u].append((e, v))
            self._adj[v].append((e, u))

    # basic accessors

    @property
    def n(self) -> int:
        return len(self.nodes)

    @property
    def m(self) -> int:
        return len(self.edges)

    def has_node(self, v: int) -> bool:
        return v in self._node_set

    def has_edge(self, e: int) -> bool:
        return e in self._ends

    def ends(self, e: int) -> tuple[int, int]:
        return self._ends[e]

    def other(self, e: int, v: int) -> int:
        a, b = self._ends[e]
        return b if v == a else a

    def incident(self, v: int) -> list[tuple[int, int]]:
        """List of ``(eid, neighbour)`` pairs at ``v`` in edge-id order."""
        return self._adj[v]

    def degree(self, v: int) -> int:
        return len(self._adj[v])

    def neighbors(self, v: int) -> list[int]:
        seen: dict[int, None] = {}
        for _, w in self._adj[v]:
            seen[w] = None
        return list(seen)

    def edge_ids(self) -> list[int]:
        return [e for e, _, _ in self.edges]

    def max_node(self) -> int:
        return self.nodes[-1] if self.nodes else -1

    def max_edge_id(self) -> int:
        return max(self._ends) if self._ends else -1

    def is_dense(self) -> bool:
        return self.nodes == tuple(range(self.n))

    # subgraphs

    def edge_subgraph(self, eids: Iterable[int], extra_nodes: Iterable[int] = ()) -> "Graph":
        keep = set(eids)
        edges = [t for t in self.edges if t[0] in keep]
        nodes = set(extra_nodes)
        for _, u, v in edges:
            nodes.add(u)
            nodes.add(v)
        return Graph(nodes, edges)

    def induced_subgraph(self, nodes: Iterable[int]) -> "Graph":
        keep = set(nodes)
        return Graph(keep, [t for t in self.edges if t[1] in keep and t[2] in keep])

    def remove_nodes(self, nodes: Iterable[int]) -> "Graph":
        drop = set(nodes)
        return self.induced_subgraph(v for v in self.nodes if v not in drop)

    def add_edges(self, new_edges: Iterable[tuple[int, int, int]], new_nodes: Iterable[int] = ()) -> "Graph":
        return Graph(list(self.nodes) + list(new_nodes), list(self.edges) + list(new_edges))

    def components(self) -> list[list[int]]:
        """Connected components as sorted node lists, ordered by smallest node."""
        seen: set[int] = set()
        out = []
        for s in self.nodes:
            if s in seen:
                continue
            comp = [s]
            seen.add(s)
            queue = deque([s])
            while queue:
                v = queue.popleft()
                for _, w in self._adj[v]:
                    if w not in seen:
                        seen.add(w)
                        comp.append(w)
                        queue.append(w)
            out.append(sorted(comp))
        return out

    def is_connected(self) -> bool:
        return self.n <= 1 or len(self.components()) == 1

    def __eq__(self, other: object) -> bool:
        return isinstance(other, Graph) and self.nodes == other.nodes and self.edges == other.edges

    def __hash__(self) -> int:
        return hash((self.nodes, self.edges))

    def __repr__(self) -> str:
        return f"Graph(n={self.n}, m={self.m})"


def build_graph(edges: Iterable[tuple[int, int]], n: Optional[int] = None) -> Graph:
    """Build a graph on nodes 0..n-1 with edge ids in input order.

    ``n`` defaults to one more than the largest endpoint.
    """
    pairs = [(int(u), int(v)) for u, v in edges]
    if n is None:
        n = 1 + max((max(u, v) for u, v in pairs), default=-1)
    for u, v in pairs:
        if u == v:
            raise GraphError(f"loop at node {u}")
        if not (0 <= u < n and 0 <= v < n):
            raise GraphError(f"endpoint out of range in edge ({u},{v})")
    return Graph(range(n), [(i, u, v) for i, (u, v) in enumerate(pairs)])


# text format


def format_graph(g: Graph, comments: Iterable[str] = ()) -> str:
    if not g.is_dense():
        raise GraphError("only graphs on nodes 0..n-1 can be written")
    if [e for e, _, _ in g.edges] != list(range(g.m)):
        raise GraphError("edge ids must be 0..m-1 in order to be written")
    lines = [f"c {c}" if c else "c" for c in comments]
    lines.append(f"p stab {g.n} {g.m}")
    lines.extend(f"e {u} {v}" for _, u, v in g.edges)
    return "\n".join(lines) + "\n"


def _ints(tok: list, lineno: int) -> list[int]:
    try:
        return [int(t) for t in tok]
    except ValueError:
        raise GraphError(f"line {lineno}: expected integers, got {' '.join(tok)!r}") from None


def parse_graph(text: str) -> tuple[Graph, list[str]]:
    """Parse the ``p stab`` format; returns the graph and its comment lines."""
    n = m = None
    pairs = []
    comments = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.strip()
        if not line:
            continue
        tok = line.split()
        if tok[0] == "c":
            comments.append(line[2:] if len(line) > 1 else "")
        elif tok[0] == "p":
            if len(tok) != 4 or tok[1] != "stab":
                raise GraphError(f"line {lineno}: bad header")
            n, m = _ints(tok[2:], lineno)
        elif tok[0] == "e":
            if n is None or len(tok) != 3:
                raise GraphError(f"line {lineno}: bad edge line")
            pairs.append(tuple(_ints(tok[1:], lineno)))
        else:
            raise GraphError(f"line {lineno}: unknown line type {tok[0]!r}")
    if n is None:
        raise GraphError("missing header")
    if len(pairs) != m:
        raise GraphError(f"header announces {m} edges, found {len(pairs)}")
    return build_graph(pairs, n), comments


def read_graph(path) -> Graph:
    with open(path) as fh:
        return parse_graph(fh.read())[0]


def write_graph(g: Graph, path, comments: Iterable[str] = ()) -> None:
    with open(path, "w") as fh:
        fh.write(format_graph(g, comments))


# colourings


def bipartition(g: Graph) -> Optional[dict[int, int]]:
    """Proper 2-colouring (node -> 0/1) or None if an odd cycle exists.

    Each component's smallest node gets colour 0.
    """
    colour: dict[int, int] = {}
    for s in g.nodes:
        if s in colour:
            continue
        colour[s] = 0
        queue = deque([s])
        while queue:
            v = queue.popleft()
            for _, w in g.incident(v):
                if w not in colour:
                    colour[w] = 1 - colour[v]
                    queue.append(w)
                elif colour[w] == colour[v]:
                    return None
    return colour


def is_bipartite(g: Graph) -> bool:
    return bipartition(g) is not None


# separations


@dataclass(frozen=True)
class Separation:
    part0: frozenset
    part1: frozenset
    boundary: frozenset

    @property
    def order(self) -> int:
        return len(self.boundary)


def _edge_nodes(g: Graph, eids: Iterable[int]) -> set[int]:
    out: set[int] = set()
    for e in eids:
        out.update(g.ends(e))
    return out


def make_separation(g: Graph, part1: Iterable[int]) -> Optional[Separation]:
    """Separation with the given G1 edge set, or None if invalid."""
    p1 = frozenset(part1)
    p0 = frozenset(e for e in g.edge_ids() if e not in p1)
    if not p0 or not p1:
        return None
    v0 = _edge_nodes(g, p0)
    v1 = _edge_nodes(g, p1)
    if not (v1 - v0) or not (v0 - v1):
        return None
    return Separation(p0, p1, frozenset(v0 & v1))


def _component_edge_sets(g: Graph, cut: set[int]) -> list[tuple[frozenset, frozenset]]:
    """Components of G - cut as (node set, attached edge set)."""
    comps = []
    rest = g.remove_nodes(cut)
    for comp in rest.components():
        cs = set(comp)
        edges = frozenset(e for v in comp for e, _ in g.incident(v))
        comps.append((frozenset(cs), edges))
    return comps


def enumerate_separations(g: Graph, k: int, max_components: int = 16) -> list[Separation]:
    """All separations of order at most ``k`` induced by node cutsets.

    Edges inside the boundary go to part0. The result is deduplicated and
    ordered by (order, sorted boundary, sorted part1).
    """
    if k < 0:
        raise ValueError("k must be nonnegative")
    found: dict[frozenset, Separation] = {}
    for size in range(0, k + 1):
        for cut in combinations(g.nodes, size):
            comps = [c for c in _component_edge_sets(g, set(cut)) if c[1]]
            if len(comps) < 2 and not (len(comps) == 1 and size > 0):
                continue
            if len(comps) > max_components:
                raise ValueError("too many components for split enumeration")
            for mask in range(1, 1 << len(comps)):
                part1 = frozenset().union(*(comps[i][1] for i in range(len(comps)) if mask >> i & 1))
                if part1 in found:
                    continue
                sep = make_separation(g, part1)
                if sep is not None and sep.order <= k:
                    found[part1] = sep
    return sorted(found.values(), key=lambda s: (s.order, sorted(s.boundary), sorted(s.part1)))


def _reachable_avoiding(g: Graph, src: int, dst: int, avoid: set[int]) -> bool:
    if src == dst:
        return True
    seen = {src}
    queue = deque([src])
    while queue:
        v = queue.popleft()
        for _, w in g.incident(v):
            if w == dst:
                return True
            if w in seen or w in avoid:
                continue
            seen.add(w)
            queue.append(w)
    return False


def is_linked(g: Graph, sep: Separation) -> bool:
    """True iff every boundary pair is joined by a path in G1 whose inner
    nodes avoid the boundary."""
    g1 = g.edge_subgraph(sep.part1)
    bnd = sorted(sep.boundary)
    for u, v in combinations(bnd, 2):
        if not g1.has_node(u) or not g1.has_node(v):
            return False
        if not _reachable_avoiding(g1, u, v, set(bnd) - {u, v}):
            return False
    return True


# blocks


def biconnected_blocks(g: Graph) -> list[tuple[list[int], list[int]]]:
    """Blocks as (sorted nodes, sorted edge ids).

    Bridges are two-node blocks, isolated nodes are edgeless blocks.
    Ordered by (smallest node, smallest edge id).
    """
    disc: dict[int, int] = {}
    low: dict[int, int] = {}
    blocks: list[tuple[list[int], list[int]]] = []
    counter = 0
    for root in g.nodes:
        if root in disc:
            continue
        if g.degree(root) == 0:
            disc[root] = counter
            counter += 1
            blocks.append(([root], []))
            continue
        disc[root] = low[root] = counter
        counter += 1
        edge_stack: list[int] = []
        # frames: (node, parent edge, iterator over incident list)
        stack: list[tuple[int, int, Iterator]] = [(root, -1, iter(g.incident(root)))]
        while stack:
            v, pe, it = stack[-1]
            advanced = False
            for e, w in it:
                if e == pe:
                    continue
                if w not in disc:
                    disc[w] = low[w] = counter
                    counter += 1
                    edge_stack.append(e)
                    stack.append((w, e, iter(g.incident(w))))
                    advanced = True
                    break
                if disc[w] < disc[v]:
                    edge_stack.append(e)
                    low[v] = min(low[v], disc[w])
            if advanced:
                continue
            stack.pop()
            if stack:
                p = stack[-1][0]
                low[p] = min(low[p], low[v])
                if low[v] >= disc[p]:
                    comp_edges = []
                    while True:
                        e = edge_stack.pop()
                        comp_edges.append(e)
                        if e == pe:
                            break
                    nodes = _edge_nodes(g, comp_edges)
                    blocks.append((sorted(nodes), sorted(comp_edges)))
    blocks.sort(key=lambda b: (b[0][0], b[1][0] if b[1] else -1))
    return blocks


def cycle_nodes_to_edges(g: Graph, cycle: list[int]) -> list[int]:
    """Edge ids along a closed node sequence (smallest id for parallels)."""
    out = []
    for i, v in enumerate(cycle):
        w = cycle[(i + 1) % len(cycle)]
        out.append(min(e for e, x in g.incident(v) if x == w))
    return out
