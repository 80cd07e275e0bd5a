"""
Projective-plane embeddings as signed rotation systems.

A dart ``(e, end)`` is edge ``e`` seen from endpoint ``graph.ends(e)[end]``.
A rotation system fixes a cyclic order of darts at every node together with
a sign per edge. Faces are traced on states ``(e, end, s)``: leave along
dart ``(e, end)`` with local orientation ``s``; on arrival the orientation
becomes ``s * sign(e)`` and the next dart is the successor (orientation +1)
or predecessor (orientation -1) of the arrival dart.
"""

from __future__ import annotations

import sys
from collections import deque
from dataclasses import dataclass
from typing import Iterable, Optional

from .graph import Graph
from .parity import SignedGraph, is_balanced

Dart = tuple  # (eid, end)
State = tuple  # (eid, end, orientation)


class EmbeddingError(ValueError):
    """Malformed rotation system or violated precondition."""


class SearchBudgetExceeded(RuntimeError):
    pass


@dataclass(frozen=True)
class SignedRotationSystem:
    rotation: dict  # node -> tuple of darts, cyclic
    signs: dict  # eid -> +1 / -1

    def canonical(self) -> "SignedRotationSystem":
        rot = {}
        for v, darts in self.rotation.items():
            darts = tuple(darts)
            if darts:
                i = darts.index(min(darts))
                darts = darts[i:] + darts[:i]
            rot[v] = darts
        return SignedRotationSystem(dict(sorted(rot.items())), dict(sorted(self.signs.items())))

    def switch(self, nodes: Iterable[int], g: Graph) -> "SignedRotationSystem":
        """Reverse the rotation at each node and flip the signs around it."""
        flip = set(nodes)
        rot = {}
        for v, darts in self.rotation.items():
            rot[v] = tuple(reversed(darts)) if v in flip else tuple(darts)
        signs = {}
        for e, s in self.signs.items():
            u, w = g.ends(e)
            if (u in flip) != (w in flip):
                s = -s
            signs[e] = s
        return SignedRotationSystem(rot, signs).canonical()


def dart_node(g: Graph, d: Dart) -> int:
    return g.ends(d[0])[d[1]]


def check_rotation(g: Graph, rs: SignedRotationSystem) -> None:
    for v in g.nodes:
        expected = sorted((e, 0 if g.ends(e)[0] == v else 1) for e, _ in g.incident(v))
        got = sorted(rs.rotation.get(v, ()))
        if expected != got:
            raise EmbeddingError(f"rotation at node {v} does not list its darts exactly once")
    for e in g.edge_ids():
        if rs.signs.get(e) not in (1, -1):
            raise EmbeddingError(f"edge {e} lacks a sign")


def _succ_pred(rs: SignedRotationSystem) -> tuple[dict, dict]:
    succ, pred = {}, {}
    for darts in rs.rotation.values():
        k = len(darts)
        for i, d in enumerate(darts):
            succ[d] = darts[(i + 1) % k]
            pred[darts[(i + 1) % k]] = d
    return succ, pred


def reverse_state(state: State, sign: int) -> State:
    e, end, s = state
    return (e, 1 - end, -s * sign)


@dataclass(frozen=True)
class FaceSet:
    faces: tuple  # each face: tuple of states along one traversal direction
    euler: int

    def lengths(self) -> list[int]:
        return [len(f) for f in self.faces]

    def boundary_edges(self, i: int) -> list[int]:
        return [st[0] for st in self.faces[i]]


def trace_faces(g: Graph, rs: SignedRotationSystem) -> FaceSet:
    check_rotation(g, rs)
    succ, pred = _succ_pred(rs)
    states = sorted((e, end, s) for e in g.edge_ids() for end in (0, 1) for s in (1, -1))
    orbit_of: dict[State, int] = {}
    orbits: list[list[State]] = []
    for st in states:
        if st in orbit_of:
            continue
        idx = len(orbits)
        walk = []
        cur = st
        while cur not in orbit_of:
            orbit_of[cur] = idx
            walk.append(cur)
            e, end, s = cur
            arr = (e, 1 - end)
            s2 = s * rs.signs[e]
            nxt = succ[arr] if s2 == 1 else pred[arr]
            cur = (nxt[0], nxt[1], s2)
        if cur != st:
            raise EmbeddingError("face tracing did not close; malformed rotation")
        orbits.append(walk)
    faces = []
    taken = set()
    for idx, walk in enumerate(orbits):
        if idx in taken:
            continue
        mate = orbit_of[reverse_state(walk[0], rs.signs[walk[0][0]])]
        if mate == idx:
            raise EmbeddingError("face orbit is its own reverse")
        taken.add(idx)
        taken.add(mate)
        faces.append(tuple(walk))
    return FaceSet(tuple(faces), g.n - g.m + len(faces))


def face_nodes(g: Graph, face: tuple) -> list[int]:
    return [g.ends(e)[end] for e, end, _ in face]


def is_even_face_projective(sg: SignedGraph, rs: SignedRotationSystem, require_cycles: bool = False) -> bool:
    """Euler characteristic 1 and every face walk signature-even.

    With ``require_cycles`` a face walk may not revisit a node.
    """
    g = sg.graph
    try:
        fs = trace_faces(g, rs)
    except EmbeddingError:
        return False
    if fs.euler != 1:
        return False
    for f in fs.faces:
        if sum(sg.sign(st[0]) for st in f) % 2:
            return False
        if require_cycles:
            nodes = face_nodes(g, f)
            if len(set(nodes)) != len(nodes):
                return False
    return True


def two_sidedness(g: Graph, rs: SignedRotationSystem, cycle_edges: Iterable[int]) -> bool:
    """True iff the cycle is two-sided (product of edge signs is +1)."""
    prod = 1
    for e in cycle_edges:
        prod *= rs.signs[e]
    return prod == 1


# search


def _spanning_tree_edges(g: Graph) -> set[int]:
    tree = set()
    seen = set()
    for r in g.nodes:
        if r in seen:
            continue
        seen.add(r)
        queue = deque([r])
        while queue:
            v = queue.popleft()
            for e, w in g.incident(v):
                if w not in seen:
                    seen.add(w)
                    tree.add(e)
                    queue.append(w)
    return tree


class _Search:
    def __init__(self, sg: SignedGraph, budget: int):
        g = sg.graph
        self.g = g
        self.sg = sg
        self.budget = budget
        self.steps = 0
        self.deg = {v: g.degree(v) for v in g.nodes}
        self.target = g.m - g.n + 1
        self.total = 4 * g.m
        simple = len({(min(u, v), max(u, v)) for _, u, v in g.edges}) == g.m
        mindeg = min(self.deg.values()) if self.deg else 0
        if simple and mindeg >= 2:
            self.minlen = 4 if len(sg.signature) == g.m else 3
        else:
            self.minlen = 2 if mindeg >= 2 else 1
        self.lam = {e: 1 for e in _spanning_tree_edges(g)}
        self.succ: dict[Dart, Dart] = {}
        self.pred: dict[Dart, Dart] = {}
        self.used: set[State] = set()
        self.closed = 0
        self.states = sorted((e, end, s) for e in g.edge_ids() for end in (0, 1) for s in (1, -1))
        self.darts_at = {v: sorted((e, 0 if g.ends(e)[0] == v else 1) for e, _ in g.incident(v)) for v in g.nodes}

    def tick(self):
        self.steps += 1
        if self.steps > self.budget:
            raise SearchBudgetExceeded(f"embedding search exceeded {self.budget} steps")

    def run(self) -> Optional[SignedRotationSystem]:
        if self.target < 1:
            return None
        if self._next_face():
            rot = {}
            for v in self.g.nodes:
                darts = self.darts_at[v]
                if not darts:
                    rot[v] = ()
                    continue
                seq = [darts[0]]
                while len(seq) < len(darts):
                    seq.append(self.succ[seq[-1]])
                rot[v] = tuple(seq)
            return SignedRotationSystem(rot, dict(self.lam)).canonical()
        return None

    def _next_face(self) -> bool:
        if len(self.used) == self.total:
            return self.closed == self.target
        if self.closed >= self.target:
            return False
        start = next(st for st in self.states if st not in self.used)
        return self._trace(start, start, 0, 0, [])

    def _feasible_length(self, length: int) -> bool:
        remaining = self.total - len(self.used)
        need = 2 * max(length, self.minlen) + 2 * self.minlen * (self.target - self.closed - 1)
        return need <= remaining

    def _trace(self, start, cur, length, par, path) -> bool:
        self.tick()
        e = cur[0]
        if e not in self.lam:
            for val in (1, -1):
                self.lam[e] = val
                if self._trace(start, cur, length, par, path):
                    return True
                del self.lam[e]
            return False
        _, end, s = cur
        arr = (e, 1 - end)
        s2 = s * self.lam[e]
        length += 1
        par = (par + self.sg.sign(e)) & 1
        if not self._feasible_length(length):
            return False
        path = path + [cur]
        nxt_dart = self.succ.get(arr) if s2 == 1 else self.pred.get(arr)
        if nxt_dart is not None:
            return self._proceed(start, (nxt_dart[0], nxt_dart[1], s2), length, par, path)
        w = dart_node(self.g, arr)
        for c in self.darts_at[w]:
            if s2 == 1:
                a, b = arr, c
            else:
                a, b = c, arr
            if a in self.succ or b in self.pred:
                continue
            if not self._cycle_ok(w, a, b):
                continue
            self.succ[a] = b
            self.pred[b] = a
            if self._proceed(start, (c[0], c[1], s2), length, par, path):
                return True
            del self.succ[a]
            del self.pred[b]
        return False

    def _cycle_ok(self, w, a, b) -> bool:
        """Setting succ[a] = b must not close a cycle shorter than deg(w)."""
        if a == b:
            return self.deg[w] == 1
        k = 2
        cur = b
        while cur in self.succ:
            cur = self.succ[cur]
            if cur == a:
                return k == self.deg[w]
            k += 1
        return True

    def _proceed(self, start, nxt, length, par, path) -> bool:
        if nxt == start:
            if par:
                return False
            revs = [reverse_state(st, self.lam[st[0]]) for st in path]
            pset = set(path)
            if any(r in pset or r in self.used for r in revs):
                return False
            if len(set(revs)) != len(revs):
                return False
            self.used.update(path)
            self.used.update(revs)
            self.closed += 1
            if self._next_face():
                return True
            self.closed -= 1
            self.used.difference_update(path)
            self.used.difference_update(revs)
            return False
        if nxt in self.used or nxt in path:
            return False
        return self._trace(start, nxt, length, par, path)


DEFAULT_MAX_EDGES = 40
DEFAULT_BUDGET = 2_000_000


def find_even_face_embedding(
    sg: SignedGraph,
    max_edges: int = DEFAULT_MAX_EDGES,
    budget: int = DEFAULT_BUDGET,
) -> Optional[SignedRotationSystem]:
    """Exhaustive search for an even-face projective scheme.

    Balanced inputs have no such scheme in the sense used downstream and
    return None without searching.
    """
    g = sg.graph
    if not g.is_connected():
        raise EmbeddingError("graph must be connected")
    if g.m > max_edges:
        raise SearchBudgetExceeded(f"{g.m} edges exceed the search cap {max_edges}")
    if is_balanced(sg)[0]:
        return None
    old = sys.getrecursionlimit()
    sys.setrecursionlimit(max(old, 20 * g.m + 1000))
    try:
        rs = _Search(sg, budget).run()
    finally:
        sys.setrecursionlimit(old)
    if rs is not None and not is_even_face_projective(sg, rs):
        raise EmbeddingError("internal: search returned an invalid scheme")
    return rs


# dual


@dataclass(frozen=True)
class OrientedDual:
    faces: tuple  # face walks (states) in the switched scheme
    arcs: dict  # eid -> (tail face, head face)
    scheme: SignedRotationSystem  # switched scheme with every sign -1

    @property
    def num_nodes(self) -> int:
        return len(self.faces)

    def loops(self) -> list[int]:
        return [e for e, (t, h) in self.arcs.items() if t == h]


def switch_all_negative(g: Graph, rs: SignedRotationSystem) -> SignedRotationSystem:
    """Switch along a spanning forest so that every edge sign becomes -1.

    Raises EmbeddingError if some non-tree edge keeps sign +1.
    """
    flip: dict[int, int] = {}
    for r in g.nodes:
        if r in flip:
            continue
        flip[r] = 0
        queue = deque([r])
        while queue:
            v = queue.popleft()
            for e, w in g.incident(v):
                if w not in flip:
                    flip[w] = flip[v] ^ (0 if rs.signs[e] == -1 else 1)
                    queue.append(w)
    out = rs.switch([v for v, t in flip.items() if t], g)
    bad = [e for e, s in out.signs.items() if s != -1]
    if bad:
        raise EmbeddingError(f"edges {bad[:5]} cannot be made negative; scheme is not even-face for ordinary parity")
    return out


def build_dual(g: Graph, rs: SignedRotationSystem) -> OrientedDual:
    """Dual graph with an alternating orientation.

    After switching so that every sign is -1, the orientation flips across
    each edge, so along any face walk the orientation alternates. An edge is
    directed into the face on its +1 side and out of the face on its -1 side.
    """
    sg = SignedGraph.ordinary(g)
    if not is_even_face_projective(sg, rs):
        raise EmbeddingError("scheme is not an even-face projective embedding")
    if is_balanced(sg)[0]:
        raise EmbeddingError("graph is bipartite")
    neg = switch_all_negative(g, rs)
    fs = trace_faces(g, neg)
    face_of: dict[State, int] = {}
    for i, f in enumerate(fs.faces):
        for st in f:
            face_of[st] = i
            face_of[reverse_state(st, -1)] = i
    arcs = {}
    for e in g.edge_ids():
        arcs[e] = (face_of[(e, 0, -1)], face_of[(e, 0, 1)])
    dual = OrientedDual(fs.faces, dict(sorted(arcs.items())), neg)
    if not check_alternation(dual):
        raise EmbeddingError("internal: dual orientation does not alternate")
    if g.n != g.m - dual.num_nodes + 1:
        raise EmbeddingError("internal: Euler identity violated")
    return dual


def check_alternation(dual: OrientedDual) -> bool:
    """Arcs must alternate in/out along every face walk.

    A loop appears twice in its face; its two occurrences must sit at
    positions of different parity so it supplies one entering and one
    leaving end.
    """
    for i, f in enumerate(dual.faces):
        if len(f) % 2:
            return False
        phase = None
        loop_pos: dict[int, list[int]] = {}
        for pos, st in enumerate(f):
            e = st[0]
            t, h = dual.arcs[e]
            if t == h:
                loop_pos.setdefault(e, []).append(pos)
                continue
            if h == i:
                lab = 0
            elif t == i:
                lab = 1
            else:
                return False
            if phase is None:
                phase = lab ^ (pos & 1)
            elif phase != lab ^ (pos & 1):
                return False
        for e, ps in loop_pos.items():
            if len(ps) != 2 or (ps[0] - ps[1]) % 2 == 0:
                return False
    return True


# file format


def format_embedding(rs: SignedRotationSystem) -> str:
    rs = rs.canonical()
    lines = []
    for v, darts in rs.rotation.items():
        lines.append(" ".join(["r", str(v)] + [f"{e}:{end}" for e, end in darts]))
    for e, s in rs.signs.items():
        lines.append(f"s {e} {'+' if s == 1 else '-'}")
    return "\n".join(lines) + "\n"


def parse_embedding(text: str) -> SignedRotationSystem:
    rot = {}
    signs = {}
    for raw in text.splitlines():
        tok = raw.split()
        if not tok or tok[0] == "c":
            continue
        if tok[0] == "r":
            darts = []
            for t in tok[2:]:
                e, end = t.split(":")
                darts.append((int(e), int(end)))
            rot[int(tok[1])] = tuple(darts)
        elif tok[0] == "s":
            if tok[2] not in ("+", "-"):
                raise EmbeddingError(f"bad sign line {raw!r}")
            signs[int(tok[1])] = 1 if tok[2] == "+" else -1
        else:
            raise EmbeddingError(f"unknown line {raw!r}")
    return SignedRotationSystem(rot, signs)


def relabel_embedding(rs: SignedRotationSystem, node_map: dict, edge_map: dict) -> SignedRotationSystem:
    """Rename nodes and edges (edge ends keep their orientation)."""
    rot = {node_map[v]: tuple((edge_map[e], end) for e, end in darts) for v, darts in rs.rotation.items()}
    return SignedRotationSystem(rot, {edge_map[e]: s for e, s in rs.signs.items()}).canonical()


def scheme_from_faces(g: Graph, faces: Iterable[tuple]) -> SignedRotationSystem:
    """Recover a signed rotation system from face boundaries.

    Each face is a closed node sequence of a simple graph. Rotations are read
    off the face corners; signs are then fixed so that tracing reproduces
    the faces. Nodes of degree below 3 are not supported.
    """
    edge_of = {}
    for e, u, v in g.edges:
        key = (min(u, v), max(u, v))
        if key in edge_of:
            raise EmbeddingError("scheme_from_faces needs a simple graph")
        edge_of[key] = e

    def eid(a, b):
        return edge_of[(min(a, b), max(a, b))]

    def dart(e, v):
        return (e, 0 if g.ends(e)[0] == v else 1)

    faces = [tuple(f) for f in faces]
    corners: dict[int, list[tuple]] = {v: [] for v in g.nodes}
    for f in faces:
        k = len(f)
        for i in range(k):
            a, u, b = f[i - 1], f[i], f[(i + 1) % k]
            corners[u].append((dart(eid(a, u), u), dart(eid(u, b), u)))
    rot = {}
    for v in g.nodes:
        if g.degree(v) < 3:
            raise EmbeddingError("scheme_from_faces needs minimum degree 3")
        nb: dict = {}
        for x, y in corners[v]:
            nb.setdefault(x, []).append(y)
            nb.setdefault(y, []).append(x)
        first = min(nb)
        seq = [first]
        prev = None
        cur = first
        while True:
            opts = [d for d in nb[cur] if d != prev]
            nxt = min(opts) if prev is None else opts[0]
            if nxt == first:
                break
            seq.append(nxt)
            prev, cur = cur, nxt
        if len(seq) != g.degree(v):
            raise EmbeddingError(f"corners at node {v} do not form one cycle")
        rot[v] = tuple(seq)
    pos = {v: {d: i for i, d in enumerate(seq)} for v, seq in rot.items()}
    # orientation at each corner of each face walk
    signs: dict[int, int] = {}
    for f in faces:
        k = len(f)
        orient = []
        for i in range(k):
            a, u, b = f[i - 1], f[i], f[(i + 1) % k]
            din, dout = dart(eid(a, u), u), dart(eid(u, b), u)
            d = g.degree(u)
            orient.append(1 if (pos[u][din] + 1) % d == pos[u][dout] else -1)
        for i in range(k):
            u, b = f[i], f[(i + 1) % k]
            e = eid(u, b)
            s = orient[i] * orient[(i + 1) % k]
            if signs.setdefault(e, s) != s:
                raise EmbeddingError("inconsistent faces")
    rs = SignedRotationSystem(rot, signs).canonical()
    fs = trace_faces(g, rs)
    if len(fs.faces) != len(faces):
        raise EmbeddingError("faces do not describe a cellular embedding")
    return rs
