"""
Instance families: odd cycles, odd wheels, small cliques, projective
quadrangulations (with embedding sidecars), cores with bipartite flaps, and
random graphs screened for ocp = 1.
"""

from __future__ import annotations

import itertools
import json
import random
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional

from .embedding import SignedRotationSystem, format_embedding, scheme_from_faces
from .graph import Graph, build_graph, format_graph
from .parity import classify_ocp

FAMILIES = (
    "odd-cycles",
    "odd-wheels",
    "complete-small",
    "projective-quadrangulations",
    "flapped-cores",
    "random-ocp1-screened",
)


@dataclass
class Instance:
    name: str
    graph: Graph
    meta: dict = field(default_factory=dict)
    scheme: Optional[SignedRotationSystem] = None


def odd_cycle(k: int) -> Graph:
    n = 2 * k + 1
    return build_graph([(i, (i + 1) % n) for i in range(n)])


def odd_wheel(rim: int) -> Graph:
    """Hub 0 joined to every node of an odd rim 1..rim."""
    if rim % 2 == 0 or rim < 3:
        raise ValueError("rim must be odd and at least 3")
    pairs = [(0, i) for i in range(1, rim + 1)]
    pairs += [(i, i % rim + 1) for i in range(1, rim + 1)]
    return build_graph(pairs)


def complete(n: int) -> Graph:
    return build_graph(list(itertools.combinations(range(n), 2)), n)


K4_FACES = [(0, 1, 2, 3), (0, 1, 3, 2), (0, 2, 1, 3)]


def quadrangulation(steps: int, seed: int = 0) -> tuple[Graph, list[tuple]]:
    """Projective quadrangulation with 4 + 4*steps nodes.

    Start from K4 with its three 4-faces in the projective plane and
    repeatedly insert a new 4-cycle inside a face, joined to it by four
    spokes. Returns the graph and its face list.
    """
    rng = random.Random(seed)
    pairs = list(itertools.combinations(range(4), 2))
    faces = list(K4_FACES)
    n = 4
    for _ in range(steps):
        f = faces.pop(rng.randrange(len(faces)) if seed else 0)
        new = [n, n + 1, n + 2, n + 3]
        n += 4
        pairs += list(zip(f, new))
        pairs += [(new[k], new[(k + 1) % 4]) for k in range(4)]
        faces.append(tuple(new))
        faces += [(f[k], f[(k + 1) % 4], new[(k + 1) % 4], new[k]) for k in range(4)]
    return build_graph(pairs), faces


def moebius_grid(k: int, r: int) -> tuple[Graph, list[tuple]]:
    """r concentric 2k-rings joined by spokes, the outer ring closed up by
    k antipodal chords (a crosscap). Returns the graph and its faces.

    Every odd cycle crosses the crosscap, so for k even and r >= 2 no three
    nodes meet all of them.
    """
    N = 2 * k

    def idx(i, j):
        return j * N + i % N

    pairs = [(idx(i, j), idx(i + 1, j)) for j in range(r) for i in range(N)]
    faces = [tuple(idx(i, 0) for i in range(N))]
    for j in range(r - 1):
        pairs += [(idx(i, j), idx(i, j + 1)) for i in range(N)]
        faces += [(idx(i, j), idx(i + 1, j), idx(i + 1, j + 1), idx(i, j + 1)) for i in range(N)]
    top = r - 1
    pairs += [(idx(i, top), idx(i + k, top)) for i in range(k)]
    faces += [(idx(i, top), idx(i + 1, top), idx(i + 1 + k, top), idx(i + k, top)) for i in range(k)]
    return build_graph(pairs), faces


def _bipartite_blob(a: int, b: int, start: int) -> tuple[list, list, list]:
    """K_{a,b} on fresh ids; returns (side A, side B, edges)."""
    A = list(range(start, start + a))
    B = list(range(start + a, start + a + b))
    return A, B, [(u, v) for u in A for v in B]


def flapped_core(kind: str) -> Graph:
    """An even-face projective base with one or two non-planar bipartite flaps.

    The flaps are complete bipartite blobs attached to corners of an even
    face, so the whole graph is not even-face embeddable while its core is.
    """
    if kind == "k4-even-pair":
        # opposite corners 0, 2 of a 4-face, same colour class
        pairs = list(itertools.combinations(range(4), 2))
        A, B, e = _bipartite_blob(3, 3, 4)
        return build_graph(pairs + e + [(0, B[0]), (2, B[1])])
    if kind == "k4-odd-pair":
        pairs = list(itertools.combinations(range(4), 2))
        A, B, e = _bipartite_blob(3, 3, 4)
        return build_graph(pairs + e + [(0, B[0]), (1, A[0])])
    if kind == "k4-triple":
        pairs = list(itertools.combinations(range(4), 2))
        A, B, e = _bipartite_blob(3, 4, 4)
        return build_graph(pairs + e + [(0, B[0]), (2, B[1]), (1, A[0])])
    if kind == "k4path-blob":
        # K4 plus the path 0-4-5-6-2 inside face (0,1,2,3); 0, 2, 5 share a class
        pairs = list(itertools.combinations(range(4), 2)) + [(0, 4), (4, 5), (5, 6), (6, 2)]
        A, B, e = _bipartite_blob(3, 4, 7)
        return build_graph(pairs + e + [(0, A[0]), (2, A[1]), (5, A[2])])
    if kind == "quad8-blob":
        g, faces = quadrangulation(1)
        f = faces[-1]
        A, B, e = _bipartite_blob(3, 3, g.n)
        return build_graph([(u, v) for _, u, v in g.edges] + e + [(f[0], B[0]), (f[2], B[1])])
    if kind == "k4-two-flaps":
        pairs = list(itertools.combinations(range(4), 2))
        A, B, e = _bipartite_blob(3, 3, 4)
        A2, B2, e2 = _bipartite_blob(2, 3, 10)
        return build_graph(pairs + e + [(0, B[0]), (2, B[1])] + e2 + [(1, B2[0]), (3, A2[0])])
    if kind == "mgrid-blob":
        # oct >= 4 base; nodes 0 and 9 are opposite corners of a square face
        g, _ = moebius_grid(4, 2)
        A, B, e = _bipartite_blob(3, 3, g.n)
        return build_graph([(u, v) for _, u, v in g.edges] + e + [(0, B[0]), (9, B[1])])
    raise ValueError(f"unknown flapped core {kind!r}")


FLAPPED_KINDS = ("k4-even-pair", "k4-odd-pair", "k4-triple", "k4path-blob", "quad8-blob", "k4-two-flaps")
# not in the default corpus: the star structure search is slow here
EXTRA_FLAPPED_KINDS = ("mgrid-blob",)


def random_ocp1(n: int, p: float, seed: int, tries: int = 200) -> Optional[Graph]:
    """First random G(n, p) draw (from ``seed``) with ocp = 1, or None."""
    rng = random.Random(seed)
    for _ in range(tries):
        pairs = [(u, v) for u, v in itertools.combinations(range(n), 2) if rng.random() < p]
        g = build_graph(pairs, n)
        if classify_ocp(g).cls == "One":
            return g
    return None


def family_instances(family: str, **params) -> list[Instance]:
    if family == "odd-cycles":
        ks = params.get("ks", range(2, 8))
        return [Instance(f"odd-cycle-{2 * k + 1}", odd_cycle(k), {"k": k}) for k in ks]
    if family == "odd-wheels":
        rims = params.get("rims", range(3, 16, 2))
        return [Instance(f"odd-wheel-{r}", odd_wheel(r), {"rim": r}) for r in rims]
    if family == "complete-small":
        ns = params.get("ns", (3, 4, 5))
        return [Instance(f"complete-{n}", complete(n), {"n": n}) for n in ns]
    if family == "projective-quadrangulations":
        max_n = params.get("max_n", 100)
        seed = params.get("seed", 1)
        out = []
        for steps in range(0, (max_n - 4) // 4 + 1):
            g, faces = quadrangulation(steps, seed)
            out.append(Instance(f"quad-{g.n}", g, {"steps": steps, "seed": seed}, scheme_from_faces(g, faces)))
        return out
    if family == "flapped-cores":
        kinds = params.get("kinds", FLAPPED_KINDS)
        return [Instance(f"flapped-{k}", flapped_core(k), {"kind": k}) for k in kinds]
    if family == "random-ocp1-screened":
        count = params.get("count", 8)
        base = params.get("seed", 100)
        out = []
        for i in range(count):
            seed = base + i
            rng = random.Random(seed)
            n = rng.randint(6, 12)
            p = rng.choice((0.2, 0.25, 0.3))
            g = random_ocp1(n, p, seed)
            if g is not None:
                out.append(Instance(f"random-{seed}", g, {"seed": seed, "n": n, "p": p}))
        return out
    raise ValueError(f"unknown family {family!r}")


def generate_corpus(family: str, outdir, **params) -> list[Path]:
    """Write ``<name>.graph`` plus a ``<name>.json`` sidecar (and
    ``<name>.emb`` when an embedding is known) for each instance."""
    out = Path(outdir)
    out.mkdir(parents=True, exist_ok=True)
    paths = []
    for inst in family_instances(family, **params):
        gp = out / f"{inst.name}.graph"
        gp.write_text(format_graph(inst.graph, [f"{family} {inst.name}"]))
        meta = {"family": family, "name": inst.name, "n": inst.graph.n, "m": inst.graph.m, **inst.meta}
        if inst.scheme is not None:
            (out / f"{inst.name}.emb").write_text(format_embedding(inst.scheme))
            meta["embedding"] = f"{inst.name}.emb"
        (out / f"{inst.name}.json").write_text(json.dumps(meta, indent=1, sort_keys=True) + "\n")
        paths.append(gp)
    return paths
