"""
Brute-force ground truth for stable set questions on small graphs.

All enumeration is over bitmasks of a dense relabelling of the node set.
Caps raise :class:`OracleCapExceeded` instead of falling back to anything
approximate.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Mapping, Optional

from .extform import ExtForm, make_row, simple_form
from .formulations import xname, yname
from .graph import Graph
from .lp import CertifiedLP, Infeasible, Optimal, Simplex, feasible_lift

DEFAULT_CAP = 24
INF = float("inf")


class OracleCapExceeded(RuntimeError):
    pass


@dataclass(frozen=True)
class WeightedInstance:
    graph: Graph
    w: Optional[Mapping[int, Fraction]] = None
    c: Optional[Mapping[int, Fraction]] = None

    def __post_init__(self):
        if self.c is not None and any(Fraction(v) < 0 for v in self.c.values()):
            raise ValueError("edge costs must be nonnegative")


class _Masks:
    def __init__(self, g: Graph, cap: int):
        if g.n > cap:
            raise OracleCapExceeded(f"{g.n} nodes exceed the oracle cap {cap}")
        self.nodes = list(g.nodes)
        self.index = {v: i for i, v in enumerate(self.nodes)}
        self.adj = [0] * len(self.nodes)
        for _, u, v in g.edges:
            self.adj[self.index[u]] |= 1 << self.index[v]
            self.adj[self.index[v]] |= 1 << self.index[u]
        self.full = (1 << len(self.nodes)) - 1

    def to_set(self, mask: int) -> frozenset:
        return frozenset(self.nodes[i] for i in range(len(self.nodes)) if mask >> i & 1)


def stable_sets(g: Graph, cap: int = DEFAULT_CAP) -> list[frozenset]:
    """All stable sets (including the empty set)."""
    m = _Masks(g, cap)
    out = []

    def rec(chosen: int, cand: int):
        if not cand:
            out.append(m.to_set(chosen))
            return
        i = (cand & -cand).bit_length() - 1
        rest = cand & ~(1 << i)
        rec(chosen | (1 << i), rest & ~m.adj[i])
        rec(chosen, rest)

    rec(0, m.full)
    return out


def maximal_stable_sets(g: Graph, cap: int = DEFAULT_CAP) -> list[frozenset]:
    """Maximal stable sets via Bron-Kerbosch on the complement, sorted."""
    m = _Masks(g, cap)
    out = []

    def rec(r: int, p: int, x: int):
        if not p and not x:
            out.append(m.to_set(r))
            return
        # pivot u maximizing |P \ N_comp(u)| is awkward; pick lowest of P | X
        u = ((p | x) & -(p | x)).bit_length() - 1
        # complement neighbours of u are non-neighbours other than u
        cand = p & (m.adj[u] | (1 << u))
        while cand:
            i = (cand & -cand).bit_length() - 1
            cand &= cand - 1
            non = m.full & ~m.adj[i] & ~(1 << i)
            rec(r | (1 << i), p & non, x & non)
            p &= ~(1 << i)
            x |= 1 << i

    rec(0, m.full, 0)
    return sorted(out, key=lambda s: (len(s), sorted(s)))


def alpha(g: Graph, w: Mapping[int, object], cap: int = DEFAULT_CAP) -> Fraction:
    """Maximum weight of a stable set, by branch and bound."""
    return alpha_with_set(g, w, cap)[0]


def alpha_with_set(g: Graph, w: Mapping[int, object], cap: int = DEFAULT_CAP) -> tuple[Fraction, frozenset]:
    m = _Masks(g, cap)
    weights = [Fraction(w.get(v, 0)) for v in m.nodes]
    # negative nodes never help; drop them up front
    active = 0
    for i, wt in enumerate(weights):
        if wt > 0:
            active |= 1 << i
    best = [Fraction(0), 0]

    def bound(cand: int) -> Fraction:
        s = Fraction(0)
        while cand:
            i = (cand & -cand).bit_length() - 1
            cand &= cand - 1
            s += weights[i]
        return s

    def rec(chosen: int, value: Fraction, cand: int):
        if value > best[0]:
            best[0], best[1] = value, chosen
        if not cand or value + bound(cand) <= best[0]:
            return
        # branch on the candidate of largest degree inside cand
        i = max(_bits(cand), key=lambda j: ((m.adj[j] & cand).bit_count(), -j))
        rest = cand & ~(1 << i)
        rec(chosen | (1 << i), value + weights[i], rest & ~m.adj[i])
        rec(chosen, value, rest)

    rec(0, Fraction(0), active)
    return best[0], m.to_set(best[1])


def _bits(mask: int) -> list[int]:
    out = []
    while mask:
        i = (mask & -mask).bit_length() - 1
        mask &= mask - 1
        out.append(i)
    return out


def slack_edges(g: Graph, S: Iterable[int]) -> list[int]:
    """Edges with neither end in S."""
    S = set(S)
    return [e for e, u, v in g.edges if u not in S and v not in S]


def beta(g: Graph, c: Mapping[int, object], cap: int = DEFAULT_CAP) -> Fraction:
    """min over stable S of c(slack edges of S); c >= 0 so maximal sets suffice."""
    if any(Fraction(x) < 0 for x in c.values()):
        raise ValueError("edge costs must be nonnegative")
    best = None
    for S in maximal_stable_sets(g, cap):
        val = sum((Fraction(c[e]) for e in slack_edges(g, S)), Fraction(0))
        if best is None or val < best:
            best = val
    return best if best is not None else Fraction(0)


def induced_weights(g: Graph, c: Mapping[int, object]) -> dict:
    w = {v: Fraction(0) for v in g.nodes}
    for e, u, v in g.edges:
        w[u] += Fraction(c[e])
        w[v] += Fraction(c[e])
    return w


def alpha_beta_check(g: Graph, c: Mapping[int, object], cap: int = DEFAULT_CAP) -> bool:
    """alpha(G, w) == c(E) - beta(G, c) for the weights w(v) = c(delta(v))."""
    total = sum((Fraction(c[e]) for e in g.edge_ids()), Fraction(0))
    return alpha(g, induced_weights(g, c), cap) == total - beta(g, c, cap)


def gamma(g1p: Graph, gadget_edges: Iterable[int], c: Mapping[int, object], F: Iterable[int], cap: int = DEFAULT_CAP):
    """min c(slack(S) outside the gadget) over stable S with slack(S) on the gadget = F.

    Returns ``INF`` when no stable set realises F.
    """
    H = set(gadget_edges)
    F = frozenset(F)
    if not F <= H:
        raise ValueError("F must be a subset of the gadget edges")
    best = INF
    for S in stable_sets(g1p, cap):
        sl = slack_edges(g1p, S)
        if frozenset(e for e in sl if e in H) != F:
            continue
        val = sum((Fraction(c[e]) for e in sl if e not in H), Fraction(0))
        if best == INF or val < best:
            best = val
    return best


def gamma_table(g1p: Graph, gadget_edges: Iterable[int], c: Mapping[int, object], cap: int = DEFAULT_CAP) -> dict:
    """gamma for every realisable F at once: frozenset(F) -> value.

    Sets F missing from the table have gamma = ``INF``.
    """
    H = set(gadget_edges)
    out: dict = {}
    for S in stable_sets(g1p, cap):
        sl = slack_edges(g1p, S)
        F = frozenset(e for e in sl if e in H)
        val = sum((Fraction(c[e]) for e in sl if e not in H), Fraction(0))
        if F not in out or val < out[F]:
            out[F] = val
    return out


def gamma_lp(g1p: Graph, gadget_edges: Iterable[int], c: Mapping[int, object], F: Iterable[int], nonneg_x: bool = True):
    """LP value of min c(y outside H) s.t. Mx + y = 1, y >= 0, y on H = chi^F,
    with x >= 0 (``nonneg_x``) or x free. Returns ``INF`` when infeasible."""
    H = set(gadget_edges)
    F = set(F)
    names = [xname(v) for v in g1p.nodes] + [yname(e) for e in g1p.edge_ids()]
    ineqs = [make_row({yname(e): -1}, 0) for e in g1p.edge_ids() if e not in H]
    if nonneg_x:
        ineqs += [make_row({xname(v): -1}, 0) for v in g1p.nodes]
    eqs = [make_row({xname(u): 1, xname(v): 1, yname(e): 1}, 1) for e, u, v in g1p.edges]
    eqs += [make_row({yname(e): 1}, 1 if e in F else 0) for e in sorted(H)]
    form = simple_form(names, ineqs, eqs)
    s = Simplex(form)
    if not s.phase1():
        return INF
    obj = {yname(e): Fraction(c[e]) for e in g1p.edge_ids() if e not in H}
    res = s.minimize(obj)
    if not isinstance(res, Optimal):
        raise RuntimeError("gamma LP is unbounded")
    return res.value


def edge_induced_lift(g: Graph, w: Mapping[int, object], cap: int = DEFAULT_CAP, check: bool = True) -> dict:
    """Edge-induced w' >= w with alpha(G, w') = alpha(G, w).

    Solves max{w x : x_u + x_v <= 1, x >= 0}; the multipliers of the edge
    rows form an optimal dual y*, and w'(v) = y*(delta(v)).
    """
    if any(g.degree(v) == 0 for v in g.nodes):
        raise ValueError("graph has an isolated node")
    names = [xname(v) for v in g.nodes]
    edge_rows = [make_row({xname(u): 1, xname(v): 1}, 1) for _, u, v in g.edges]
    form = simple_form(names, edge_rows + [make_row({xname(v): -1}, 0) for v in g.nodes])
    res = Simplex(form).maximize({xname(v): Fraction(w.get(v, 0)) for v in g.nodes})
    if not isinstance(res, Optimal):
        raise RuntimeError("edge LP is not bounded")
    y = {e: res.dual_ineq[k] for k, e in enumerate(g.edge_ids())}
    wp = {v: Fraction(0) for v in g.nodes}
    for e, u, v in g.edges:
        wp[u] += y[e]
        wp[v] += y[e]
    if check:
        if any(wp[v] < Fraction(w.get(v, 0)) for v in g.nodes):
            raise AssertionError("lifted weights fall below w")
        if alpha(g, wp, cap) != alpha(g, w, cap):
            raise AssertionError("lift changes alpha")
    return wp


# EF versus STAB(G)


class _ExactEngine:
    def __init__(self, form: ExtForm):
        self.form = form
        self.simplex = Simplex(form, "dantzig")
        self.simplex.phase1()

    def maximize(self, objective: dict):
        return self.simplex.maximize(objective)

    def lift(self, point: dict):
        return feasible_lift(self.form, point, "dantzig")


@dataclass
class Verdict:
    exact: bool
    trials: int
    structured: int = 0
    checked_sets: int = 0
    counterexample: Optional[dict] = None
    notes: list = field(default_factory=list)

    @property
    def label(self) -> str:
        return "EXACT" if self.exact else "COUNTEREXAMPLE"


def structured_objectives(g: Graph) -> list[dict]:
    """Unit vectors of both signs, edge sums and the all-ones vector."""
    objs = []
    for v in g.nodes:
        objs.append({v: 1})
        objs.append({v: -1})
    for _, u, v in g.edges:
        objs.append({u: 1, v: 1})
    objs.append({v: 1 for v in g.nodes})
    return objs


def random_objectives(g: Graph, trials: int, seed: int, lo: int = -5, hi: int = 10) -> list[dict]:
    rng = random.Random(seed)
    return [{v: rng.randint(lo, hi) for v in g.nodes} for _ in range(trials)]


def _fmt_obj(w: Mapping[int, object]) -> dict:
    return {str(v): str(Fraction(c)) for v, c in sorted(w.items())}


def ef_equals_stab(
    g: Graph,
    form: ExtForm,
    trials: int = 50,
    seed: int = 0,
    cap: int = DEFAULT_CAP,
    structured: bool = True,
    check_sets: bool = True,
    engine: str = "certified",
) -> Verdict:
    """Compare LP maxima over the projection of ``form`` with alpha(G, w).

    (a) random integer objectives in [-5, 10]^V (plus structured ones),
    (b) every maximal stable set has a lift into ``form``.

    ``engine="certified"`` lets HiGHS propose solutions that are accepted
    only after exact checks; ``engine="exact"`` uses the rational simplex
    alone. Both give the same verdicts.
    """
    want = {xname(v) for v in g.nodes}
    if set(form.originals) != want:
        return Verdict(False, 0, counterexample={"reason": "original variables do not match the graph nodes"})
    if g.n > cap:
        raise OracleCapExceeded(f"{g.n} nodes exceed the oracle cap {cap}")
    s = CertifiedLP(form) if engine == "certified" else _ExactEngine(form)
    verdict = Verdict(True, trials)
    if isinstance(s.maximize({}), Infeasible):
        verdict.exact = False
        verdict.counterexample = {"reason": "formulation is empty"}
        return verdict
    objs = [("random", w) for w in random_objectives(g, trials, seed)]
    if structured:
        so = structured_objectives(g)
        verdict.structured = len(so)
        objs += [("structured", w) for w in so]
    for kind, w in objs:
        res = s.maximize({xname(v): c for v, c in w.items()})
        a = alpha(g, w, cap)
        if not isinstance(res, Optimal) or res.value != a:
            verdict.exact = False
            verdict.counterexample = {
                "kind": kind,
                "objective": _fmt_obj(w),
                "alpha": str(a),
                "lp": str(res.value) if isinstance(res, Optimal) else "unbounded",
            }
            return verdict
    if check_sets:
        for S in maximal_stable_sets(g, cap):
            obj = {xname(v): (1 if v in S else -1) for v in g.nodes}
            res = s.maximize(obj)
            if isinstance(res, Optimal) and res.value == len(S) and all(
                res.primal[xname(v)] == (1 if v in S else 0) for v in g.nodes
            ):
                verdict.checked_sets += 1
                continue
            if not isinstance(res, Optimal) or res.value != len(S):
                # S is the unique maximizer of this objective with value |S|
                verdict.exact = False
                verdict.counterexample = {
                    "kind": "stable-set-objective",
                    "objective": _fmt_obj({v: obj[xname(v)] for v in g.nodes}),
                    "alpha": str(len(S)),
                    "lp": str(res.value) if isinstance(res, Optimal) else "unbounded",
                }
                return verdict
            lift = s.lift({xname(v): int(v in S) for v in g.nodes})
            if isinstance(lift, Infeasible):
                verdict.exact = False
                verdict.counterexample = {"kind": "stable-set", "stable_set": sorted(S)}
                return verdict
            verdict.checked_sets += 1
    return verdict
