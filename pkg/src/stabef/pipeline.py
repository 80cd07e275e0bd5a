"""
End-to-end driver: classify, split into blocks, pick a construction per
block, glue, and verify against the oracle.
"""

from __future__ import annotations

import csv
import io
import json
import math
import statistics
import time
import zlib
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional, Sequence

from .circulation import parity_identity, sigma, stab_ef_projective
from .decomposition import (
    SearchLog,
    build_h_plus,
    chain_graph,
    find_star_structure,
    flap_graph,
    star_structure_to_json,
    validate_star_structure,
)
from .embedding import (
    SignedRotationSystem,
    build_dual,
    check_alternation,
    is_even_face_projective,
    parse_embedding,
    trace_faces,
)
from .extform import ExtForm, glue_shared, reorder_originals
from .formulations import compose_separation, oct3_formulation, restricted_stab_bar, tu_formulation, xname
from .graph import Graph, biconnected_blocks, is_bipartite, parse_graph
from .lp import rational_rank
from .oracle import DEFAULT_CAP, ef_equals_stab, maximal_stable_sets
from .parity import DEFAULT_CAP as OCP_CAP
from .parity import SignedGraph, classify_ocp, classify_ocp_signed, odd_cycle_transversal, shortest_odd_cycle

BRANCHES = ("bipartite", "oct<=3", "projective-core", "composed", "rejected-ocp>=2")
_RANK = {b: i for i, b in enumerate(BRANCHES)}

EXIT_OK = 0
EXIT_REJECTED = 2
EXIT_COUNTEREXAMPLE = 3
EXIT_BUDGET = 4


@dataclass
class BlockReport:
    nodes: list
    edges: list
    branch: str
    rows: int = 0
    transversal: Optional[list] = None
    structure: Optional[str] = None  # JSON of the star structure
    core_nodes: Optional[int] = None
    faces: Optional[int] = None
    artifacts: dict = field(default_factory=dict, repr=False)

    def to_dict(self) -> dict:
        d = {"nodes": self.nodes, "edges": len(self.edges), "branch": self.branch, "ef-rows": self.rows}
        if self.transversal is not None:
            d["transversal"] = self.transversal
        if self.structure is not None:
            d["star-structure"] = json.loads(self.structure)
        if self.core_nodes is not None:
            d["core-nodes"] = self.core_nodes
        if self.faces is not None:
            d["faces"] = self.faces
        return d


@dataclass
class PipelineReport:
    instance: str
    branch: str
    ocp: Optional[str] = None
    blocks: list = field(default_factory=list)
    ef_rows: int = 0
    ef_vars: int = 0
    trials: int = 0
    verdict: str = "UNVERIFIED"
    counterexample: Optional[dict] = None
    validators: dict = field(default_factory=dict)
    timings: dict = field(default_factory=dict)
    notes: list = field(default_factory=list)

    def to_dict(self) -> dict:
        d = {
            "instance": self.instance,
            "pipeline-branch": self.branch,
            "ocp": self.ocp,
            "blocks": [b.to_dict() for b in self.blocks],
            "ef-rows": self.ef_rows,
            "ef-vars": self.ef_vars,
            "trials": self.trials,
            "verdict": self.verdict,
            "validators": self.validators,
            "timings": {k: round(v, 4) for k, v in self.timings.items()},
        }
        if self.counterexample is not None:
            d["counterexample"] = self.counterexample
        if self.notes:
            d["notes"] = self.notes
        return d

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=1, sort_keys=True)

    @property
    def exit_code(self) -> int:
        if self.branch == "rejected-ocp>=2":
            return EXIT_REJECTED
        if self.verdict == "COUNTEREXAMPLE":
            return EXIT_COUNTEREXAMPLE
        if self.verdict == "BUDGET-EXHAUSTED":
            return EXIT_BUDGET
        return EXIT_OK


class BudgetExhausted(RuntimeError):
    pass


def _block_graph(g: Graph, nodes, edges) -> Graph:
    return Graph(nodes, [(e, *g.ends(e)) for e in edges])


def compose_flaps(g: Graph, st, gadgets, core_form: ExtForm) -> ExtForm:
    """Fold the flaps back in, last gadget first: the formulation of
    G^(i) turns into that of G^(i-1)."""
    form = core_form
    for i in range(st.ell - 1, -1, -1):
        flap, gad = st.flaps[i], gadgets[i]
        gi = chain_graph(g, st, gadgets, i + 1)
        t = flap_graph(g, flap)
        g1p = Graph(sorted(set(t.nodes) | set(gad.internal)), list(t.edges) + list(gad.edges))
        bset = set(flap.boundary)
        gad_edges = {e for e, _, _ in gad.edges}
        forbid = [(u, v) for e, u, v in gi.edges if u in bset and v in bset and e not in gad_edges]
        bar = restricted_stab_bar(g1p, gad.nodes, gad.edges, forbid)
        form = compose_separation(form, bar, flap.boundary, gad.internal, f"h{i}")
    return form


def compile_block(
    g: Graph,
    force_projective: bool = False,
    max_tries: int = 64,
    embed_budget: int = 2_000_000,
    scheme: Optional[SignedRotationSystem] = None,
) -> tuple[ExtForm, BlockReport]:
    """Formulation of STAB of one block (2-connected, a bridge, or a node)."""
    rep = BlockReport(list(g.nodes), list(g.edge_ids()), "bipartite")
    if is_bipartite(g):
        form = tu_formulation(g)
    elif scheme is not None:
        rep.branch = "projective-core"
        rep.faces = len(trace_faces(g, scheme).faces)
        rep.core_nodes = g.n
        rep.artifacts.update(core=g, scheme=scheme)
        form = stab_ef_projective(g, scheme)
    else:
        X = None if force_projective else odd_cycle_transversal(g, 3)
        if X is not None:
            rep.branch = "oct<=3"
            rep.transversal = list(X)
            form = oct3_formulation(g, X)
        else:
            log = SearchLog()
            try:
                st, gadgets, core, rs = find_star_structure(
                    g, max_tries=max_tries, embed_budget=embed_budget, check_preconditions=not force_projective, log=log
                )
            except Exception as ex:
                if log.failures and all(f[0] == "budget" for f in log.failures):
                    raise BudgetExhausted(str(ex)) from ex
                raise
            rep.branch = "composed" if st.ell else "projective-core"
            rep.structure = star_structure_to_json(st, gadgets)
            rep.core_nodes = core.n
            rep.faces = len(trace_faces(core, rs).faces)
            rep.artifacts.update(structure=st, gadgets=gadgets, core=core, scheme=rs)
            form = compose_flaps(g, st, gadgets, stab_ef_projective(core, rs))
    rep.rows = form.size
    return form, rep


def compile_graph(
    g: Graph,
    name: str = "instance",
    cap_ocp: int = OCP_CAP,
    force_projective: bool = False,
    scheme: Optional[SignedRotationSystem] = None,
    max_tries: int = 64,
    embed_budget: int = 2_000_000,
) -> tuple[Optional[ExtForm], PipelineReport]:
    """Extended formulation of STAB(g) and a report of how it was built.

    A supplied even-face projective scheme for a connected non-bipartite
    graph certifies ocp = 1 on its own, which skips the classification.
    """
    t0 = time.perf_counter()
    rep = PipelineReport(name, "bipartite")
    if scheme is not None:
        if not g.is_connected() or is_bipartite(g):
            raise ValueError("a supplied embedding needs a connected non-bipartite graph")
        if not is_even_face_projective(SignedGraph.ordinary(g), scheme):
            raise ValueError("supplied embedding is not an even-face projective embedding")
        rep.ocp = "One"
        rep.notes.append("ocp certified by the supplied even-face projective embedding")
    else:
        rep.ocp = classify_ocp(g, cap_ocp).cls
    rep.timings["classify"] = time.perf_counter() - t0
    if rep.ocp == "AtLeastTwo":
        rep.branch = "rejected-ocp>=2"
        rep.verdict = "REJECTED"
        return None, rep
    t1 = time.perf_counter()
    forms = []
    if scheme is not None:
        f, b = compile_block(g, scheme=scheme)
        forms.append(f)
        rep.blocks.append(b)
    else:
        for nodes, edges in biconnected_blocks(g):
            f, b = compile_block(_block_graph(g, nodes, edges), force_projective, max_tries, embed_budget)
            forms.append(f)
            rep.blocks.append(b)
    form = reorder_originals(glue_shared(forms), [xname(v) for v in g.nodes])
    rep.timings["compile"] = time.perf_counter() - t1
    rep.branch = max((b.branch for b in rep.blocks), key=_RANK.get, default="bipartite")
    rep.ef_rows = form.size
    rep.ef_vars = form.num_vars
    return form, rep


# verification


def instance_seed(name: str) -> int:
    return zlib.crc32(name.encode())


def structural_checks(g: Graph, rep: PipelineReport, with_sets: bool = True) -> dict:
    """Validators for the artifacts of each block; values are booleans."""
    out: dict[str, bool] = {}
    for k, b in enumerate(rep.blocks):
        bg = _block_graph(g, b.nodes, b.edges)
        tag = f"block{k}"
        if b.branch == "bipartite":
            out[f"{tag}.bipartite"] = is_bipartite(bg)
        elif b.branch == "oct<=3":
            out[f"{tag}.transversal"] = is_bipartite(bg.remove_nodes(b.transversal)) and len(b.transversal) <= 3
        if b.branch in ("projective-core", "composed"):
            core, rs = b.artifacts["core"], b.artifacts["scheme"]
            out[f"{tag}.even-face"] = is_even_face_projective(SignedGraph.ordinary(core), rs)
            dual = build_dual(core, rs)
            out[f"{tag}.alternation"] = check_alternation(dual)
            out[f"{tag}.euler"] = core.n == core.m - dual.num_nodes + 1
            if core.n <= 60:
                # sigma is injective: the incidence matrix has full column rank
                inc = [[1 if v in core.ends(e) else 0 for v in core.nodes] for e in core.edge_ids()]
                out[f"{tag}.sigma-rank"] = rational_rank(inc) == core.n
            if with_sets and core.n <= DEFAULT_CAP:
                cyc = shortest_odd_cycle(core)
                ok = True
                for S in maximal_stable_sets(core):
                    x = {v: int(v in S) for v in core.nodes}
                    val = parity_identity(cyc, sigma(core, x))
                    ok = ok and val == 2 * x[cyc.nodes[0]] - 1
                out[f"{tag}.parity-identity"] = ok
        if b.branch == "composed":
            st, gadgets = b.artifacts["structure"], b.artifacts["gadgets"]
            out[f"{tag}.star-structure"] = not validate_star_structure(bg, st)
            out[f"{tag}.flaps-with-gadgets-bipartite"] = all(
                is_bipartite(Graph(sorted(set(flap_graph(bg, f).nodes) | set(gd.internal)), list(flap_graph(bg, f).edges) + list(gd.edges)))
                for f, gd in zip(st.flaps, gadgets)
            )
            hp, _ = build_h_plus(bg, st)
            out[f"{tag}.transfer-ocp"] = classify_ocp_signed(hp).cls == classify_ocp(bg).cls
    return out


def verify(
    g: Graph,
    form: ExtForm,
    rep: Optional[PipelineReport] = None,
    trials: int = 50,
    seed: Optional[int] = None,
    skip_oracle: bool = False,
    cap: int = DEFAULT_CAP,
) -> PipelineReport:
    """Oracle comparison plus the structural validators of the branch taken."""
    rep = rep if rep is not None else PipelineReport("instance", "unknown")
    rep.ef_rows, rep.ef_vars = form.size, form.num_vars
    t0 = time.perf_counter()
    rep.validators = structural_checks(g, rep, with_sets=not skip_oracle)
    rep.timings["validators"] = time.perf_counter() - t0
    if skip_oracle:
        rep.verdict = "SIZE-ONLY" if all(rep.validators.values()) else "VALIDATOR-FAILED"
        return rep
    t1 = time.perf_counter()
    v = ef_equals_stab(g, form, trials, instance_seed(rep.instance) if seed is None else seed, cap)
    rep.timings["oracle"] = time.perf_counter() - t1
    rep.trials = v.trials
    if not v.exact:
        rep.verdict = "COUNTEREXAMPLE"
        rep.counterexample = v.counterexample
    elif not all(rep.validators.values()):
        rep.verdict = "VALIDATOR-FAILED"
    else:
        rep.verdict = "EXACT"
    return rep


# bench


@dataclass
class BenchRow:
    name: str
    family: str
    n: int
    m: int
    rows: int
    vars: int
    branch: str
    seconds: float


def fit_loglog(points: Sequence[tuple[int, int]]) -> tuple[float, float]:
    """Least-squares slope of log(rows) against log(n), and max rows / n^2."""
    xs = [math.log(n) for n, _ in points]
    ys = [math.log(r) for _, r in points]
    slope, _ = statistics.linear_regression(xs, ys)
    return slope, max(r / n**2 for n, r in points)


def load_instance(graph_path) -> tuple[Graph, dict, Optional[SignedRotationSystem]]:
    p = Path(graph_path)
    g, _ = parse_graph(p.read_text())
    meta = {}
    side = p.with_suffix(".json")
    if side.exists():
        meta = json.loads(side.read_text())
    scheme = None
    emb = p.with_suffix(".emb")
    if emb.exists():
        scheme = parse_embedding(emb.read_text())
    return g, meta, scheme


def _bench_one(args) -> BenchRow:
    gp, force_projective = args
    g, meta, scheme = load_instance(gp)
    t = time.perf_counter()
    form, rep = compile_graph(g, gp.stem, scheme=scheme, force_projective=force_projective)
    return BenchRow(gp.stem, meta.get("family", ""), g.n, g.m, rep.ef_rows, rep.ef_vars, rep.branch, time.perf_counter() - t)


def bench(corpus_dir, force_projective: bool = False, size_limit: int = 200, jobs: int = 1) -> tuple[list[BenchRow], dict]:
    """Compile every instance in a corpus directory (no oracle) and fit the
    row-count growth of the quadrangulation family.

    With ``jobs > 1`` instances run in separate processes; the table order
    is the sorted file order either way.
    """
    paths = []
    for gp in sorted(Path(corpus_dir).glob("*.graph")):
        g, _ = parse_graph(gp.read_text())
        if g.n <= size_limit:
            paths.append((gp, force_projective))
    if jobs > 1 and len(paths) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            rows = list(pool.map(_bench_one, paths))
    else:
        rows = [_bench_one(a) for a in paths]
    quad = sorted((r.n, r.rows) for r in rows if r.family == "projective-quadrangulations" and r.rows)
    summary = {}
    if len(quad) >= 2:
        slope, c = fit_loglog(quad)
        summary = {"quadrangulation-slope": slope, "quadrangulation-C": c, "points": len(quad)}
    return rows, summary


def bench_csv(rows: Sequence[BenchRow]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["name", "family", "n", "m", "ef-rows", "ef-vars", "branch", "seconds"])
    for r in rows:
        w.writerow([r.name, r.family, r.n, r.m, r.rows, r.vars, r.branch, f"{r.seconds:.3f}"])
    return buf.getvalue()
