"""
Command line driver.

    stabef analyze  <graph>
    stabef compile  <graph> [-o EF]
    stabef verify   <graph> <ef>
    stabef bench    <dir>
    stabef generate <family> <outdir> [key=value ...]

Reports are JSON. Exit codes: 0 ok or EXACT, 2 rejected (ocp >= 2),
3 counterexample, 4 budget exhausted.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from .corpus import FAMILIES, generate_corpus
from .embedding import SearchBudgetExceeded, parse_embedding
from .extform import format_extform, parse_extform
from .graph import biconnected_blocks, is_bipartite, parse_graph
from .oracle import DEFAULT_CAP as ORACLE_CAP
from .oracle import OracleCapExceeded
from .parity import DEFAULT_CAP as OCP_CAP
from .parity import CapExceeded, classify_ocp, odd_cycle_transversal
from .pipeline import (
    EXIT_BUDGET,
    EXIT_OK,
    EXIT_REJECTED,
    BudgetExhausted,
    PipelineReport,
    bench,
    bench_csv,
    compile_graph,
    verify,
)

BUDGET_ERRORS = (BudgetExhausted, SearchBudgetExceeded, CapExceeded, OracleCapExceeded)


def _emit(doc, out=None) -> None:
    text = doc if isinstance(doc, str) else json.dumps(doc, indent=1, sort_keys=True) + "\n"
    if out:
        Path(out).write_text(text)
    else:
        sys.stdout.write(text)


def _load(args):
    g, _ = parse_graph(Path(args.graph).read_text())
    scheme = None
    if getattr(args, "embedding", None):
        scheme = parse_embedding(Path(args.embedding).read_text())
    return g, scheme


def _budget_report(name: str, stage: str, ex: Exception) -> PipelineReport:
    rep = PipelineReport(name, "unknown", verdict="BUDGET-EXHAUSTED")
    rep.notes.append(f"{stage}: {type(ex).__name__}: {ex}")
    return rep


def _compile(args, g, scheme):
    name = Path(args.graph).stem
    try:
        return compile_graph(g, name, cap_ocp=args.cap_ocp, force_projective=args.force_projective, scheme=scheme)
    except BUDGET_ERRORS as ex:
        return None, _budget_report(name, "compile", ex)


def cmd_analyze(args) -> int:
    g, scheme = _load(args)
    doc = {"instance": Path(args.graph).stem, "n": g.n, "m": g.m, "bipartite": is_bipartite(g)}
    try:
        v = classify_ocp(g, args.cap_ocp)
    except CapExceeded as ex:
        doc["error"] = str(ex)
        _emit(doc)
        return EXIT_BUDGET
    doc["ocp"] = v.cls
    doc["witnesses"] = [{"nodes": list(c.nodes), "edges": list(c.edges)} for c in v.witnesses]
    X = odd_cycle_transversal(g, 3) if v.cls != "AtLeastTwo" else None
    doc["oct<=3"] = None if X is None else list(X)
    doc["blocks"] = [{"nodes": nodes, "edges": len(edges)} for nodes, edges in biconnected_blocks(g)]
    if scheme is not None:
        doc["embedding"] = args.embedding
    _emit(doc)
    return EXIT_REJECTED if v.cls == "AtLeastTwo" else EXIT_OK


def cmd_compile(args) -> int:
    g, scheme = _load(args)
    form, rep = _compile(args, g, scheme)
    if form is not None:
        _emit(format_extform(form), args.output)
    if args.report or form is None or args.output:
        _emit(rep.to_dict(), args.report)
    return rep.exit_code


def cmd_verify(args) -> int:
    g, scheme = _load(args)
    form = parse_extform(Path(args.ef).read_text())
    _, rep = _compile(args, g, scheme)
    if rep.verdict == "BUDGET-EXHAUSTED" or rep.branch == "rejected-ocp>=2":
        _emit(rep.to_dict())
        return rep.exit_code
    # the freshly compiled artifacts feed the structural validators; the
    # oracle comparison is against the supplied formulation
    try:
        rep = verify(g, form, rep, args.trials, args.seed, args.skip_oracle, args.cap)
    except BUDGET_ERRORS as ex:
        rep.verdict = "BUDGET-EXHAUSTED"
        rep.notes.append(f"verify: {type(ex).__name__}: {ex}")
    _emit(rep.to_dict())
    return rep.exit_code


def cmd_bench(args) -> int:
    rows, summary = bench(args.dir, force_projective=args.force_projective, size_limit=args.size_limit, jobs=args.jobs)
    _emit(bench_csv(rows), args.output)
    sys.stderr.write(json.dumps(summary, sort_keys=True) + "\n")
    return EXIT_OK


def _param(text: str):
    key, _, raw = text.partition("=")
    if not raw:
        raise argparse.ArgumentTypeError(f"expected key=value, got {text!r}")
    key = key.replace("-", "_")
    if key == "kinds":
        return key, tuple(raw.split(","))
    if "," in raw or key in ("ks", "rims", "ns"):
        return key, [int(t) for t in raw.split(",")]
    try:
        return key, int(raw)
    except ValueError:
        return key, raw


def cmd_generate(args) -> int:
    params = dict(args.params)
    paths = generate_corpus(args.family, args.outdir, **params)
    for p in paths:
        print(p)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="stabef", description="Extended formulations of stable set polytopes for ocp <= 1.")
    sub = ap.add_subparsers(dest="command", required=True)

    def common(p, compile_flags=True):
        p.add_argument("graph", help="graph file in the 'p stab' format")
        p.add_argument("--cap-ocp", type=int, default=OCP_CAP, help="node cap for the exact ocp analysis")
        p.add_argument("--embedding", help="even-face projective embedding file for the graph")
        if compile_flags:
            p.add_argument("--force-projective", action="store_true", help="skip the oct<=3 shortcut")

    p = sub.add_parser("analyze", help="ocp class, odd cycle transversal and blocks")
    common(p, compile_flags=False)
    p.set_defaults(func=cmd_analyze)

    p = sub.add_parser("compile", help="write the extended formulation")
    common(p)
    p.add_argument("-o", "--output", help="EF output file (default stdout)")
    p.add_argument("--report", help="write the JSON report here (default stdout when -o is given)")
    p.set_defaults(func=cmd_compile)

    p = sub.add_parser("verify", help="check an EF file against the oracle")
    common(p)
    p.add_argument("ef", help="extended formulation file")
    p.add_argument("--seed", type=int, help="objective seed (default: CRC32 of the instance name)")
    p.add_argument("--trials", type=int, default=50, help="random objectives")
    p.add_argument("--skip-oracle", action="store_true", help="structural validators only")
    p.add_argument("--cap", type=int, default=ORACLE_CAP, help="node cap for the oracle")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("bench", help="compile a corpus and fit the row growth")
    p.add_argument("dir")
    p.add_argument("-o", "--output", help="CSV output file (default stdout)")
    p.add_argument("--jobs", type=int, default=1)
    p.add_argument("--size-limit", type=int, default=200)
    p.add_argument("--force-projective", action="store_true")
    p.set_defaults(func=cmd_bench)

    p = sub.add_parser("generate", help="write an instance family")
    p.add_argument("family", choices=FAMILIES)
    p.add_argument("outdir")
    p.add_argument("params", nargs="*", type=_param, metavar="key=value")
    p.set_defaults(func=cmd_generate)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
