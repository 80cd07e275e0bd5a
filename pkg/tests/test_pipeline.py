import csv
import io

import pytest

from stabef.corpus import complete, family_instances, flapped_core, generate_corpus, odd_cycle, quadrangulation
from stabef.embedding import format_embedding, scheme_from_faces
from stabef.extform import format_extform
from stabef.graph import build_graph
from stabef.parity import classify_ocp, odd_cycle_transversal
from stabef.pipeline import (
    EXIT_COUNTEREXAMPLE,
    EXIT_OK,
    EXIT_REJECTED,
    bench,
    bench_csv,
    compile_graph,
    fit_loglog,
    instance_seed,
    verify,
)

K3K3 = build_graph([(0, 1), (1, 2), (2, 0), (3, 4), (4, 5), (5, 3)])


def test_c5_takes_oct_branch():
    form, rep = compile_graph(odd_cycle(2), "c5")
    assert rep.branch == "oct<=3" and rep.blocks[0].transversal == [0]
    assert form.size == 10
    rep = verify(odd_cycle(2), form, rep)
    assert rep.verdict == "EXACT" and rep.exit_code == EXIT_OK


def test_k4_forced_projective():
    form, rep = compile_graph(complete(4), "k4", force_projective=True)
    assert rep.branch == "projective-core"
    rep = verify(complete(4), form, rep)
    assert rep.verdict == "EXACT"
    assert all(rep.validators.values()) and "block0.alternation" in rep.validators


def test_rejection():
    form, rep = compile_graph(K3K3, "k3k3")
    assert form is None and rep.branch == "rejected-ocp>=2"
    assert rep.exit_code == EXIT_REJECTED


def test_bipartite_and_blocks():
    c6 = build_graph([(i, (i + 1) % 6) for i in range(6)])
    form, rep = compile_graph(c6)
    assert rep.branch == "bipartite"
    assert verify(c6, form, rep).verdict == "EXACT"
    # a triangle hanging off a square through a cut node
    g = build_graph([(0, 1), (1, 2), (2, 3), (3, 0), (3, 4), (4, 5), (5, 3)])
    form, rep = compile_graph(g, "blocks")
    assert sorted(b.branch for b in rep.blocks) == ["bipartite", "oct<=3"]
    assert rep.branch == "oct<=3"
    assert verify(g, form, rep).verdict == "EXACT"


def test_composed_branch():
    g = flapped_core("k4-odd-pair")
    form, rep = compile_graph(g, "odd-pair", force_projective=True)
    assert rep.branch == "composed"
    assert set(form.originals) == {f"x{v}" for v in g.nodes}
    rep = verify(g, form, rep)
    assert rep.verdict == "EXACT", rep.validators
    assert rep.validators["block0.transfer-ocp"]


def test_branch_soundness():
    for inst in family_instances("odd-wheels") + family_instances("random-ocp1-screened"):
        _, rep = compile_graph(inst.graph, inst.name)
        assert rep.ocp == classify_ocp(inst.graph).cls
        expect = "oct<=3" if odd_cycle_transversal(inst.graph, 3) is not None else "composed"
        assert rep.branch in (expect, "bipartite")


def test_supplied_embedding():
    g, faces = quadrangulation(2, 1)
    form, rep = compile_graph(g, "q", scheme=scheme_from_faces(g, faces))
    assert rep.branch == "projective-core" and rep.ocp == "One"
    with pytest.raises(ValueError):
        compile_graph(odd_cycle(2), scheme=scheme_from_faces(g, faces))


def test_determinism():
    g = flapped_core("k4-even-pair")
    a, _ = compile_graph(g, force_projective=True)
    b, _ = compile_graph(g, force_projective=True)
    assert format_extform(a) == format_extform(b)


def test_mismatched_pair_is_counterexample():
    form, _ = compile_graph(odd_cycle(2), "c5")
    rep = verify(odd_cycle(3), form)
    assert rep.verdict == "COUNTEREXAMPLE" and rep.exit_code == EXIT_COUNTEREXAMPLE
    # same node set, different graph
    c5b = build_graph([(0, 2), (2, 4), (4, 1), (1, 3), (3, 0)])
    rep = verify(c5b, form)
    assert rep.verdict == "COUNTEREXAMPLE" and rep.counterexample["objective"]


def test_size_only_on_large_quadrangulation():
    g, faces = quadrangulation(24, 1)
    assert g.n == 100
    form, rep = compile_graph(g, "quad-100", scheme=scheme_from_faces(g, faces))
    rep = verify(g, form, rep, skip_oracle=True)
    assert rep.verdict == "SIZE-ONLY" and rep.ef_rows == form.size > 0


def test_seed_is_stable():
    assert instance_seed("odd-cycle-5") == instance_seed("odd-cycle-5") != instance_seed("odd-cycle-7")


def test_fit_loglog():
    slope, c = fit_loglog([(n, 3 * n * n) for n in (4, 8, 16, 32)])
    assert abs(slope - 2) < 1e-9 and c == 3


def test_bench(tmp_path):
    assert bench(tmp_path) == ([], {})
    generate_corpus("projective-quadrangulations", tmp_path / "q", max_n=20)
    generate_corpus("odd-cycles", tmp_path / "q", ks=[2, 3, 4])
    rows, summary = bench(tmp_path / "q", jobs=2)
    assert summary["points"] == 5 and summary["quadrangulation-slope"] <= 2.2
    table = list(csv.DictReader(io.StringIO(bench_csv(rows))))
    assert {r["branch"] for r in table} == {"projective-core", "oct<=3"}
    cyc = sorted((int(r["n"]), int(r["ef-rows"])) for r in table if r["family"] == "odd-cycles")
    # odd cycles grow linearly
    assert [b - a for (_, a), (_, b) in zip(cyc, cyc[1:])] == [8, 8]
