import json

from stabef.corpus import FAMILIES, FLAPPED_KINDS, family_instances, generate_corpus, odd_wheel, quadrangulation
from stabef.embedding import parse_embedding, trace_faces
from stabef.graph import read_graph
from stabef.parity import classify_ocp


def test_odd_cycles():
    names = [i.name for i in family_instances("odd-cycles")]
    assert names == ["odd-cycle-5", "odd-cycle-7", "odd-cycle-9", "odd-cycle-11", "odd-cycle-13", "odd-cycle-15"]


def test_odd_wheel_shape():
    g = odd_wheel(5)
    assert (g.n, g.m) == (6, 10) and g.degree(0) == 5


def test_quadrangulation_counts():
    for steps in range(5):
        g, faces = quadrangulation(steps, 1)
        assert g.n == 4 + 4 * steps and g.m == 6 + 8 * steps and len(faces) == 3 + 4 * steps
        assert g.n - g.m + len(faces) == 1


def test_every_family_is_ocp_one():
    for fam in FAMILIES:
        params = {"max_n": 24} if fam == "projective-quadrangulations" else {}
        insts = family_instances(fam, **params)
        assert insts, fam
        for inst in insts:
            assert classify_ocp(inst.graph).cls == "One", inst.name


def test_flapped_kinds_listed():
    assert [i.meta["kind"] for i in family_instances("flapped-cores")] == list(FLAPPED_KINDS)


def test_random_family_is_seeded():
    a = family_instances("random-ocp1-screened", count=3)
    b = family_instances("random-ocp1-screened", count=3)
    assert [i.graph.edges for i in a] == [i.graph.edges for i in b]
    assert all("seed" in i.meta for i in a)


def test_generate_writes_sidecars(tmp_path):
    paths = generate_corpus("projective-quadrangulations", tmp_path, max_n=12)
    assert [p.name for p in paths] == ["quad-4.graph", "quad-8.graph", "quad-12.graph"]
    for p in paths:
        g = read_graph(p)
        meta = json.loads(p.with_suffix(".json").read_text())
        assert meta["n"] == g.n and meta["family"] == "projective-quadrangulations"
        rs = parse_embedding(p.with_suffix(".emb").read_text())
        fs = trace_faces(g, rs)
        assert fs.euler == 1 and set(fs.lengths()) == {4}


def test_moebius_grid_is_even_face_with_large_oct():
    from stabef.corpus import moebius_grid
    from stabef.embedding import is_even_face_projective, scheme_from_faces
    from stabef.parity import SignedGraph, odd_cycle_transversal

    g, faces = moebius_grid(4, 2)
    assert (g.n, g.m) == (16, 28)
    rs = scheme_from_faces(g, faces)
    assert is_even_face_projective(SignedGraph.ordinary(g), rs)
    assert trace_faces(g, rs).euler == 1
    assert odd_cycle_transversal(g, 3) is None
    assert odd_cycle_transversal(moebius_grid(4, 1)[0], 3) is not None
