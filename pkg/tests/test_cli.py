import json

import pytest

from geoclique.cli import run
from geoclique.gadgets import cycle_union_complement
from geoclique.graph import Graph, complement, graph_to_json

from helpers import disjoint_cycles


def _run(capsys, *argv):
    code = run(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


@pytest.fixture
def k3(tmp_path):
    p = tmp_path / "k3.json"
    p.write_text('{"n": 3, "edges": [[0, 1], [1, 2], [0, 2]]}')
    return str(p)


def test_gen_is_byte_deterministic(tmp_path, capsys):
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    assert _run(capsys, "gen", "--kind", "disks", "--n", "12", "--seed", "7", "-o", str(a))[0] == 0
    assert _run(capsys, "gen", "--kind", "disks", "--n", "12", "--seed", "7", "-o", str(b))[0] == 0
    assert a.read_bytes() == b.read_bytes()


def test_env_seed_is_default(tmp_path, capsys, monkeypatch):
    monkeypatch.setenv("GEOCLIQUE_SEED", "7")
    _, via_env, _ = _run(capsys, "gen", "--n", "5")
    monkeypatch.delenv("GEOCLIQUE_SEED")
    _, via_flag, _ = _run(capsys, "gen", "--n", "5", "--seed", "7")
    _, default, _ = _run(capsys, "gen", "--n", "5")
    assert via_env == via_flag != default


def test_clique_eptas_vs_exact(tmp_path, capsys):
    for seed in range(5):
        path = tmp_path / f"a{seed}.json"
        _run(capsys, "gen", "--kind", "disks", "--n", "14", "--seed", str(seed), "--box", "6", "-o", str(path))
        _, ex, _ = _run(capsys, "clique", "--mode", "exact", str(path))
        code, ep, _ = _run(capsys, "clique", "--mode", "eptas", "--eps", "0.25", str(path))
        assert code == 0
        assert json.loads(ep)["value"] >= 0.75 * json.loads(ex)["value"]


def test_clique_modes_and_unit_ball_dispatch(tmp_path, capsys):
    path = tmp_path / "u.json"
    _run(capsys, "gen", "--kind", "unit_balls", "--n", "8", "--box", "3", "-o", str(path))
    code, out, _ = _run(capsys, "clique", str(path))
    assert code == 0 and json.loads(out)["metadata"]["beta"] == pytest.approx(1 / 30)
    d = tmp_path / "d.json"
    _run(capsys, "gen", "--n", "8", "--box", "4", "-o", str(d))
    for mode in ("subexp", "pierce2"):
        code, out, _ = _run(capsys, "clique", "--mode", mode, str(d))
        assert code == 0 and json.loads(out)["mode"] == mode


def test_gadget_pipe_verify(k3, tmp_path, capsys, monkeypatch):
    code, out, _ = _run(capsys, "gadget", "--target", "balls4", "--graph", k3)
    assert code == 0
    bundle = json.loads(out)
    assert bundle["report"]["equal"] and len(bundle["instance"]["objects"]) == 9
    f = tmp_path / "bundle.json"
    f.write_text(out)
    code, out, _ = _run(capsys, "verify", str(f))
    assert code == 0 and json.loads(out)["equal"]


def test_verify_instance_against_graph(k3, tmp_path, capsys):
    _, out, _ = _run(capsys, "gadget", "--target", "triangles", "--graph", k3)
    inst = tmp_path / "inst.json"
    inst.write_text(json.dumps(json.loads(out)["instance"]))
    g = tmp_path / "h.json"
    g.write_text(json.dumps(json.loads(out)["expected"]))
    code, out, _ = _run(capsys, "verify", str(inst), "--graph", str(g))
    assert code == 0 and json.loads(out)["equal"]


def test_gadget_cocycles(capsys):
    code, out, _ = _run(capsys, "gadget", "--target", "cocycles", "--evens", "6,8", "--odd", "5")
    assert code == 0 and len(json.loads(out)["instance"]["objects"]) == 19
    assert _run(capsys, "gadget", "--target", "cocycles", "--odd", "5,7")[0] == 2


def test_graph_formats(k3, capsys):
    code, out, _ = _run(capsys, "graph", k3, "--format", "dimacs")
    assert code == 0 and out.startswith("p edge 3 3")


def test_mis_modes(tmp_path, capsys):
    p = tmp_path / "g.json"
    p.write_text(graph_to_json(complement(cycle_union_complement([7]))))
    values = set()
    for mode in ("exact", "subexp", "qptas", "eptas"):
        code, out, _ = _run(capsys, "mis", "--mode", mode, str(p))
        assert code == 0
        values.add(json.loads(out)["value"])
    assert values == {3}


def test_check_properties(k3, tmp_path, capsys):
    code, out, _ = _run(capsys, "check", k3, "--property", "iocp")
    assert code == 0 and json.loads(out)["status"] == "none"
    two = tmp_path / "two.json"
    two.write_text(graph_to_json(disjoint_cycles(3, 3)))
    code, out, _ = _run(capsys, "check", str(two), "--property", "iocp")
    assert code == 0 and json.loads(out)["status"] == "witness"
    chains = tmp_path / "chains.json"
    chains.write_text(json.dumps({"chain1": [[0, 0], [2, 0], [2, 2], [0, 2]],
                                  "chain2": [[1, -0.5], [2.5, 1.1], [1.1, 2.5], [-0.5, 0.9]]}))
    code, out, _ = _run(capsys, "check", str(chains), "--property", "crossing")
    assert code == 0 and json.loads(out)["sum_c_even"]
    needles = tmp_path / "needles.json"
    needles.write_text(json.dumps({"chain1": [[0, 0, 0], [1, 0, 0], [0.3, 0.8, 0]],
                                   "chain2": [[0, 0, 5], [1, 0, 5], [0.3, 0.8, 5]]}))
    code, out, _ = _run(capsys, "check", str(needles), "--property", "needle")
    assert code == 0 and json.loads(out)["angular_error"] <= 1e-6


def test_check_k22(tmp_path, capsys):
    p = tmp_path / "k22.json"
    p.write_text(json.dumps({"kind": "balls", "dim": 2, "objects": [
        {"c": [-1, 0], "r": 0.9}, {"c": [1, 0], "r": 0.9}, {"c": [0, -1], "r": 0.9}, {"c": [0, 1], "r": 0.9}]}))
    code, out, _ = _run(capsys, "check", str(p), "--property", "k22")
    assert code == 0 and json.loads(out)["diagonal_nonedges"]


def test_input_errors_exit_2(tmp_path, capsys):
    assert _run(capsys, "verify", str(tmp_path / "missing.json"))[0] == 2
    bad = tmp_path / "bad.json"
    bad.write_text('{"kind": "balls", "dim": 2, "objects": [{"c": [0, 0, 0], "r": 1}]}')
    code, _, err = _run(capsys, "graph", str(bad))
    assert code == 2 and "objects[0]" in err
    assert _run(capsys, "mis", "--bogus-flag", str(bad))[0] == 2
    assert _run(capsys, "gen", "--n", "-3")[0] == 2


def test_iocp_violation_exit_3(tmp_path, capsys):
    # complement of two triangles plus a long path, under a universal vertex;
    # large enough that the branch is sampled instead of solved exactly
    h = Graph.from_edges(26, disjoint_cycles(3, 3).edges() + [(k, k + 1) for k in range(6, 25)])
    base = complement(h)
    g = Graph.from_edges(27, base.edges() + [(26, v) for v in range(26)])
    p = tmp_path / "g.json"
    p.write_text(graph_to_json(g))
    code, _, err = _run(capsys, "clique", str(p))
    assert code == 3
    assert "evidence" in json.loads(err)


def test_bench_rows_sorted_and_stable(capsys):
    _, a, _ = _run(capsys, "bench", "--n", "8", "--count", "4", "--workers", "3")
    _, b, _ = _run(capsys, "bench", "--n", "8", "--count", "4")
    rows = [json.loads(line) for line in a.splitlines()]
    assert [r["id"] for r in rows] == [0, 1, 2, 3]
    assert a == b
    assert all(r["valid"] for r in rows)
