import json

import pytest

from builders import emitter_example, graph, loops, sink, w_chain
from splicecheck import Graph
from splicecheck.cli import EXIT_ERROR, EXIT_FALSE, EXIT_OK, main


@pytest.fixture
def write(tmp_path):
    def _write(g, name="g.json"):
        path = tmp_path / name
        path.write_text(json.dumps(g.to_json() if isinstance(g, Graph) else g))
        return str(path)

    return _write


def run(capsys, argv):
    code = main(argv)
    out, err = capsys.readouterr()
    return code, out, err


def test_check(write, capsys):
    assert run(capsys, ["check", write(loops(3))])[:2] == (EXIT_OK, "PASS: purely infinite\n")
    code, out, _ = run(capsys, ["check", write(loops(1))])
    assert code == EXIT_FALSE and out.startswith("FAIL: condition_k")
    code, out, _ = run(capsys, ["check", "--json", write(loops(1))])
    assert json.loads(out)["verdict"] is False


def test_k_sink(write, capsys):
    code, out, _ = run(capsys, ["k", write(sink())])
    assert code == EXIT_OK
    assert out.splitlines()[0] == "K₀ = ℤ, K₁ = 0"
    assert "unfiltered" in out


def test_ideals_and_prim(write, capsys):
    code, out, _ = run(capsys, ["ideals", write(w_chain())])
    assert code == EXIT_OK and "0 < 1" in out
    code, out, _ = run(capsys, ["prim", "--json", write(w_chain())])
    assert code == EXIT_OK and json.loads(out)["geq"] == [["x0", "x1"]]


def test_xk(write, capsys):
    code, out, _ = run(capsys, ["xk", write(w_chain())])
    assert code == EXIT_OK and "ℤ/4" in out
    code, out, _ = run(capsys, ["xk", "--json", "--v-first", "w2", write(w_chain())])
    assert json.loads(out)["transitions"][0]["K0_induced"] == [[2]]


def test_splice_output_is_loadable(write, capsys):
    code, out, _ = run(capsys, ["splice", write(loops(3)), "v"])
    assert code == EXIT_OK
    g = Graph.from_json(json.loads(out))
    assert len(g.vertices) == 3


def test_verify(write, capsys):
    code, out, _ = run(capsys, ["verify", write(w_chain()), "w1"])
    assert code == EXIT_OK and out.splitlines()[-1] == "PASS"
    code, out, _ = run(capsys, ["verify", "--corrupt-psi", write(w_chain()), "w1"])
    assert code == EXIT_FALSE and out.splitlines()[-1] == "FAIL: cube"
    code, out, _ = run(capsys, ["verify", "--json", "--verbose", write(loops(2)), "v"])
    assert json.loads(out)["verdict"] is True and "matrices" in json.loads(out)


def test_verify_precondition_is_usage_error(write, capsys):
    code, _, err = run(capsys, ["verify", write(loops(1)), "v"])
    assert code == EXIT_ERROR and "condition_k" in err


def test_errors(write, tmp_path, capsys):
    assert run(capsys, ["check", str(tmp_path / "missing.json")])[0] == EXIT_ERROR
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    assert run(capsys, ["check", str(bad)])[0] == EXIT_ERROR
    assert run(capsys, ["splice", write(loops(3)), "nope"])[0] == EXIT_ERROR


def test_desing_and_commute(write, tmp_path, capsys):
    path = write(emitter_example())
    code, out, _ = run(capsys, ["desing", path, "--depth", "2"])
    assert code == EXIT_OK
    g = Graph.from_json(json.loads(out))
    assert "v" in g.vertices and len(g.vertices) == 4
    order = tmp_path / "order.json"
    order.write_text(json.dumps({"vertex": "v", "pattern": ["w", "v", "v"], "period_start": 0}))
    # the two finite loops must sit in the prefix
    assert run(capsys, ["commute", path, "v", "--order", str(order)])[0] == EXIT_ERROR
    order.write_text(json.dumps({"vertex": "v", "pattern": ["v", "w", "v", "w"], "period_start": 3}))
    code, out, _ = run(capsys, ["commute", path, "v", "--order", str(order)])
    assert (code, out.splitlines()[0]) == (EXIT_OK, "PASS")


def test_fuzz(tmp_path, capsys):
    code, out, _ = run(capsys, ["fuzz", "--trials", "10", "--max-vertices", "5"])
    assert code == EXIT_OK and "0 failed" in out
    code, out, _ = run(
        capsys, ["fuzz", "--trials", "3", "--max-vertices", "4", "--corrupt-psi", "--dump-dir", str(tmp_path), "--json"]
    )
    assert code == EXIT_FALSE
    assert len(json.loads(out)["dumped"]) == json.loads(out)["failed"]


def test_dot(write, capsys):
    code, out, _ = run(capsys, ["dot", write(loops(2))])
    assert code == EXIT_OK and out.startswith("digraph")
    code, out, _ = run(capsys, ["dot", "--what", "lattice", write(w_chain())])
    assert "p0 -> p1" in out
    assert run(capsys, ["dot", "--what", "prim", write(graph(["a"], {("a", "a"): 2}))])[0] == EXIT_OK
