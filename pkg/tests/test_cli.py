import csv
import io
import json
import subprocess
import sys

import numpy as np
import pytest

from pou_lab.cli import SWEEP_HEADER, run
from pou_lab.graph import Edge, Graph, canonical_graph_json, disjoint_paths_graph, graph_to_json


def call(*argv):
    out = io.StringIO()
    code = run(list(argv), stdout=out)
    return code, out.getvalue()


def call_json(*argv):
    code, text = call(*argv)
    return code, json.loads(text)


def test_pou_example_golden(write_graph, three_parallel):
    path = write_graph(three_parallel, "ex1_m3.json")
    code, text = call("pou", "--graph", path, "--n", "2", "--k", "1", "--alpha", "3", "--cost", "sum")
    assert code == 0
    out = json.loads(text)
    assert out["pou"] == 1.66666666667
    assert out["tme"] == 3.33333333333 and out["tmecor"] == 2.0
    assert text == call("pou", "--graph", path, "--n", "2", "--k", "1", "--alpha", "3", "--cost", "sum")[1]


def test_validate_cycle(write_graph):
    g = Graph.from_edges([Edge("a", "s", "t"), Edge("b", "t", "s")])
    code, out = call_json("validate", "--graph", write_graph(g))
    assert code == 1 and out["error"] == "CYCLE_DETECTED"


@pytest.mark.parametrize("bad, code", [
    ("{not json", "INVALID_JSON"),
    ('{"vertices": ["s","t"], "source": "s", "sink": "t", "edges": [], "x": 1}', "INVALID_GRAPH"),
])
def test_bad_graph_files(tmp_path, bad, code):
    p = tmp_path / "bad.json"
    p.write_text(bad)
    rc, out = call_json("validate", "--graph", str(p))
    assert rc == 1 and out["error"] == code


def test_missing_file():
    rc, out = call_json("validate", "--graph", "/nonexistent/graph.json")
    assert rc == 1 and out["error"] == "INVALID_PARAMS"


def test_usage_errors_exit_2(write_graph, two_parallel):
    with pytest.raises(SystemExit) as exc:
        run(["frobnicate"])
    assert exc.value.code == 2
    with pytest.raises(SystemExit) as exc:
        run(["ru", "--graph", write_graph(two_parallel), "--n", "2"])
    assert exc.value.code == 2


def test_domain_param_errors(write_graph, two_parallel):
    rc, out = call_json("ru", "--graph", write_graph(two_parallel), "--n", "2", "--alpha", "-1")
    assert rc == 1 and out["error"] == "INVALID_PARAMS"
    rc, out = call_json("--tol", "0.5", "ru", "--graph", write_graph(two_parallel), "--n", "2", "--alpha", "1")
    assert rc == 1


def test_sweep_csv(write_graph, two_parallel):
    path = write_graph(two_parallel, "two_paths.json")
    code, text = call("sweep", "--graph", path, "--n", "2", "--k", "1", "--cost", "sum",
                      "--alpha-from", "0.5", "--alpha-to", "3", "--steps", "6")
    assert code == 0
    rows = list(csv.reader(io.StringIO(text)))
    assert rows[0] == SWEEP_HEADER
    body = np.array(rows[1:], dtype=float)
    assert len(body) == 6
    np.testing.assert_allclose(body[:, 0], np.linspace(0.5, 3, 6))
    assert (np.diff(body[:, 3]) >= 0).all()
    assert body[-1, 3] == 1.5
    assert all(len(x.replace(".", "").replace("-", "").lstrip("0")) <= 12 for r in rows[1:] for x in r)


def test_paths_and_emit_graph(write_graph, crossing):
    path = write_graph(crossing)
    code, out = call_json("paths", "--graph", path)
    assert code == 0 and out["count"] == 3
    assert [p["id"] for p in out["paths"]] == ["p1", "p2", "p3"]
    code, text = call("paths", "--graph", path, "--emit-graph")
    assert text == canonical_graph_json(crossing) + "\n"


def test_round_trip_byte_identical(tmp_path, crossing):
    first = tmp_path / "a.json"
    first.write_text(json.dumps(graph_to_json(crossing), indent=3))
    _, text = call("paths", "--graph", str(first), "--emit-graph")
    second = tmp_path / "b.json"
    second.write_text(text)
    assert call("paths", "--graph", str(second), "--emit-graph")[1] == text


def test_stdin_graph(two_routes):
    proc = subprocess.run([sys.executable, "-m", "pou_lab", "validate", "--graph", "-"],
                          input=canonical_graph_json(two_routes), capture_output=True, text=True)
    assert proc.returncode == 0 and json.loads(proc.stdout)["valid"]


def test_usage_exit_code_subprocess():
    proc = subprocess.run([sys.executable, "-m", "pou_lab", "sweep"], capture_output=True, text=True)
    assert proc.returncode == 2


def test_analyze(write_graph, diamond):
    code, out = call_json("analyze", "--graph", write_graph(diamond), "--n", "3")
    assert out["mincut"] == 1 and out["cut_edges"] == ["b"] and out["prefix_sums"] == [2]
    assert out["plateau_threshold"] == 0.0 and not out["disjoint_paths"]


def test_eval_and_best_response(write_graph, tmp_path, two_routes):
    g = write_graph(two_routes)
    strat = tmp_path / "s.json"
    strat.write_text(json.dumps({"marginals": [{"p1": 0.5, "p2": 0.5}, {"p1": 0.5, "p2": 0.5}]}))
    code, out = call_json("eval", "--graph", g, "--n", "2", "--alpha", "1", "--cost", "max",
                          "--strategy", str(strat), "--d", "p02e01")
    assert code == 0 and out["value"] == 2.5
    code, out = call_json("best-response", "--graph", g, "--n", "2", "--alpha", "1", "--cost", "max",
                          "--strategy", str(strat))
    assert out["best_response"] == ["p02e01"] and out["value"] == 2.5


def test_tmecor_tme_ru(write_graph, two_routes):
    g = write_graph(two_routes)
    _, out = call_json("tmecor", "--graph", g, "--n", "2", "--alpha", "1", "--cost", "max")
    assert out["tmecor"] == 2.0
    _, out = call_json("tme", "--graph", g, "--n", "2", "--alpha", "3", "--cost", "max")
    assert out["method"] == "numeric" and abs(out["tme"] - 3.64911064084) < 1e-9
    _, out = call_json("ru", "--graph", g, "--n", "2", "--alpha", "5")
    assert out["r_u"] == pytest.approx(out["phi_n"] / out["phi_1"])


def test_max_analysis_cli(write_graph):
    g = write_graph(disjoint_paths_graph([1, 1, 2]))
    code, out = call_json("max-analysis", "--graph", g, "--n", "2", "--alpha", "4")
    assert code == 0 and out["m1"] == 2 and out["strictly_improves"]
    assert out["alpha0"] == pytest.approx(20 / 7)


def test_convert_payoff(tmp_path):
    code, out = call_json("convert-payoff", "--reference-m", "2", "--n", "2", "--k", "1")
    assert code == 0 and out["pou_payoff"] == 2.0 and out["pou_cost"] == 2.0
    p = tmp_path / "u.json"
    p.write_text(json.dumps({"n": 2, "payoff": np.full((2, 2, 1), 0.5).tolist()}))
    code, out = call_json("convert-payoff", "--payoff", str(p))
    assert out["pou_payoff"] == 1.0
    code, out = call_json("convert-payoff")
    assert code == 1


def test_caps_env_override(write_graph, monkeypatch):
    g = write_graph(disjoint_paths_graph([1] * 5))
    monkeypatch.setenv("POU_LAB_CAPS_JSON", '{"paths": 3}')
    code, out = call_json("paths", "--graph", g)
    assert code == 1 and out["error"] == "PATH_CAP_EXCEEDED"
    monkeypatch.setenv("POU_LAB_CAPS_JSON", '{"nope": 3}')
    assert call_json("paths", "--graph", g)[0] == 1


def test_oracle_check_quick(tmp_path):
    report = tmp_path / "report.xml"
    code, out = call_json("oracle-check", "--quick", "--report", str(report))
    assert code == 0 and out["passed"] and not out["failures"]
    assert report.read_text().startswith("<testsuite")


def test_threads_flag_does_not_change_output(write_graph):
    g = write_graph(disjoint_paths_graph([1, 2, 2]))
    args = ["pou", "--graph", g, "--n", "2", "--alpha", "2.5", "--cost", "max", "--n-starts", "8"]
    assert call(*args)[1] == call("--threads", "3", *args)[1]
