import json

import numpy as np
import pytest

from presistance import load_distance_matrix
from presistance.cli import main


def run(argv):
    return main([str(a) for a in argv])


@pytest.fixture
def blob_csv(tmp_path):
    rng = np.random.default_rng(0)
    rows = []
    for cx, lab in ((0.0, "a"), (4.0, "b")):
        for _ in range(10):
            x, y = rng.normal(cx, 0.3, size=2)
            rows.append(f"{float(x)!r},{float(y)!r},{lab}")
    path = tmp_path / "blobs.csv"
    path.write_text("\n".join(rows) + "\n")
    return path


def test_build_graph_and_reproducible(tmp_path, blob_csv):
    out = tmp_path / "g.edges"
    assert run(["build-graph", "--features", blob_csv, "--labels", "last",
                "--mu", "0.5", "--sigma", "0.5", "--out", out]) == 0
    first = out.read_bytes()
    assert b"# config:" in first
    assert run(["build-graph", "--features", blob_csv, "--labels", "last",
                "--mu", "0.5", "--sigma", "0.5", "--out", out]) == 0
    assert out.read_bytes() == first


def test_build_graph_missing_file_exit_2(tmp_path):
    assert run(["build-graph", "--features", tmp_path / "nope.csv",
                "--mu", "0.5", "--sigma", "1", "--out", tmp_path / "g"]) == 2


def test_build_graph_invalid_mu_exit_2(tmp_path, blob_csv):
    assert run(["build-graph", "--features", blob_csv, "--labels", "last",
                "--mu", "0", "--sigma", "1", "--out", tmp_path / "g"]) == 2


def test_distances_closed_form_and_p_validation(tmp_path):
    out = tmp_path / "d.bin"
    csv = tmp_path / "d.csv"
    assert run(["distances", "--generate", "path:n=3", "--p", "3",
                "--mode", "approx", "--form", "metric",
                "--out", out, "--csv", csv]) == 0
    dm = load_distance_matrix(out)
    assert np.allclose(dm.matrix, [[0, 1, 2], [1, 0, 1], [2, 1, 0]], atol=1e-9)
    assert json.loads(dm.meta)["subcommand"] == "distances"
    assert run(["distances", "--generate", "path:n=3", "--p", "1",
                "--out", out]) == 2


def test_distances_reproducible_bytes(tmp_path):
    out = tmp_path / "a.bin"
    args = ["distances", "--generate", "gnp_connected:n=12,edge_prob=0.4",
            "--p", "2.5", "--seed", "3", "--out", out]
    assert run(args) == 0
    first = out.read_bytes()
    assert run(args) == 0
    assert out.read_bytes() == first


def test_distances_exact_mode_completes(tmp_path):
    out = tmp_path / "e.bin"
    code = run(["distances", "--generate", "gnp_connected:n=12,edge_prob=0.4",
                "--p", "2.5", "--mode", "exact", "--grad-tol", "1e-6",
                "--workers", "1", "--out", out])
    assert code in (0, 1)  # 1 only if some pair missed the gradient tol
    dm = load_distance_matrix(out)
    assert dm.n == 12 and np.isfinite(dm.matrix).all()


def test_cluster_with_labels(tmp_path):
    out = tmp_path / "d.bin"
    assert run(["distances", "--generate", "example_g3:eps=0.01", "--p", "1.5",
                "--out", out]) == 0
    labels = tmp_path / "labels.txt"
    labels.write_text("\n".join(["l", "l", "l", "l", "r", "r"]) + "\n")
    res = tmp_path / "c.json"
    assert run(["cluster", "--distances", out, "--k", "2",
                "--labels", labels, "--out", res]) == 0
    doc = json.loads(res.read_text())
    assert doc["error_rate"] == 0.0
    assert doc["config"]["version"]
    assert len(doc["assignments"]) == 6


def test_cluster_farthest_first(tmp_path):
    out = tmp_path / "d.bin"
    run(["distances", "--generate", "path:n=5", "--p", "3", "--out", out])
    res = tmp_path / "c.json"
    assert run(["cluster", "--distances", out, "--k", "2",
                "--method", "farthest-first", "--start", "0", "--out", res]) == 0
    doc = json.loads(res.read_text())
    assert doc["method"] == "farthest-first"
    assert 4 in doc["centers"]


def test_bound_cycle(tmp_path):
    out = tmp_path / "b.csv"
    assert run(["bound", "--generate", "cycle:n=20",
                "--p-grid", "1.5,2.0,5.0", "--out", out]) == 0
    lines = [l for l in out.read_text().splitlines() if l and not l.startswith("#")]
    header = lines[0].split(",")
    rows = [dict(zip(header, l.split(","))) for l in lines[1:]]
    # every absolute row sum of the cycle edge projector is 2 - 2/n
    for r in rows:
        assert float(r["projector_one_norm"]) == pytest.approx(1.9, abs=1e-9)
        assert float(r["alpha_estimate"]) <= 4.0 + 1e-9
    est_p2 = [float(r["alpha_estimate"]) for r in rows if float(r["p"]) == 2.0][0]
    assert est_p2 == pytest.approx(1.0, abs=1e-9)


def test_ratio_command(tmp_path):
    out = tmp_path / "r.csv"
    assert run(["ratio", "--generate", "gnp_connected:n=9,edge_prob=0.5",
                "--p-grid", "1.5,2.0,3.0", "--pairs", "5", "--out", out]) == 0
    lines = [l for l in out.read_text().splitlines() if l and not l.startswith("#")]
    header = lines[0].split(",")
    for line in lines[1:]:
        row = dict(zip(header, line.split(",")))
        assert float(row["ratio"]) >= 1 - 1e-6
        assert float(row["ratio"]) <= float(row["bound_pow_q"]) + 1e-9


def test_bench_command(tmp_path, blob_csv):
    out_dir = tmp_path / "bench"
    args = ["bench", "--features", blob_csv, "--labels", "last",
            "--mu-grid", "1.0", "--sigma-grid", "0.5",
            "--p-grid", "1.5,3.0", "--methods", "kmed_approx,kmed_p2,sc2",
            "--repetitions", "2", "--seed", "0", "--out-dir", out_dir]
    assert run(args) == 0
    results = (out_dir / "results.csv").read_text()
    assert results.startswith("# config:")
    # 2 p-cells for approx + 1 for p2 + 1 for sc2, 2 repetitions each
    rows = [r for r in results.splitlines() if r and not r.startswith(("#", "method"))]
    assert len(rows) == 8
    summary = json.loads((out_dir / "summary.json").read_text())
    assert summary["best"]["kmed_approx"]["error_mean"] == 0.0
    # byte-for-byte reproducibility of the results view
    first = results
    assert run(args) == 0
    assert (out_dir / "results.csv").read_text() == first
    assert (out_dir / "timing.csv").exists()


def test_verify_subset_and_fault_injection(tmp_path):
    report = tmp_path / "v.json"
    assert run(["verify", "--suite", "laplacian-identities",
                "--suite", "distance-shape", "--quiet",
                "--report", report]) == 0
    doc = json.loads(report.read_text())
    assert doc["passed"] is True
    assert run(["verify", "--suite", "distance-shape", "--quiet",
                "--inject-fault", "approx-sign"]) == 1
    # the fault never leaks into later runs
    assert run(["verify", "--suite", "distance-shape", "--quiet"]) == 0


def test_config_file_defaults(tmp_path):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"p": 3.0, "generate": "path:n=3"}))
    out = tmp_path / "d.bin"
    assert run(["--config", cfg, "distances", "--out", out]) == 0
    dm = load_distance_matrix(out)
    assert dm.p == 3.0 and dm.n == 3


def test_usage_error_exit_2(capsys):
    with pytest.raises(SystemExit) as exc:
        run(["distances", "--out", "x"])  # missing required --p
    assert exc.value.code == 2
