import csv
import json
import logging
import os

import numpy as np
import pytest
from numpy.testing import assert_allclose

from wigner_cs.cache import read_samples_csv
from wigner_cs.cli import main
from wigner_cs.constants import ModeKind, Stream
from wigner_cs.harness import optimizer_chi_mode
from wigner_cs.optim import initial_angles
from wigner_cs.sampling import spiral
from wigner_cs.seeds import derive_rng
from wigner_cs.sensing import build_matrix, coherence


@pytest.fixture(autouse=True)
def clean_env(monkeypatch):
    monkeypatch.delenv("WIGNER_CS_OUTPUT_DIR", raising=False)
    monkeypatch.delenv("WIGNER_CS_JOBS", raising=False)
    root = logging.getLogger()
    level = root.level
    yield
    for handler in [h for h in root.handlers if getattr(h, "_wigner_cs", False)]:
        root.removeHandler(handler)
        handler.close()
    root.setLevel(level)


def read_bytes(path):
    with open(path, "rb") as fh:
        return fh.read()


def read_rows(path):
    with open(path, encoding="utf-8", newline="") as fh:
        return list(csv.DictReader(fh))


def test_sample_spiral(tmp_path):
    out = tmp_path / "out"
    assert main(["sample", "--sampler", "spiral", "--k", "100", "--output-dir", str(out)]) == 0
    samples = read_samples_csv(str(out / "samples.csv"))
    assert samples.K == 100
    assert_allclose(samples.stacked(), spiral(100).stacked())
    config = json.loads((out / "resolved_config.json").read_text(encoding="utf-8"))
    assert config["K"] == 100 and config["sampler"] == "spiral"
    assert list(config) == sorted(config)


def test_sample_random_is_deterministic(tmp_path):
    for name in ("a", "b"):
        argv = ["sample", "--sampler", "random", "--k", "10", "--seed", "7", "--output-dir", str(tmp_path / name)]
        assert main(argv) == 0
    for file in ("samples.csv", "samples.csv.json"):
        assert read_bytes(tmp_path / "a" / file) == read_bytes(tmp_path / "b" / file)


def test_sample_with_chi_policy(tmp_path):
    argv = ["sample", "--sampler", "hammersley", "--k", "6", "--chi-policy", "even", "--output-dir", str(tmp_path)]
    assert main(argv) == 0
    assert_allclose(read_samples_csv(str(tmp_path / "samples.csv")).chi, 2 * np.pi * np.arange(6) / 6)


def test_usage_errors(tmp_path):
    with pytest.raises(SystemExit) as info:
        main(["sample", "--sampler", "fibonacci", "--output-dir", str(tmp_path)])
    assert info.value.code == 2
    with pytest.raises(SystemExit) as info:
        main(["sample", "--set", "colour=blue", "--output-dir", str(tmp_path)])
    assert info.value.code == 2
    with pytest.raises(SystemExit) as info:
        main(["sample", "--config", str(tmp_path / "missing.toml")])
    assert info.value.code == 2


def test_runtime_error_exit_code(tmp_path):
    assert main(["sample", "--sampler", "spiral", "--k", "1", "--output-dir", str(tmp_path)]) == 3


def test_coherence_matches_library(tmp_path, capsys):
    out = str(tmp_path)
    assert main(["sample", "--sampler", "spiral", "--k", "97", "--output-dir", out]) == 0
    samples_path = os.path.join(out, "samples.csv")
    assert main(["coherence", "--kind", "sh", "--n", "9", "--samples", samples_path, "--output-dir", out,
                 "--export-matrix", "csv"]) == 0
    report = json.loads((tmp_path / "coherence.json").read_text(encoding="utf-8"))
    expected = coherence(build_matrix(ModeKind.SPHERICAL_HARMONICS, 9, read_samples_csv(samples_path)))
    assert report["mu"] == expected.mu
    assert report["argmax_pair"] == list(expected.argmax_pair)
    assert report["L"] == 99
    assert json.loads(capsys.readouterr().out)["mu"] == expected.mu
    modes = json.loads((tmp_path / "modes.json").read_text(encoding="utf-8"))
    assert modes["L"] == 99 and modes["modes"][0] == [1, -1]
    assert (tmp_path / "matrix.csv").exists()


def test_coherence_warns_on_repeated_samples(tmp_path, caplog):
    path = tmp_path / "dup.csv"
    path.write_text("theta,phi,chi\n" + "1.0,0.5,0.0\n" * 4, encoding="utf-8")
    with caplog.at_level(logging.WARNING):
        assert main(["coherence", "--kind", "sh", "--n", "2", "--samples", str(path),
                     "--output-dir", str(tmp_path)]) == 0
    assert any("repeated" in rec.getMessage() for rec in caplog.records)
    report = json.loads((tmp_path / "coherence.json").read_text(encoding="utf-8"))
    assert report["mu"] == pytest.approx(1.0)


def test_coherence_input_errors(tmp_path):
    assert main(["coherence", "--samples", str(tmp_path / "missing.csv"), "--output-dir", str(tmp_path)]) == 2
    assert main(["coherence", "--output-dir", str(tmp_path)]) == 2


def test_optimize_zero_step(tmp_path):
    argv = ["optimize", "--algo", "gd", "--kind", "sh", "--n", "2", "--k", "8", "--T", "1", "--eta", "0",
            "--restarts", "1", "--seed", "4"]
    assert main(argv + ["--output-dir", str(tmp_path / "a")]) == 0
    kind = ModeKind.SPHERICAL_HARMONICS
    start = initial_angles(kind, 8, optimizer_chi_mode(kind), derive_rng(4, Stream.OPTIMIZER_INIT, 0))
    assert_allclose(read_samples_csv(str(tmp_path / "a" / "samples.csv")).stacked(), start.stacked())
    run = json.loads((tmp_path / "a" / "run.json").read_text(encoding="utf-8"))
    assert run["iterations_used"] == 1
    assert len((tmp_path / "a" / "rho_trace.dat").read_text(encoding="utf-8").splitlines()) == 2
    assert (tmp_path / "a" / "optimized.db").exists()


def test_optimize_is_deterministic(tmp_path):
    argv = ["optimize", "--algo", "alm", "--kind", "sh", "--n", "2", "--k", "8", "--T", "4", "--restarts", "2",
            "--seed", "1", "--jobs", "2"]
    for name in ("a", "b"):
        assert main(argv + ["--output-dir", str(tmp_path / name)]) == 0
    for file in ("run.json", "samples.csv", "rho_trace.dat"):
        assert read_bytes(tmp_path / "a" / file) == read_bytes(tmp_path / "b" / file)


def test_recover_synthetic(tmp_path):
    out = str(tmp_path)
    assert main(["sample", "--sampler", "spiral", "--k", "16", "--output-dir", out]) == 0
    samples_path = os.path.join(out, "samples.csv")
    assert main(["recover", "--kind", "sh", "--n", "2", "--samples", samples_path, "--sparsity", "2",
                 "--output-dir", out]) == 0
    result = json.loads((tmp_path / "recovery.json").read_text(encoding="utf-8"))
    assert result["relative_error"] < 1e-3
    assert len(read_rows(os.path.join(out, "coefficients.csv"))) == 8

    # the written measurements can be fed back in
    assert main(["recover", "--kind", "sh", "--n", "2", "--samples", samples_path,
                 "--measurements", os.path.join(out, "measurements.csv"), "--output-dir", out]) == 0
    again = json.loads((tmp_path / "recovery.json").read_text(encoding="utf-8"))
    assert again["l1_value"] == pytest.approx(result["l1_value"])


def test_recover_rejects_wrong_measurement_count(tmp_path):
    out = str(tmp_path)
    assert main(["sample", "--sampler", "spiral", "--k", "8", "--output-dir", out]) == 0
    y = tmp_path / "y.csv"
    y.write_text("re,im\n1.0,0.0\n", encoding="utf-8")
    assert main(["recover", "--kind", "sh", "--n", "2", "--samples", os.path.join(out, "samples.csv"),
                 "--measurements", str(y), "--output-dir", out]) == 2


def test_phase_tiny_grid(tmp_path):
    argv = ["phase", "--kind", "sh", "--n", "2", "--sampler", "random", "--trials", "2",
            "--set", "k_over_l=[1.0, 0.5]", "--set", "s_over_k=[0.25, 0.5]"]
    for name in ("a", "b"):
        assert main(argv + ["--output-dir", str(tmp_path / name), "--jobs", "2" if name == "a" else "1"]) == 0
    rows = read_rows(str(tmp_path / "a" / "phase.csv"))
    assert len(rows) == 4
    assert {float(r["success_rate"]) for r in rows} <= {0.0, 0.5, 1.0}
    for file in ("phase.csv", "phase.json", "contour50.dat"):
        assert read_bytes(tmp_path / "a" / file) == read_bytes(tmp_path / "b" / file)


def test_farfield_oversampled(tmp_path):
    argv = ["farfield", "--n", "2", "--k-list", "32", "--sampler", "spiral", "--sparsity", "3",
            "--set", "reference_step_deg=30.0", "--output-dir", str(tmp_path)]
    assert main(argv) == 0
    rows = read_rows(str(tmp_path / "farfield_errors.csv"))
    assert [r["method"] for r in rows] == ["spiral", "equiangular_ls"]
    assert all(float(r["max_db"]) < 0.01 for r in rows)
    assert (tmp_path / "cut_truth.csv").exists()
    assert (tmp_path / "cut_spiral_K32.csv").exists()


def test_farfield_rejects_equiangular_sampler(tmp_path):
    with pytest.raises(SystemExit):
        main(["farfield", "--sampler", "equiangular", "--output-dir", str(tmp_path)])
    assert main(["farfield", "--set", "sampler=equiangular", "--output-dir", str(tmp_path)]) == 2


def test_benchmark(tmp_path):
    argv = ["benchmark", "--kind", "sh", "--n", "2", "--k-list", "6,10", "--samplers", "spiral,random",
            "--restarts", "2", "--p-values", "2,8", "--set", "T=3", "--output-dir", str(tmp_path)]
    assert main(argv) == 0
    rows = read_rows(str(tmp_path / "benchmark.csv"))
    assert [(r["sampler"], r["K"]) for r in rows] == [("spiral", "6"), ("spiral", "10"), ("random", "6"),
                                                    ("random", "10")]
    assert len((tmp_path / "coherence_spiral.dat").read_text(encoding="utf-8").splitlines()) == 2
    assert len(read_rows(str(tmp_path / "lp_sweep.csv"))) == 2


def test_log_file(tmp_path):
    log = tmp_path / "run.log"
    assert main(["sample", "--k", "5", "--output-dir", str(tmp_path), "--log-file", str(log)]) == 0
    text = log.read_text(encoding="utf-8")
    assert "Wrote 5 samples" in text
    assert "\033[" not in text
