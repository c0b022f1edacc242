import json
import subprocess
import sys

import numpy as np
import pytest

from cramer_wold import harness
from cramer_wold.cli import main
from cramer_wold.errors import InvalidArgument
from cramer_wold.io import dump_report, load_report, save_measure
from cramer_wold.measures import DiscreteMeasure1D, DiscreteMeasureND
from cramer_wold.sliced import DirectionBudget

TINY = DirectionBudget(n_directions=16, refinement_iters=10)


def tiny(kind="thm11", **kw):
    base = dict(kind=kind, seed=3, d=2, n_atoms=4, n_trials=4, budget=TINY)
    base.update(kw)
    return harness.ExperimentConfig(**base)


def stable(report: dict) -> str:
    return dump_report({k: v for k, v in report.items() if k not in ("timing", "timestamp")})


# -----------------------------------------------------------------------------
# Configuration
# -----------------------------------------------------------------------------
class TestConfig:
    @pytest.mark.parametrize("kw", [
        {"kind": "nope"}, {"seed": -1}, {"seed": 1.5}, {"d": 5}, {"n_atoms": 65}, {"q": 1.0},
        {"n_trials": 0},
    ])
    def test_rejects(self, kw):
        with pytest.raises(InvalidArgument):
            tiny(**kw)

    def test_trial_seeds_distinct_and_stable(self):
        seeds = [harness.trial_seed(1, i) for i in range(100)]
        assert len(set(seeds)) == 100
        assert seeds == [harness.trial_seed(1, i) for i in range(100)]
        assert harness.trial_seed(2, 0) != seeds[0]

    def test_calibration_keys_present(self):
        thr = harness.load_calibration()
        for d in (2, 3):
            assert harness.calibration_key("thm11", 1, 2.0, d, 8, "gaussian", "dirichlet") in thr

    @pytest.mark.parametrize("value,want", [("3", 3), ("0", 1), ("x", 1)])
    def test_threads_env(self, monkeypatch, value, want):
        monkeypatch.setenv(harness.THREADS_ENV, value)
        assert harness.n_threads() == want


# -----------------------------------------------------------------------------
# Campaigns
# -----------------------------------------------------------------------------
class TestCampaigns:
    def test_w1_campaign(self):
        rep = harness.run(tiny())
        assert rep["summary"]["passed"] and rep["summary"]["mode"] == "full verification"
        for r in rep["rows"]:
            assert r["lhs"] >= r["S"] - 1e-12 and r["implied_constant"] > 0

    def test_byte_identical(self):
        assert stable(harness.run(tiny())) == stable(harness.run(tiny()))

    def test_threads_do_not_change_rows(self, monkeypatch):
        monkeypatch.setenv(harness.THREADS_ENV, "1")
        one = stable(harness.run(tiny()))
        monkeypatch.setenv(harness.THREADS_ENV, "4")
        assert stable(harness.run(tiny())) == one

    def test_no_wall_clock_in_rows(self):
        rep = harness.run(tiny())
        assert all("time" not in key for r in rep["rows"] for key in r)

    def test_identical_measures_trivial(self):
        mu = DiscreteMeasureND([[0.0, 1.0], [2.0, -1.0]], [0.5, 0.5], True)
        row = harness._projection_row(tiny(), 0, 0, mu, mu, 0.0, 1, True)
        assert row["status"] == "trivial" and row["implied_constant"] is None

    def test_collinear_supports(self):
        # all mass on one line: the sliced value along it equals the transport cost
        mu = DiscreteMeasureND([[0.0, 0.0], [1.0, 1.0]], [0.5, 0.5], True)
        nu = DiscreteMeasureND([[2.0, 2.0], [3.0, 3.0]], [0.5, 0.5], True)
        from cramer_wold.transport import w1_exact
        lhs = w1_exact(mu, nu).cost
        row = harness._projection_row(tiny(), 0, 0, mu, nu, lhs, 1, True)
        assert row["S"] == pytest.approx(lhs, rel=1e-12)
        assert np.abs(row["argmax_theta"]) == pytest.approx([2**-0.5] * 2)

    def test_zeta_line_campaign(self):
        rep = harness.run(tiny("thm12", p=2, q=3.0, d=1, n_atoms=8))
        assert rep["summary"]["mode"] == "full verification" and rep["summary"]["passed"]
        assert all(r["lhs"] >= r["S"] * (1 - 1e-12) for r in rep["rows"])

    def test_zeta_plane_campaign_labeled(self):
        rep = harness.run(tiny("thm12", p=2, q=3.0, d=2, n_atoms=6))
        assert rep["summary"]["mode"] == harness.PARTIAL_LABEL
        assert all("lhs" not in r and r["chain_holds"] for r in rep["rows"])

    def test_kernel_audit(self):
        rep = harness.run(tiny("kernel_audit"))
        assert rep["summary"]["passed"] and len(rep["rows"]) == 30


# -----------------------------------------------------------------------------
# Output files
# -----------------------------------------------------------------------------
class TestOutputs:
    def test_json_csv(self, tmp_path):
        rep = harness.run(tiny())
        paths = harness.write_outputs(rep, tmp_path / "out" / "run.json")
        assert load_report(paths["json"])["kind"] == "thm11"
        lines = paths["csv"].read_text().splitlines()
        assert lines[0].startswith("index,seed,S,b,beta") and len(lines) == 5
        assert "replay" not in paths

    def test_replay_files(self, tmp_path):
        rep = harness.run(tiny("kernel_audit"))
        rep["rows"][3]["passed"] = False
        rep["rows"][7]["passed"] = False
        paths = harness.write_outputs(rep, tmp_path / "audit")
        files = sorted(paths["replay"].iterdir())
        assert [f.name for f in files] == ["0000.json", "0001.json"]
        payload = json.loads(files[1].read_text())
        assert payload["row"]["instance"] == rep["rows"][7]["instance"]
        assert payload["config"]["seed"] == 3


# -----------------------------------------------------------------------------
# Command line
# -----------------------------------------------------------------------------
class TestCli:
    def test_kernel_build(self, capsys):
        assert main(["kernel", "build", "--p", "2", "--d", "1"]) == 0
        out = json.loads(capsys.readouterr().out)
        assert out["a"] == [2.0, -1.0] and out["b"] == [0.5, 1.0]

    def test_bump_build(self, capsys, tmp_path):
        assert main(["bump", "build", "--p", "1", "--out", str(tmp_path / "b.csv")]) == 0
        assert json.loads(capsys.readouterr().out)["normalizer"] == "1/6"
        assert (tmp_path / "b.csv").exists()

    def test_distances(self, capsys, tmp_path):
        a = save_measure(DiscreteMeasure1D(np.array([0.0, 1.0]), np.array([0.5, 0.5])), tmp_path / "a.json", True)
        b = save_measure(DiscreteMeasure1D(np.array([0.0, 2.0]), np.array([0.5, 0.5])), tmp_path / "b.json", True)
        assert main(["dist", "w1", "--input", str(a), "--input", str(b)]) == 0
        assert json.loads(capsys.readouterr().out)["value"] == pytest.approx(0.5)
        assert main(["oracle", "w1", "--input", str(a), "--input", str(b)]) == 0
        assert json.loads(capsys.readouterr().out)["cost"] == pytest.approx(0.5)

    def test_sliced(self, capsys, tmp_path):
        a = save_measure(DiscreteMeasureND.dirac([0.0, 0.0]), tmp_path / "a.json", True)
        b = save_measure(DiscreteMeasureND.dirac([3.0, 4.0]), tmp_path / "b.json", True)
        assert main(["sliced", "--input", str(a), "--input", str(b), "--budget", "8"]) == 0
        assert json.loads(capsys.readouterr().out)["value"] == pytest.approx(5.0)

    def test_domain_error_exit_code(self, capsys, tmp_path):
        a = save_measure(DiscreteMeasure1D.dirac(0.0), tmp_path / "a.json", True)
        b = save_measure(DiscreteMeasure1D.dirac(1.0), tmp_path / "b.json", True)
        assert main(["dist", "zeta", "--p", "2", "--input", str(a), "--input", str(b)]) == 2
        assert "moment" in capsys.readouterr().err
        assert main(["dist", "w1", "--input", str(a)]) == 2

    def test_verify_writes_report(self, tmp_path, capsys):
        out = tmp_path / "thm11.json"
        code = main(["verify", "thm11", "--trials", "3", "--n", "4", "--budget", "16", "--seed", "5",
                     "--out", str(out)])
        assert code == 0
        assert "PASS  projection_contraction" in capsys.readouterr().out
        assert load_report(out)["config"]["seed"] == 5

    def test_module_entry(self):
        proc = subprocess.run([sys.executable, "-m", "cramer_wold.cli", "kernel", "build", "--p", "1", "--d", "2"],
                              capture_output=True, text=True, check=True)
        assert json.loads(proc.stdout)["d"] == 2
