"""Command-line interface tests: config parsing, exit codes, artifacts."""

import csv
import json
import os
import subprocess
import sys

import pytest

CLI = [sys.executable, "-m", "wpscat"]


def run_cli(*args, env_extra=None):
    env = dict(os.environ)
    if env_extra:
        env.update(env_extra)
    return subprocess.run(
        CLI + list(args), capture_output=True, text=True, env=env
    )


def write_config(tmp_path, body, name="exp.cfg"):
    p = tmp_path / name
    p.write_text(body)
    return str(p)


def read_csv(path):
    with open(path, newline="") as fh:
        return list(csv.reader(fh))


class TestConfigParsing:
    def test_missing_file(self, tmp_path):
        r = run_cli("run", str(tmp_path / "nope.cfg"))
        assert r.returncode == 2
        assert "config error" in r.stderr

    def test_malformed_line(self, tmp_path):
        cfg = write_config(tmp_path, "experiment transform-check\n")
        assert run_cli("run", cfg).returncode == 2

    def test_duplicate_key(self, tmp_path):
        cfg = write_config(tmp_path, "experiment = evolve\nexperiment = cook\n")
        assert run_cli("run", cfg).returncode == 2

    def test_missing_required_key(self, tmp_path):
        cfg = write_config(tmp_path, "grid.N = 64\n")  # no experiment
        assert run_cli("run", cfg).returncode == 2

    def test_unknown_experiment(self, tmp_path):
        cfg = write_config(tmp_path, "experiment = teleport\n")
        r = run_cli("run", cfg)
        assert r.returncode == 3
        assert "unknown experiment" in r.stderr


class TestValidation:
    def test_long_range_potential_rejected(self, tmp_path):
        cfg = write_config(
            tmp_path,
            "experiment = cook\n"
            "grid.dim = 1\ngrid.N = 256\ngrid.L = 20\n"
            "state.kind = gaussian\nstate.center = 0\nstate.width = 1\nstate.momentum = 1\n"
            "potential.family = power_law\npotential.delta = 0.8\npotential.coupling = 1\n"
            "schedule.t = 1,2,4\n",
        )
        r = run_cli("run", cfg, env_extra={"WPS_OUTPUT_DIR": str(tmp_path / "out")})
        assert r.returncode == 3
        assert "short range" in r.stderr


class TestList:
    def test_plain_listing(self):
        r = run_cli("list")
        assert r.returncode == 0
        for name in ("transform-check", "classify", "cook"):
            assert name in r.stdout

    def test_json_listing(self):
        r = run_cli("list", "--json")
        assert r.returncode == 0
        listing = json.loads(r.stdout)
        assert len(listing) == 9
        assert {e["name"] for e in listing} >= {"evolve", "wave-op", "orthogonality"}

    def test_no_subcommand_is_parse_error(self):
        assert run_cli().returncode == 2


class TestTransformCheck:
    def test_residuals_and_summary(self, tmp_path):
        out = tmp_path / "out"
        cfg = write_config(
            tmp_path,
            "experiment = transform-check\n"
            "grid.dim = 1\ngrid.N = 128\ngrid.L = 10\n"
            "window.kind = gaussian\nwindow.width = 0.8\n"
            "seed = 42\ncheck.count = 5\n",
        )
        r = run_cli("run", cfg, env_extra={"WPS_OUTPUT_DIR": str(out)})
        assert r.returncode == 0, r.stderr
        rows = read_csv(out / "residuals.csv")
        assert rows[0] == ["trial", "parseval", "polarization", "inversion"]
        assert len(rows) == 6
        for row in rows[1:]:
            assert all(abs(float(v)) < 1e-10 for v in row[1:])
        summary = json.loads((out / "summary.json").read_text())
        assert summary["experiment"] == "transform-check"
        assert "config_sha" in summary

    def test_deterministic_outputs(self, tmp_path):
        cfg = write_config(
            tmp_path,
            "experiment = transform-check\n"
            "grid.dim = 1\ngrid.N = 128\ngrid.L = 10\n"
            "window.kind = gaussian\nwindow.width = 0.8\n"
            "seed = 7\ncheck.count = 3\n",
        )
        outs = []
        for sub in ("a", "b"):
            out = tmp_path / sub
            r = run_cli("run", cfg, env_extra={"WPS_OUTPUT_DIR": str(out)})
            assert r.returncode == 0, r.stderr
            outs.append((out / "residuals.csv").read_bytes())
        assert outs[0] == outs[1]


class TestEvolve:
    BODY = (
        "experiment = evolve\n"
        "grid.dim = 1\ngrid.N = 256\ngrid.L = 20\n"
        "state.kind = gaussian\nstate.center = 0\nstate.width = 1\nstate.momentum = {k}\n"
        "potential.family = zero\n"
        "evolve.dt = 0.05\nevolve.T = 1.0\nevolve.stride = 10\n"
    )

    def test_trajectory_and_snapshots(self, tmp_path):
        out = tmp_path / "out"
        cfg = write_config(tmp_path, self.BODY.format(k=1))
        r = run_cli("run", cfg, env_extra={"WPS_OUTPUT_DIR": str(out)})
        assert r.returncode == 0, r.stderr
        rows = read_csv(out / "trajectory.csv")
        assert rows[0] == ["t", "norm", "boundary_mass"]
        for row in rows[1:]:
            assert float(row[1]) == pytest.approx(1.0, abs=1e-10)
        snapshots = sorted(out.glob("snapshot_*.wps"))
        assert len(snapshots) == len(rows) - 1

    def test_boundary_guard_trips(self, tmp_path):
        out = tmp_path / "out"
        body = self.BODY.format(k=8).replace("evolve.T = 1.0", "evolve.T = 4.0")
        cfg = write_config(tmp_path, body + "guard.boundary_mass = 1e-8\n")
        r = run_cli("run", cfg, env_extra={"WPS_OUTPUT_DIR": str(out)})
        assert r.returncode == 4
        assert "guard" in r.stderr


class TestCook:
    def test_integrand_csv(self, tmp_path):
        out = tmp_path / "out"
        cfg = write_config(
            tmp_path,
            "experiment = cook\n"
            "grid.dim = 1\ngrid.N = 512\ngrid.L = 40\n"
            "state.kind = gaussian\nstate.center = 0\nstate.width = 1.5\nstate.momentum = 2\n"
            "potential.family = power_law\npotential.delta = 2\n"
            "potential.coupling = 0.5\npotential.rho = 0.4\n"
            "schedule.t = 1,2,4,8\n",
        )
        r = run_cli("run", cfg, env_extra={"WPS_OUTPUT_DIR": str(out)})
        assert r.returncode == 0, r.stderr
        rows = read_csv(out / "integrand.csv")
        assert rows[0] == ["t", "value"]
        vals = [float(row[1]) for row in rows[1:]]
        assert vals[0] > vals[-1]


class TestClassifyBudget:
    BODY = (
        "experiment = classify\n"
        "grid.dim = 1\ngrid.N = 256\ngrid.L = 20\n"
        "state.kind = gaussian\nstate.center = 0\nstate.width = 1\nstate.momentum = 2\n"
        "window.kind = gaussian\nwindow.width = 1\n"
        "potential.family = zero\n"
        "evolve.dt = 0.05\nschedule.t = 0,1,2\n"
        "classify.coarsen = 4,4\n"
    )

    def test_all_masks_over_budget_rejected(self, tmp_path):
        cfg = write_config(tmp_path, self.BODY + "masks.gamma = 8:30\n")
        r = run_cli("run", cfg, env_extra={"WPS_OUTPUT_DIR": str(tmp_path / "out")})
        assert r.returncode == 3
        assert "budget" in r.stderr.lower()

    def test_classify_artifacts(self, tmp_path):
        out = tmp_path / "out"
        cfg = write_config(tmp_path, self.BODY + "masks.gamma = 0.5:5,0.25:10\n")
        r = run_cli("run", cfg, env_extra={"WPS_OUTPUT_DIR": str(out)})
        assert r.returncode == 0, r.stderr
        rows = read_csv(out / "classify.csv")
        assert rows[0] == ["t", "mask_a", "mask_R", "masked_norm", "ratio", "verdict_contrib"]
        summary = json.loads((out / "summary.json").read_text())
        assert summary["verdict"] in (
            "scattering",
            "non-scattering",
            "inconclusive",
            "scattering (trivial)",
        )


class TestWaveOpArtifacts:
    def test_tails_csv_and_final_state(self, tmp_path):
        out = tmp_path / "out"
        cfg = write_config(
            tmp_path,
            "experiment = wave-op\n"
            "grid.dim = 1\ngrid.N = 512\ngrid.L = 40\n"
            "state.kind = gaussian\nstate.center = 0\nstate.width = 1.5\nstate.momentum = 2\n"
            "potential.family = power_law\npotential.delta = 2\n"
            "potential.coupling = 0.3\npotential.rho = 0.4\n"
            "evolve.dt = 0.05\nschedule.T = 2,4,8\n"
            "run.direction = plus\nrun.tau = 0\n",
        )
        r = run_cli("run", cfg, env_extra={"WPS_OUTPUT_DIR": str(out)})
        assert r.returncode == 0, r.stderr
        rows = read_csv(out / "tails.csv")
        assert rows[0] == ["T", "tail_norm"]
        assert len(rows) == 3  # two Cauchy gaps
        assert (out / "final_state.wps").exists()
