"""Figure-rendering tests against shipped artifact fixtures."""

import os
import subprocess
import sys

import pytest

HERE = os.path.dirname(os.path.abspath(__file__))
DATA = os.path.join(HERE, "data")
PLOT = os.path.join(HERE, "..", "plot.py")


def run_plot(*args):
    return subprocess.run(
        [sys.executable, PLOT, *args], capture_output=True, text=True
    )


def data(name):
    return os.path.join(DATA, name)


class TestDecayLoglog:
    def test_tails_figure_renders(self, tmp_path):
        out = tmp_path / "tails.png"
        r = run_plot("decay_loglog", data("tails.csv"), "-o", str(out), "--delta", "2")
        assert r.returncode == 0, r.stderr
        assert out.stat().st_size > 0

    def test_remainder_figure_renders(self, tmp_path):
        out = tmp_path / "rem.png"
        r = run_plot("decay_loglog", data("remainder.csv"), "-o", str(out), "--delta", "2")
        assert r.returncode == 0, r.stderr
        assert out.exists()

    def test_combined_inputs(self, tmp_path):
        out = tmp_path / "both.png"
        r = run_plot(
            "decay_loglog", data("tails.csv"), data("remainder.csv"),
            "-o", str(out), "--delta", "2",
        )
        assert r.returncode == 0, r.stderr

    def test_reference_line_is_prediction_not_fit(self, tmp_path):
        # same data, two different deltas -> different figures, since the
        # reference line comes from the prediction alone
        a = tmp_path / "a.png"
        b = tmp_path / "b.png"
        assert run_plot("decay_loglog", data("tails.csv"), "-o", str(a), "--delta", "2").returncode == 0
        assert run_plot("decay_loglog", data("tails.csv"), "-o", str(b), "--delta", "1.5").returncode == 0
        assert a.read_bytes() != b.read_bytes()

    def test_deterministic_rerender(self, tmp_path):
        a = tmp_path / "a.png"
        b = tmp_path / "b.png"
        for out in (a, b):
            r = run_plot("decay_loglog", data("tails.csv"), "-o", str(out), "--delta", "2")
            assert r.returncode == 0, r.stderr
        assert a.read_bytes() == b.read_bytes()

    def test_missing_delta_rejected(self, tmp_path):
        r = run_plot("decay_loglog", data("tails.csv"), "-o", str(tmp_path / "x.png"))
        assert r.returncode != 0

    def test_schema_mismatch_reports_columns(self, tmp_path):
        bad = tmp_path / "bad.csv"
        bad.write_text("T,wrong_col\n1.0,2.0\n")
        out = tmp_path / "x.png"
        r = run_plot("decay_loglog", str(bad), "-o", str(out), "--delta", "2")
        assert r.returncode == 1
        assert "schema error" in r.stderr
        assert not out.exists()

    def test_empty_csv_writes_nothing(self, tmp_path):
        empty = tmp_path / "empty.csv"
        empty.write_text("")
        out = tmp_path / "x.png"
        r = run_plot("decay_loglog", str(empty), "-o", str(out), "--delta", "2")
        assert r.returncode == 1
        assert not out.exists()

    def test_header_only_csv_rejected(self, tmp_path):
        hdr = tmp_path / "hdr.csv"
        hdr.write_text("T,tail_norm\n")
        r = run_plot("decay_loglog", str(hdr), "-o", str(tmp_path / "x.png"), "--delta", "2")
        assert r.returncode == 1


class TestPhaseHeatmap:
    def test_renders_with_mask_overlay(self, tmp_path):
        out = tmp_path / "heat.png"
        r = run_plot(
            "phase_heatmap", data("field.wpf"), "-o", str(out),
            "--mask-a", "1", "--mask-R", "4",
        )
        assert r.returncode == 0, r.stderr
        assert out.stat().st_size > 0

    def test_renders_without_mask(self, tmp_path):
        out = tmp_path / "heat.png"
        r = run_plot("phase_heatmap", data("field.wpf"), "-o", str(out))
        assert r.returncode == 0, r.stderr

    def test_bad_magic_rejected(self, tmp_path):
        bad = tmp_path / "bad.wpf"
        bad.write_bytes(b"JUNK" + b"\x00" * 40)
        out = tmp_path / "x.png"
        r = run_plot("phase_heatmap", str(bad), "-o", str(out))
        assert r.returncode == 1
        assert "magic" in r.stderr
        assert not out.exists()

    def test_truncated_payload_rejected(self, tmp_path):
        src = open(data("field.wpf"), "rb").read()
        bad = tmp_path / "trunc.wpf"
        bad.write_bytes(src[: len(src) // 2])
        r = run_plot("phase_heatmap", str(bad), "-o", str(tmp_path / "x.png"))
        assert r.returncode == 1


class TestVerdictPanel:
    def test_bound_state_panel_all_non_scattering(self, tmp_path):
        out = tmp_path / "panel.png"
        r = run_plot("verdict_panel", data("classify.csv"), "-o", str(out))
        assert r.returncode == 0, r.stderr
        assert out.stat().st_size > 0
        # fixture is a bound-state run: every contribution is non-scattering
        import csv

        with open(data("classify.csv")) as fh:
            rows = list(csv.DictReader(fh))
        assert rows and all(r2["verdict_contrib"] == "non-scattering" for r2 in rows)

    def test_schema_mismatch(self, tmp_path):
        bad = tmp_path / "bad.csv"
        bad.write_text("t,mask_a\n0,1\n")
        r = run_plot("verdict_panel", str(bad), "-o", str(tmp_path / "x.png"))
        assert r.returncode == 1
        assert "missing" in r.stderr


class TestLibraryReaders:
    def test_read_csv_table_types(self):
        sys.path.insert(0, os.path.join(HERE, "..", "src"))
        from wpsplot.io import read_csv_table

        cols = read_csv_table(
            data("classify.csv"),
            ["t", "mask_a", "mask_R", "masked_norm", "ratio", "verdict_contrib"],
        )
        assert cols["t"].dtype.kind == "f"
        assert isinstance(cols["verdict_contrib"], list)

    def test_load_field_axes(self):
        sys.path.insert(0, os.path.join(HERE, "..", "src"))
        from wpsplot.io import load_field_file

        field = load_field_file(data("field.wpf"))
        assert field["dim"] == 1 and field["N"] == 64
        assert field["values"].shape == (64, 64)
        assert field["x_axis"][0] == -field["L"]
