"""Command-line driver: exit codes, CSV outputs, determinism."""

import csv
import json
from pathlib import Path

import numpy as np
import pytest

from vbgk.cli import main

TOY_ARGS = ["run", "toy", "--nodes", "10", "--t-end", "0.03"]


def _read_csv(path):
    with open(path) as fh:
        rows = list(csv.reader(fh))
    return rows[0], np.array(rows[1:], dtype=float)


def test_run_toy(tmp_path):
    out = tmp_path / "toy"
    assert main(TOY_ARGS + ["--outdir", str(out)]) == 0
    header, data = _read_csv(out / "totals.csv")
    assert header[:4] == ["time", "dt", "mass_1", "mass_2"]
    assert data.shape[0] == 4  # initial row + 3 steps of 0.01
    assert data[-1, 0] == pytest.approx(0.03, rel=1e-12)
    manifest = json.loads((out / "manifest.json").read_text())
    assert manifest["scenario"]["name"] == "toy"
    assert "totals.csv" in manifest["outputs"]
    mheader, mdata = _read_csv(out / "moments_final.csv")
    assert mheader == ["x", "n_1", "ux_1", "T_1", "n_2", "ux_2", "T_2"]


def test_unknown_scenario_exit_code(tmp_path):
    assert main(["run", "unknown_name", "--outdir", str(tmp_path)]) == 2


def test_bad_flag_exit_code(tmp_path):
    assert main(["run", "toy", "--outdir", str(tmp_path), "--order", "7"]) == 2


def test_bitwise_reproducible(tmp_path):
    a, b = tmp_path / "a", tmp_path / "b"
    assert main(TOY_ARGS + ["--outdir", str(a)]) == 0
    assert main(TOY_ARGS + ["--outdir", str(b)]) == 0
    for name in ("totals.csv", "moments_final.csv"):
        assert (a / name).read_bytes() == (b / name).read_bytes()


def test_slices(tmp_path):
    out = tmp_path / "sl"
    assert main(TOY_ARGS + ["--outdir", str(out), "--slice-every", "2"]) == 0
    header, data = _read_csv(out / "slice_0002.csv")
    assert header == ["time", "v1_1", "f_1", "v1_2", "f_2"]
    assert data.shape[0] == 10  # one row per node along the axis
    assert np.all(data[:, 0] == 0.02)


def test_compare(tmp_path):
    out = tmp_path / "cmp"
    code = main(["compare", "toy", "--outdir", str(out), "--nodes", "10",
                 "--t-end", "0.02", "--variant-a", "power_veldep",
                 "--variant-b", "power_vhat"])
    assert code == 0
    header, data = _read_csv(out / "reldiff_final.csv")
    assert header[0] == "x" and header[1] == "reldiff_n_1"
    assert np.all(np.abs(data[:, 1:]) <= 1.0)
    assert (out / "a" / "totals.csv").exists()
    assert (out / "b" / "totals.csv").exists()


def test_converge(tmp_path):
    out = tmp_path / "cv"
    code = main(["converge", "appendix_convergence_c1", "--outdir", str(out),
                 "--nodes", "6", "--levels", "1", "--t-end", "0.02"])
    assert code == 0
    header, data = _read_csv(out / "errors.csv")
    assert header == ["level", "num_cells", "dt", "l1_error", "observed_order"]
    assert data.shape[0] == 1
    assert data[0, 3] > 0


def test_converge_rejects_homogeneous(tmp_path):
    assert main(["converge", "toy", "--outdir", str(tmp_path)]) == 2


def test_totals_columns_finite(tmp_path):
    out = tmp_path / "fin"
    assert main(TOY_ARGS + ["--outdir", str(out)]) == 0
    _, data = _read_csv(out / "totals.csv")
    assert np.all(np.isfinite(data))
