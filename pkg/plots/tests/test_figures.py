"""Render every figure from real run directories produced by the solver CLI."""

import subprocess
import sys

import pytest

from vbgk_plots.cli import main
from vbgk_plots.figures import PlotDataError, render

RUN = [sys.executable, "-m", "vbgk.cli"]


@pytest.fixture(scope="session")
def toy_dir(tmp_path_factory):
    out = tmp_path_factory.mktemp("toy")
    subprocess.run(RUN + ["run", "toy", "--outdir", str(out), "--nodes", "10",
                          "--t-end", "0.04", "--slice-every", "2"], check=True)
    return out


@pytest.fixture(scope="session")
def sod_dir(tmp_path_factory):
    out = tmp_path_factory.mktemp("sod")
    subprocess.run(RUN + ["run", "sod", "--outdir", str(out), "--nodes", "8",
                          "--cells", "16", "--t-end", "0.01"], check=True)
    return out


@pytest.fixture(scope="session")
def compare_dir(tmp_path_factory):
    out = tmp_path_factory.mktemp("cmp")
    subprocess.run(RUN + ["compare", "toy", "--outdir", str(out),
                          "--nodes", "8", "--t-end", "0.02",
                          "--variant-a", "power_veldep",
                          "--variant-b", "power_vhat"], check=True)
    return out


@pytest.fixture(scope="session")
def converge_dir(tmp_path_factory):
    out = tmp_path_factory.mktemp("cv")
    subprocess.run(RUN + ["converge", "appendix_convergence_c1", "--outdir",
                          str(out), "--nodes", "6", "--levels", "1",
                          "--t-end", "0.02"], check=True)
    return out


@pytest.mark.parametrize("figure", ["conservation", "entropy", "slices"])
def test_toy_figures(toy_dir, figure):
    fig = render(toy_dir, figure)
    assert fig.get_axes()


def test_shock_figure_with_reference(sod_dir):
    fig = render(sod_dir, "shock")
    assert len(fig.get_axes()) == 3


def test_reldiff_figure(compare_dir):
    assert render(compare_dir, "reldiff").get_axes()


def test_convergence_figure(converge_dir):
    assert render(converge_dir, "convergence").get_axes()


def test_unknown_figure(toy_dir):
    with pytest.raises(PlotDataError):
        render(toy_dir, "pie_chart")


def test_missing_inputs(tmp_path):
    with pytest.raises(PlotDataError):
        render(tmp_path, "conservation")


def test_cli_writes_image(toy_dir, tmp_path):
    out = tmp_path / "cons.png"
    assert main(["--run-dir", str(toy_dir), "--figure", "conservation",
                 "--out", str(out)]) == 0
    assert out.stat().st_size > 0


def test_cli_missing_csv_exit_code(tmp_path):
    assert main(["--run-dir", str(tmp_path), "--figure", "entropy",
                 "--out", str(tmp_path / "x.png")]) == 1


def test_cli_all(toy_dir, tmp_path):
    assert main(["--run-dir", str(toy_dir), "--figure", "all",
                 "--out", str(tmp_path)]) == 0
    assert (tmp_path / "conservation.png").exists()
    assert (tmp_path / "slices.png").exists()
    # shock/reldiff/convergence inputs are absent from a toy run directory
    assert not (tmp_path / "reldiff.png").exists()


def test_render_is_read_only(toy_dir):
    before = sorted(p.name for p in toy_dir.iterdir())
    render(toy_dir, "entropy")
    assert sorted(p.name for p in toy_dir.iterdir()) == before
