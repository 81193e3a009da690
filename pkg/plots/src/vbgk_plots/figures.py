"""Renderers for the standard run-directory figures.

Each renderer takes a run directory (Path) and returns a matplotlib Figure
built purely from the CSV/JSON files the solver CLI wrote there.
"""

from __future__ import annotations

import json
from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np
import pandas as pd


class PlotDataError(RuntimeError):
    """Missing or ill-formed input file."""


def _read_csv(path: Path, required=()):
    if not path.is_file():
        raise PlotDataError(f"missing input file: {path}")
    try:
        df = pd.read_csv(path)
    except Exception as exc:
        raise PlotDataError(f"cannot parse {path}: {exc}") from exc
    missing = [c for c in required if c not in df.columns]
    if missing:
        raise PlotDataError(f"{path} lacks columns {missing}")
    return df


def _read_manifest(run_dir: Path) -> dict:
    path = run_dir / "manifest.json"
    if not path.is_file():
        raise PlotDataError(f"missing input file: {path}")
    try:
        return json.loads(path.read_text())
    except json.JSONDecodeError as exc:
        raise PlotDataError(f"cannot parse {path}: {exc}") from exc


def conservation_figure(run_dir: Path):
    """Relative drift of the conserved totals over the run."""
    df = _read_csv(run_dir / "totals.csv",
                   required=["time", "mass_1", "mass_2", "momentum_x", "energy"])
    fig, ax = plt.subplots(figsize=(6, 4))
    e0 = abs(df["energy"].iloc[0])
    for col, label in (("mass_1", "mass, species 1"),
                       ("mass_2", "mass, species 2"),
                       ("momentum_x", "momentum (x)"),
                       ("energy", "energy")):
        ref = df[col].iloc[0]
        scale = abs(ref) if abs(ref) > 1e-14 * e0 else e0
        drift = np.abs(df[col] - ref) / scale
        ax.semilogy(df["time"], np.maximum(drift, 1e-18), label=label)
    ax.set_xlabel("time")
    ax.set_ylabel("relative drift")
    ax.set_title("conservation drift")
    ax.legend(fontsize=8)
    fig.tight_layout()
    return fig


def entropy_figure(run_dir: Path):
    """Entropy decay and its per-step dissipation rate."""
    df = _read_csv(run_dir / "totals.csv",
                   required=["time", "entropy", "dentropy_dt"])
    fig, (ax1, ax2) = plt.subplots(1, 2, figsize=(9, 4))
    ax1.plot(df["time"], df["entropy"])
    ax1.set_xlabel("time")
    ax1.set_ylabel("H")
    ax1.set_title("entropy")
    rate = np.abs(df["dentropy_dt"].to_numpy()[1:])
    ax2.semilogy(df["time"].to_numpy()[1:], np.maximum(rate, 1e-18))
    ax2.set_xlabel("time")
    ax2.set_ylabel("|dH/dt|")
    ax2.set_title("entropy dissipation")
    fig.tight_layout()
    return fig


def slices_figure(run_dir: Path):
    """Montage of distribution slices over time with the final equilibrium
    overlay computed from the recorded mixture columns."""
    paths = sorted(run_dir.glob("slice_*.csv"))
    if not paths:
        raise PlotDataError(f"no slice_*.csv files in {run_dir}")
    totals = _read_csv(run_dir / "totals.csv",
                       required=["n_1", "n_2", "u_mix_x", "T_mix"])
    manifest = _read_manifest(run_dir)
    masses = [s["mass"] for s in manifest["scenario"]["species"]]
    last = totals.iloc[-1]

    n_show = min(len(paths), 6)
    pick = [paths[int(round(i))] for i in np.linspace(0, len(paths) - 1, n_show)]
    fig, axes = plt.subplots(2, n_show, figsize=(2.4 * n_show, 5),
                             sharex="row", squeeze=False)
    for col, path in enumerate(pick):
        df = _read_csv(path, required=["time", "v1_1", "f_1", "v1_2", "f_2"])
        for row, (vcol, fcol, nkey, m) in enumerate(
                (("v1_1", "f_1", "n_1", masses[0]),
                 ("v1_2", "f_2", "n_2", masses[1]))):
            ax = axes[row][col]
            ax.plot(df[vcol], df[fcol], lw=1.2)
            v = df[vcol].to_numpy()
            n, u, T = last[nkey], last["u_mix_x"], last["T_mix"]
            feq = n * (m / (2 * np.pi * T)) ** 1.5 * np.exp(
                -m * (v - u) ** 2 / (2 * T))
            ax.plot(v, feq, "k--", lw=0.8)
            if row == 0:
                ax.set_title(f"t = {df['time'].iloc[0]:g}", fontsize=9)
            if col == 0:
                ax.set_ylabel(f"species {row + 1}")
    fig.suptitle("distribution slices along v1 (dashed: mixture equilibrium)")
    fig.tight_layout()
    return fig


def shock_figure(run_dir: Path):
    """Final moment profiles, with the exact gas-dynamics reference when
    the run wrote one."""
    df = _read_csv(run_dir / "moments_final.csv",
                   required=["x", "n_1", "ux_1", "T_1", "n_2", "ux_2", "T_2"])
    ref = None
    euler = run_dir / "euler_final.csv"
    if euler.is_file():
        ref = _read_csv(euler, required=["x", "rho", "ux", "T"])
        manifest = _read_manifest(run_dir)
        mass = manifest["scenario"]["species"][0]["mass"]
    fig, axes = plt.subplots(1, 3, figsize=(11, 3.5))
    panels = (("n", ("n_1", "n_2")), ("u_x", ("ux_1", "ux_2")),
              ("T", ("T_1", "T_2")))
    for ax, (label, cols) in zip(axes, panels):
        for col in cols:
            ax.plot(df["x"], df[col], lw=1.0, label=col)
        if ref is not None:
            refcol = {"n": ref["rho"] / (2 * mass), "u_x": ref["ux"],
                      "T": ref["T"]}[label]
            ax.plot(ref["x"], refcol, "k--", lw=0.9, label="exact")
        ax.set_xlabel("x")
        ax.set_ylabel(label)
        ax.legend(fontsize=7)
    fig.tight_layout()
    return fig


def reldiff_figure(run_dir: Path):
    """Relative differences between two variant runs along x."""
    df = _read_csv(run_dir / "reldiff_final.csv", required=["x"])
    cols = [c for c in df.columns if c.startswith("reldiff_")]
    if not cols:
        raise PlotDataError("reldiff_final.csv has no reldiff_* columns")
    fig, ax = plt.subplots(figsize=(6.5, 4))
    for col in cols:
        ax.semilogy(df["x"], np.maximum(np.abs(df[col]), 1e-18),
                    lw=1.0, label=col.removeprefix("reldiff_"))
    ax.set_xlabel("x")
    ax.set_ylabel("|relative difference|")
    ax.legend(fontsize=7, ncol=2)
    fig.tight_layout()
    return fig


def convergence_figure(run_dir: Path):
    """Log-log self-convergence errors with per-pair observed orders."""
    df = _read_csv(run_dir / "errors.csv",
                   required=["num_cells", "l1_error", "observed_order"])
    fig, ax = plt.subplots(figsize=(5.5, 4))
    cells = df["num_cells"].to_numpy(float)
    errs = df["l1_error"].to_numpy(float)
    ax.loglog(cells, errs, "o-")
    for i in range(1, len(cells)):
        ax.annotate(f"{df['observed_order'].iloc[i]:.2f}",
                    (cells[i], errs[i]), textcoords="offset points",
                    xytext=(5, 5), fontsize=8)
    ax.set_xlabel("cells")
    ax.set_ylabel("L1 self-convergence error")
    ax.set_title("mesh refinement")
    fig.tight_layout()
    return fig


FIGURES = {
    "slices": slices_figure,
    "entropy": entropy_figure,
    "conservation": conservation_figure,
    "shock": shock_figure,
    "reldiff": reldiff_figure,
    "convergence": convergence_figure,
}


def render(run_dir, figure: str):
    """Render one named figure from a run directory."""
    if figure not in FIGURES:
        raise PlotDataError(
            f"unknown figure {figure!r}; known: {sorted(FIGURES)}")
    return FIGURES[figure](Path(run_dir))
