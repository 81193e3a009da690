"""Command-line driver.

Subcommands:
  run       simulate one named scenario and write CSV diagnostics
  compare   run a scenario under two frequency variants and difference them
  converge  mesh-refinement self-convergence study

All CSVs carry 17 significant digits and are produced by deterministic
ordered reductions, so repeated runs are bitwise identical.

Exit codes: 0 success, 2 configuration error, 3 solver failure, 4 I/O error.
"""

from __future__ import annotations

import argparse
import csv
import json
import math
import sys
from pathlib import Path

import numpy as np

from vbgk import diagnostics, scenarios
from vbgk.dual import DualSolverError
from vbgk.moments import mixture_state, species_moments
from vbgk.scenarios import ScenarioError
from vbgk.stepper import Simulation, SolverError

FMT = "%.17g"


def _fmt(x) -> str:
    return FMT % float(x)


def write_csv(path: Path, header, rows):
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(header)
        for row in rows:
            writer.writerow([_fmt(v) for v in row])


class TotalsRecorder:
    """Accumulates one totals row per step (plus the initial state)."""

    HEADER = [
        "time", "dt", "mass_1", "mass_2",
        "momentum_x", "momentum_y", "momentum_z", "energy",
        "entropy", "dentropy_dt", "max_newton_iterations",
        "n_1", "n_2", "ux_1", "ux_2", "T_1", "T_2", "u_mix_x", "T_mix",
    ]

    def __init__(self, sim: Simulation):
        self.rows = []
        self._last_entropy = None
        self.record(sim, dt=0.0, newton=0)

    def record(self, sim: Simulation, dt: float, newton: int):
        dx = 1.0 if sim.mesh is None else sim.mesh.dx
        tot = diagnostics.conserved_totals(
            sim.f1, sim.f2, *sim.grids, *sim.sp, dx=dx)
        H = diagnostics.entropy(sim.f1, sim.f2, *sim.grids, dx=dx)
        dHdt = 0.0 if (self._last_entropy is None or dt == 0.0) else (H - self._last_entropy) / dt
        self._last_entropy = H
        m1 = species_moments(sim.f1, sim.grids[0], sim.sp[0])
        m2 = species_moments(sim.f2, sim.grids[1], sim.sp[1])
        a = scenarios._aggregate_species(m1.n, m1.u, m1.T, sim.sp[0])
        b = scenarios._aggregate_species(m2.n, m2.u, m2.T, sim.sp[1])
        mix = mixture_state(a, b)
        self.rows.append([
            sim.time, dt, tot["mass_1"], tot["mass_2"],
            tot["momentum"][0], tot["momentum"][1], tot["momentum"][2],
            tot["energy"], H, dHdt, newton,
            a.n, b.n, a.u[0], b.u[0], a.T, b.T, mix.u_mix[0], mix.T_mix,
        ])


def write_moments(path: Path, sim: Simulation):
    m1 = species_moments(sim.f1, sim.grids[0], sim.sp[0])
    m2 = species_moments(sim.f2, sim.grids[1], sim.sp[1])
    x = np.array([0.0]) if sim.mesh is None else sim.mesh.centers
    n1 = np.atleast_1d(m1.n)
    n2 = np.atleast_1d(m2.n)
    rows = np.column_stack([
        x, n1, np.atleast_2d(m1.u)[:, 0], np.atleast_1d(m1.T),
        n2, np.atleast_2d(m2.u)[:, 0], np.atleast_1d(m2.T),
    ])
    write_csv(path, ["x", "n_1", "ux_1", "T_1", "n_2", "ux_2", "T_2"], rows)


def write_slice(path: Path, sim: Simulation, cell: int = 0):
    """Distribution values along the v1 axis through the grid center."""
    rows = []
    for f, grid in ((sim.f1, sim.grids[0]), (sim.f2, sim.grids[1])):
        N = grid.nodes_per_axis
        c = N // 2
        idx = np.arange(N) * N * N + c * N + c
        rows.append((grid.nodes[idx, 0], f[cell, idx]))
    (v1a, fa), (v1b, fb) = rows
    t = np.full(v1a.size, sim.time)
    write_csv(path, ["time", "v1_1", "f_1", "v1_2", "f_2"],
              np.column_stack([t, v1a, fa, v1b, fb]))


def write_euler_reference(path: Path, sim: Simulation, scenario):
    """Exact gas-dynamics reference for the shock-tube setup."""
    x = sim.mesh.centers
    (n1, u1, T1), (n2, u2, T2) = scenarios.initial_profiles(scenario, np.array([scenario.x_min, scenario.x_max]))
    m = scenario.sp1.mass
    rho_l = m * (n1[0] + n2[0])
    rho_r = m * (n1[1] + n2[1])
    p_l = (n1[0] * T1[0] + n2[0] * T2[0])
    p_r = (n1[1] * T1[1] + n2[1] * T2[1])
    t = max(sim.time, 1e-300)
    rho, u, p = diagnostics.euler_exact_riemann(
        x / t, rho_l, u1[0, 0], p_l, rho_r, u1[1, 0], p_r)
    T = p / (rho / m)
    write_csv(path, ["x", "rho", "ux", "p", "T"], np.column_stack([x, rho, u, p, T]))


def _run_one(scenario, outdir: Path, snapshot_every: int, slice_every: int = 0):
    sim = scenarios.build_simulation(scenario)
    dt = scenario.dt if scenario.dt is not None else sim.cfl_dt()
    recorder = TotalsRecorder(sim)
    snapshots = []
    if slice_every:
        write_slice(outdir / "slice_0000.csv", sim)
        snapshots.append("slice_0000.csv")

    def on_step(s, info):
        recorder.record(s, dt=info.dt, newton=info.max_newton_iterations)
        if snapshot_every and s.step_count % snapshot_every == 0:
            name = f"moments_{s.step_count:04d}.csv"
            write_moments(outdir / name, s)
            snapshots.append(name)
        if slice_every and s.step_count % slice_every == 0:
            name = f"slice_{s.step_count:04d}.csv"
            write_slice(outdir / name, s)
            snapshots.append(name)

    sim.run(scenario.t_end, dt, on_step=on_step)
    write_csv(outdir / "totals.csv", TotalsRecorder.HEADER, recorder.rows)
    write_moments(outdir / "moments_final.csv", sim)
    outputs = ["totals.csv", "moments_final.csv"] + snapshots
    if scenario.name == "sod":
        write_euler_reference(outdir / "euler_final.csv", sim, scenario)
        outputs.append("euler_final.csv")
    return sim, outputs


def _write_manifest(outdir: Path, scenario, args_dict, outputs):
    args_dict = {k: v for k, v in args_dict.items()
                 if isinstance(v, (str, int, float, bool, type(None)))}
    manifest = {
        "scenario": scenarios.describe(scenario),
        "arguments": args_dict,
        "outputs": outputs,
    }
    with open(outdir / "manifest.json", "w") as fh:
        json.dump(manifest, fh, indent=2)


def cmd_run(args) -> int:
    scenario = scenarios.get_scenario(
        args.scenario, nodes_per_axis=args.nodes, num_cells=args.cells,
        dt=args.dt, t_end=args.t_end, variant=args.variant,
        transport_order=args.order, scheme=args.scheme)
    outdir = Path(args.outdir)
    outdir.mkdir(parents=True, exist_ok=True)
    _, outputs = _run_one(scenario, outdir, args.snapshot_every, args.slice_every)
    _write_manifest(outdir, scenario, vars(args) | {"command": "run"}, outputs)
    return 0


def cmd_compare(args) -> int:
    outdir = Path(args.outdir)
    outdir.mkdir(parents=True, exist_ok=True)
    finals = []
    scenario = None
    for tag, variant in (("a", args.variant_a), ("b", args.variant_b)):
        scenario = scenarios.get_scenario(
            args.scenario, nodes_per_axis=args.nodes, num_cells=args.cells,
            dt=args.dt, t_end=args.t_end, variant=variant,
            transport_order=args.order, scheme=args.scheme)
        sub = outdir / tag
        sub.mkdir(exist_ok=True)
        sim, outputs = _run_one(scenario, sub, args.snapshot_every)
        _write_manifest(sub, scenario, vars(args) | {"command": "compare", "variant": variant}, outputs)
        finals.append(sub / "moments_final.csv")

    with open(finals[0]) as fa, open(finals[1]) as fb:
        ra = list(csv.reader(fa))
        rb = list(csv.reader(fb))
    header = ra[0]
    a = np.array(ra[1:], dtype=float)
    b = np.array(rb[1:], dtype=float)
    rel = diagnostics.relative_difference(a[:, 1:], b[:, 1:])
    write_csv(outdir / "reldiff_final.csv",
              [header[0]] + ["reldiff_" + h for h in header[1:]],
              np.column_stack([a[:, 0], rel]))
    _write_manifest(outdir, scenario, vars(args) | {"command": "compare"},
                    ["a", "b", "reldiff_final.csv"])
    return 0


def cmd_converge(args) -> int:
    base = scenarios.get_scenario(
        args.scenario, nodes_per_axis=args.nodes, t_end=args.t_end,
        transport_order=args.order, scheme=args.scheme)
    if base.homogeneous:
        raise ScenarioError("convergence study needs a spatial scenario")
    outdir = Path(args.outdir)
    outdir.mkdir(parents=True, exist_ok=True)

    # base dt divides t_end exactly and halves with the mesh width
    sim0 = scenarios.build_simulation(base)
    dt0 = base.t_end / math.ceil(base.t_end / sim0.cfl_dt())

    runs = []
    for level in range(args.levels + 1):
        sc = scenarios.get_scenario(
            args.scenario, nodes_per_axis=args.nodes, t_end=args.t_end,
            num_cells=base.num_cells * 2**level, transport_order=args.order,
            scheme=args.scheme)
        sim = scenarios.build_simulation(sc)
        dt = dt0 / 2**level
        sim.run(sc.t_end, dt)
        runs.append((level, sc.num_cells, dt, sim))

    rows = []
    prev_err = None
    for (level, cells, dt, sim), (_, _, _, fine) in zip(runs[:-1], runs[1:]):
        dx = sim.mesh.dx
        err = 0.0
        for f_c, f_f, grid in ((sim.f1, fine.f1, sim.grids[0]),
                               (sim.f2, fine.f2, sim.grids[1])):
            err += diagnostics.l1_self_error(
                f_c, f_f, dx, node_weights=grid.weights * grid.cell_volume)
        order = 0.0 if prev_err is None else np.log2(prev_err / err)
        rows.append([level, cells, dt, err, order])
        prev_err = err
    write_csv(outdir / "errors.csv",
              ["level", "num_cells", "dt", "l1_error", "observed_order"], rows)
    _write_manifest(outdir, base, vars(args) | {"command": "converge"}, ["errors.csv"])
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="vbgk",
        description="Two-species kinetic solver with velocity-dependent collision frequencies.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("scenario", choices=sorted(scenarios.PRESETS))
        p.add_argument("--outdir", required=True)
        p.add_argument("--nodes", type=int, default=None, help="velocity nodes per axis")
        p.add_argument("--t-end", type=float, default=None)
        p.add_argument("--order", type=int, default=None, choices=(1, 2), help="transport order")
        p.add_argument("--scheme", default=None, choices=("splitting1", "ars222"))

    p_run = sub.add_parser("run", help="simulate one scenario")
    common(p_run)
    p_run.add_argument("--cells", type=int, default=None)
    p_run.add_argument("--dt", type=float, default=None)
    p_run.add_argument("--variant", default=None, help="override the frequency variant")
    p_run.add_argument("--snapshot-every", type=int, default=0,
                       help="write moment profiles every N steps")
    p_run.add_argument("--slice-every", type=int, default=0,
                       help="write distribution slices every N steps")
    p_run.set_defaults(func=cmd_run)

    p_cmp = sub.add_parser("compare", help="run two frequency variants and difference them")
    common(p_cmp)
    p_cmp.add_argument("--cells", type=int, default=None)
    p_cmp.add_argument("--dt", type=float, default=None)
    p_cmp.add_argument("--variant-a", required=True)
    p_cmp.add_argument("--variant-b", required=True)
    p_cmp.add_argument("--snapshot-every", type=int, default=0)
    p_cmp.set_defaults(func=cmd_compare)

    p_cv = sub.add_parser("converge", help="mesh-refinement self-convergence study")
    common(p_cv)
    p_cv.add_argument("--levels", type=int, default=3)
    p_cv.set_defaults(func=cmd_converge)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 2 if exc.code not in (0, None) else 0
    try:
        return args.func(args)
    except ScenarioError as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return 2
    except (SolverError, DualSolverError) as exc:
        print(f"solver failure: {exc}", file=sys.stderr)
        return 3
    except OSError as exc:
        print(f"I/O error: {exc}", file=sys.stderr)
        return 4


if __name__ == "__main__":
    sys.exit(main())
