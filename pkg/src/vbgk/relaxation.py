"""Implicit relaxation update for the two-species collision operator.

Given stage data G_i per cell, frequencies evaluated on the grids, and an
effective implicit step dt, the new distributions are

    f_i = c_i G_i + c_i dt (nu_ii B_ii + nu_ij B_ij),
    c_i = 1 / (1 + dt (nu_ii + nu_ij))   (nodewise),

where the targets B come from the dual problems with effective weights
w = c_i nu.  Because the dual constraints match the weighted moments of G,
mass per species and total momentum and energy are conserved exactly by
this update, and f_i > 0 wherever G_i > 0.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from vbgk.dual import (
    DualSolverError,
    InterWorkspace,
    IntraWorkspace,
    solve_inter,
    solve_intra,
)
from vbgk.grid import SpeciesParams, VelocityGrid


@dataclass
class Frequencies:
    """Collision frequencies per cell and velocity node, each (K, Q_i).

    nu_ij lives on the species-i grid.
    """

    nu11: np.ndarray
    nu12: np.ndarray
    nu21: np.ndarray
    nu22: np.ndarray


@dataclass
class RelaxationInfo:
    max_newton_iterations: int = 0
    warnings: list[str] = field(default_factory=list)

    def absorb(self, *reports):
        for rep in reports:
            self.max_newton_iterations = max(self.max_newton_iterations, rep.iterations)
            self.warnings.extend(rep.warnings)


def relax_single(
    ws1: IntraWorkspace,
    ws2: IntraWorkspace,
    pws: InterWorkspace,
    G1,
    G2,
    nu11,
    nu12,
    nu21,
    nu22,
    dt_eff: float,
    warm=None,
):
    """Relax one spatial cell.  Returns (f1, f2, warm_state, info)."""
    c1 = 1.0 / (1.0 + dt_eff * (nu11 + nu12))
    c2 = 1.0 / (1.0 + dt_eff * (nu21 + nu22))

    eta1_w, eta2_w, theta_w = warm if warm is not None else (None, None, None)

    def _intra(ws, G, w, warm_eta):
        try:
            return solve_intra(ws, G, w, warm_eta=warm_eta)
        except DualSolverError:
            if warm_eta is None:
                raise
            return solve_intra(ws, G, w, warm_eta=None)

    B11, eta1, rep1 = _intra(ws1, G1, c1 * nu11, eta1_w)
    B22, eta2, rep2 = _intra(ws2, G2, c2 * nu22, eta2_w)

    try:
        B12, B21, theta, rep12 = solve_inter(pws, G1, G2, c1 * nu12, c2 * nu21, warm_theta=theta_w)
    except DualSolverError:
        if theta_w is None:
            raise
        B12, B21, theta, rep12 = solve_inter(pws, G1, G2, c1 * nu12, c2 * nu21, warm_theta=None)

    f1 = c1 * (np.asarray(G1) + dt_eff * (nu11 * B11 + nu12 * B12))
    f2 = c2 * (np.asarray(G2) + dt_eff * (nu21 * B21 + nu22 * B22))

    info = RelaxationInfo()
    info.absorb(rep1, rep2, rep12)
    return f1, f2, (eta1, eta2, theta), info


class RelaxationSolver:
    """Holds the per-species dual workspaces and per-cell warm starts."""

    def __init__(self, grid1: VelocityGrid, grid2: VelocityGrid,
                 sp1: SpeciesParams, sp2: SpeciesParams):
        self.ws1 = IntraWorkspace(grid1, sp1)
        self.ws2 = IntraWorkspace(grid2, sp2)
        self.pws = InterWorkspace(grid1, grid2, sp1, sp2)
        self._warm: dict[int, tuple] = {}

    def reset_warm_starts(self):
        self._warm.clear()

    def relax(self, G1, G2, freqs: Frequencies, dt_eff: float):
        """Relax every cell.  G_i is (K, Q_i); returns (f1, f2, info)."""
        G1 = np.atleast_2d(G1)
        G2 = np.atleast_2d(G2)
        K = G1.shape[0]
        f1 = np.empty_like(G1)
        f2 = np.empty_like(G2)
        info = RelaxationInfo()
        nu = (
            np.atleast_2d(freqs.nu11),
            np.atleast_2d(freqs.nu12),
            np.atleast_2d(freqs.nu21),
            np.atleast_2d(freqs.nu22),
        )
        for k in range(K):
            f1[k], f2[k], warm, cell_info = relax_single(
                self.ws1, self.ws2, self.pws,
                G1[k], G2[k],
                nu[0][k], nu[1][k], nu[2][k], nu[3][k],
                dt_eff,
                warm=self._warm.get(k),
            )
            self._warm[k] = warm
            info.max_newton_iterations = max(
                info.max_newton_iterations, cell_info.max_newton_iterations
            )
            info.warnings.extend(cell_info.warnings)
        return f1, f2, info
