"""One-dimensional-in-space transport of the discrete distributions.

Space is a uniform cell-centered mesh along x; only the first velocity
component advects.  Fluxes are upwind with an optional minmod-limited
second-order correction, and two ghost cells per side supply the boundary
data (periodic, zero inflow, or copy/outflow).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

NUM_GHOST = 2
CFL_SAFETY = 0.99
BOUNDARY_KINDS = ("periodic", "zero", "copy")


class TransportError(ValueError):
    pass


@dataclass(frozen=True)
class SpatialMesh:
    """Uniform mesh of cell centers on [x_min, x_max]."""

    num_cells: int
    x_min: float
    x_max: float

    def __post_init__(self):
        if self.num_cells < 1:
            raise TransportError("need at least one cell")
        if not self.x_max > self.x_min:
            raise TransportError("x_max must exceed x_min")

    @property
    def dx(self) -> float:
        return (self.x_max - self.x_min) / self.num_cells

    @property
    def centers(self) -> np.ndarray:
        return self.x_min + (np.arange(self.num_cells) + 0.5) * self.dx


def minmod3(a, b, c):
    """Three-argument minmod: common-sign minimum modulus, else zero."""
    sa = np.sign(a)
    agree = (sa == np.sign(b)) & (sa == np.sign(c))
    return np.where(agree, sa * np.minimum(np.abs(a), np.minimum(np.abs(b), np.abs(c))), 0.0)


def extend_with_ghosts(f, boundary: str) -> np.ndarray:
    """Pad the cell axis of f (K, Q) with two ghost cells per side."""
    if boundary not in BOUNDARY_KINDS:
        raise TransportError(f"unknown boundary {boundary!r}")
    f = np.asarray(f)
    K = f.shape[0]
    fe = np.empty((K + 2 * NUM_GHOST,) + f.shape[1:], dtype=f.dtype)
    fe[NUM_GHOST : NUM_GHOST + K] = f
    if boundary == "periodic":
        fe[:NUM_GHOST] = f[-NUM_GHOST:]
        fe[NUM_GHOST + K :] = f[:NUM_GHOST]
    elif boundary == "zero":
        fe[:NUM_GHOST] = 0.0
        fe[NUM_GHOST + K :] = 0.0
    else:  # copy the edge cells outward
        fe[:NUM_GHOST] = f[0]
        fe[NUM_GHOST + K :] = f[-1]
    return fe


def interface_fluxes(f, v1, boundary: str, order: int = 2) -> np.ndarray:
    """Fluxes at the K+1 cell interfaces, shape (K+1, Q).

    The flux is the upwind average plus, at second order, a minmod-limited
    antidiffusive correction built from the three neighboring slopes.
    """
    if order not in (1, 2):
        raise TransportError(f"order must be 1 or 2, got {order}")
    fe = np.asarray(extend_with_ghosts(f, boundary), dtype=float)
    d = np.diff(fe, axis=0)  # (K+3, Q)
    K = f.shape[0]
    # interface j+1/2 sits between extended cells j+1 and j+2, j = 0..K
    left = fe[1 : K + 2]
    right = fe[2 : K + 3]
    jump = d[1 : K + 2]
    if order == 2:
        phi = minmod3(d[0 : K + 1], jump, d[2 : K + 3])
    else:
        phi = 0.0
    v = v1[None, :]
    return 0.5 * v * (left + right) - 0.5 * np.abs(v) * (jump - phi)


def apply_transport(f, v1, mesh: SpatialMesh, boundary: str, order: int = 2) -> np.ndarray:
    """Conservative flux-difference form of -v1 d/dx f, shape (K, Q)."""
    F = interface_fluxes(f, v1, boundary, order=order)
    return -(F[1:] - F[:-1]) / mesh.dx


def cfl_time_step(dx: float, v1_max: float, order: int = 2) -> float:
    """Largest stable transport step: alpha dx / max|v1| with a safety
    factor, alpha = 1 at first order and 2/3 at second order."""
    if v1_max <= 0:
        raise TransportError("need a positive maximum advection speed")
    alpha = 1.0 if order == 1 else 2.0 / 3.0
    return CFL_SAFETY * alpha * dx / v1_max
