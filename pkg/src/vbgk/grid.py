"""Per-species velocity grids with trapezoidal quadrature.

Each species gets a tensor-product grid of N^3 uniformly spaced nodes per
axis, centered on the mixture mean velocity and spanning six thermal widths
in each direction.  All velocity integrals in the solver are trapezoidal
sums over these nodes.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

HALF_WIDTH_THERMAL = 6.0  # grid extends u_mix +/- 6 v_th per axis


class GridError(ValueError):
    """Invalid grid construction or integration input."""


@dataclass(frozen=True)
class SpeciesParams:
    """Mass (g) and charge number of one species."""

    mass: float
    charge_number: int = 0

    def __post_init__(self):
        if self.mass <= 0:
            raise GridError(f"species mass must be positive, got {self.mass}")
        if self.charge_number < 0:
            raise GridError("charge number must be nonnegative")


@dataclass(frozen=True)
class VelocityGrid:
    """Uniform tensor-product velocity grid with trapezoidal weights.

    ``nodes`` is the flattened (Q, 3) array of node coordinates with
    Q = N^3, ``weights`` the matching product trapezoid weights (1/2 on
    boundary planes), and ``dv`` the per-axis spacing.
    """

    nodes_per_axis: int
    axis_min: np.ndarray  # (3,)
    axis_max: np.ndarray  # (3,)
    axis_coords: tuple[np.ndarray, np.ndarray, np.ndarray]
    nodes: np.ndarray = field(repr=False)  # (Q, 3)
    weights: np.ndarray = field(repr=False)  # (Q,)
    dv: np.ndarray  # (3,)

    @property
    def num_nodes(self) -> int:
        return self.nodes.shape[0]

    @property
    def center(self) -> np.ndarray:
        return 0.5 * (self.axis_min + self.axis_max)

    @property
    def thermal_scale(self) -> float:
        """Thermal velocity used to size the grid (half width / 6)."""
        return float((self.axis_max[0] - self.axis_min[0]) / (2 * HALF_WIDTH_THERMAL))

    @property
    def cell_volume(self) -> float:
        return float(np.prod(self.dv))

    @property
    def v1(self) -> np.ndarray:
        return self.nodes[:, 0]

    def speed_sq(self, origin=None) -> np.ndarray:
        """|v - origin|^2 at every node; origin defaults to 0."""
        d = self.nodes if origin is None else self.nodes - np.asarray(origin)
        return np.einsum("qp,qp->q", d, d)


def uniform_grid(center, half_width: float, nodes_per_axis: int) -> VelocityGrid:
    """Tensor-product grid on center +/- half_width per axis."""
    if half_width <= 0:
        raise GridError("half_width must be positive")
    if nodes_per_axis < 2:
        raise GridError("need at least 2 nodes per axis")
    center = np.asarray(center, dtype=float)
    if center.shape != (3,):
        raise GridError("center must be a 3-vector")
    axis_min = center - half_width
    axis_max = center + half_width
    coords = tuple(
        np.linspace(axis_min[p], axis_max[p], nodes_per_axis) for p in range(3)
    )
    dv = (axis_max - axis_min) / (nodes_per_axis - 1)

    w1 = np.ones(nodes_per_axis)
    w1[0] = w1[-1] = 0.5
    weights = (w1[:, None, None] * w1[None, :, None] * w1[None, None, :]).ravel()

    vx, vy, vz = np.meshgrid(*coords, indexing="ij")
    nodes = np.column_stack([vx.ravel(), vy.ravel(), vz.ravel()])

    return VelocityGrid(
        nodes_per_axis=nodes_per_axis,
        axis_min=axis_min,
        axis_max=axis_max,
        axis_coords=coords,
        nodes=nodes,
        weights=weights,
        dv=dv,
    )


def build_grid(species: SpeciesParams, u_mix, T_mix: float, nodes_per_axis: int) -> VelocityGrid:
    """Build the velocity grid for one species.

    The axis range per direction p is u_mix^p +/- 6 sqrt(T_mix/m), so the
    spacing is dv = 12 v_th / (N - 1).
    """
    if T_mix <= 0:
        raise GridError(f"T_mix must be positive, got {T_mix}")
    v_th = np.sqrt(T_mix / species.mass)
    return uniform_grid(u_mix, HALF_WIDTH_THERMAL * v_th, nodes_per_axis)


def integrate(grid: VelocityGrid, values) -> float | np.ndarray:
    """Trapezoidal quadrature sum_q w_q values_q (dv)^3.

    ``values`` may be (Q,) or batched (..., Q); the node axis is last.
    """
    values = np.asarray(values)
    if values.shape[-1] != grid.num_nodes:
        raise GridError(
            f"values last axis {values.shape[-1]} != node count {grid.num_nodes}"
        )
    out = values @ grid.weights * grid.cell_volume
    return out
