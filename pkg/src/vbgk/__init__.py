"""Discrete-velocity solver for a two-species BGK mixture model whose
collision frequencies depend on the microscopic velocity.

Relaxation targets are exponential-family functions whose coefficients are
obtained each step from small convex optimization problems, which makes
mass, total momentum, and total energy conservation hold at the discrete
level and keeps the distributions positive.
"""

from vbgk.grid import SpeciesParams, VelocityGrid, build_grid, integrate
from vbgk.moments import (
    MixtureState,
    SpeciesMoments,
    maxwellian,
    mixture_state,
    species_moments,
)

__all__ = [
    "SpeciesParams",
    "VelocityGrid",
    "build_grid",
    "integrate",
    "SpeciesMoments",
    "MixtureState",
    "species_moments",
    "mixture_state",
    "maxwellian",
]
