"""Collision-frequency models nu_ij evaluated on a species velocity grid.

The velocity-dependent variants share the regularized 1/(delta + |v-u_mix|^3)
profile; the velocity-independent variants replace the relative-speed cube
by a thermal value, a Maxwellian-weighted average of |v-u_mix|^3, or a
Maxwellian-weighted average of nu itself.  All variants carry the n_j
prefactor, which gives the symmetry n_i nu_ij = n_j nu_ji.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from vbgk.grid import SpeciesParams, VelocityGrid, integrate
from vbgk.moments import MixtureState

# Plasma constants (cgs)
KB_ERG_PER_EV = 1.602e-12
E2_EV_CM = 1.44e-7  # squared elementary charge, eV cm
E2_ERG_CM = E2_EV_CM * KB_ERG_PER_EV

POWER_LAW_VARIANTS = {"power_veldep", "power_vhat"}
COULOMB_VARIANTS = {"coulomb_veldep", "coulomb_thermal", "coulomb_vhat", "coulomb_avg"}
VELOCITY_DEPENDENT = {"power_veldep", "coulomb_veldep"}


class FrequencyError(ValueError):
    pass


@dataclass(frozen=True)
class FrequencyModel:
    """Variant tag plus the power-law strength C (unused for Coulomb)."""

    variant: str
    strength: float = 1.0

    def __post_init__(self):
        if self.variant not in POWER_LAW_VARIANTS | COULOMB_VARIANTS:
            raise FrequencyError(f"unknown frequency variant {self.variant!r}")

    @property
    def velocity_dependent(self) -> bool:
        return self.variant in VELOCITY_DEPENDENT


def reduced_mass(sp_i: SpeciesParams, sp_j: SpeciesParams) -> float:
    return sp_i.mass * sp_j.mass / (sp_i.mass + sp_j.mass)


def regularization_delta(sp_i: SpeciesParams, sp_j: SpeciesParams, T_mix: float) -> float:
    """delta_ij = 0.1 (dv_ij)^3 with dv_ij = (1/4) sqrt(T_mix / 2 mu_ij).

    T_mix is in energy units (erg in cgs scenarios, code units otherwise).
    """
    mu = reduced_mass(sp_i, sp_j)
    dv = 0.25 * np.sqrt(T_mix / (2.0 * mu))
    return 0.1 * dv**3


def coulomb_log(
    Z_i: int,
    Z_j: int,
    n1: float,
    n2: float,
    T_mix_eV: float,
    Z_1: int | None = None,
    Z_2: int | None = None,
) -> float:
    """L = (1/2) log(1 + lambda_D^2 / b90^2) with the electron/ion Debye
    composition and b90 = Z_i Z_j e^2 / T_mix.

    (n1, n2) are the two species densities; their charge numbers (Z_1, Z_2)
    default to (Z_i, Z_j), which is exact for the cross pair.  Intra pairs
    must pass both so the Debye length sees the full plasma.
    """
    if n1 < 0 or n2 < 0 or (n1 == 0 and n2 == 0):
        raise FrequencyError("need nonnegative densities, not both zero")
    if T_mix_eV <= 0:
        raise FrequencyError("T_mix must be positive")
    Z_1 = Z_i if Z_1 is None else Z_1
    Z_2 = Z_j if Z_2 is None else Z_2
    n_e = Z_1 * n1 + Z_2 * n2
    lam_e_sq = T_mix_eV / (4.0 * np.pi * n_e * E2_EV_CM)
    inv_lam_ion_sq = 0.0
    for Z, n in ((Z_1, n1), (Z_2, n2)):
        if n > 0 and Z > 0:
            inv_lam_ion_sq += 4.0 * np.pi * n * Z**2 * E2_EV_CM / T_mix_eV
    lam_D_sq = 1.0 / (1.0 / lam_e_sq + inv_lam_ion_sq)
    b90 = Z_i * Z_j * E2_EV_CM / T_mix_eV
    return 0.5 * np.log1p(lam_D_sq / b90**2)


def _relative_speed_cubed(grid: VelocityGrid, u_mix) -> np.ndarray:
    return grid.speed_sq(origin=u_mix) ** 1.5


def _reduced_maxwell_weight(grid: VelocityGrid, mu_ij: float, mixture: MixtureState) -> np.ndarray:
    """Unnormalized exp(-mu_ij |v - u_mix|^2 / T_mix) on the grid."""
    return np.exp(-mu_ij * grid.speed_sq(origin=mixture.u_mix) / mixture.T_mix)


def vhat_cubed(grid: VelocityGrid, sp_i: SpeciesParams, sp_j: SpeciesParams, mixture: MixtureState) -> float:
    """Maxwellian-weighted average of |v - u_mix|^3 on the species-i grid."""
    mu = reduced_mass(sp_i, sp_j)
    w = _reduced_maxwell_weight(grid, mu, mixture)
    return float(integrate(grid, w * _relative_speed_cubed(grid, mixture.u_mix)) / integrate(grid, w))


def eval_frequency(
    model: FrequencyModel,
    sp_i: SpeciesParams,
    sp_j: SpeciesParams,
    grid_i: VelocityGrid,
    n_i: float,
    n_j: float,
    mixture: MixtureState,
    sp_1: SpeciesParams | None = None,
    sp_2: SpeciesParams | None = None,
    n_1: float | None = None,
    n_2: float | None = None,
) -> np.ndarray:
    """Evaluate nu_ij at every node of the species-i grid for one cell.

    For Coulomb variants the electron density in the Coulomb logarithm needs
    both species; sp_1/sp_2/n_1/n_2 default to the (i, j) pair itself.
    """
    if n_j < 0 or n_i < 0:
        raise FrequencyError("negative density")
    if n_j == 0:
        return np.zeros(grid_i.num_nodes)

    T_mix = mixture.T_mix
    delta = regularization_delta(sp_i, sp_j, T_mix)

    if model.variant in POWER_LAW_VARIANTS:
        prefactor = model.strength * n_j
    else:
        if sp_1 is None:
            sp_1, sp_2, n_1, n_2 = sp_i, sp_j, n_i, n_j
        mu = reduced_mass(sp_i, sp_j)
        L = coulomb_log(
            sp_i.charge_number,
            sp_j.charge_number,
            n_1,
            n_2,
            T_mix / KB_ERG_PER_EV,
            Z_1=sp_1.charge_number,
            Z_2=sp_2.charge_number,
        )
        zz = sp_i.charge_number * sp_j.charge_number
        prefactor = 4.0 * np.pi * n_j * (zz * E2_ERG_CM / (2.0 * mu)) ** 2 * L

    if model.velocity_dependent:
        return prefactor / (delta + _relative_speed_cubed(grid_i, mixture.u_mix))

    if model.variant == "coulomb_thermal":
        v_cubed = np.sqrt(T_mix / (2.0 * reduced_mass(sp_i, sp_j))) ** 3
    elif model.variant in ("coulomb_vhat", "power_vhat"):
        v_cubed = vhat_cubed(grid_i, sp_i, sp_j, mixture)
    else:  # coulomb_avg: Maxwellian-weighted average of nu itself
        nu_v = prefactor / (delta + _relative_speed_cubed(grid_i, mixture.u_mix))
        w = _reduced_maxwell_weight(grid_i, reduced_mass(sp_i, sp_j), mixture)
        const = float(integrate(grid_i, w * nu_v) / integrate(grid_i, w))
        return np.full(grid_i.num_nodes, const)

    return np.full(grid_i.num_nodes, prefactor / (delta + v_cubed))
