"""Macroscopic moments of discrete distributions and Maxwellian sampling.

All quantities are in a single internal unit system (cgs with temperatures
in erg, or nondimensional code units); scenario builders convert eV inputs
at the boundary.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from vbgk.grid import SpeciesParams, VelocityGrid, integrate


class MomentError(ValueError):
    pass


@dataclass
class SpeciesMoments:
    """Number density, mass density, mean velocity, temperature.

    Works element-wise for batched (per-cell) inputs: ``n`` is then (K,)
    and ``u`` is (K, 3).  ``defined`` is False in vacuum cells, where u and
    T are sentinel zeros.
    """

    n: float | np.ndarray
    rho: float | np.ndarray
    u: np.ndarray
    T: float | np.ndarray
    defined: bool | np.ndarray = True


@dataclass
class MixtureState:
    u_mix: np.ndarray
    T_mix: float | np.ndarray


def species_moments(f, grid: VelocityGrid, species: SpeciesParams) -> SpeciesMoments:
    """Compute n = int f, u = int v f / n, T = (m/3) int |v-u|^2 f / n.

    Accepts f of shape (Q,) or batched (K, Q).
    """
    f = np.asarray(f, dtype=float)
    n = integrate(grid, f)
    mom = integrate(grid, f[..., None, :] * grid.nodes.T)  # (..., 3)
    e2 = integrate(grid, f * grid.speed_sq())

    scalar = np.ndim(n) == 0
    n_arr = np.atleast_1d(n)
    mom = np.atleast_2d(mom)
    e2_arr = np.atleast_1d(e2)

    defined = n_arr > 0
    safe_n = np.where(defined, n_arr, 1.0)
    u = np.where(defined[:, None], mom / safe_n[:, None], 0.0)
    usq = np.einsum("kp,kp->k", u, u)
    T = np.where(defined, species.mass / 3.0 * (e2_arr / safe_n - usq), 0.0)

    if scalar:
        return SpeciesMoments(
            n=float(n_arr[0]),
            rho=species.mass * float(n_arr[0]),
            u=u[0],
            T=float(T[0]),
            defined=bool(defined[0]),
        )
    return SpeciesMoments(n=n_arr, rho=species.mass * n_arr, u=u, T=T, defined=defined)


def mixture_state(m1: SpeciesMoments, m2: SpeciesMoments) -> MixtureState:
    """Mass-weighted mean velocity and mixture temperature.

    T_mix combines the density-weighted species temperatures with the
    drift-energy term (1/3) rho1 rho2/(rho1+rho2) |u1-u2|^2 / (n1+n2).
    """
    rho1, rho2 = np.asarray(m1.rho, float), np.asarray(m2.rho, float)
    n1, n2 = np.asarray(m1.n, float), np.asarray(m2.n, float)
    if np.any(rho1 + rho2 <= 0) or np.any(n1 + n2 <= 0):
        raise MomentError("mixture state undefined for a vacuum mixture")

    u1 = np.atleast_2d(m1.u)
    u2 = np.atleast_2d(m2.u)
    r1 = np.atleast_1d(rho1)
    r2 = np.atleast_1d(rho2)
    u_mix = (r1[:, None] * u1 + r2[:, None] * u2) / (r1 + r2)[:, None]

    du = u1 - u2
    du_sq = np.einsum("kp,kp->k", du, du)
    T_mix = (n1 * m1.T + n2 * m2.T) / (n1 + n2) + (
        r1 * r2 / (r1 + r2) * du_sq / (3.0 * (n1 + n2))
    )

    if np.ndim(m1.n) == 0:
        return MixtureState(u_mix=u_mix[0], T_mix=float(np.atleast_1d(T_mix)[0]))
    return MixtureState(u_mix=u_mix, T_mix=T_mix)


def maxwellian(species: SpeciesParams, n: float, u, T: float, grid: VelocityGrid) -> np.ndarray:
    """Sample n (m/2 pi T)^{3/2} exp(-m|v-u|^2 / 2T) at the grid nodes."""
    if n <= 0 or T <= 0:
        raise MomentError(f"maxwellian needs n > 0 and T > 0, got n={n}, T={T}")
    m = species.mass
    csq = grid.speed_sq(origin=u)
    return n * (m / (2.0 * np.pi * T)) ** 1.5 * np.exp(-m * csq / (2.0 * T))


def maxwellian_multipliers(species: SpeciesParams, n: float, u, T: float) -> np.ndarray:
    """Exponential-family coefficients (lam0, lam1, lam2) of a Maxwellian.

    With the invariant vector a(v) = m (1, v, |v|^2), the Maxwellian equals
    exp(lam . a(v)) for lam2 = -1/(2T), lam1 = u/T, and
    lam0 = [log(n (m/2 pi T)^{3/2}) - m|u|^2/(2T)] / m.
    """
    m = species.mass
    u = np.asarray(u, dtype=float)
    lam2 = -1.0 / (2.0 * T)
    lam1 = u / T
    lam0 = (np.log(n * (m / (2.0 * np.pi * T)) ** 1.5) - m * (u @ u) / (2.0 * T)) / m
    return np.concatenate([[lam0], lam1, [lam2]])
