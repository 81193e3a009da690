"""Conserved totals, entropy, error norms, and the exact Euler reference.

Totals are ordered reductions (plain sums over cells in index order) so
repeated runs are bitwise reproducible.
"""

from __future__ import annotations

import numpy as np

from vbgk.grid import SpeciesParams, VelocityGrid, integrate


def conserved_totals(f1, f2, grid1: VelocityGrid, grid2: VelocityGrid,
                     sp1: SpeciesParams, sp2: SpeciesParams, dx: float = 1.0):
    """Per-species mass plus total momentum and kinetic energy.

    Returns a dict with keys mass_1, mass_2, momentum (3,), energy; each is
    the velocity integral summed over cells and weighted by dx.
    """
    f1 = np.atleast_2d(f1)
    f2 = np.atleast_2d(f2)
    out = {}
    momentum = np.zeros(3)
    energy = 0.0
    for key, (f, grid, sp) in (
        ("mass_1", (f1, grid1, sp1)),
        ("mass_2", (f2, grid2, sp2)),
    ):
        m = sp.mass
        out[key] = m * float(integrate(grid, f).sum()) * dx
        mom = integrate(grid, f[:, None, :] * grid.nodes.T)  # (K, 3)
        momentum += m * mom.sum(axis=0) * dx
        energy += 0.5 * m * float(integrate(grid, f * grid.speed_sq()).sum()) * dx
    out["momentum"] = momentum
    out["energy"] = energy
    return out


def entropy(f1, f2, grid1: VelocityGrid, grid2: VelocityGrid, dx: float = 1.0) -> float:
    """H = sum over cells and species of int (f log f - f) dv, times dx.

    The integrand is extended by continuity with 0 log 0 = 0; negative f
    values (guard-clipped noise) contribute nothing.
    """
    total = 0.0
    for f, grid in ((np.atleast_2d(f1), grid1), (np.atleast_2d(f2), grid2)):
        pos = f > 0
        h = np.where(pos, f * (np.log(np.where(pos, f, 1.0)) - 1.0), 0.0)
        total += float(integrate(grid, h).sum())
    return total * dx


def relative_difference(a, b):
    """(a - b) / (|a| + |b|), defined as zero where both vanish."""
    a = np.asarray(a, float)
    b = np.asarray(b, float)
    denom = np.abs(a) + np.abs(b)
    return np.divide(a - b, denom, out=np.zeros_like(denom), where=denom > 0)


def restrict_halving(fine):
    """Average adjacent cell pairs of a (2K, ...) array down to (K, ...)."""
    fine = np.asarray(fine)
    if fine.shape[0] % 2:
        raise ValueError("fine cell count must be even")
    return 0.5 * (fine[0::2] + fine[1::2])


def l1_self_error(coarse, fine, dx_coarse: float, node_weights=None) -> float:
    """L1 distance between a coarse-run field and a restricted finer run.

    The fine field (2K cells) is restricted by two-cell averaging.  When
    node_weights is given the trailing axis is reduced with those weights
    (velocity quadrature); otherwise trailing axes are plain-summed.
    """
    diff = np.abs(np.asarray(coarse) - restrict_halving(fine))
    if node_weights is not None:
        diff = diff @ np.asarray(node_weights)
    return float(diff.sum()) * dx_coarse


# ---------------------------------------------------------------------------
# Exact Riemann solution of the Euler equations (ideal gas)
# ---------------------------------------------------------------------------

def _pressure_function(p, rho_k, p_k, gamma):
    """f_k(p) and f_k'(p) for one side of the Riemann problem."""
    a_k = np.sqrt(gamma * p_k / rho_k)
    A = 2.0 / ((gamma + 1.0) * rho_k)
    B = (gamma - 1.0) / (gamma + 1.0) * p_k
    shock = p > p_k
    f_shock = (p - p_k) * np.sqrt(A / (p + B))
    df_shock = np.sqrt(A / (p + B)) * (1.0 - 0.5 * (p - p_k) / (p + B))
    f_rare = 2.0 * a_k / (gamma - 1.0) * ((p / p_k) ** ((gamma - 1.0) / (2.0 * gamma)) - 1.0)
    df_rare = (p / p_k) ** (-(gamma + 1.0) / (2.0 * gamma)) / (rho_k * a_k)
    return np.where(shock, f_shock, f_rare), np.where(shock, df_shock, df_rare)


def _star_pressure(rho_l, u_l, p_l, rho_r, u_r, p_r, gamma):
    du = u_r - u_l
    p = max(0.5 * (p_l + p_r), 1e-12 * max(p_l, p_r))
    for _ in range(100):
        f_l, df_l = _pressure_function(p, rho_l, p_l, gamma)
        f_r, df_r = _pressure_function(p, rho_r, p_r, gamma)
        g = f_l + f_r + du
        step = g / (df_l + df_r)
        p_new = max(p - step, 1e-14 * max(p_l, p_r))
        if abs(p_new - p) < 1e-14 * p:
            p = p_new
            break
        p = p_new
    return p


def euler_exact_riemann(xi, rho_l, u_l, p_l, rho_r, u_r, p_r, gamma=5.0 / 3.0):
    """Sample the exact Riemann solution at similarity points xi = x/t.

    Returns (rho, u, p) arrays.  States are (density, velocity, pressure)
    of an ideal gas with ratio of specific heats gamma.
    """
    xi = np.asarray(xi, float)
    a_l = np.sqrt(gamma * p_l / rho_l)
    a_r = np.sqrt(gamma * p_r / rho_r)
    p_s = _star_pressure(rho_l, u_l, p_l, rho_r, u_r, p_r, gamma)
    f_l, _ = _pressure_function(p_s, rho_l, p_l, gamma)
    f_r, _ = _pressure_function(p_s, rho_r, p_r, gamma)
    u_s = 0.5 * (u_l + u_r) + 0.5 * (f_r - f_l)

    gm, gp = gamma - 1.0, gamma + 1.0
    rho = np.empty_like(xi)
    u = np.empty_like(xi)
    p = np.empty_like(xi)

    left = xi <= u_s
    for side, mask in ((0, left), (1, ~left)):
        if side == 0:
            rho_k, u_k, p_k, a_k, sgn = rho_l, u_l, p_l, a_l, 1.0
        else:
            rho_k, u_k, p_k, a_k, sgn = rho_r, u_r, p_r, a_r, -1.0
        # mirror the right side so both act like left-moving waves
        s = sgn * xi[mask]
        uk, us = sgn * u_k, sgn * u_s
        if p_s > p_k:  # shock on this side
            rho_star = rho_k * (p_s / p_k + gm / gp) / (gm / gp * p_s / p_k + 1.0)
            speed = uk - a_k * np.sqrt(gp / (2.0 * gamma) * p_s / p_k + gm / (2.0 * gamma))
            ahead = s < speed
            rho_m = np.where(ahead, rho_k, rho_star)
            u_m = np.where(ahead, uk, us)
            p_m = np.where(ahead, p_k, p_s)
        else:  # rarefaction
            a_star = a_k * (p_s / p_k) ** (gm / (2.0 * gamma))
            head = uk - a_k
            tail = us - a_star
            in_fan = (s > head) & (s < tail)
            fan_fac = 2.0 / gp + gm / (gp * a_k) * (uk - s)
            rho_fan = rho_k * fan_fac ** (2.0 / gm)
            u_fan = 2.0 / gp * (a_k + gm / 2.0 * uk + s)
            p_fan = p_k * fan_fac ** (2.0 * gamma / gm)
            ahead = s <= head
            rho_m = np.where(ahead, rho_k, np.where(in_fan, rho_fan, rho_k * (p_s / p_k) ** (1.0 / gamma)))
            u_m = np.where(ahead, uk, np.where(in_fan, u_fan, us))
            p_m = np.where(ahead, p_k, np.where(in_fan, p_fan, p_s))
        rho[mask] = rho_m
        u[mask] = sgn * u_m
        p[mask] = p_m
    return rho, u, p
