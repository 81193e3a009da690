"""Convex dual problems defining the relaxation targets.

Three problems are solved per spatial cell: one 5-dimensional problem per
species for the intra-species target, and one shared 6-dimensional problem
for the pair of inter-species targets.  Stationarity of each objective is
exactly the discrete frequency-weighted moment constraint, which is what
makes the overall update conservative.

The objective implemented here is the convex form

    psi(alpha) = sum_q w_q B_q(alpha) (dv)^3 - mu . alpha,

whose stationary points coincide with those of the concave-curvature
potential obtained from the Lagrangian; Newton needs the positive-definite
Hessian of this form.

For production solves the problems are reparameterized on shifted/scaled
velocities (xi = (v - u_center)/v_scale) so the Hessian stays well
conditioned in cgs units; the two parameterizations span the same
exponential family and the multipliers convert exactly.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from vbgk.grid import SpeciesParams, VelocityGrid

EXP_CLIP = 700.0
NEWTON_TOL = 1e-14
MAX_ITER = 200
ARMIJO_C = 1e-4
BACKTRACK_SHRINK = 0.5
MAX_BACKTRACKS = 50


class DualSolverError(RuntimeError):
    """Newton failed to converge; carries the last residual norm."""

    def __init__(self, message, residual=np.inf):
        super().__init__(message)
        self.residual = residual


@dataclass
class ConvergenceReport:
    iterations: int
    residual: float
    converged: bool
    warnings: list[str] = field(default_factory=list)


@dataclass
class IntraMultipliers:
    """Coefficients of exp(lam . a(v)) with a(v) = m (1, v, |v|^2)."""

    lam0: float
    lam1: np.ndarray
    lam2: float

    def as_vector(self) -> np.ndarray:
        return np.concatenate([[self.lam0], self.lam1, [self.lam2]])


@dataclass
class InterMultipliers:
    """Shared momentum/energy coefficients plus per-side mass coefficients."""

    lam0_12: float
    lam0_21: float
    lam1: np.ndarray
    lam2: float

    def as_vector(self) -> np.ndarray:
        return np.concatenate([[self.lam0_12, self.lam0_21], self.lam1, [self.lam2]])


# ---------------------------------------------------------------------------
# Paper-parameterization basis and objectives (contract surface, tests)
# ---------------------------------------------------------------------------

def collision_invariants(grid: VelocityGrid, species: SpeciesParams) -> np.ndarray:
    """a(v) = m (1, v, |v|^2) at every node, shape (Q, 5)."""
    m = species.mass
    Q = grid.num_nodes
    out = np.empty((Q, 5))
    out[:, 0] = m
    out[:, 1:4] = m * grid.nodes
    out[:, 4] = m * grid.speed_sq()
    return out


def inter_invariants(grid: VelocityGrid, species: SpeciesParams, side: int) -> np.ndarray:
    """m (1,0,v,|v|^2) for side 0 and m (0,1,v,|v|^2) for side 1, (Q, 6)."""
    m = species.mass
    Q = grid.num_nodes
    out = np.zeros((Q, 6))
    out[:, side] = m
    out[:, 2:5] = m * grid.nodes
    out[:, 5] = m * grid.speed_sq()
    return out


def assemble_intra_target(G, w, grid: VelocityGrid, species: SpeciesParams) -> np.ndarray:
    """mu_i = sum_q omega_q w_q G_q a(v_q) (dv)^3, shape (5,)."""
    A = collision_invariants(grid, species)
    W = grid.weights * grid.cell_volume * np.asarray(w)
    return A.T @ (W * np.asarray(G))


def assemble_inter_target(
    G1, G2, w12, w21,
    grid1: VelocityGrid, grid2: VelocityGrid,
    sp1: SpeciesParams, sp2: SpeciesParams,
) -> np.ndarray:
    """Six-component target: per-species weighted mass rows plus shared
    momentum and energy rows summed over both grids."""
    A1 = inter_invariants(grid1, sp1, side=0)
    A2 = inter_invariants(grid2, sp2, side=1)
    W1 = grid1.weights * grid1.cell_volume * np.asarray(w12)
    W2 = grid2.weights * grid2.cell_volume * np.asarray(w21)
    return A1.T @ (W1 * np.asarray(G1)) + A2.T @ (W2 * np.asarray(G2))


def _exp_clipped(E):
    return np.exp(np.minimum(E, EXP_CLIP))


def intra_objective(alpha, w, grid: VelocityGrid, species: SpeciesParams, mu):
    """Value, gradient, and Hessian of the convex intra-species objective."""
    alpha = np.asarray(alpha, float)
    A = collision_invariants(grid, species)
    W = grid.weights * grid.cell_volume * np.asarray(w)
    B = _exp_clipped(A @ alpha)
    WB = W * B
    val = WB.sum() - mu @ alpha
    grad = A.T @ WB - mu
    hess = (A * WB[:, None]).T @ A
    return val, grad, hess


def inter_objective(
    alpha, w12, w21,
    grid1: VelocityGrid, grid2: VelocityGrid,
    sp1: SpeciesParams, sp2: SpeciesParams,
    mu,
):
    """Value, gradient, and Hessian of the shared inter-species objective."""
    alpha = np.asarray(alpha, float)
    A1 = inter_invariants(grid1, sp1, side=0)
    A2 = inter_invariants(grid2, sp2, side=1)
    W1 = grid1.weights * grid1.cell_volume * np.asarray(w12)
    W2 = grid2.weights * grid2.cell_volume * np.asarray(w21)
    WB1 = W1 * _exp_clipped(A1 @ alpha)
    WB2 = W2 * _exp_clipped(A2 @ alpha)
    val = WB1.sum() + WB2.sum() - mu @ alpha
    grad = A1.T @ WB1 + A2.T @ WB2 - mu
    hess = (A1 * WB1[:, None]).T @ A1 + (A2 * WB2[:, None]).T @ A2
    return val, grad, hess


def eval_target(multipliers, grid: VelocityGrid, species: SpeciesParams, kind: str) -> np.ndarray:
    """Evaluate B = exp(lam . a(v)) on the grid.

    kind is "intra" (IntraMultipliers) or "inter_12"/"inter_21"
    (InterMultipliers, picking the matching mass coefficient).
    """
    m = species.mass
    if kind == "intra":
        lam0, lam1, lam2 = multipliers.lam0, multipliers.lam1, multipliers.lam2
    elif kind == "inter_12":
        lam0, lam1, lam2 = multipliers.lam0_12, multipliers.lam1, multipliers.lam2
    elif kind == "inter_21":
        lam0, lam1, lam2 = multipliers.lam0_21, multipliers.lam1, multipliers.lam2
    else:
        raise ValueError(f"unknown target kind {kind!r}")
    E = m * (lam0 + grid.nodes @ np.asarray(lam1) + lam2 * grid.speed_sq())
    return _exp_clipped(E)


# ---------------------------------------------------------------------------
# Newton engine
# ---------------------------------------------------------------------------

def _solve_newton_system(H, g):
    try:
        L = np.linalg.cholesky(H)
        y = np.linalg.solve(L, -g)
        return np.linalg.solve(L.T, y)
    except np.linalg.LinAlgError:
        jitter = 1e-12 * max(np.trace(H) / H.shape[0], 1.0)
        try:
            return np.linalg.solve(H + jitter * np.eye(H.shape[0]), -g)
        except np.linalg.LinAlgError as exc:
            raise DualSolverError("singular Hessian in Newton step") from exc


def _newton_loop(full_eval, value_only, x0, tol=NEWTON_TOL, max_iter=MAX_ITER):
    """Damped Newton with Armijo backtracking.

    Converged when one of: ||grad||_inf < tol * scale, ||grad|| < tol *
    ||grad_0||, or the accepted step satisfies ||dx|| < tol * ||x||.
    """
    x = np.array(x0, dtype=float)
    warnings: list[str] = []
    val, grad, hess = full_eval(x)
    grad0_norm = np.linalg.norm(grad, np.inf)
    res = grad0_norm
    for it in range(1, max_iter + 1):
        scale = max(1.0, np.linalg.norm(x, np.inf))
        if res < tol or res < tol * grad0_norm:
            return x, ConvergenceReport(it - 1, res, True, warnings)
        d = _solve_newton_system(hess, grad)
        slope = grad @ d
        if slope >= 0:  # not a descent direction; steepest descent fallback
            d = -grad
            slope = grad @ d
        t = 1.0
        accepted = False
        for _ in range(MAX_BACKTRACKS):
            # the second clause accepts steps whose expected decrease is
            # below float rounding of the objective value
            if (value_only(x + t * d) <= val + ARMIJO_C * t * slope
                    or abs(t * slope) < 1e-15 * max(abs(val), 1e-300)):
                accepted = True
                break
            t *= BACKTRACK_SHRINK
        if not accepted:
            if res < 1e-11:
                warnings.append("line search stalled near optimum")
                return x, ConvergenceReport(it, res, True, warnings)
            raise DualSolverError(
                f"backtracking line search failed at residual {res:.3e}", res
            )
        x = x + t * d
        step = t * np.linalg.norm(d)
        val, grad, hess = full_eval(x)
        res = np.linalg.norm(grad, np.inf)
        if step < tol * max(np.linalg.norm(x), 1.0):
            return x, ConvergenceReport(it, res, True, warnings)
    raise DualSolverError(f"Newton exceeded {max_iter} iterations, residual {res:.3e}", res)


def newton_solve(objective, x0, tol=NEWTON_TOL, max_iter=MAX_ITER):
    """Minimize a convex objective returning (value, gradient, Hessian)."""
    return _newton_loop(
        objective, lambda x: objective(x)[0], x0, tol=tol, max_iter=max_iter
    )


# ---------------------------------------------------------------------------
# Scaled workspaces and production solvers
# ---------------------------------------------------------------------------

_IU5 = np.triu_indices(5)
_IU6 = np.triu_indices(6)


def _product_columns(basis, iu):
    return basis[:, iu[0]] * basis[:, iu[1]]


class IntraWorkspace:
    """Precomputed scaled basis for one species' intra-species problem."""

    def __init__(self, grid: VelocityGrid, species: SpeciesParams):
        self.grid = grid
        self.species = species
        self.u0 = grid.center
        self.s = grid.thermal_scale
        xi = (grid.nodes - self.u0) / self.s
        Q = grid.num_nodes
        basis = np.empty((Q, 5))
        basis[:, 0] = 1.0
        basis[:, 1:4] = xi
        basis[:, 4] = np.einsum("qp,qp->q", xi, xi)
        self.basis = basis
        # combined [basis | pairwise products] for one-pass moment+Hessian
        self.M = np.ascontiguousarray(
            np.concatenate([basis, _product_columns(basis, _IU5)], axis=1)
        )
        self.wq = grid.weights * grid.cell_volume

    def eta_to_multipliers(self, eta) -> IntraMultipliers:
        m, s, u0 = self.species.mass, self.s, self.u0
        lam2 = eta[4] / (m * s * s)
        lam1 = (eta[1:4] * s - 2.0 * eta[4] * u0) / (m * s * s)
        lam0 = eta[0] / m - (eta[1:4] @ u0) / (m * s) + eta[4] * (u0 @ u0) / (m * s * s)
        return IntraMultipliers(lam0=float(lam0), lam1=lam1, lam2=float(lam2))


class InterWorkspace:
    """Precomputed shared-basis data for the cross-species problem.

    The two mass coordinates are stored symmetrized (sum and difference of
    the per-side coefficients) so that exchanging two identical species
    maps every floating-point operation onto itself or its exact negation;
    a symmetric state then stays bitwise symmetric through the solve.
    """

    def __init__(self, grid1: VelocityGrid, grid2: VelocityGrid,
                 sp1: SpeciesParams, sp2: SpeciesParams):
        if not np.allclose(grid1.center, grid2.center):
            raise ValueError("species grids must share their center velocity")
        self.sp1, self.sp2 = sp1, sp2
        self.grids = (grid1, grid2)
        self.u0 = grid1.center
        self.mbar = 0.5 * (sp1.mass + sp2.mass)
        T_build = grid1.thermal_scale**2 * sp1.mass
        self.s = np.sqrt(T_build / self.mbar)
        self.r = (sp1.mass / self.mbar, sp2.mass / self.mbar)
        self.xi = []
        self.basis = []
        self.M = []
        self.wq = []
        for side, grid in enumerate(self.grids):
            xi = (grid.nodes - self.u0) / self.s
            Q = grid.num_nodes
            b = np.empty((Q, 6))
            b[:, 0] = 1.0
            b[:, 1] = 1.0 if side == 0 else -1.0
            b[:, 2:5] = self.r[side] * xi
            b[:, 5] = self.r[side] * np.einsum("qp,qp->q", xi, xi)
            self.xi.append(xi)
            self.basis.append(b)
            self.M.append(
                np.ascontiguousarray(np.concatenate([b, _product_columns(b, _IU6)], axis=1))
            )
            self.wq.append(grid.weights * grid.cell_volume)

    @staticmethod
    def theta_to_z(theta):
        """Per-side mass coefficients to symmetrized (sum, difference)."""
        z = np.array(theta, float)
        z[0] = 0.5 * (theta[0] + theta[1])
        z[1] = 0.5 * (theta[0] - theta[1])
        return z

    @staticmethod
    def z_to_theta(z):
        theta = np.array(z, float)
        theta[0] = z[0] + z[1]
        theta[1] = z[0] - z[1]
        return theta

    def theta_to_multipliers(self, theta) -> InterMultipliers:
        mbar, s, u0 = self.mbar, self.s, self.u0
        m1, m2 = self.sp1.mass, self.sp2.mass
        lam2 = theta[5] / (mbar * s * s)
        lam1 = (theta[2:5] * s - 2.0 * theta[5] * u0) / (mbar * s * s)
        shift = -(theta[2:5] @ u0) / (mbar * s) + theta[5] * (u0 @ u0) / (mbar * s * s)
        return InterMultipliers(
            lam0_12=float(theta[0] / m1 + shift),
            lam0_21=float(theta[1] / m2 + shift),
            lam1=lam1,
            lam2=float(lam2),
        )


def _gaussian_eta(mean, var):
    eta = np.empty(5)
    eta[4] = -0.5 / var
    eta[1:4] = mean / var
    eta[0] = -(mean @ mean) / (2.0 * var)
    return eta


def solve_intra(ws: IntraWorkspace, G, w, warm_eta=None, tol=NEWTON_TOL):
    """Solve the intra-species dual problem for weighted data (G, w).

    Returns (B values on the grid, eta in scaled coordinates, report).
    A zero moment target (vacuum or w == 0) short-circuits to B = 0.
    """
    W = ws.wq * np.asarray(w)
    WG = W * np.asarray(G)
    mu = ws.basis.T @ WG
    if mu[0] <= 0.0:
        return np.zeros(ws.grid.num_nodes), None, ConvergenceReport(0, 0.0, True)

    scale = mu[0]
    Wn = W / scale
    mun = mu / scale

    if warm_eta is not None:
        eta = np.array(warm_eta, float)
    else:
        g0 = ws.basis.T @ (ws.wq * np.asarray(G))
        if g0[0] > 0:
            mean = g0[1:4] / g0[0]
            var = max((g0[4] / g0[0] - mean @ mean) / 3.0, 1e-2)
        else:
            mean, var = np.zeros(3), 1.0
        eta = _gaussian_eta(mean, var)
        q0 = Wn @ _exp_clipped(ws.basis @ eta)
        eta[0] += np.log(mun[0] / q0)

    mu_scale = max(1.0, np.linalg.norm(mun, np.inf))

    def full_eval(x):
        B = _exp_clipped(ws.basis @ x)
        mh = ws.M.T @ (Wn * B)
        grad = mh[:5] - mun
        H = np.empty((5, 5))
        H[_IU5] = mh[5:]
        H.T[_IU5] = mh[5:]
        return mh[0] - mun @ x, grad, H

    def value_only(x):
        return Wn @ _exp_clipped(ws.basis @ x) - mun @ x

    eta, report = _newton_loop(full_eval, value_only, eta, tol=tol * mu_scale)
    E = ws.basis @ eta
    if np.any(E > EXP_CLIP):
        report.warnings.append("target exponent clipped")
    if eta[4] >= 0:
        report.warnings.append("nonnegative quadratic coefficient (lam2 >= 0)")
    return _exp_clipped(E), eta, report


def _solve_inter_one_sided(pws: InterWorkspace, side: int, W, G, tol):
    """Reduced 5-dim problem when only one species has weight.

    The missing side's mass coefficient drops out; its target is zero.
    """
    xi = pws.xi[side]
    r = pws.r[side]
    Q = pws.grids[side].num_nodes
    A = np.empty((Q, 5))
    A[:, 0] = 1.0
    A[:, 1:4] = r * xi
    A[:, 4] = r * np.einsum("qp,qp->q", xi, xi)
    mu = A.T @ (W * np.asarray(G))
    scale = mu[0]
    Wn = W / scale
    mun = mu / scale

    mean = mun[1:4] / r
    var = max((mun[4] / r - mean @ mean) / 3.0, 1e-2)
    x0 = np.empty(5)
    x0[4] = -0.5 / (var * r)
    x0[1:4] = mean / (var * r)
    x0[0] = 0.0
    q0 = Wn @ _exp_clipped(A @ x0)
    x0[0] = np.log(1.0 / q0)

    def full_eval(x):
        WB = Wn * _exp_clipped(A @ x)
        grad = A.T @ WB - mun
        H = (A * WB[:, None]).T @ A
        return WB.sum() - mun @ x, grad, H

    def value_only(x):
        return Wn @ _exp_clipped(A @ x) - mun @ x

    mu_scale = max(1.0, np.linalg.norm(mun, np.inf))
    x, report = _newton_loop(full_eval, value_only, x0, tol=tol * mu_scale)
    theta = np.zeros(6)
    theta[side] = x[0]
    theta[2:5] = x[1:4]
    theta[5] = x[4]
    B = _exp_clipped(A @ x)
    return B, theta, report


def solve_inter(pws: InterWorkspace, G1, G2, w12, w21, warm_theta=None, tol=NEWTON_TOL):
    """Solve the shared cross-species dual problem.

    Returns (B12, B21, theta, report) with theta holding the per-side mass
    coefficients followed by the shared drift and quadratic coefficients.
    A side whose weighted mass target vanishes is dropped from the problem
    and gets a zero target.
    """
    W = [pws.wq[0] * np.asarray(w12), pws.wq[1] * np.asarray(w21)]
    G = [np.asarray(G1), np.asarray(G2)]
    mass = [float(Wi @ Gi) for Wi, Gi in zip(W, G)]
    active = [s for s in range(2) if mass[s] > 0.0]

    if not active:
        return (np.zeros(pws.grids[0].num_nodes), np.zeros(pws.grids[1].num_nodes),
                None, ConvergenceReport(0, 0.0, True))

    if len(active) == 1:
        s = active[0]
        B, theta, report = _solve_inter_one_sided(pws, s, W[s], G[s], tol)
        outs = [np.zeros(pws.grids[1 - s].num_nodes)] * 2
        outs[s] = B
        return outs[0], outs[1], theta, report

    # symmetrized mass coordinates: z[0] couples to total mass, z[1] to the
    # signed difference; see InterWorkspace
    mu = pws.basis[0].T @ (W[0] * G[0]) + pws.basis[1].T @ (W[1] * G[1])
    scale = mu[0]
    mun = mu / scale
    Wn = [W[0] / scale, W[1] / scale]

    if warm_theta is not None:
        z = InterWorkspace.theta_to_z(warm_theta)
    else:
        z = np.zeros(6)
        mass_w = pws.r[0] * mass[0] / scale + pws.r[1] * mass[1] / scale
        mean = mun[2:5] / mass_w
        var = max((mun[5] / mass_w - mean @ mean) / 3.0, 1e-2)
        rbar = 0.5 * (pws.r[0] + pws.r[1])
        z[5] = -0.5 / (var * rbar)
        z[2:5] = mean / (var * rbar)
        t_side = np.empty(2)
        for s in range(2):
            q0 = Wn[s] @ _exp_clipped(pws.basis[s][:, 2:] @ z[2:])
            t_side[s] = np.log(mass[s] / scale / q0)
        z[0] = 0.5 * (t_side[0] + t_side[1])
        z[1] = 0.5 * (t_side[0] - t_side[1])

    def full_eval(x):
        mh = np.zeros(27)
        for s in range(2):
            mh += pws.M[s].T @ (Wn[s] * _exp_clipped(pws.basis[s] @ x))
        grad = mh[:6] - mun
        H = np.empty((6, 6))
        H[_IU6] = mh[6:]
        H.T[_IU6] = mh[6:]
        return mh[0] - mun @ x, grad, H

    def value_only(x):
        val = -mun @ x
        for s in range(2):
            val += Wn[s] @ _exp_clipped(pws.basis[s] @ x)
        return val

    mu_scale = max(1.0, np.linalg.norm(mun, np.inf))
    z, report = _newton_loop(full_eval, value_only, z, tol=tol * mu_scale)

    outs = []
    for s in range(2):
        E = pws.basis[s] @ z
        if np.any(E > EXP_CLIP):
            report.warnings.append("target exponent clipped")
        outs.append(_exp_clipped(E))
    if z[5] >= 0:
        report.warnings.append("nonnegative quadratic coefficient (lam2 >= 0)")
    return outs[0], outs[1], InterWorkspace.z_to_theta(z), report
