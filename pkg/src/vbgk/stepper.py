"""Time integration: first-order splitting and a second-order IMEX scheme.

Transport is explicit and relaxation implicit.  The two-stage IMEX scheme
(gamma = 1 - sqrt(2)/2) is globally stiffly accurate, so the step result is
the second stage value.  A positivity guard redoes a step with a smaller dt
when a stage input develops a significant negative part.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from vbgk.frequency import FrequencyModel, eval_frequency
from vbgk.grid import SpeciesParams, VelocityGrid, integrate
from vbgk.moments import MixtureState, SpeciesMoments, mixture_state, species_moments
from vbgk.relaxation import Frequencies, RelaxationSolver
from vbgk.transport import SpatialMesh, apply_transport, cfl_time_step

GAMMA = 1.0 - np.sqrt(2.0) / 2.0
DELTA = 1.0 - 1.0 / (2.0 * GAMMA)
NEGATIVE_TOL_FACTOR = 1e-13  # relative to the cellwise maximum
MIN_DT_FACTOR = 1e-6  # abort below this fraction of the CFL step
SCHEMES = ("splitting1", "ars222")


class SolverError(RuntimeError):
    pass


@dataclass
class SchemeConfig:
    scheme: str = "ars222"
    transport_order: int = 2
    boundary: str = "copy"

    def __post_init__(self):
        if self.scheme not in SCHEMES:
            raise SolverError(f"unknown scheme {self.scheme!r}")


@dataclass
class StepInfo:
    dt: float
    max_newton_iterations: int = 0
    guard_retries: int = 0
    clipped_mass: float = 0.0
    warnings: list[str] = field(default_factory=list)


class Simulation:
    """Two-species kinetic solver state and stepping logic.

    mesh may be None for a space-homogeneous relaxation problem, in which
    case f_i has a single cell.
    """

    def __init__(
        self,
        sp1: SpeciesParams,
        sp2: SpeciesParams,
        grid1: VelocityGrid,
        grid2: VelocityGrid,
        freq_model: FrequencyModel,
        config: SchemeConfig,
        mesh: SpatialMesh | None = None,
    ):
        self.sp = (sp1, sp2)
        self.grids = (grid1, grid2)
        self.freq_model = freq_model
        self.config = config
        self.mesh = mesh
        self.relaxer = RelaxationSolver(grid1, grid2, sp1, sp2)
        self.time = 0.0
        self.step_count = 0
        self.f1: np.ndarray | None = None
        self.f2: np.ndarray | None = None

    # -- setup ---------------------------------------------------------

    def set_state(self, f1, f2, time=0.0):
        K = 1 if self.mesh is None else self.mesh.num_cells
        self.f1 = np.asarray(f1, float).reshape(K, self.grids[0].num_nodes)
        self.f2 = np.asarray(f2, float).reshape(K, self.grids[1].num_nodes)
        self.time = time
        self.step_count = 0

    @property
    def v1_max(self) -> float:
        return max(np.abs(self.grids[0].v1).max(), np.abs(self.grids[1].v1).max())

    def cfl_dt(self) -> float:
        if self.mesh is None:
            return np.inf
        return cfl_time_step(self.mesh.dx, self.v1_max, self.config.transport_order)

    # -- frequencies ---------------------------------------------------

    def evaluate_frequencies(self, f1, f2) -> Frequencies:
        """Per-cell collision frequencies from the moments of (f1, f2)."""
        sp1, sp2 = self.sp
        g1, g2 = self.grids
        m1 = species_moments(np.atleast_2d(f1), g1, sp1)
        m2 = species_moments(np.atleast_2d(f2), g2, sp2)
        K = np.atleast_1d(m1.n).shape[0]
        nu = [np.zeros((K, g1.num_nodes)), np.zeros((K, g1.num_nodes)),
              np.zeros((K, g2.num_nodes)), np.zeros((K, g2.num_nodes))]
        n1 = np.atleast_1d(m1.n)
        n2 = np.atleast_1d(m2.n)
        for k in range(K):
            if n1[k] + n2[k] <= 0:
                continue
            a = SpeciesMoments(n=n1[k], rho=sp1.mass * n1[k],
                               u=np.atleast_2d(m1.u)[k], T=np.atleast_1d(m1.T)[k])
            b = SpeciesMoments(n=n2[k], rho=sp2.mass * n2[k],
                               u=np.atleast_2d(m2.u)[k], T=np.atleast_1d(m2.T)[k])
            mix = mixture_state(a, b)
            if mix.T_mix <= 0:
                raise SolverError(f"nonpositive mixture temperature in cell {k}")
            pair_kw = dict(sp_1=sp1, sp_2=sp2, n_1=n1[k], n_2=n2[k])
            nu[0][k] = eval_frequency(self.freq_model, sp1, sp1, g1, n1[k], n1[k], mix, **pair_kw)
            nu[1][k] = eval_frequency(self.freq_model, sp1, sp2, g1, n1[k], n2[k], mix, **pair_kw)
            nu[2][k] = eval_frequency(self.freq_model, sp2, sp1, g2, n2[k], n1[k], mix, **pair_kw)
            nu[3][k] = eval_frequency(self.freq_model, sp2, sp2, g2, n2[k], n2[k], mix, **pair_kw)
        return Frequencies(nu11=nu[0], nu12=nu[1], nu21=nu[2], nu22=nu[3])

    # -- building blocks -----------------------------------------------

    def _advect(self, f1, f2):
        """Transport right-hand sides (-v1 d/dx f) for both species."""
        if self.mesh is None:
            return np.zeros_like(f1), np.zeros_like(f2)
        order = self.config.transport_order
        bc = self.config.boundary
        return (
            apply_transport(f1, self.grids[0].v1, self.mesh, bc, order=order),
            apply_transport(f2, self.grids[1].v1, self.mesh, bc, order=order),
        )

    def _guard_stage(self, G, grid, info: StepInfo):
        """Clip tiny negatives in a stage input; report large ones.

        Returns (clipped G, True if the negatives exceeded the tolerance).
        """
        gmax = np.maximum(G.max(axis=1, keepdims=True), 0.0)
        tol = NEGATIVE_TOL_FACTOR * gmax
        if np.any(G < -tol):
            return G, True
        neg = np.minimum(G, 0.0)
        if np.any(neg < 0):
            info.clipped_mass += abs(float(integrate(grid, neg).sum()))
            G = np.maximum(G, 0.0)
        return G, False

    # -- steps ---------------------------------------------------------

    def _step_splitting1(self, f1, f2, dt, info: StepInfo):
        freqs = self.evaluate_frequencies(f1, f2)
        r1, r2, rinfo = self.relaxer.relax(f1, f2, freqs, dt)
        info.max_newton_iterations = rinfo.max_newton_iterations
        info.warnings.extend(rinfo.warnings)
        a1, a2 = self._advect(r1, r2)
        g1 = r1 + dt * a1
        g2 = r2 + dt * a2
        g1, bad1 = self._guard_stage(g1, self.grids[0], info)
        g2, bad2 = self._guard_stage(g2, self.grids[1], info)
        if bad1 or bad2:
            return None, None, freqs
        return g1, g2, freqs

    def _step_ars222(self, f1, f2, dt, info: StepInfo):
        a1, a2 = self._advect(f1, f2)
        G1_1 = f1 + GAMMA * dt * a1
        G1_2 = f2 + GAMMA * dt * a2
        G1_1, bad1 = self._guard_stage(G1_1, self.grids[0], info)
        G1_2, bad2 = self._guard_stage(G1_2, self.grids[1], info)
        freqs1 = self.evaluate_frequencies(G1_1, G1_2)
        if bad1 or bad2:
            return None, None, freqs1

        s1_1, s1_2, rinfo1 = self.relaxer.relax(G1_1, G1_2, freqs1, GAMMA * dt)

        # stage-1 relaxation term recovered algebraically
        R1_1 = (s1_1 - G1_1) / (GAMMA * dt)
        R1_2 = (s1_2 - G1_2) / (GAMMA * dt)
        b1, b2 = self._advect(s1_1, s1_2)
        G2_1 = f1 + DELTA * dt * a1 + (1.0 - DELTA) * dt * b1 + (1.0 - GAMMA) * dt * R1_1
        G2_2 = f2 + DELTA * dt * a2 + (1.0 - DELTA) * dt * b2 + (1.0 - GAMMA) * dt * R1_2
        G2_1, bad1 = self._guard_stage(G2_1, self.grids[0], info)
        G2_2, bad2 = self._guard_stage(G2_2, self.grids[1], info)
        if bad1 or bad2:
            return None, None, freqs1

        freqs2 = self.evaluate_frequencies(G2_1, G2_2)
        s2_1, s2_2, rinfo2 = self.relaxer.relax(G2_1, G2_2, freqs2, GAMMA * dt)
        info.max_newton_iterations = max(rinfo1.max_newton_iterations,
                                         rinfo2.max_newton_iterations)
        info.warnings.extend(rinfo1.warnings + rinfo2.warnings)
        return s2_1, s2_2, freqs1

    def _guard_dt_bound(self, freqs: Frequencies) -> float:
        """Step bound 1/((1-2 gamma) max(nu_i1 + nu_i2)) from stage data."""
        numax = max(
            float((freqs.nu11 + freqs.nu12).max()),
            float((freqs.nu21 + freqs.nu22).max()),
        )
        if numax <= 0:
            return np.inf
        return 1.0 / ((1.0 - 2.0 * GAMMA) * numax)

    def step(self, dt) -> StepInfo:
        """Advance one step of size at most dt, retrying with a smaller dt
        if the positivity guard trips.  Returns the step info."""
        if self.f1 is None:
            raise SolverError("set_state must be called before stepping")
        dt_cfl = self.cfl_dt()
        dt_try = min(dt, dt_cfl)
        info = StepInfo(dt=dt_try)
        stepper = self._step_splitting1 if self.config.scheme == "splitting1" else self._step_ars222
        while True:
            info.dt = dt_try
            f1, f2, freqs = stepper(self.f1, self.f2, dt_try, info)
            if f1 is not None:
                break
            info.guard_retries += 1
            bound = self._guard_dt_bound(freqs)
            dt_next = min(0.5 * dt_try, bound)
            if not dt_next < dt_try:
                dt_next = 0.5 * dt_try
            dt_try = dt_next
            if np.isfinite(dt_cfl) and dt_try < MIN_DT_FACTOR * dt_cfl:
                raise SolverError("positivity guard drove dt below the abort floor")
            if not np.isfinite(dt_cfl) and dt_try < MIN_DT_FACTOR * dt:
                raise SolverError("positivity guard drove dt below the abort floor")
        self.f1, self.f2 = f1, f2
        self.time += info.dt
        self.step_count += 1
        return info

    def run(self, t_end, dt, on_step=None):
        """Step to t_end with nominal step dt, shortening the final step.

        on_step(sim, info) is called after each accepted step.
        """
        while self.time < t_end - 1e-12 * max(t_end, dt):
            step_dt = min(dt, t_end - self.time)
            info = self.step(step_dt)
            if on_step is not None:
                on_step(self, info)
        return self
