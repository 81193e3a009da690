"""Named simulation setups with all physical constants baked in.

Every preset fixes the species, collision-frequency model, scheme, and
initial condition; ``build_scenario`` turns one into a ready-to-run
Simulation.  Velocity grids are built once per scenario from the global
initial mixture velocity and temperature and then held fixed.

Units are cgs with temperatures in erg for the plasma setups and
nondimensional code units for the others; eV temperatures are converted
here at the boundary.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np

from vbgk.frequency import KB_ERG_PER_EV, FrequencyModel
from vbgk.grid import SpeciesParams, VelocityGrid, build_grid, uniform_grid
from vbgk.moments import SpeciesMoments, maxwellian, mixture_state, species_moments
from vbgk.stepper import SchemeConfig, Simulation
from vbgk.transport import SpatialMesh


class ScenarioError(ValueError):
    pass


@dataclass(frozen=True)
class Scenario:
    """Complete description of one simulation setup."""

    name: str
    sp1: SpeciesParams
    sp2: SpeciesParams
    freq_model: FrequencyModel
    scheme: str
    transport_order: int
    boundary: str
    nodes_per_axis: int
    num_cells: int | None  # None for space-homogeneous runs
    x_min: float
    x_max: float
    dt: float | None  # None means CFL-limited
    t_end: float
    ic_kind: str  # "toy" or "maxwellian"

    @property
    def homogeneous(self) -> bool:
        return self.num_cells is None


# -- species used by the plasma setups --------------------------------------

CARBON = SpeciesParams(mass=1.993e-23, charge_number=6)
HYDROGEN_HC = SpeciesParams(mass=1.661e-24, charge_number=1)
HYDROGEN = SpeciesParams(mass=1.655e-24, charge_number=1)
HELIUM = SpeciesParams(mass=3.308e-24, charge_number=2)
UNIT_MASS = SpeciesParams(mass=1.0, charge_number=0)
MASS_15 = SpeciesParams(mass=1.5, charge_number=0)

FS = 1e-15
PS = 1e-12
MICRON = 1e-4  # cm


# -- initial-condition profiles ---------------------------------------------

def toy_distribution(species: SpeciesParams, u_drift, grid: VelocityGrid) -> np.ndarray:
    """Compactly supported bump in the 1-norm ball |v - u|_1 < 0.75/m."""
    m = species.mass
    R = 0.75 / m
    r = np.abs(grid.nodes - np.asarray(u_drift)).sum(axis=1)
    out = np.zeros(grid.num_nodes)
    inside = r < R
    out[inside] = 0.1 * m**27 * np.exp(-0.01 / (R**10 - r[inside] ** 10))
    return out


TOY_DRIFTS = (np.array([0.1, 0.0, 0.0]), np.array([-0.1, 0.0, 0.0]))


def _riemann_profile(x, left, right, x_jump=0.0):
    """Piecewise-constant (n, u1, T) per species; left/right are
    ((n1, u1, T1), (n2, u2, T2)) tuples with scalar u1 components."""
    x = np.asarray(x)
    out = []
    for s in range(2):
        nl, ul, Tl = left[s]
        nr, ur, Tr = right[s]
        isleft = x < x_jump
        n = np.where(isleft, nl, nr)
        T = np.where(isleft, Tl, Tr)
        u = np.zeros((x.size, 3))
        u[:, 0] = np.where(isleft, ul, ur)
        out.append((n, u, T))
    return out


def _smooth_wave_profile(x):
    """Sinusoidal density with n T = 1 and unit drift, same for both
    species."""
    x = np.asarray(x)
    n = 1.0 + 0.1 * np.sin(np.pi * x)
    T = 1.0 / n
    u = np.zeros((x.size, 3))
    u[:, 0] = 1.0
    return [(n, u, T), (n.copy(), u.copy(), T.copy())]


def initial_profiles(scenario: Scenario, x):
    """Per-cell (n, u, T) for both species at cell centers x."""
    name = scenario.name
    if name in ("appendix_convergence_c1", "appendix_convergence_c1e4"):
        return _smooth_wave_profile(x)
    if name == "hydrogen_carbon":
        left = (
            (6.1e22, 9.818e5, 150.0 * KB_ERG_PER_EV),
            (3.6133e21, 0.0, 100.0 * KB_ERG_PER_EV),
        )
        return _riemann_profile(x, left, left)
    if name == "sod":
        # two identical species each carrying half the gas density
        left = ((0.5, 0.0, 1.0),) * 2
        right = ((0.05, 0.0, 0.8),) * 2
        return _riemann_profile(x, left, right)
    if name == "mach17":
        L = (6.666e19, 1.7634411e7, 100.0 * KB_ERG_PER_EV)
        R = (1.308e20, 8.985007e6, 171.32 * KB_ERG_PER_EV)
        return _riemann_profile(x, (L, L), (R, R), x_jump=scenario.x_min + 0.5 * (scenario.x_max - scenario.x_min))
    if name == "mach4":
        L = (3.3488e19, 5.06e7, 100.0 * KB_ERG_PER_EV)
        R = (1.128e20, 1.50e7, 586.3 * KB_ERG_PER_EV)
        return _riemann_profile(x, (L, L), (R, R), x_jump=scenario.x_min + 0.5 * (scenario.x_max - scenario.x_min))
    if name.startswith("interpenetration"):
        fac = 1.0 if name.endswith("high") else 1e-2
        T = 10.0 * KB_ERG_PER_EV
        left = ((1e20 * fac, 2.2e6, T), (1e17 * fac, 2.2e6, T))
        right = ((1e17 * fac, -2.2e6, T), (1e20 * fac, -2.2e6, T))
        mid = scenario.x_min + 0.5 * (scenario.x_max - scenario.x_min)
        return _riemann_profile(x, left, right, x_jump=mid)
    raise ScenarioError(f"no profile for scenario {name!r}")


# -- presets ----------------------------------------------------------------

def _preset(name, **kw) -> Scenario:
    defaults = dict(
        transport_order=2,
        boundary="copy",
        nodes_per_axis=48,
        num_cells=None,
        x_min=0.0,
        x_max=1.0,
        dt=None,
        ic_kind="maxwellian",
    )
    defaults.update(kw)
    return Scenario(name=name, **defaults)


PRESETS = {
    "toy": _preset(
        "toy",
        sp1=UNIT_MASS,
        sp2=MASS_15,
        freq_model=FrequencyModel("power_veldep", strength=10.0),
        scheme="splitting1",
        transport_order=1,
        dt=0.01,
        t_end=4.0,
        ic_kind="toy",
    ),
    "hydrogen_carbon": _preset(
        "hydrogen_carbon",
        sp1=CARBON,
        sp2=HYDROGEN_HC,
        freq_model=FrequencyModel("coulomb_veldep"),
        scheme="ars222",
        dt=0.8 * FS,
        t_end=0.3 * PS,
    ),
    "sod": _preset(
        "sod",
        sp1=UNIT_MASS,
        sp2=UNIT_MASS,
        freq_model=FrequencyModel("power_veldep", strength=2e4),
        scheme="ars222",
        num_cells=400,
        x_min=-0.5,
        x_max=0.5,
        t_end=0.055,
    ),
    "mach17": _preset(
        "mach17",
        sp1=HYDROGEN,
        sp2=HELIUM,
        freq_model=FrequencyModel("coulomb_veldep"),
        scheme="ars222",
        num_cells=200,
        x_max=6.0 * MICRON,
        dt=22.0 * FS,
        t_end=5.390 * PS,
    ),
    "mach4": _preset(
        "mach4",
        sp1=HYDROGEN,
        sp2=HELIUM,
        freq_model=FrequencyModel("coulomb_veldep"),
        scheme="ars222",
        num_cells=200,
        x_max=12.0 * MICRON,
        dt=25.0 * FS,
        t_end=6.345 * PS,
    ),
    "interpenetration_high": _preset(
        "interpenetration_high",
        sp1=HYDROGEN,
        sp2=HELIUM,
        freq_model=FrequencyModel("coulomb_veldep"),
        scheme="ars222",
        num_cells=200,
        x_max=50.0 * MICRON,
        dt=806.0 * FS,
        t_end=120.870 * PS,
    ),
    "interpenetration_low": _preset(
        "interpenetration_low",
        sp1=HYDROGEN,
        sp2=HELIUM,
        freq_model=FrequencyModel("coulomb_veldep"),
        scheme="ars222",
        num_cells=200,
        x_max=50.0 * MICRON,
        dt=806.0 * FS,
        t_end=120.870 * PS,
    ),
    "appendix_convergence_c1": _preset(
        "appendix_convergence_c1",
        sp1=UNIT_MASS,
        sp2=UNIT_MASS,
        freq_model=FrequencyModel("power_veldep", strength=1.0),
        scheme="ars222",
        boundary="periodic",
        num_cells=20,
        x_min=0.0,
        x_max=2.0,
        t_end=0.1,
    ),
    "appendix_convergence_c1e4": _preset(
        "appendix_convergence_c1e4",
        sp1=UNIT_MASS,
        sp2=UNIT_MASS,
        freq_model=FrequencyModel("power_veldep", strength=1e4),
        scheme="ars222",
        boundary="periodic",
        num_cells=20,
        x_min=0.0,
        x_max=2.0,
        t_end=0.1,
    ),
}


def describe(scenario: Scenario) -> dict:
    """JSON-serializable snapshot of a scenario's settings."""
    return {
        "name": scenario.name,
        "species": [
            {"mass": sp.mass, "charge_number": sp.charge_number}
            for sp in (scenario.sp1, scenario.sp2)
        ],
        "frequency_variant": scenario.freq_model.variant,
        "frequency_strength": scenario.freq_model.strength,
        "scheme": scenario.scheme,
        "transport_order": scenario.transport_order,
        "boundary": scenario.boundary,
        "nodes_per_axis": scenario.nodes_per_axis,
        "num_cells": scenario.num_cells,
        "x_min": scenario.x_min,
        "x_max": scenario.x_max,
        "dt": scenario.dt,
        "t_end": scenario.t_end,
        "ic_kind": scenario.ic_kind,
    }


# -- global mixture and construction ----------------------------------------

def _aggregate_species(n, u, T, sp: SpeciesParams) -> SpeciesMoments:
    """Collapse per-cell (n, u, T) into one effective moment set."""
    n = np.asarray(n, float)
    u = np.asarray(u, float)
    T = np.asarray(T, float)
    N = n.sum()
    if N <= 0:
        return SpeciesMoments(n=0.0, rho=0.0, u=np.zeros(3), T=0.0, defined=False)
    U = (n[:, None] * u).sum(axis=0) / N
    e2 = (n * (3.0 * T / sp.mass + np.einsum("kp,kp->k", u, u))).sum()
    Tbar = sp.mass / 3.0 * (e2 / N - U @ U)
    return SpeciesMoments(n=N, rho=sp.mass * N, u=U, T=Tbar)


def initial_mixture(scenario: Scenario):
    """Global (u_mix, T_mix) used to size the fixed velocity grids."""
    if scenario.ic_kind == "toy":
        mix = []
        for sp, ud in ((scenario.sp1, TOY_DRIFTS[0]), (scenario.sp2, TOY_DRIFTS[1])):
            probe = uniform_grid(ud, 0.8 / sp.mass, 64)
            mix.append(species_moments(toy_distribution(sp, ud, probe), probe, sp))
        state = mixture_state(mix[0], mix[1])
        return state.u_mix, state.T_mix
    x = _cell_centers(scenario)
    (n1, u1, T1), (n2, u2, T2) = initial_profiles(scenario, x)
    a = _aggregate_species(n1, u1, T1, scenario.sp1)
    b = _aggregate_species(n2, u2, T2, scenario.sp2)
    state = mixture_state(a, b)
    return state.u_mix, state.T_mix


def _cell_centers(scenario: Scenario) -> np.ndarray:
    if scenario.homogeneous:
        return np.array([0.5 * (scenario.x_min + scenario.x_max)])
    mesh = SpatialMesh(scenario.num_cells, scenario.x_min, scenario.x_max)
    return mesh.centers


def initial_state(scenario: Scenario, grid1: VelocityGrid, grid2: VelocityGrid):
    """Initial distributions (f1, f2) on the given grids, shape (K, Q)."""
    if scenario.ic_kind == "toy":
        f1 = toy_distribution(scenario.sp1, TOY_DRIFTS[0], grid1)[None, :]
        f2 = toy_distribution(scenario.sp2, TOY_DRIFTS[1], grid2)[None, :]
        return f1, f2
    x = _cell_centers(scenario)
    profiles = initial_profiles(scenario, x)
    out = []
    for (n, u, T), grid, sp in zip(profiles, (grid1, grid2), (scenario.sp1, scenario.sp2)):
        f = np.empty((x.size, grid.num_nodes))
        for k in range(x.size):
            f[k] = maxwellian(sp, n[k], u[k], T[k], grid)
        out.append(f)
    return out[0], out[1]


def get_scenario(name: str, *, nodes_per_axis=None, num_cells=None, dt=None,
                 t_end=None, variant=None, transport_order=None,
                 scheme=None) -> Scenario:
    """Look up a preset, applying any overrides."""
    if name not in PRESETS:
        raise ScenarioError(f"unknown scenario {name!r}; known: {sorted(PRESETS)}")
    sc = PRESETS[name]
    changes = {}
    if nodes_per_axis is not None:
        changes["nodes_per_axis"] = nodes_per_axis
    if num_cells is not None:
        if sc.homogeneous:
            raise ScenarioError(f"{name} has no spatial mesh to resize")
        changes["num_cells"] = num_cells
    if dt is not None:
        changes["dt"] = dt
    if t_end is not None:
        changes["t_end"] = t_end
    if transport_order is not None:
        changes["transport_order"] = transport_order
    if scheme is not None:
        changes["scheme"] = scheme
    if variant is not None:
        changes["freq_model"] = FrequencyModel(variant, strength=sc.freq_model.strength)
    return replace(sc, **changes) if changes else sc


def build_simulation(scenario: Scenario) -> Simulation:
    """Construct grids, mesh, and initial state for a scenario."""
    u_mix, T_mix = initial_mixture(scenario)
    grid1 = build_grid(scenario.sp1, u_mix, T_mix, scenario.nodes_per_axis)
    grid2 = build_grid(scenario.sp2, u_mix, T_mix, scenario.nodes_per_axis)
    mesh = None
    if not scenario.homogeneous:
        mesh = SpatialMesh(scenario.num_cells, scenario.x_min, scenario.x_max)
    config = SchemeConfig(
        scheme=scenario.scheme,
        transport_order=scenario.transport_order,
        boundary=scenario.boundary,
    )
    sim = Simulation(scenario.sp1, scenario.sp2, grid1, grid2,
                     scenario.freq_model, config, mesh=mesh)
    f1, f2 = initial_state(scenario, grid1, grid2)
    sim.set_state(f1, f2)
    return sim
