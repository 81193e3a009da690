"""Moment extraction, mixture quantities, and Maxwellian sampling."""

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from vbgk.grid import SpeciesParams, build_grid, integrate, uniform_grid
from vbgk.moments import (
    MomentError,
    SpeciesMoments,
    maxwellian,
    maxwellian_multipliers,
    mixture_state,
    species_moments,
)


def test_maxwellian_peak_and_width():
    sp = SpeciesParams(mass=2.0)
    n, T = 3.0, 0.7
    u = np.array([0.4, 0.0, 0.0])
    grid = uniform_grid(u, 4.0, 17)  # odd count puts u on a node
    f = maxwellian(sp, n, u, T, grid)
    peak = n * (sp.mass / (2.0 * np.pi * T)) ** 1.5
    assert f.max() == pytest.approx(peak, rel=1e-13)
    # value at |v-u|^2 = 2T/m is peak / e
    csq = grid.speed_sq(origin=u)
    probe = np.exp(-sp.mass * (2.0 * T / sp.mass) / (2.0 * T)) * peak
    node = np.argmin(np.abs(csq - 2.0 * T / sp.mass))
    ref = peak * np.exp(-sp.mass * csq[node] / (2.0 * T))
    assert f[node] == pytest.approx(ref, rel=1e-13)
    assert probe == pytest.approx(peak / np.e, rel=1e-13)


def test_moments_recover_maxwellian_parameters():
    sp = SpeciesParams(mass=1.5)
    n, T = 2.0, 0.9
    u = np.array([0.2, -0.1, 0.05])
    grid = build_grid(sp, u, T / 1.0, 48)
    mom = species_moments(maxwellian(sp, n, u, T, grid), grid, sp)
    assert mom.n == pytest.approx(n, rel=1e-6)
    assert np.allclose(mom.u, u, atol=1e-6)
    assert mom.T == pytest.approx(T, rel=1e-6)
    assert mom.rho == pytest.approx(sp.mass * n, rel=1e-6)


def test_species_moments_linear_in_f(rng, small_grid, unit_species):
    f = rng.uniform(size=small_grid.num_nodes)
    g = rng.uniform(size=small_grid.num_nodes)
    a, b = 0.7, 1.9
    mf = species_moments(f, small_grid, unit_species)
    mg = species_moments(g, small_grid, unit_species)
    mc = species_moments(a * f + b * g, small_grid, unit_species)
    # density and momentum are linear; u and T are ratios, so compare raw sums
    assert mc.n == pytest.approx(a * mf.n + b * mg.n, rel=1e-12)
    assert np.allclose(mc.n * mc.u, a * mf.n * mf.u + b * mg.n * mg.u, rtol=1e-11)


def test_batched_matches_scalar(rng, small_grid, unit_species):
    f = rng.uniform(size=(3, small_grid.num_nodes))
    batched = species_moments(f, small_grid, unit_species)
    for k in range(3):
        single = species_moments(f[k], small_grid, unit_species)
        assert batched.n[k] == pytest.approx(single.n, rel=1e-14)
        assert np.allclose(batched.u[k], single.u)
        assert batched.T[k] == pytest.approx(single.T, rel=1e-12)


def test_vacuum_cell_sentinels(small_grid, unit_species):
    f = np.zeros((2, small_grid.num_nodes))
    f[1] = 1.0
    mom = species_moments(f, small_grid, unit_species)
    assert not mom.defined[0] and mom.defined[1]
    assert mom.n[0] == 0.0 and mom.T[0] == 0.0
    assert np.allclose(mom.u[0], 0.0)


def _moments(n, u, T, mass):
    u = np.asarray(u, float)
    return SpeciesMoments(n=n, rho=mass * n, u=u, T=T)


def test_mixture_equal_drift():
    u = np.array([0.3, -0.2, 0.1])
    m1 = _moments(2.0, u, 1.0, 1.0)
    m2 = _moments(1.0, u, 3.0, 4.0)
    mix = mixture_state(m1, m2)
    assert np.allclose(mix.u_mix, u)
    # with no relative drift T_mix is the density-weighted mean, so it lies
    # between the species temperatures
    assert min(1.0, 3.0) <= mix.T_mix <= max(1.0, 3.0)
    assert mix.T_mix == pytest.approx((2.0 * 1.0 + 1.0 * 3.0) / 3.0, rel=1e-14)


@settings(max_examples=60, deadline=None)
@given(
    n1=st.floats(0.1, 10.0), n2=st.floats(0.1, 10.0),
    m1=st.floats(0.5, 5.0), m2=st.floats(0.5, 5.0),
    T1=st.floats(0.1, 10.0), T2=st.floats(0.1, 10.0),
    u1x=st.floats(-2.0, 2.0), u2x=st.floats(-2.0, 2.0),
)
def test_mixture_temperature_alternative_form(n1, n2, m1, m2, T1, T2, u1x, u2x):
    """Cross-check T_mix against the total-energy bookkeeping form.

    Oracle: (3/2)(n1+n2) T_mix = sum_i [ (3/2) n_i T_i
            + (1/2) rho_i |u_i|^2 ] - (1/2)(rho1+rho2)|u_mix|^2.
    """
    a = _moments(n1, [u1x, 0.1, 0.0], T1, m1)
    b = _moments(n2, [u2x, -0.3, 0.0], T2, m2)
    mix = mixture_state(a, b)
    rho1, rho2 = m1 * n1, m2 * n2
    u1 = np.array([u1x, 0.1, 0.0])
    u2 = np.array([u2x, -0.3, 0.0])
    umix = (rho1 * u1 + rho2 * u2) / (rho1 + rho2)
    total = (1.5 * n1 * T1 + 0.5 * rho1 * u1 @ u1
             + 1.5 * n2 * T2 + 0.5 * rho2 * u2 @ u2)
    T_ref = (total - 0.5 * (rho1 + rho2) * umix @ umix) / (1.5 * (n1 + n2))
    assert np.allclose(mix.u_mix, umix, rtol=1e-12)
    assert mix.T_mix == pytest.approx(T_ref, rel=1e-10)


def test_mixture_vacuum_raises():
    with pytest.raises(MomentError):
        mixture_state(_moments(0.0, np.zeros(3), 0.0, 1.0),
                      _moments(0.0, np.zeros(3), 0.0, 1.0))


def test_maxwellian_validation(small_grid, unit_species):
    with pytest.raises(MomentError):
        maxwellian(unit_species, -1.0, np.zeros(3), 1.0, small_grid)
    with pytest.raises(MomentError):
        maxwellian(unit_species, 1.0, np.zeros(3), 0.0, small_grid)


def test_maxwellian_multipliers_reproduce_density():
    sp = SpeciesParams(mass=1.7)
    n, T = 0.8, 1.3
    u = np.array([-0.2, 0.4, 0.0])
    grid = uniform_grid(u, 5.0, 21)
    lam = maxwellian_multipliers(sp, n, u, T)
    E = sp.mass * (lam[0] + grid.nodes @ lam[1:4] + lam[4] * grid.speed_sq())
    assert np.allclose(np.exp(E), maxwellian(sp, n, u, T, grid), rtol=1e-12)
    assert lam[4] == pytest.approx(-0.5 / T, rel=1e-14)
