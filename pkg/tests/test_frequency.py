"""Collision-frequency variants and the Coulomb logarithm."""

import numpy as np
import pytest

from vbgk.frequency import (
    E2_EV_CM,
    KB_ERG_PER_EV,
    FrequencyError,
    FrequencyModel,
    coulomb_log,
    eval_frequency,
    reduced_mass,
    regularization_delta,
    vhat_cubed,
)
from vbgk.grid import SpeciesParams, integrate, uniform_grid
from vbgk.moments import MixtureState


@pytest.fixture
def mix():
    return MixtureState(u_mix=np.array([0.2, 0.0, 0.0]), T_mix=1.0)


def test_model_validation():
    with pytest.raises(FrequencyError):
        FrequencyModel("nope")
    assert FrequencyModel("power_veldep").velocity_dependent
    assert not FrequencyModel("coulomb_thermal").velocity_dependent


def test_reduced_mass_and_delta():
    a = SpeciesParams(mass=1.0)
    b = SpeciesParams(mass=3.0)
    assert reduced_mass(a, b) == pytest.approx(0.75, rel=1e-15)
    T = 2.0
    dv = 0.25 * np.sqrt(T / (2.0 * 0.75))
    assert regularization_delta(a, b, T) == pytest.approx(0.1 * dv**3, rel=1e-14)


def test_power_veldep_formula(mix, unit_species, heavy_species):
    grid = uniform_grid(mix.u_mix, 4.0, 9)
    model = FrequencyModel("power_veldep", strength=10.0)
    nu = eval_frequency(model, unit_species, heavy_species, grid, 1.0, 2.5, mix)
    delta = regularization_delta(unit_species, heavy_species, mix.T_mix)
    c3 = grid.speed_sq(origin=mix.u_mix) ** 1.5
    assert np.allclose(nu, 10.0 * 2.5 / (delta + c3), rtol=1e-14)
    assert np.all(nu >= 0) and np.all(np.isfinite(nu))


def test_cubic_decay_far_from_center(mix, unit_species):
    # doubling the relative speed divides nu by ~8 when |v-u|^3 >> delta
    grid = uniform_grid(mix.u_mix, 40.0, 9)
    model = FrequencyModel("power_veldep", strength=1.0)
    nu = eval_frequency(model, unit_species, unit_species, grid, 1.0, 1.0, mix)
    d = grid.nodes - mix.u_mix
    r = np.sqrt((d * d).sum(axis=1))
    i1 = np.argmin(np.abs(r - 10.0))
    i2 = np.argmin(np.abs(r - 20.0))
    ratio = nu[i1] / nu[i2] / (r[i2] / r[i1]) ** 3
    assert ratio == pytest.approx(1.0, rel=1e-3)


def test_pair_symmetry(mix):
    """n_i nu_ij = n_j nu_ji nodewise when both species share a grid."""
    sp = SpeciesParams(mass=1.3)
    grid = uniform_grid(mix.u_mix, 4.0, 7)
    n1, n2 = 2.0, 0.7
    for variant, strength in (("power_veldep", 3.0), ("power_vhat", 3.0)):
        model = FrequencyModel(variant, strength=strength)
        nu12 = eval_frequency(model, sp, sp, grid, n1, n2, mix)
        nu21 = eval_frequency(model, sp, sp, grid, n2, n1, mix)
        assert np.allclose(n1 * nu12, n2 * nu21, rtol=1e-13)


def test_pair_symmetry_coulomb():
    sp1 = SpeciesParams(mass=1.655e-24, charge_number=1)
    sp2 = SpeciesParams(mass=3.308e-24, charge_number=2)
    mix = MixtureState(u_mix=np.zeros(3), T_mix=100.0 * KB_ERG_PER_EV)
    n1, n2 = 1e20, 3e19
    for variant in ("coulomb_veldep", "coulomb_thermal"):
        model = FrequencyModel(variant)
        grid1 = uniform_grid(mix.u_mix, 6.0 * np.sqrt(mix.T_mix / sp1.mass), 7)
        nu12 = eval_frequency(model, sp1, sp2, grid1, n1, n2, mix)
        nu21 = eval_frequency(model, sp2, sp1, grid1, n2, n1, mix)
        # same evaluation grid, so the symmetry holds nodewise
        assert np.allclose(n1 * nu12, n2 * nu21, rtol=1e-12)


def test_coulomb_log_against_direct_formula():
    Z1, Z2 = 1, 6
    n1, n2 = 1e20, 5e19
    T = 120.0  # eV
    # independent recomputation of the shielding length composition
    n_e = Z1 * n1 + Z2 * n2
    lam_e_sq = T / (4.0 * np.pi * n_e * E2_EV_CM)
    inv_ion = (4.0 * np.pi * n1 * Z1**2 * E2_EV_CM / T
               + 4.0 * np.pi * n2 * Z2**2 * E2_EV_CM / T)
    lam_sq = 1.0 / (1.0 / lam_e_sq + inv_ion)
    b90 = Z1 * Z2 * E2_EV_CM / T
    ref = 0.5 * np.log(1.0 + lam_sq / b90**2)
    assert coulomb_log(Z1, Z2, n1, n2, T) == pytest.approx(ref, rel=1e-12)
    assert ref > 1.0  # weakly coupled plasma


def test_coulomb_log_charge_override():
    # intra pair (1,1) still screens with the full two-species plasma
    v_intra = coulomb_log(1, 1, 1e20, 5e19, 100.0, Z_1=1, Z_2=6)
    v_naive = coulomb_log(1, 1, 1e20, 5e19, 100.0)
    assert v_intra != v_naive


def test_coulomb_log_validation():
    with pytest.raises(FrequencyError):
        coulomb_log(1, 1, 0.0, 0.0, 10.0)
    with pytest.raises(FrequencyError):
        coulomb_log(1, 1, 1e10, 1e10, -1.0)


def test_vhat_cubed_against_direct_quadrature(mix, unit_species, heavy_species):
    grid = uniform_grid(mix.u_mix, 4.0, 9)
    # independent direct quadrature of the weighted average
    mu = reduced_mass(unit_species, heavy_species)
    d = grid.nodes - mix.u_mix
    csq = (d * d).sum(axis=1)
    w = np.exp(-mu * csq / mix.T_mix)
    ref = integrate(grid, w * csq**1.5) / integrate(grid, w)
    assert vhat_cubed(grid, unit_species, heavy_species, mix) == pytest.approx(ref, rel=1e-13)


def test_constant_variants_are_constant(mix, unit_species, heavy_species):
    grid = uniform_grid(mix.u_mix, 4.0, 7)
    sp1 = SpeciesParams(mass=1.0, charge_number=1)
    sp2 = SpeciesParams(mass=1.5, charge_number=1)
    cgs_mix = MixtureState(u_mix=np.zeros(3), T_mix=50.0 * KB_ERG_PER_EV)
    cgs_grid = uniform_grid(np.zeros(3), 6.0 * np.sqrt(cgs_mix.T_mix / 1e-24), 7)
    cgs1 = SpeciesParams(mass=1e-24, charge_number=1)
    cgs2 = SpeciesParams(mass=2e-24, charge_number=1)
    for model, sp_a, sp_b, g, m in (
        (FrequencyModel("power_vhat", strength=2.0), unit_species, heavy_species, grid, mix),
        (FrequencyModel("coulomb_thermal"), cgs1, cgs2, cgs_grid, cgs_mix),
        (FrequencyModel("coulomb_vhat"), cgs1, cgs2, cgs_grid, cgs_mix),
        (FrequencyModel("coulomb_avg"), cgs1, cgs2, cgs_grid, cgs_mix),
    ):
        nu = eval_frequency(model, sp_a, sp_b, g, 1e19, 1e19, m)
        assert np.ptp(nu) == 0.0
        assert nu[0] > 0 and np.isfinite(nu[0])


def test_coulomb_avg_is_weighted_average_of_veldep():
    sp1 = SpeciesParams(mass=1e-24, charge_number=1)
    sp2 = SpeciesParams(mass=2e-24, charge_number=1)
    mixc = MixtureState(u_mix=np.zeros(3), T_mix=50.0 * KB_ERG_PER_EV)
    grid = uniform_grid(np.zeros(3), 6.0 * np.sqrt(mixc.T_mix / sp1.mass), 9)
    nu_v = eval_frequency(FrequencyModel("coulomb_veldep"), sp1, sp2, grid, 1e19, 2e19, mixc)
    nu_c = eval_frequency(FrequencyModel("coulomb_avg"), sp1, sp2, grid, 1e19, 2e19, mixc)
    mu = reduced_mass(sp1, sp2)
    w = np.exp(-mu * grid.speed_sq() / mixc.T_mix)
    ref = integrate(grid, w * nu_v) / integrate(grid, w)
    assert nu_c[0] == pytest.approx(ref, rel=1e-12)
    assert nu_v.min() < nu_c[0] < nu_v.max()


def test_zero_partner_density(mix, unit_species):
    grid = uniform_grid(mix.u_mix, 3.0, 5)
    nu = eval_frequency(FrequencyModel("power_veldep"), unit_species, unit_species,
                        grid, 1.0, 0.0, mix)
    assert np.all(nu == 0.0)
    with pytest.raises(FrequencyError):
        eval_frequency(FrequencyModel("power_veldep"), unit_species, unit_species,
                       grid, 1.0, -1.0, mix)
