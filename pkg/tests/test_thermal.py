import math

import numpy as np
import pytest

import thermalrabi as tr
from thermalrabi import (ModelError, RabiParams, UndefinedStatisticsError,
                         g2_zero, g2_zero_rwa_baseline, photon_flux,
                         thermal_state)


def system(g, n_fock=20):
    return tr.diagonalize_model(RabiParams(g=g, n_fock=n_fock))


def test_zero_temperature_limit_is_pure_ground():
    basis, _ = system(0.5)
    state = thermal_state(basis, 0.0)
    assert state.populations[0] == 1.0
    assert np.all(state.populations[1:] == 0.0)


def test_negative_temperature_rejected():
    basis, _ = system(0.5)
    with pytest.raises(ModelError):
        thermal_state(basis, -0.1)


def test_boltzmann_ratio_two_levels():
    basis, _ = system(0.3)
    state = thermal_state(basis, 0.11)
    ratio = state.populations[1] / state.populations[0]
    assert ratio == pytest.approx(math.exp(-basis.gap(1, 0) / 0.11), rel=1e-12)


def test_populations_normalized_and_monotone():
    basis, _ = system(0.7)
    state = thermal_state(basis, 0.2)
    assert abs(state.populations.sum() - 1.0) < 1e-12
    assert np.all(np.diff(state.populations) <= 1e-15)
    assert np.all(state.populations >= 0)


def test_quasidegenerate_doublet_population_ratio():
    # oracle relation p1/p0 = exp(-Delta_10/T); at g=0.9 the residual gap
    # of ~0.195 omega0 still suppresses the ratio to about 0.27 at T=0.15
    basis, _ = system(0.9, n_fock=30)
    state = thermal_state(basis, 0.15)
    ratio = state.populations[1] / state.populations[0]
    assert ratio == pytest.approx(math.exp(-basis.gap(1, 0) / 0.15), rel=1e-12)
    assert 0.2 < ratio < 0.35


def test_flux_ground_state_zero():
    basis, table = system(0.8)
    assert photon_flux(basis, table, thermal_state(basis, 0.0)) == 0.0


def test_flux_bare_mode_matches_bose_occupation():
    basis, table = system(0.0)
    t = 0.2
    flux = photon_flux(basis, table, thermal_state(basis, t))
    assert flux == pytest.approx(tr.bose_occupation(1.0, t), rel=1e-9)


def test_flux_single_term_formula():
    # cold enough that only the first excited level is populated
    basis, table = system(0.6, n_fock=25)
    state = thermal_state(basis, 0.03)
    p1 = state.populations[1]
    assert state.populations[2] / p1 < 1e-6
    expected = p1 * basis.gap(1, 0) ** 2 * abs(table.x[0, 1]) ** 2
    assert photon_flux(basis, table, state) == pytest.approx(expected, rel=1e-5)


def test_g2_zero_bare_thermal_is_two():
    basis, table = system(0.0)
    value = g2_zero(basis, table, thermal_state(basis, 0.2))
    assert abs(value - 2.0) < 1e-6


def test_g2_zero_flux_floor_error():
    basis, table = system(0.5)
    with pytest.raises(UndefinedStatisticsError):
        g2_zero(basis, table, thermal_state(basis, 0.0))


MARKER_EXPECTATIONS = [
    # (g, T, frozen value, (lo, hi) physical band)
    (0.1, 0.2, 1.9972069946, (1.99, 2.0)),     # near-thermal, just under 2
    (0.2, 0.1, 1.5040088723, (1.0, 1.999)),    # intermediate
    (0.5, 0.07, 0.1394766998, (0.0, 1.0)),     # strongly sub-Poissonian
    (0.9, 0.15, 3.0426885152, (2.0, np.inf)),  # superbunched
]


@pytest.mark.parametrize("g,t,frozen,band", MARKER_EXPECTATIONS)
def test_g2_zero_probe_points(g, t, frozen, band):
    basis, table = system(g)
    value = g2_zero(basis, table, thermal_state(basis, t))
    assert value == pytest.approx(frozen, abs=1e-6)
    assert band[0] < value < band[1]


def test_g2_zero_truncation_stability():
    for g, t in ((0.1, 0.2), (0.5, 0.07), (0.9, 0.15)):
        b1, t1 = system(g, n_fock=20)
        b2, t2 = system(g, n_fock=40)
        v1 = g2_zero(b1, t1, thermal_state(b1, t))
        v2 = g2_zero(b2, t2, thermal_state(b2, t))
        assert abs(v1 - v2) < 1e-4


def test_g2_zero_small_coupling_approaches_two():
    for t in (0.05, 0.1, 0.2, 0.3):
        basis, table = system(0.01)
        value = g2_zero(basis, table, thermal_state(basis, t))
        assert abs(value - 2.0) < 1e-3


def test_rwa_baseline_flat(rng):
    for _ in range(6):
        g = float(rng.uniform(0, 1.0))
        t = float(rng.uniform(0.05, 0.3))
        value = g2_zero_rwa_baseline(RabiParams(g=g), t)
        assert abs(value - 2.0) < 1e-6
    assert abs(g2_zero_rwa_baseline(RabiParams(g=0.0), 0.17) - 2.0) < 1e-6


def test_bare_g2_estimator_on_coherent_state():
    n = 30
    ns = np.arange(n)
    amps = np.exp(-0.5) * 1.0 ** ns / np.sqrt(
        [float(math.factorial(int(k))) for k in ns])
    rho = np.outer(amps, amps.conj()).astype(complex)
    rho /= np.trace(rho).real
    assert tr.bare_mode_g2(rho, n) == pytest.approx(1.0, abs=1e-6)


def test_thermal_state_commutes_with_hamiltonian():
    # diagonal in the dressed basis by construction
    basis, _ = system(0.5)
    state = thermal_state(basis, 0.1)
    rho = state.density_matrix()
    h = np.diag(basis.energies)
    assert np.max(np.abs(h @ rho - rho @ h)) == 0.0
