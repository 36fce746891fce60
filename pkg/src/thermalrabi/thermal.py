"""Canonical thermal state and equal-time photon statistics.

The zero-delay statistics need no open-system dynamics at all: they are
traces over the canonical density matrix, which is diagonal in the dressed
basis. Damping rates never enter, matching the independence of the
steady-state statistics from the bath couplings.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .dressed import DressedBasis, TransitionTable, xdot_plus
from .errors import ModelError, UndefinedStatisticsError
from .models import RabiParams
from .operators import fock_annihilation

FLUX_FLOOR = 1e-30
POPULATION_FLOOR = 1e-30


@dataclass(frozen=True, eq=False)
class ThermalState:
    """Boltzmann populations over dressed levels, Tr rho = 1."""

    temperature: float
    populations: np.ndarray = field(repr=False)
    partition: float = 1.0

    def __post_init__(self):
        self.populations.setflags(write=False)

    @property
    def n_levels(self) -> int:
        return len(self.populations)

    def density_matrix(self) -> np.ndarray:
        return np.diag(self.populations).astype(complex)


def thermal_state(basis: DressedBasis, temperature: float) -> ThermalState:
    """Canonical populations e^{-omega_j/T}/Z on the given levels.

    Energies are shifted by the ground energy before exponentiation to
    avoid underflow at low T; weights below 1e-30 are set to exactly zero.
    T = 0 is the pure-ground-state limit (statistics are then undefined).
    """
    if temperature < 0:
        raise ModelError(f"temperature must be >= 0, got {temperature}")
    rel = basis.energies - basis.energies[0]
    if temperature == 0:
        weights = np.zeros(len(rel))
        weights[rel <= 0] = 1.0
    else:
        weights = np.exp(-rel / temperature)
        weights[weights < POPULATION_FLOOR] = 0.0
    z = float(weights.sum())
    return ThermalState(temperature, weights / z, z)


def photon_flux(basis: DressedBasis, table: TransitionTable,
                state: ThermalState) -> float:
    """Emission rate proxy <Xdot- Xdot+> = sum_{j<k} p_k Delta_kj^2 |X_jk|^2."""
    d = state.n_levels
    w = basis.energies[:d]
    delta = w[None, :] - w[:, None]
    weights = np.triu(delta ** 2 * np.abs(table.x[:d, :d]) ** 2, k=1)
    return float(weights.sum(axis=0) @ state.populations)


def g2_zero(basis: DressedBasis, table: TransitionTable,
            state: ThermalState) -> float:
    """Zero-delay second-order correlation of the output field.

    Tr[Xd- Xd- Xd+ Xd+ rho_T] / Tr[Xd- Xd+ rho_T]^2. Raises when the flux
    is below the numerical floor (the T -> 0 limit is 0/0, never 0).
    """
    d = state.n_levels
    m = xdot_plus(basis, table, level_cut=d).mat[:d, :d]
    md = m.conj().T
    rho = state.density_matrix()
    flux = float(np.real(np.trace(md @ m @ rho)))
    if flux <= FLUX_FLOOR:
        raise UndefinedStatisticsError(
            f"photon flux {flux:.2e} below floor; statistics undefined")
    num = float(np.real(np.trace(md @ md @ m @ m @ rho)))
    return num / flux ** 2


def bose_occupation(delta: float, temperature: float) -> float:
    """Mean thermal occupation 1/(e^{Delta/T} - 1)."""
    if temperature <= 0:
        return 0.0
    return float(1.0 / np.expm1(delta / temperature))


def bare_thermal_mode(n_fock: int, omega: float, temperature: float) -> np.ndarray:
    """Truncated Bose-Einstein density matrix of an uncoupled mode."""
    w = np.exp(-omega * np.arange(n_fock) / temperature)
    return np.diag(w / w.sum()).astype(complex)


def bare_thermal_tls(omega_x: float, temperature: float) -> np.ndarray:
    w = np.array([1.0, np.exp(-omega_x / temperature)])
    return np.diag(w / w.sum()).astype(complex)


def bare_mode_g2(rho: np.ndarray, n_fock: int) -> float:
    """Normal-ordered g2 with the bare operators, <a+ a+ a a>/<a+ a>^2.

    Operates on a density matrix over the (TLS, mode) product space or on a
    bare mode-only matrix; used by the standard-ME comparison baseline.
    """
    a1 = fock_annihilation(n_fock).mat
    if rho.shape[0] == n_fock:
        a = a1
    elif rho.shape[0] == 2 * n_fock:
        a = np.kron(np.eye(2, dtype=complex), a1)
    else:
        raise ModelError(f"density matrix dimension {rho.shape[0]} does not "
                         f"match n_fock={n_fock}")
    ad = a.conj().T
    mean = float(np.real(np.trace(ad @ a @ rho)))
    if mean <= FLUX_FLOOR:
        raise UndefinedStatisticsError("bare photon number below floor")
    num = float(np.real(np.trace(ad @ ad @ a @ a @ rho)))
    return num / mean ** 2


def g2_zero_rwa_baseline(params: RabiParams, temperature: float) -> float:
    """Bare-operator g2 on the steady state of the standard RWA treatment.

    At resonance that steady state is the product of bare thermal states,
    so the result is 2 for every coupling and temperature: the flat
    baseline the dressed treatment is compared against.
    """
    if temperature <= 0:
        raise ModelError("temperature must be positive")
    rho = np.kron(bare_thermal_tls(params.omega_x, temperature),
                  bare_thermal_mode(params.n_fock, params.omega0, temperature))
    return bare_mode_g2(rho, params.n_fock)
