"""Dressed-basis thermal master equation: rates, Liouvillian, steady state.

The dissipators are unit jumps |j><k| between energy eigenstates, so in the
dressed basis the generator splits exactly into a classical rate equation
on populations and independent decay factors on coherences. The
superoperator is still materialized as a dense d^2 x d^2 matrix
(column-stacking convention) because cross-implementation dumps and the
regression-theorem code both want the explicit matrix.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
import scipy.linalg

from .dressed import DressedBasis, TransitionTable
from .errors import (DegenerateSteadyStateError, DimensionError, ModelError,
                     StiffnessError)
from .models import RabiParams, build_rwa
from .operators import HilbertSpace, QOperator, embed, fock_annihilation, tls_lowering
from .thermal import bose_occupation

DEGENERATE_GAP = 1e-9
NULL_UNIQUENESS = 1e-8


@dataclass(frozen=True)
class BathSpec:
    """Per-channel damping rates and the common bath temperature.

    The spectral density is flat with coupling alpha^2(Delta) proportional
    to Delta (momentum-quadrature coupling to 1D waveguides), which is what
    reduces the relaxation coefficients to gamma_c * Delta_kj * |C_jk|^2.
    """

    gamma_a: float
    gamma_x: float
    temperature: float

    def __post_init__(self):
        if self.gamma_a < 0 or self.gamma_x < 0:
            raise ModelError("damping rates must be >= 0")
        if self.temperature <= 0:
            raise ModelError("bath temperature must be positive")

    def damping(self, channel: str) -> float:
        return self.gamma_a if channel.startswith("cavity") else self.gamma_x


@dataclass(frozen=True, eq=False)
class TransitionRates:
    """Gamma^{jk}_c and nbar(Delta_kj, T) for all pairs k > j of one channel."""

    channel: str
    damping: float
    gamma: np.ndarray = field(repr=False)  # upper triangle (j, k>j)
    nbar: np.ndarray = field(repr=False)

    def __post_init__(self):
        self.gamma.setflags(write=False)
        self.nbar.setflags(write=False)


def rates(basis: DressedBasis, table: TransitionTable, bath: BathSpec,
          channel: str) -> TransitionRates:
    """Relaxation coefficients gamma_c (Delta_kj/omega0) |C_jk|^2.

    Degenerate pairs (Delta below 1e-9) get an exactly zero rate: the
    linear spectral density kills the coupling at zero frequency.
    """
    if channel not in table.coeffs:
        raise DimensionError(f"unknown channel {channel!r}")
    d = table.n_levels
    w = basis.energies[:d]
    delta = w[None, :] - w[:, None]
    gamma_c = bath.damping(channel)
    gam = np.zeros((d, d))
    nbar = np.zeros((d, d))
    c = table.coeffs[channel]
    for j in range(d):
        for k in range(j + 1, d):
            dkj = delta[j, k]
            if dkj < DEGENERATE_GAP:
                continue
            gam[j, k] = gamma_c * dkj * abs(c[j, k]) ** 2
            nbar[j, k] = bose_occupation(dkj, bath.temperature)
    return TransitionRates(channel, gamma_c, gam, nbar)


@dataclass(frozen=True, eq=False)
class Liouvillian:
    """Dense superoperator acting on column-stacked density matrices.

    `transfer` holds the per-channel classical population-flow matrices
    W_c[m, n] (flow n -> m) kept for diagnostics; `gamma_min` is the
    smallest nonzero channel damping, used by the steady-state uniqueness
    check.
    """

    dim: int
    matrix: np.ndarray = field(repr=False)
    transfer: dict[str, np.ndarray] = field(repr=False)
    gamma_min: float = 0.0

    def __post_init__(self):
        self.matrix.setflags(write=False)
        for w in self.transfer.values():
            w.setflags(write=False)

    def apply(self, rho: np.ndarray) -> np.ndarray:
        return unvec(self.matrix @ vec(rho), self.dim)


def vec(mat: np.ndarray) -> np.ndarray:
    """Column-stacking vectorization: vec(A rho B) = (B^T kron A) vec(rho)."""
    return np.asarray(mat).flatten(order="F")


def unvec(v: np.ndarray, dim: int) -> np.ndarray:
    return np.asarray(v).reshape((dim, dim), order="F")


def build_liouvillian(energies: np.ndarray,
                      rate_tables: list[TransitionRates]) -> Liouvillian:
    """Assemble -i[H, .] plus thermal jump dissipators in the dressed basis.

    For unit jumps the dissipator acts as population transfer between
    diagonal entries plus a decay -(out_r + out_c)/2 on every element, so
    the matrix is filled directly instead of accumulating Kronecker
    products; tests check the result against the generic construction.
    """
    w = np.asarray(energies, dtype=float)
    d = len(w)
    transfer: dict[str, np.ndarray] = {}
    total_w = np.zeros((d, d))
    for rt in rate_tables:
        if rt.gamma.shape != (d, d):
            raise DimensionError("rate table dimension mismatch")
        if np.any(rt.gamma < 0):
            raise ModelError("negative relaxation coefficient")
        wc = np.zeros((d, d))
        # downward k->j at Gamma(1+nbar), upward j->k at Gamma nbar
        wc += np.triu(rt.gamma * (1.0 + rt.nbar), k=1)
        wc += np.triu(rt.gamma * rt.nbar, k=1).T
        transfer[rt.channel] = wc
        total_w += wc
    out = total_w.sum(axis=0)

    mat = np.zeros((d * d, d * d), dtype=complex)
    r = np.arange(d)
    rr, cc = np.meshgrid(r, r, indexing="ij")
    idx = (rr + d * cc).ravel()
    mat[idx, idx] = (-1j * (w[rr] - w[cc]) - 0.5 * (out[rr] + out[cc])).ravel()
    diag_idx = r + d * r
    mat[np.ix_(diag_idx, diag_idx)] += total_w  # W diagonal is zero flow

    gammas = [rt.damping for rt in rate_tables if rt.damping > 0]
    return Liouvillian(d, mat, transfer, min(gammas) if gammas else 0.0)


def steady_state(liouvillian: Liouvillian) -> np.ndarray:
    """Unique trace-one null vector of the Liouvillian.

    Uses a full eigendecomposition; a second eigenvalue within
    1e-8 * gamma_min of zero means the stationary state is ambiguous
    (e.g. no dissipation at all) and is reported instead of silently
    picking one.
    """
    if liouvillian.gamma_min <= 0:
        raise DegenerateSteadyStateError(
            "no dissipative channel: the null space is the whole "
            "commutant, steady state undefined")
    evals, evecs = scipy.linalg.eig(liouvillian.matrix)
    order = np.argsort(np.abs(evals))
    tol = NULL_UNIQUENESS * liouvillian.gamma_min
    if np.abs(evals[order[1]]) <= tol:
        n_null = int(np.sum(np.abs(evals) <= tol))
        raise DegenerateSteadyStateError(
            f"Liouvillian null space has dimension {n_null}")
    rho = unvec(evecs[:, order[0]], liouvillian.dim)
    rho = (rho + rho.conj().T) / 2
    rho = rho / np.trace(rho).real
    residual = np.max(np.abs(liouvillian.apply(rho)))
    if residual > 1e-10:
        raise DegenerateSteadyStateError(
            f"steady-state residual {residual:.2e} above 1e-10")
    return rho


def evolve(liouvillian: Liouvillian, rho0: np.ndarray, t_grid) -> np.ndarray:
    """Propagate rho(t) = exp(L t) rho0 on an ascending time grid.

    Scaling-and-squaring matrix exponentials are reused across equal time
    steps, so uniform grids cost a single expm.
    """
    t_grid = np.asarray(t_grid, dtype=float)
    if t_grid.ndim != 1 or len(t_grid) == 0 or np.any(np.diff(t_grid) < 0):
        raise ValueError("t_grid must be nonempty and ascending")
    rho0 = np.asarray(rho0, dtype=complex)
    if rho0.shape != (liouvillian.dim, liouvillian.dim):
        raise DimensionError("initial state dimension mismatch")

    propagators: dict[float, np.ndarray] = {}

    def prop(dt: float) -> np.ndarray:
        if dt not in propagators:
            propagators[dt] = scipy.linalg.expm(liouvillian.matrix * dt)
        return propagators[dt]

    out = np.empty((len(t_grid), liouvillian.dim, liouvillian.dim), dtype=complex)
    v = vec(rho0)
    prev_t = 0.0
    for i, t in enumerate(t_grid):
        dt = t - prev_t
        if dt > 0:
            v = prop(dt) @ v
        prev_t = t
        if not np.all(np.isfinite(v)):
            raise StiffnessError(f"non-finite state at t = {t}")
        out[i] = unvec(v, liouvillian.dim)
    return out


def standard_me_baseline(params: RabiParams, bath: BathSpec) -> Liouvillian:
    """Standard quantum-optics master equation used only as the comparison
    baseline: RWA Hamiltonian with local bare-operator dissipators at
    constant rates gamma_c (1 + nbar(omega_c, T)) down and
    gamma_c nbar(omega_c, T) up.

    Works in the bare product basis; pair it with `bare_mode_g2`.
    """
    space = params.space
    h = build_rwa(params)
    a = embed(fock_annihilation(params.n_fock), space, 1)
    s = embed(tls_lowering(), space, 0)
    d = space.dim
    mat = np.zeros((d * d, d * d), dtype=complex)
    ident = np.eye(d, dtype=complex)
    mat += -1j * (np.kron(ident, h.mat) - np.kron(h.mat.T, ident))

    def dissipator(op: np.ndarray, rate: float):
        nonlocal mat
        if rate == 0:
            return
        opd = op.conj().T
        opdop = opd @ op
        mat += rate * (np.kron(op.conj(), op)
                       - 0.5 * np.kron(ident, opdop)
                       - 0.5 * np.kron(opdop.T, ident))

    for op, omega, gamma in ((a, params.omega0, bath.gamma_a),
                             (s, params.omega_x, bath.gamma_x)):
        nbar = bose_occupation(omega, bath.temperature)
        dissipator(op.mat, gamma * (1.0 + nbar))
        dissipator(op.mat.conj().T, gamma * nbar)

    gammas = [g for g in (bath.gamma_a, bath.gamma_x) if g > 0]
    return Liouvillian(d, mat, {}, min(gammas) if gammas else 0.0)


def dressed_hamiltonian(basis: DressedBasis, level_cut: int | None = None) -> QOperator:
    """Diagonal Hamiltonian on the (possibly truncated) dressed levels."""
    d = basis.n_levels if level_cut is None else min(level_cut, basis.n_levels)
    return QOperator(HilbertSpace((d,)), np.diag(basis.energies[:d]).astype(complex))
