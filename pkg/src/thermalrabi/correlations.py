"""Two-time observables via the quantum regression theorem.

The recipe throughout: build an operator-valued initial condition from the
stationary state (e.g. Xd+ rho Xd- for intensity correlations), propagate
it under the Liouvillian as if it were a density matrix, and trace against
the mid-time observable at every delay. Negative delays of the
cross-correlation are a second forward-time computation with the line
operators exchanged (stationarity), never a backward integration.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
import scipy.linalg

from .dressed import DressedBasis, TransitionTable, xdot_plus, xdot_plus_filtered
from .dynamics import Liouvillian, vec
from .errors import (UndefinedStatisticsError, WindowError, ZeroTransitionError)
from .thermal import FLUX_FLOOR, ThermalState, photon_flux, thermal_state

STATIONARITY_TOL = 1e-8


@dataclass(frozen=True, eq=False)
class CorrelationTrace:
    """Normalized correlation samples on a delay grid (units 1/omega0)."""

    tau: np.ndarray
    values: np.ndarray
    metadata: dict = field(default_factory=dict)

    def __post_init__(self):
        self.tau.setflags(write=False)
        self.values.setflags(write=False)


@dataclass(frozen=True, eq=False)
class Spectrum:
    """Emission spectral density on a frequency grid."""

    omega: np.ndarray
    values: np.ndarray
    normalization: str = "raw"
    metadata: dict = field(default_factory=dict)

    def __post_init__(self):
        self.omega.setflags(write=False)
        self.values.setflags(write=False)


def _check_stationary(liouvillian: Liouvillian, rho_ss: np.ndarray):
    residual = float(np.max(np.abs(liouvillian.apply(rho_ss))))
    if residual > STATIONARITY_TOL:
        raise ValueError(f"state is not stationary: |L(rho)| = {residual:.2e}")


def two_time(liouvillian: Liouvillian, rho_ss: np.ndarray,
             left: np.ndarray, mid: np.ndarray, tau_grid,
             right: np.ndarray | None = None) -> np.ndarray:
    """Stationary correlation samples by the regression theorem.

    right is None  -> <left(t) mid(t+tau)>         = Tr[mid e^{L tau}(rho left)]
    right given    -> <left(t) mid(t+tau) right(t)> = Tr[mid e^{L tau}(right rho left)]

    tau_grid must be ascending and nonnegative; uniform grids reuse a
    single matrix exponential.
    """
    tau_grid = np.asarray(tau_grid, dtype=float)
    if tau_grid.ndim != 1 or len(tau_grid) == 0:
        raise ValueError("tau_grid must be a nonempty 1-d array")
    if tau_grid[0] < 0 or np.any(np.diff(tau_grid) <= 0):
        raise ValueError("tau_grid must be ascending and nonnegative")
    _check_stationary(liouvillian, rho_ss)

    init = rho_ss @ left if right is None else right @ rho_ss @ left
    v = vec(init)
    mid_row = mid.T.flatten(order="F")  # Tr[mid R] = vec(mid^T) . vec(R)

    out = np.empty(len(tau_grid), dtype=complex)
    propagators: dict[float, np.ndarray] = {}
    prev = 0.0
    for i, tau in enumerate(tau_grid):
        dt = float(tau - prev)
        if dt > 0:
            if dt not in propagators:
                propagators[dt] = scipy.linalg.expm(liouvillian.matrix * dt)
            v = propagators[dt] @ v
        prev = tau
        out[i] = mid_row @ v
    return out


def _flux_or_raise(basis, table, state: ThermalState) -> float:
    flux = photon_flux(basis, table, state)
    if flux <= FLUX_FLOOR:
        raise UndefinedStatisticsError(
            f"photon flux {flux:.2e} below floor; statistics undefined")
    return flux


def coherence_linewidths(liouvillian: Liouvillian) -> np.ndarray:
    """Decay rate of each dressed coherence |j><k|, from the generator.

    With unit-jump dissipators every coherence is an eigenvector of L; the
    rate is read off the superoperator diagonal.
    """
    d = liouvillian.dim
    diag = np.real(np.diag(liouvillian.matrix)).reshape((d, d), order="F")
    return -diag  # [r, c] entry: half out-rate sum of levels r and c


def populated_lines(basis: DressedBasis, table: TransitionTable,
                    state: ThermalState, liouvillian: Liouvillian,
                    rel_floor: float = 1e-9):
    """Transitions (j, k>j) carrying a non-negligible share of the flux."""
    d = state.n_levels
    w = basis.energies[:d]
    lw = coherence_linewidths(liouvillian)
    total = _flux_or_raise(basis, table, state)
    lines = []
    for j in range(d):
        for k in range(j + 1, d):
            weight = state.populations[k] * (w[k] - w[j]) ** 2 * abs(table.x[j, k]) ** 2
            if weight > rel_floor * total:
                lines.append((j, k, w[k] - w[j], float(lw[j, k]), weight))
    return lines


def default_tau_window(lines) -> tuple[float, float]:
    """(tau_max, step): resolve the slowest populated decay and the fastest
    oscillation; step <= min(0.05/max_gap, decay_time_fastest/20)."""
    rates_ = [lw for _j, _k, _gap, lw, _wt in lines]
    gaps = [gap for _j, _k, gap, _lw, _wt in lines]
    slowest = min(r for r in rates_ if r > 0)
    fastest = max(rates_)
    tau_max = 10.0 / slowest
    step = min(0.05 / max(gaps), 1.0 / (20.0 * fastest))
    return tau_max, step


def g2_tau(basis: DressedBasis, table: TransitionTable,
           liouvillian: Liouvillian, temperature: float, tau_grid,
           metadata: dict | None = None) -> CorrelationTrace:
    """Delayed intensity correlation g2(tau) of the output field.

    Stationarity (t -> infinity) is realized by starting the regression
    from the canonical thermal state, which the master equation leaves
    invariant.
    """
    d = liouvillian.dim
    state = thermal_state(basis.truncate(d), temperature)
    flux = _flux_or_raise(basis, table, state)
    m = xdot_plus(basis, table, level_cut=d).mat[:d, :d]
    md = m.conj().T
    rho = state.density_matrix()
    raw = two_time(liouvillian, rho, md, md @ m, tau_grid, right=m)
    values = np.real(raw) / flux ** 2
    meta = dict(metadata or {})
    meta.setdefault("temperature", temperature)
    meta.setdefault("level_cut", d)
    return CorrelationTrace(np.asarray(tau_grid, dtype=float), values, meta)


def g2_cross_filtered(basis: DressedBasis, table: TransitionTable,
                      liouvillian: Liouvillian, temperature: float, tau_grid,
                      upper: tuple[int, int] = (1, 2),
                      lower: tuple[int, int] = (0, 1),
                      metadata: dict | None = None) -> CorrelationTrace:
    """Frequency-filtered cross-correlation between two emission lines.

    `upper` and `lower` are (j, k) index pairs of the filtered transitions,
    by default the cascade 2 -> 1 followed by 1 -> 0. Positive delay means
    the upper-line photon is detected first; negative delays swap the
    ordering per the time-ordering rule, evaluated by a second forward
    regression run.
    """
    d = liouvillian.dim
    state = thermal_state(basis.truncate(d), temperature)
    rho = state.density_matrix()

    ops = {}
    for name, (j, k) in (("upper", upper), ("lower", lower)):
        op = xdot_plus_filtered(basis, table, j, k).mat[:d, :d]
        if np.max(np.abs(op)) < 1e-6:
            raise ZeroTransitionError(
                f"{name} transition {k}->{j} has zero matrix element "
                "(selection rule: below the level crossing this line is dark)")
        ops[name] = op
    x_up, x_lo = ops["upper"], ops["lower"]
    flux_up = float(np.real(np.trace(x_up.conj().T @ x_up @ rho)))
    flux_lo = float(np.real(np.trace(x_lo.conj().T @ x_lo @ rho)))
    if min(flux_up, flux_lo) <= FLUX_FLOOR:
        raise UndefinedStatisticsError("a filtered line carries no flux")
    norm = flux_up * flux_lo

    tau_grid = np.asarray(tau_grid, dtype=float)
    pos = tau_grid[tau_grid >= 0]
    neg = -tau_grid[tau_grid < 0][::-1]
    values = np.empty_like(tau_grid)
    if len(pos):
        raw = two_time(liouvillian, rho, x_up.conj().T,
                       x_lo.conj().T @ x_lo, pos, right=x_up)
        values[tau_grid >= 0] = np.real(raw) / norm
    if len(neg):
        raw = two_time(liouvillian, rho, x_lo.conj().T,
                       x_up.conj().T @ x_up, neg, right=x_lo)
        values[tau_grid < 0] = (np.real(raw) / norm)[::-1]
    meta = dict(metadata or {})
    meta.update(upper=upper, lower=lower, temperature=temperature, level_cut=d)
    return CorrelationTrace(tau_grid, values, meta)


def first_order_correlation(basis: DressedBasis, table: TransitionTable,
                            liouvillian: Liouvillian, temperature: float,
                            tau_max: float | None = None,
                            step: float | None = None,
                            max_points: int = 4_000_000):
    """<Xd-(t) Xd+(t+tau)> on a uniform grid chosen to resolve all
    populated lines; returns (tau, samples, flux)."""
    d = liouvillian.dim
    state = thermal_state(basis.truncate(d), temperature)
    flux = _flux_or_raise(basis, table, state)
    lines = populated_lines(basis, table, state, liouvillian)
    auto_tau_max, auto_step = default_tau_window(lines)
    tau_max = auto_tau_max if tau_max is None else tau_max
    step = auto_step if step is None else step
    n = int(np.floor(tau_max / step)) + 1
    if n > max_points:
        raise WindowError(f"window needs {n} samples (> {max_points}); "
                          "relax step or tau_max")
    tau = np.arange(n) * step
    m = xdot_plus(basis, table, level_cut=d).mat[:d, :d]
    rho = state.density_matrix()
    samples = two_time(liouvillian, rho, m.conj().T, m, tau)
    # the window must actually contain the decay
    tail = np.max(np.abs(samples[-max(1, n // 100):]))
    if tail > 1e-2 * np.abs(samples[0]):
        raise WindowError(
            f"correlation tail {tail:.2e} not decayed within tau_max={tau_max:g}")
    return tau, samples, flux


def spectrum_from_correlation(tau: np.ndarray, samples: np.ndarray,
                              omega_grid, max_block: int = 16_000_000) -> np.ndarray:
    """S(omega) = 2 Re int_0^inf C(tau) e^{i omega tau} dtau by trapezoid.

    Direct quadrature keeps arbitrary omega grids and the one-sided 2*Re
    convention exact as written (no FFT padding artifacts). The phase
    matrix is evaluated in blocks bounded by `max_block` elements.
    """
    tau = np.asarray(tau, dtype=float)
    samples = np.asarray(samples)
    omega_grid = np.asarray(omega_grid, dtype=float)
    if len(tau) < 2:
        return np.zeros(len(omega_grid))
    weights = np.empty_like(tau)
    weights[1:-1] = (tau[2:] - tau[:-2]) / 2.0
    weights[0] = (tau[1] - tau[0]) / 2.0
    weights[-1] = (tau[-1] - tau[-2]) / 2.0
    weighted = samples * weights
    steps = np.diff(tau)
    if len(tau) >= 4 and np.max(np.abs(steps - steps[0])) < 1e-9 * steps[0]:
        acc = _uniform_phase_sum(tau[0], float(steps[0]), weighted, omega_grid)
        return 2.0 * np.real(acc)
    acc = np.zeros(len(omega_grid), dtype=complex)
    stride = max(1, max_block // max(1, len(omega_grid)))
    for start in range(0, len(tau), stride):
        stop = start + stride
        block = np.exp(1j * omega_grid[:, None] * tau[start:stop][None, :])
        acc += block @ weighted[start:stop]
    return 2.0 * np.real(acc)


def _uniform_phase_sum(t0: float, dt: float, weighted: np.ndarray,
                       omega: np.ndarray) -> np.ndarray:
    """sum_i weighted_i e^{i omega tau_i} for tau_i = t0 + i dt.

    Splitting i = q*s + r factorizes the phase matrix into two sqrt-sized
    pieces and turns the sum into a single complex matmul.
    """
    n = len(weighted)
    s = max(1, int(np.sqrt(n)))
    blocks = -(-n // s)
    padded = np.zeros(blocks * s, dtype=complex)
    padded[:n] = weighted
    inner = np.exp(1j * np.outer(omega, dt * np.arange(s)))
    outer_ph = np.exp(1j * np.outer(omega, dt * s * np.arange(blocks)))
    partial = inner @ padded.reshape(blocks, s).T
    acc = np.sum(outer_ph * partial, axis=1)
    if t0 != 0.0:
        acc = acc * np.exp(1j * omega * t0)
    return acc


def emission_spectrum(basis: DressedBasis, table: TransitionTable,
                      liouvillian: Liouvillian, temperature: float,
                      omega_grid, normalization: str = "raw",
                      tau_max: float | None = None, step: float | None = None,
                      metadata: dict | None = None) -> Spectrum:
    """Thermal emission spectrum of the output field.

    normalization: "raw" leaves the quadrature value; "per-flux" divides by
    the total flux. Figure-style normalization across a set of spectra
    (divide by the lowest-temperature maximum) is applied by the caller,
    see `normalize_spectra`.
    """
    if normalization not in ("raw", "per-flux"):
        raise ValueError(f"unknown normalization {normalization!r}")
    tau, samples, flux = first_order_correlation(
        basis, table, liouvillian, temperature, tau_max=tau_max, step=step)
    values = spectrum_from_correlation(tau, samples, omega_grid)
    if normalization == "per-flux":
        values = values / flux
    meta = dict(metadata or {})
    meta.update(temperature=temperature, flux=flux,
                tau_max=float(tau[-1]), tau_step=float(tau[1] - tau[0]))
    return Spectrum(np.asarray(omega_grid, dtype=float), values,
                    normalization, meta)


def normalize_spectra(spectra: list[Spectrum]) -> list[Spectrum]:
    """Figure-style normalization: divide every spectrum in the set by the
    maximum of the lowest-temperature one."""
    if not spectra:
        return []
    coldest = min(spectra, key=lambda s: s.metadata.get("temperature", np.inf))
    scale = float(np.max(coldest.values))
    return [Spectrum(s.omega, s.values / scale, "paper-figure", dict(s.metadata))
            for s in spectra]


def oscillation_frequency(trace: CorrelationTrace) -> float:
    """Dominant oscillation frequency from median peak-to-peak spacing."""
    from scipy.signal import find_peaks

    values = trace.values
    span = float(np.max(values) - np.min(values))
    peaks, _ = find_peaks(values, prominence=0.01 * span)
    if len(peaks) < 2:
        raise ValueError("fewer than two peaks: no oscillation to measure")
    spacing = float(np.median(np.diff(trace.tau[peaks])))
    return 2.0 * np.pi / spacing
