"""Dressed basis: diagonalization, parity labels, transition tables and the
generalized emission operators built from the cavity-field time derivative.

All observables downstream are evaluated in this basis, where the thermal
state is diagonal and the master-equation dissipators are unit jumps.
"""
from __future__ import annotations

from dataclasses import dataclass, field, replace

import numpy as np

from .errors import DimensionError, HermiticityError
from .models import RabiParams, _n_tls, build_rabi, parity_operator
from .operators import (HilbertSpace, QOperator, embed, fock_annihilation,
                        tls_lowering)

DEGENERACY_TOL = 1e-9
SNAP_TOL = 1e-12


@dataclass(frozen=True, eq=False)
class DressedBasis:
    """Eigen-decomposition of a system Hamiltonian with parity labels.

    energies : ascending eigenvalues (units of the reference frequency)
    vectors  : column j is dressed state |j> in the bare product basis
    parities : +-1 excitation parity per state
    """

    space: HilbertSpace
    energies: np.ndarray = field(repr=False)
    vectors: np.ndarray = field(repr=False)
    parities: np.ndarray = field(repr=False)

    def __post_init__(self):
        for name in ("energies", "vectors", "parities"):
            arr = getattr(self, name)
            arr.setflags(write=False)

    @property
    def n_levels(self) -> int:
        return len(self.energies)

    def gap(self, k: int, j: int) -> float:
        """Delta_kj = omega_k - omega_j."""
        return float(self.energies[k] - self.energies[j])

    def truncate(self, level_cut: int) -> "DressedBasis":
        if level_cut < 2:
            raise DimensionError(f"level_cut must be >= 2, got {level_cut}")
        level_cut = min(level_cut, self.n_levels)
        return DressedBasis(
            self.space,
            self.energies[:level_cut].copy(),
            self.vectors[:, :level_cut].copy(),
            self.parities[:level_cut].copy(),
        )


@dataclass(frozen=True, eq=False)
class TransitionTable:
    """Dressed-basis transition elements per damping channel.

    coeffs[c][j, k] = -i <j|(c - c^dag)|k>; `x` is the cavity-field matrix
    <j|X|k>, identical to the cavity channel coefficients for X0 = 1.
    """

    coeffs: dict[str, np.ndarray]
    x: np.ndarray = field(repr=False)

    def __post_init__(self):
        for arr in self.coeffs.values():
            arr.setflags(write=False)
        self.x.setflags(write=False)

    @property
    def n_levels(self) -> int:
        return self.x.shape[0]

    def truncate(self, level_cut: int) -> "TransitionTable":
        cut = {name: c[:level_cut, :level_cut].copy() for name, c in self.coeffs.items()}
        return TransitionTable(cut, self.x[:level_cut, :level_cut].copy())


def _fix_phases(vectors: np.ndarray) -> np.ndarray:
    """Make the largest-magnitude component of each column real positive."""
    v = vectors.copy()
    for j in range(v.shape[1]):
        col = v[:, j]
        idx = int(np.argmax(np.abs(col)))
        ph = col[idx] / abs(col[idx])
        v[:, j] = col / ph
    return v


def diagonalize(h: QOperator, parity: QOperator,
                degeneracy_tol: float = DEGENERACY_TOL) -> DressedBasis:
    """Full spectrum of a Hermitian H with per-state parity assignment.

    Within clusters degenerate below `degeneracy_tol` the eigenvectors are
    rotated to carry definite parity (order: +1 first), which keeps
    transition tables deterministic at exact level crossings.
    """
    h.require_hermitian(what="Hamiltonian")
    if parity.space != h.space:
        raise DimensionError("parity operator lives on a different space")
    comm = h.commutator(parity).max_norm()
    if comm > 1e-8 * max(h.max_norm(), 1.0):
        raise HermiticityError(f"parity does not commute with H: |[H,P]| = {comm:.2e}")

    energies, vectors = np.linalg.eigh(h.mat)

    # split into degenerate clusters
    splits = np.nonzero(np.diff(energies) > degeneracy_tol)[0] + 1
    pmat = parity.mat
    for block in np.split(np.arange(len(energies)), splits):
        sub = vectors[:, block]
        psub = sub.conj().T @ pmat @ sub
        if len(block) > 1:
            pvals, rot = np.linalg.eigh((psub + psub.conj().T) / 2)
            order = np.argsort(-pvals)  # +1 first inside the cluster
            vectors[:, block] = sub @ rot[:, order]

    vectors = _fix_phases(vectors)
    pdiag = np.real(np.einsum("ij,ik,kj->j", vectors.conj(), pmat, vectors))
    parities = np.where(pdiag >= 0, 1, -1).astype(int)
    if np.max(np.abs(np.abs(pdiag) - 1.0)) > 1e-6:
        raise HermiticityError("eigenstates do not carry definite parity")
    return DressedBasis(h.space, energies, vectors, parities)


def transition_table(basis: DressedBasis, channels: dict[str, QOperator],
                     emission_channels: tuple[str, ...] = ("cavity",)
                     ) -> TransitionTable:
    """Conjugate each channel's -i(c - c^dag) into the dressed basis.

    Entries below the snap tolerance are zeroed exactly, which enforces the
    parity selection rule on X. The observed field X sums the listed
    emission channels (all mode quadratures share the output port); with a
    single cavity channel X_jk equals its coefficients since X0 = 1.
    """
    u = basis.vectors
    coeffs = {}
    for name, c in channels.items():
        if c.space != basis.space:
            raise DimensionError(f"channel {name!r} lives on a different space")
        mat = u.conj().T @ ((-1j) * (c.mat - c.mat.conj().T)) @ u
        mat[np.abs(mat) < SNAP_TOL] = 0.0
        coeffs[name] = mat
    for name in emission_channels:
        if name not in coeffs:
            raise DimensionError(f"no {name!r} channel supplied")
    x = sum(coeffs[name] for name in emission_channels).copy()
    return TransitionTable(coeffs, x)


def standard_channels(space: HilbertSpace, kind: str = "rabi") -> dict[str, QOperator]:
    """One damping channel per mode and per TLS."""
    n_tls = _n_tls(kind, space)
    channels = {}
    for i, slot in enumerate(range(n_tls, len(space.factors))):
        name = "cavity" if i == 0 else f"cavity{i + 1}"
        channels[name] = embed(fock_annihilation(space.factors[slot]), space, slot)
    for j in range(n_tls):
        name = "tls" if n_tls == 1 else f"tls{j}"
        channels[name] = embed(tls_lowering(), space, j)
    return channels


def emission_channel_names(space: HilbertSpace, kind: str = "rabi") -> tuple[str, ...]:
    n_modes = len(space.factors) - _n_tls(kind, space)
    return tuple("cavity" if i == 0 else f"cavity{i + 1}" for i in range(n_modes))


def dressed_space(n_levels: int) -> HilbertSpace:
    return HilbertSpace((n_levels,))


def default_level_cut(basis: DressedBasis, temperature: float,
                      window: float = 8.0, floor: float = 4.0) -> int:
    """States with omega_j - omega_ground <= window*k_B T + floor*omega0.

    Higher states contribute negligibly to thermal observables; certified
    by the truncation-doubling convergence tests rather than assumed.
    """
    rel = basis.energies - basis.energies[0]
    cut = int(np.searchsorted(rel, window * temperature + floor, side="right"))
    return max(4, min(cut, basis.n_levels))


def xdot_plus(basis: DressedBasis, table: TransitionTable,
              level_cut: int | None = None) -> QOperator:
    """Positive-frequency emission operator in the dressed basis.

    Strictly upper triangular: entry (j, k>j) is -i Delta_kj X_jk, so the
    dressed ground state is annihilated exactly and a zero-temperature
    system emits nothing.
    """
    if basis.n_levels != table.n_levels:
        raise DimensionError("basis and table have different level counts")
    d = basis.n_levels if level_cut is None else level_cut
    if d < 2:
        raise DimensionError(f"level_cut must be >= 2, got {d}")
    d = min(d, basis.n_levels)
    w = basis.energies[:d]
    mat = np.triu((-1j) * (w[None, :] - w[:, None]) * table.x[:d, :d], k=1)
    full = np.zeros((basis.n_levels, basis.n_levels), dtype=complex)
    full[:d, :d] = mat
    return QOperator(dressed_space(basis.n_levels), full)


def xdot_plus_filtered(basis: DressedBasis, table: TransitionTable,
                       j: int, k: int) -> QOperator:
    """Single-line emission operator for the k -> j transition (k > j)."""
    if not 0 <= j < k < basis.n_levels:
        raise DimensionError(f"need 0 <= j < k < {basis.n_levels}, got ({j}, {k})")
    mat = np.zeros((basis.n_levels, basis.n_levels), dtype=complex)
    mat[j, k] = (-1j) * basis.gap(k, j) * table.x[j, k]
    return QOperator(dressed_space(basis.n_levels), mat)


@dataclass(frozen=True)
class CrossingInterval:
    """Adjacent adiabatic levels (lower, lower+1) swap diabatic labels here."""

    g_lo: float
    g_hi: float
    lower: int
    upper: int


@dataclass(frozen=True, eq=False)
class LevelSweep:
    g_grid: np.ndarray
    energies: np.ndarray  # shape (len(g_grid), n_levels)
    crossings: tuple[CrossingInterval, ...]


def level_sweep(params: RabiParams, g_grid, n_levels: int = 12) -> LevelSweep:
    """Lowest eigenvalues versus coupling with diabatic crossing detection.

    Diabatic states are tracked by maximal eigenvector overlap between
    adjacent grid points; a grid step <= 0.01 resolves the known
    second/third excited-state crossing.
    """
    g_grid = np.asarray(g_grid, dtype=float)
    if g_grid.ndim != 1 or len(g_grid) == 0 or np.any(np.diff(g_grid) <= 0):
        raise ValueError("g_grid must be nonempty and strictly ascending")
    track = min(n_levels + 6, 2 * params.n_fock)

    energies = np.empty((len(g_grid), n_levels))
    crossings: list[CrossingInterval] = []
    prev_vecs = None
    prev_energies = None
    # position[label] = adiabatic slot currently occupied by diabatic state `label`
    position = np.arange(track)
    parity = parity_operator(params.space)
    for i, g in enumerate(g_grid):
        basis = diagonalize(build_rabi(replace(params, g=float(g))), parity)
        energies[i] = basis.energies[:n_levels]
        vecs = basis.vectors[:, :track]
        if prev_vecs is not None:
            overlap = np.abs(prev_vecs.conj().T @ vecs)
            from scipy.optimize import linear_sum_assignment

            rows, cols = linear_sum_assignment(-overlap)
            new_position = position.copy()
            for label in range(track):
                new_position[label] = cols[position[label]]
            for m in range(min(n_levels, track) - 1):
                if prev_energies[m + 1] - prev_energies[m] < DEGENERACY_TOL:
                    continue  # labels are ambiguous at an exact degeneracy
                was_lower = int(np.nonzero(position == m)[0][0])
                was_upper = int(np.nonzero(position == m + 1)[0][0])
                if (new_position[was_lower] == m + 1
                        and new_position[was_upper] == m):
                    crossings.append(CrossingInterval(
                        float(g_grid[i - 1]), float(g), m, m + 1))
            position = new_position
        prev_vecs = vecs
        prev_energies = basis.energies
    return LevelSweep(g_grid, energies, tuple(crossings))
