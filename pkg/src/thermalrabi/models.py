"""Rabi-model Hamiltonians, their variants, and the excitation parity operator.

Tensor factor order is (TLS_1 ... TLS_J, mode_1 ...): keeping TLS factors
first makes matrix dumps comparable across runs and implementations.
All frequencies are in units of the (first) cavity frequency.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DimensionError, ModelError
from .operators import HilbertSpace, QOperator, embed, fock_annihilation, tls_lowering

# Keeps supplement configurations (4 TLS x n_fock=16 -> 256) comfortably
# inside dense-eigensolver range.
DIM_CAP = 4096


@dataclass(frozen=True)
class RabiParams:
    """Single mode + single TLS."""

    g: float
    omega0: float = 1.0
    omega_x: float = 1.0
    n_fock: int = 20

    def __post_init__(self):
        if self.omega0 <= 0 or self.omega_x <= 0:
            raise ModelError("frequencies must be positive")
        if self.g < 0:
            raise ModelError("coupling must be >= 0")
        if self.n_fock < 2:
            raise ModelError(f"n_fock must be >= 2, got {self.n_fock}")

    @property
    def space(self) -> HilbertSpace:
        return HilbertSpace((2, self.n_fock))


@dataclass(frozen=True)
class MultiTlsParams:
    """Single mode + J two-level systems, tls = ((omega_x_j, g_j), ...)."""

    tls: tuple[tuple[float, float], ...]
    omega0: float = 1.0
    n_fock: int = 20

    def __post_init__(self):
        if not self.tls:
            raise ModelError("need at least one TLS")
        object.__setattr__(self, "tls", tuple((float(w), float(g)) for w, g in self.tls))
        if self.omega0 <= 0:
            raise ModelError("omega0 must be positive")
        for w, g in self.tls:
            if w <= 0:
                raise ModelError("TLS frequencies must be positive")
            if g < 0:
                raise ModelError("couplings must be >= 0")
        if self.n_fock < 2:
            raise ModelError(f"n_fock must be >= 2, got {self.n_fock}")
        dim = 2 ** len(self.tls) * self.n_fock
        if dim > DIM_CAP:
            raise DimensionError(f"total dimension {dim} exceeds cap {DIM_CAP}")

    @property
    def space(self) -> HilbertSpace:
        return HilbertSpace((2,) * len(self.tls) + (self.n_fock,))


@dataclass(frozen=True)
class TwoModeParams:
    """Two modes + single TLS; mode_k = (omega0_k, g_k)."""

    mode1: tuple[float, float]
    mode2: tuple[float, float]
    omega_x: float = 1.0
    n_fock1: int = 10
    n_fock2: int = 8

    def __post_init__(self):
        for w, g in (self.mode1, self.mode2):
            if w <= 0:
                raise ModelError("mode frequencies must be positive")
            if g < 0:
                raise ModelError("couplings must be >= 0")
        if self.omega_x <= 0:
            raise ModelError("omega_x must be positive")
        if self.n_fock1 < 2 or self.n_fock2 < 2:
            raise ModelError("Fock truncations must be >= 2")
        dim = 2 * self.n_fock1 * self.n_fock2
        if dim > DIM_CAP:
            raise DimensionError(f"total dimension {dim} exceeds cap {DIM_CAP}")

    @property
    def space(self) -> HilbertSpace:
        return HilbertSpace((2, self.n_fock1, self.n_fock2))


def build_rabi(params: RabiParams) -> QOperator:
    """Full Rabi Hamiltonian, counter-rotating terms included."""
    space = params.space
    a = embed(fock_annihilation(params.n_fock), space, 1)
    s = embed(tls_lowering(), space, 0)
    h = (params.omega0 * (a.dag() @ a) + params.omega_x * (s.dag() @ s)
         + params.g * ((a + a.dag()) @ (s + s.dag())))
    return h.require_hermitian(what="Rabi Hamiltonian")


def build_rwa(params: RabiParams) -> QOperator:
    """Jaynes-Cummings form; conserves the total excitation number."""
    space = params.space
    a = embed(fock_annihilation(params.n_fock), space, 1)
    s = embed(tls_lowering(), space, 0)
    h = (params.omega0 * (a.dag() @ a) + params.omega_x * (s.dag() @ s)
         + params.g * (a @ s.dag() + a.dag() @ s))
    return h.require_hermitian(what="RWA Hamiltonian")


def build_multi_tls(params: MultiTlsParams) -> QOperator:
    space = params.space
    n_tls = len(params.tls)
    a = embed(fock_annihilation(params.n_fock), space, n_tls)
    h = params.omega0 * (a.dag() @ a)
    coupling = 0.0 * a
    for j, (omega_x, g) in enumerate(params.tls):
        s = embed(tls_lowering(), space, j)
        h = h + omega_x * (s.dag() @ s)
        coupling = coupling + g * (s + s.dag())
    h = h + (a + a.dag()) @ coupling
    return h.require_hermitian(what="multi-TLS Hamiltonian")


def build_two_mode(params: TwoModeParams) -> QOperator:
    space = params.space
    s = embed(tls_lowering(), space, 0)
    a1 = embed(fock_annihilation(params.n_fock1), space, 1)
    a2 = embed(fock_annihilation(params.n_fock2), space, 2)
    (w1, g1), (w2, g2) = params.mode1, params.mode2
    h = (w1 * (a1.dag() @ a1) + w2 * (a2.dag() @ a2)
         + params.omega_x * (s.dag() @ s)
         + (g1 * (a1 + a1.dag()) + g2 * (a2 + a2.dag())) @ (s + s.dag()))
    return h.require_hermitian(what="two-mode Hamiltonian")


MODEL_KINDS = ("rabi", "multi-tls", "two-mode")


def _n_tls(kind: str, space: HilbertSpace) -> int:
    if kind == "rabi":
        return 1
    if kind == "multi-tls":
        return len(space.factors) - 1
    if kind == "two-mode":
        return 1
    raise ModelError(f"unknown model kind {kind!r}")


def excitation_number(space: HilbertSpace, kind: str = "rabi") -> QOperator:
    """Total excitation-number operator (diagonal in the bare product basis)."""
    n_tls = _n_tls(kind, space)
    diag = np.zeros(space.dim)
    for slot, f in enumerate(space.factors):
        local = np.arange(f, dtype=float)
        if slot < n_tls and f != 2:
            raise DimensionError("TLS factors must have dimension 2")
        op = QOperator(HilbertSpace((f,)), np.diag(local).astype(complex))
        diag += np.real(np.diag(embed(op, space, slot).mat))
    return QOperator(space, np.diag(diag).astype(complex))


def parity_operator(space: HilbertSpace, kind: str = "rabi") -> QOperator:
    """Excitation parity exp(i pi N_exc); Hermitian, unitary, squares to 1."""
    n = np.round(np.real(np.diag(excitation_number(space, kind).mat)))
    return QOperator(space, np.diag((-1.0) ** n).astype(complex))


def cavity_lowering(space: HilbertSpace, kind: str = "rabi") -> QOperator:
    """Summed mode annihilation operator.

    For the two-mode model both modes share the output waveguide, so the
    observed field adds the per-mode contributions.
    """
    n_tls = _n_tls(kind, space)
    a_sum = QOperator(space, np.zeros((space.dim, space.dim), dtype=complex))
    for slot in range(n_tls, len(space.factors)):
        a_sum = a_sum + embed(fock_annihilation(space.factors[slot]), space, slot)
    return a_sum


def cavity_field(space: HilbertSpace, kind: str = "rabi") -> QOperator:
    """Cavity quadrature X = -i(a - a^dag) with X0 = 1."""
    a = cavity_lowering(space, kind)
    return (-1j) * (a - a.dag())
