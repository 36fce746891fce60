"""Dense complex operators on truncated tensor-product Hilbert spaces.

Everything is stored as a plain dense ndarray: target dimensions stay
below a few hundred, where dense eigensolvers beat any sparse format.
All values are immutable after construction and all operations are pure
functions, so instances can be shared freely across workers.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from math import prod

import numpy as np

from .errors import DimensionError, HermiticityError

HERMITICITY_TOL = 1e-10


@dataclass(frozen=True)
class HilbertSpace:
    """Ordered subsystem dimensions (TLS factors first, then modes)."""

    factors: tuple[int, ...]

    def __post_init__(self):
        factors = tuple(int(f) for f in self.factors)
        object.__setattr__(self, "factors", factors)
        if not factors:
            raise DimensionError("HilbertSpace needs at least one factor")
        for f in factors:
            if f < 2:
                raise DimensionError(f"factor dimension {f} < 2")

    @property
    def dim(self) -> int:
        return prod(self.factors)


@dataclass(frozen=True, eq=False)
class QOperator:
    """Square complex matrix tied to a HilbertSpace.

    Energies are dimensionless (units of the reference mode frequency,
    hbar = k_B = 1). The matrix buffer is made read-only on construction.
    """

    space: HilbertSpace
    mat: np.ndarray = field(repr=False)

    def __post_init__(self):
        m = np.array(self.mat, dtype=complex, order="C")
        if m.ndim != 2 or m.shape[0] != m.shape[1]:
            raise DimensionError(f"operator matrix must be square, got {m.shape}")
        if m.shape[0] != self.space.dim:
            raise DimensionError(
                f"matrix dimension {m.shape[0]} != space dimension {self.space.dim}"
            )
        m.setflags(write=False)
        object.__setattr__(self, "mat", m)

    @property
    def dim(self) -> int:
        return self.space.dim

    def dag(self) -> "QOperator":
        return QOperator(self.space, self.mat.conj().T)

    def trace(self) -> complex:
        return complex(np.trace(self.mat))

    def max_norm(self) -> float:
        return float(np.max(np.abs(self.mat))) if self.dim else 0.0

    def is_hermitian(self, tol: float = HERMITICITY_TOL) -> bool:
        return float(np.max(np.abs(self.mat - self.mat.conj().T))) <= tol

    def require_hermitian(self, tol: float = HERMITICITY_TOL, what: str = "operator"):
        """Reject (never symmetrize) to surface construction bugs."""
        dev = float(np.max(np.abs(self.mat - self.mat.conj().T)))
        if dev > tol:
            raise HermiticityError(f"{what}: |M - M^dag|_max = {dev:.3e} > {tol:.1e}")
        return self

    def _coerce(self, other) -> np.ndarray:
        if isinstance(other, QOperator):
            if other.space != self.space:
                raise DimensionError("operands live on different spaces")
            return other.mat
        raise TypeError(f"expected QOperator, got {type(other).__name__}")

    def __add__(self, other) -> "QOperator":
        return QOperator(self.space, self.mat + self._coerce(other))

    def __sub__(self, other) -> "QOperator":
        return QOperator(self.space, self.mat - self._coerce(other))

    def __neg__(self) -> "QOperator":
        return QOperator(self.space, -self.mat)

    def __mul__(self, scalar) -> "QOperator":
        if isinstance(scalar, QOperator):
            raise TypeError("use @ for operator products")
        return QOperator(self.space, self.mat * complex(scalar))

    __rmul__ = __mul__

    def __matmul__(self, other) -> "QOperator":
        return QOperator(self.space, self.mat @ self._coerce(other))

    def commutator(self, other: "QOperator") -> "QOperator":
        o = self._coerce(other)
        return QOperator(self.space, self.mat @ o - o @ self.mat)


def identity(space: HilbertSpace) -> QOperator:
    return QOperator(space, np.eye(space.dim, dtype=complex))


def fock_annihilation(n_fock: int) -> QOperator:
    """Truncated bosonic annihilation operator, <m-1|a|m> = sqrt(m)."""
    if n_fock < 2:
        raise DimensionError(f"Fock truncation must be >= 2, got {n_fock}")
    mat = np.diag(np.sqrt(np.arange(1, n_fock)), 1).astype(complex)
    return QOperator(HilbertSpace((n_fock,)), mat)


def tls_lowering() -> QOperator:
    """Two-level lowering operator; excited state carries index 1."""
    return QOperator(HilbertSpace((2,)), np.array([[0, 1], [0, 0]], dtype=complex))


def embed(op: QOperator, space: HilbertSpace, slot: int) -> QOperator:
    """Kronecker-embed a single-factor operator at position `slot`."""
    if not 0 <= slot < len(space.factors):
        raise DimensionError(f"slot {slot} out of range for {len(space.factors)} factors")
    if op.dim != space.factors[slot]:
        raise DimensionError(
            f"operator dimension {op.dim} != factor dimension {space.factors[slot]}"
        )
    mat = np.eye(1, dtype=complex)
    for i, f in enumerate(space.factors):
        mat = np.kron(mat, op.mat if i == slot else np.eye(f, dtype=complex))
    return QOperator(space, mat)
