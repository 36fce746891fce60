import numpy as np
import pytest

from thermalrabi import (DimensionError, HermiticityError, HilbertSpace,
                         QOperator, embed, fock_annihilation, identity,
                         tls_lowering)
from conftest import random_hermitian


def test_hilbert_space_invariants():
    space = HilbertSpace((2, 3, 4))
    assert space.dim == 24
    with pytest.raises(DimensionError):
        HilbertSpace((2, 1))
    with pytest.raises(DimensionError):
        HilbertSpace(())


def test_fock_annihilation_smallest_truncation():
    a = fock_annihilation(2)
    assert np.array_equal(a.mat, [[0, 1], [0, 0]])


def test_fock_annihilation_sqrt_ladder():
    a = fock_annihilation(3)
    expected = np.zeros((3, 3), dtype=complex)
    expected[0, 1] = 1.0
    expected[1, 2] = np.sqrt(2)
    assert np.allclose(a.mat, expected, atol=0)


def test_number_operator_diagonal():
    a = fock_annihilation(4)
    n = a.dag() @ a
    assert np.allclose(n.mat, np.diag([0, 1, 2, 3]), atol=0)


def test_fock_annihilation_rejects_tiny_dimension():
    with pytest.raises(DimensionError):
        fock_annihilation(1)


def test_tls_lowering_definition():
    s = tls_lowering()
    assert np.array_equal(s.mat, [[0, 1], [0, 0]])
    assert np.allclose((s.dag() @ s).mat, np.diag([0, 1]))
    sx = s + s.dag()
    assert np.allclose((sx @ sx).mat, np.eye(2))


def test_embed_kron_with_identity():
    space = HilbertSpace((2, 3))
    emb = embed(tls_lowering(), space, 0)
    assert emb.dim == 6
    assert np.allclose(emb.mat, np.kron(tls_lowering().mat, np.eye(3)))
    ident = embed(identity(HilbertSpace((2,))), space, 0)
    assert np.allclose(ident.mat, np.eye(6))


def test_embed_commutator_truncation_defect():
    # oracle: explicit 6x6 matrix product in the bare kron representation
    space = HilbertSpace((2, 3))
    a = embed(fock_annihilation(3), space, 1)
    comm = a.commutator(a.dag())
    a_bare = np.kron(np.eye(2), fock_annihilation(3).mat)
    oracle = a_bare @ a_bare.conj().T - a_bare.conj().T @ a_bare
    assert np.allclose(comm.mat, oracle, atol=0)
    # identity except the highest Fock block, which carries the defect -n_max
    expected = np.kron(np.eye(2), np.diag([1.0, 1.0, -2.0]))
    assert np.allclose(comm.mat, expected)


def test_embed_errors():
    space = HilbertSpace((2, 3))
    with pytest.raises(DimensionError):
        embed(tls_lowering(), space, 1)  # dimension mismatch
    with pytest.raises(DimensionError):
        embed(tls_lowering(), space, 2)  # slot out of range


def test_embed_preserves_spectra(rng):
    # eigenvalues of embed(op) are those of op, each with multiplicity
    # equal to the product of the other factor dimensions
    space = HilbertSpace((3, 2, 2))
    op = QOperator(HilbertSpace((3,)), random_hermitian(rng, 3))
    emb = embed(op, space, 0)
    got = np.sort(np.linalg.eigvalsh(emb.mat))
    expected = np.sort(np.repeat(np.linalg.eigvalsh(op.mat), 4))
    assert np.allclose(got, expected, atol=1e-12)


def test_adjoint_involution_and_trace():
    a = fock_annihilation(5)
    assert np.array_equal(a.dag().dag().mat, a.mat)
    d = QOperator(HilbertSpace((3,)), np.diag([0, 1, 2]).astype(complex))
    assert d.trace() == 3
    h = d + QOperator(HilbertSpace((3,)), np.full((3, 3), 0.5 + 0j))
    assert h.commutator(h).max_norm() == 0.0


def test_algebra_dimension_mismatch():
    a2 = fock_annihilation(2)
    a3 = fock_annihilation(3)
    with pytest.raises(DimensionError):
        a2 @ a3
    with pytest.raises(DimensionError):
        a2 + a3


def test_hermiticity_check_rejects():
    m = np.eye(3, dtype=complex)
    m[0, 1] = 1e-8  # above the 1e-10 gate
    op = QOperator(HilbertSpace((3,)), m)
    with pytest.raises(HermiticityError):
        op.require_hermitian()
    assert not op.is_hermitian()
    assert op.is_hermitian(tol=1e-7)


def test_operators_deterministic_and_immutable():
    a1 = fock_annihilation(6)
    a2 = fock_annihilation(6)
    assert np.array_equal(a1.mat, a2.mat)
    with pytest.raises(ValueError):
        a1.mat[0, 0] = 1.0


def test_scalar_and_matmul_semantics():
    a = fock_annihilation(3)
    assert np.allclose((2j * a).mat, 2j * a.mat)
    assert np.allclose((a @ a.dag()).mat, a.mat @ a.mat.conj().T)
    with pytest.raises(TypeError):
        a * a  # operator product must be explicit
