import numpy as np
import pytest

from spinchain.hamiltonians import OperatorSum, build_invariant, sample_random
from spinchain.pauli import PauliString
from spinchain.spectra import diagonalize_dense
from spinchain.symmetry import (
    build_momentum_basis,
    joint_eigenbasis,
    translate_index,
    translation_permutation,
)


def test_translate_index_example():
    # |011> -> |101> for n=3 (site n wraps to site 1)
    assert translate_index(0b011, 3) == 0b101


def test_translate_fixed_points():
    assert translate_index(0, 6) == 0
    assert translate_index((1 << 6) - 1, 6) == (1 << 6) - 1


def test_translate_n_applications_is_identity():
    n = 5
    for b in range(1 << n):
        t = b
        for _ in range(n):
            t = translate_index(t, n)
        assert t == b


def test_translate_index_range_check():
    with pytest.raises(ValueError):
        translate_index(8, 3)


def test_permutation_matches_scalar_map():
    perm = translation_permutation(4)
    assert [translate_index(b, 4) for b in range(16)] == list(perm)


def test_sector_dims_n3():
    dims = [s.dim for s in build_momentum_basis(3)]
    assert dims == [4, 2, 2]


def test_sector_dims_n1():
    sectors = build_momentum_basis(1)
    assert len(sectors) == 1 and sectors[0].dim == 2


def test_sector_dims_n5():
    dims = [s.dim for s in build_momentum_basis(5)]
    assert dims == [8, 6, 6, 6, 6]
    assert sum(dims) == 32


def test_sector_vectors_are_t_eigenvectors():
    n = 6
    perm = translation_permutation(n)
    inv = np.empty_like(perm)
    inv[perm] = np.arange(len(perm))
    for sector in build_momentum_basis(n):
        basis = sector.dense_basis()
        phase = np.exp(2j * np.pi * sector.k / n)
        assert np.max(np.abs(basis[inv] - phase * basis)) < 1e-12


def test_sector_bases_orthonormal_and_complete():
    n = 5
    full = np.concatenate([s.dense_basis() for s in build_momentum_basis(n)], axis=1)
    assert full.shape == (32, 32)
    assert np.max(np.abs(full.conj().T @ full - np.eye(32))) < 1e-12


def test_joint_eigenbasis_ising():
    alpha = np.zeros((4, 3))
    alpha[3, 2] = 1.0
    h = build_invariant(alpha, 4)
    e = joint_eigenbasis(h)
    perm = translation_permutation(4)
    inv = np.empty_like(perm)
    inv[perm] = np.arange(len(perm))
    # every eigenvector is a T eigenvector with the reported momentum
    for j in range(e.size):
        v = e.eigenvectors[:, j]
        phase = np.exp(2j * np.pi * e.momenta[j] / 4)
        assert np.max(np.abs(v[inv] - phase * v)) < 1e-10


def test_joint_eigenbasis_zero_operator():
    e = joint_eigenbasis(OperatorSum.zero(3))
    assert np.allclose(e.eigenvalues, 0.0)
    assert e.size == 8


def test_joint_eigenbasis_matches_dense_spectrum():
    h = sample_random("invariant", 6, 0)
    e = joint_eigenbasis(h)
    dense = diagonalize_dense(h, want_vectors=False)
    assert np.max(np.abs(e.eigenvalues - dense.eigenvalues)) < 1e-9
    assert e.residual < 1e-10


def test_joint_eigenbasis_rejects_non_invariant():
    h = sample_random("nn", 5, 0)
    with pytest.raises(ValueError):
        joint_eigenbasis(h)


def test_joint_eigenbasis_columns_orthonormal():
    h = sample_random("invariant", 5, 4)
    e = joint_eigenbasis(h)
    gram = e.eigenvectors.conj().T @ e.eigenvectors
    assert np.max(np.abs(gram - np.eye(e.size))) < 1e-10


def test_translation_conjugates_strings_cyclically():
    """Conjugating by the index permutation moves single-site support by one site."""
    n = 4
    perm = translation_permutation(n)
    for code in (1, 2, 3):
        a = PauliString.single(n, 1, code).to_dense()
        b = PauliString.single(n, 2, code).to_dense()
        assert np.max(np.abs(b[np.ix_(perm, perm)] - a)) < 1e-12
