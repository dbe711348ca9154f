"""Translation operator, momentum-sector bases and joint (H, T) eigenbases.

Phase convention: with T the rotate-right of index bits (site n moves to
site 1), every sector-k basis vector satisfies ``T v = exp(+2 pi i k / n) v``.
"""

from dataclasses import dataclass

import numpy as np

from .hamiltonians import DENSE_CAP
from .spectra import EigenDecomposition, commutator_norm

COMMUTATION_TOL = 1e-10


def translate_index(b, n):
    """Rotate-right of the n-bit basis index: ``|x_1..x_n> -> |x_n x_1..x_{n-1}>``."""
    if not 0 <= b < (1 << n):
        raise ValueError(f"index {b} out of range for n={n}")
    return (b >> 1) | ((b & 1) << (n - 1))


def translation_permutation(n):
    """Index array ``perm`` with ``T|b> = |perm[b]>``."""
    idx = np.arange(1 << n)
    return (idx >> 1) | ((idx & 1) << (n - 1))


@dataclass(frozen=True)
class MomentumSector:
    """Sparse orthonormal basis of the momentum-k eigenspace of T.

    Each orbit array lists the indices ``rep, T rep, T^2 rep, ...`` of one
    translation orbit; the associated unit vector carries Fourier phases
    ``exp(-2 pi i k t / n) / sqrt(d)`` on those indices.
    """

    n: int
    k: int
    orbits: tuple

    @property
    def dim(self):
        return len(self.orbits)

    def dense_basis(self):
        """2^n x dim complex matrix of the sector basis vectors."""
        mat = np.zeros((1 << self.n, self.dim), dtype=complex)
        for col, orbit in enumerate(self.orbits):
            d = len(orbit)
            t = np.arange(d)
            mat[orbit, col] = np.exp(-2j * np.pi * self.k * t / self.n) / np.sqrt(d)
        return mat


def _orbits(n):
    """Translation orbits of the 2^n basis indices, keyed by minimal index."""
    dim = 1 << n
    seen = np.zeros(dim, dtype=bool)
    orbits = []
    for b in range(dim):
        if seen[b]:
            continue
        orbit = [b]
        seen[b] = True
        t = translate_index(b, n)
        while t != b:
            orbit.append(t)
            seen[t] = True
            t = translate_index(t, n)
        orbits.append(np.array(orbit))
    return orbits


def build_momentum_basis(n):
    """All momentum sectors; an orbit of length d feeds every k with kd = 0 mod n."""
    if n < 1:
        raise ValueError("n must be positive")
    orbits = _orbits(n)
    sectors = []
    for k in range(n):
        members = tuple(o for o in orbits if (k * len(o)) % n == 0)
        sectors.append(MomentumSector(n, k, members))
    return sectors


def joint_eigenbasis(h, tol=COMMUTATION_TOL, cap=DENSE_CAP):
    """Diagonalize a translation-invariant H sector by sector.

    Per-sector diagonalization guarantees T-eigenvectors even when H is
    degenerate across momenta; a plain dense eigensolver would not.
    Eigenvalues are globally sorted ascending with a stable tie-break on
    the momentum label k.
    """
    n = h.n
    comm = commutator_norm(h, translation_permutation(n), cap=cap)
    if comm > tol:
        raise ValueError(f"H does not commute with T (scaled norm {comm:.3e} > {tol:.1e})")
    perm = translation_permutation(n)
    inv = np.empty_like(perm)
    inv[perm] = np.arange(len(perm))
    h_sparse = h.to_sparse()
    all_vals = []
    all_vecs = []
    all_k = []
    residual = 0.0
    for sector in build_momentum_basis(n):
        if sector.dim == 0:
            continue
        basis = sector.dense_basis()
        hb = h_sparse @ basis
        h_small = basis.conj().T @ hb
        vals, vecs = np.linalg.eigh(h_small)
        lifted = basis @ vecs
        # residuals against both H and T; H(lifted) = (H basis) vecs
        res_h = np.max(np.linalg.norm(hb @ vecs - lifted * vals, axis=0))
        phase = np.exp(2j * np.pi * sector.k / n)
        res_t = np.max(np.linalg.norm(lifted[inv] - phase * lifted, axis=0))
        residual = max(residual, float(res_h), float(res_t))
        all_vals.append(vals)
        all_vecs.append(lifted)
        all_k.append(np.full(sector.dim, sector.k))
    vals = np.concatenate(all_vals)
    vecs = np.concatenate(all_vecs, axis=1)
    ks = np.concatenate(all_k)
    order = np.lexsort((ks, vals))
    return EigenDecomposition(vals[order], vecs[:, order], residual, ks[order])
