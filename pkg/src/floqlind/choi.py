"""Reshuffling, the maximally entangled state, and conditional complete positivity.

Composite indices are row-major, ``(i, j) -> i * N + j``, and reshuffling is
``C[(i, j), (k, l)] = K[(i, k), (j, l)]``. With column-stacked superoperators
this turns the identity map into ``N |Phi><Phi|`` and every CP map into a
positive semidefinite matrix.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .errors import DimensionError, DomainError, InvalidGeneratorError

HERMITICITY_TOL = 1e-8


def _side(m: np.ndarray) -> int:
    if m.ndim < 2 or m.shape[-1] != m.shape[-2]:
        raise DimensionError(f"expected a square matrix, got shape {m.shape}")
    n = int(round(np.sqrt(m.shape[-1])))
    if n * n != m.shape[-1]:
        raise DimensionError(f"side {m.shape[-1]} is not a perfect square")
    return n


def reshuffle(m: np.ndarray) -> np.ndarray:
    """Index permutation ``C[ij, kl] = M[ik, jl]``; an involution.

    Works on stacks of matrices (leading axes are kept).
    """
    m = np.asarray(m)
    n = _side(m)
    lead = m.shape[:-2]
    t = m.reshape(lead + (n, n, n, n))
    # axes of t: (i, k, j, l) -> want (i, j, k, l)
    t = np.swapaxes(t, -3, -2)
    return t.reshape(lead + (n * n, n * n)).copy()


@dataclass(frozen=True)
class PhiProjectors:
    phi: np.ndarray
    phi_perp: np.ndarray
    # orthonormal basis of range(phi_perp), shape (N^2, N^2 - 1)
    basis: np.ndarray


@lru_cache(maxsize=16)
def _phi_projectors(dim: int) -> PhiProjectors:
    phi = np.zeros(dim * dim, dtype=complex)
    phi[[i * dim + i for i in range(dim)]] = 1 / np.sqrt(dim)
    perp = np.eye(dim * dim) - np.outer(phi, phi.conj())
    # complete phi to an orthonormal basis; the trailing columns span the complement
    q, _ = np.linalg.qr(np.column_stack([phi, np.eye(dim * dim)]))
    basis = q[:, 1 : dim * dim]
    for a in (phi, perp, basis):
        a.setflags(write=False)
    return PhiProjectors(phi, perp, basis)


def phi_projectors(dim: int) -> PhiProjectors:
    """|Phi> = sum_i |ii>/sqrt(N), its orthogonal projector, and a basis of its range."""
    if dim < 2:
        raise DomainError(f"dim must be >= 2, got {dim}")
    return _phi_projectors(int(dim))


def deflate(choi: np.ndarray) -> np.ndarray:
    """Restrict ``Phi_perp C Phi_perp`` to range(Phi_perp): ``Q^+ C Q``.

    The structural zero eigenvalue along |Phi> is removed; the result has side
    N^2 - 1. Accepts stacks.
    """
    q = phi_projectors(_side(choi)).basis
    return q.conj().T @ choi @ q


def min_eigenvalue_hermitian(m: np.ndarray) -> np.ndarray:
    """Smallest eigenvalue of the Hermitian part, vectorized over leading axes."""
    sym = (m + np.swapaxes(m, -1, -2).conj()) / 2
    return np.linalg.eigvalsh(sym)[..., 0]


def hermiticity_defect(superop: np.ndarray) -> float:
    """Max-entry anti-Hermitian residual of the reshuffled matrix."""
    c = reshuffle(superop)
    return float(np.max(np.abs(c - c.conj().T)))


def ccp_min_eigenvalue(superop: np.ndarray, tol: float = HERMITICITY_TOL) -> float:
    """Minimum eigenvalue of ``Phi_perp K^Gamma Phi_perp`` on range(Phi_perp).

    A non-negative value means ``superop`` is conditionally completely positive.
    """
    superop = np.asarray(superop)
    defect = hermiticity_defect(superop)
    if defect > tol:
        raise InvalidGeneratorError(f"generator is not Hermiticity preserving (defect {defect:.3e})")
    return float(min_eigenvalue_hermitian(deflate(reshuffle(superop))))


def choi_from_action(action, dim: int) -> np.ndarray:
    """Choi matrix in the reshuffle convention, built directly from basis action.

    ``C[(i, j), (k, l)] = <k| action(|l><j|) |i>``; independent of ``reshuffle``.
    """
    out = np.zeros((dim * dim, dim * dim), dtype=complex)
    for j in range(dim):
        for l in range(dim):
            basis = np.zeros((dim, dim), dtype=complex)
            basis[l, j] = 1.0
            img = action(basis)
            for i in range(dim):
                for k in range(dim):
                    out[i * dim + j, k * dim + l] = img[k, i]
    return out
