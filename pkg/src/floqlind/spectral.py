"""Spectral decomposition of Floquet maps and the branches of their logarithm.

Hermiticity-preserving maps are real in an orthonormal basis of Hermitian
matrices. The eigenproblem is solved there, so conjugate pairs come out as
exact conjugates and real eigenvalues carry no imaginary noise; results are
mapped back to the column-stacked basis afterwards.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache
from typing import Sequence

import numpy as np

from .choi import deflate, phi_projectors, reshuffle
from .errors import (
    BranchAmbiguityError,
    ClassificationError,
    DimensionError,
    NearDefectiveError,
    SingularMapError,
)

PAIRING_TOL = 1e-9
MAX_CONDITION = 1e8
ZERO_TOL = 1e-10
CUT_TOL = 1e-6


@lru_cache(maxsize=16)
def hermitian_basis(dim: int) -> np.ndarray:
    """Columns are vec(G_a) for an orthonormal basis G_a of Hermitian N x N matrices."""
    cols = []
    for j in range(dim):
        g = np.zeros((dim, dim), dtype=complex)
        g[j, j] = 1
        cols.append(g)
    for j in range(dim):
        for k in range(j + 1, dim):
            g = np.zeros((dim, dim), dtype=complex)
            g[j, k] = g[k, j] = 1 / np.sqrt(2)
            cols.append(g)
            g = np.zeros((dim, dim), dtype=complex)
            g[j, k] = -1j / np.sqrt(2)
            g[k, j] = 1j / np.sqrt(2)
            cols.append(g)
    b = np.column_stack([g.reshape(-1, order="F") for g in cols])
    b.setflags(write=False)
    return b


def to_real_basis(superop: np.ndarray) -> np.ndarray:
    """Matrix of a Hermiticity-preserving map in the Hermitian basis (real up to rounding)."""
    n = int(round(np.sqrt(superop.shape[0])))
    b = hermitian_basis(n)
    return b.conj().T @ superop @ b


def classify_spectrum(eigenvalues: Sequence[complex], tol: float = PAIRING_TOL):
    """Split a conjugation-closed spectrum into real values and conjugate pairs.

    Returns ``(real_indices, pair_indices)``; each pair is ``(c, c_star)`` with
    ``Im(eigenvalues[c]) > 0``. Raises :class:`ClassificationError` if some
    complex value has no conjugate partner.
    """
    lam = np.asarray(eigenvalues, dtype=complex)
    scale = np.maximum(1.0, np.abs(lam))
    is_real = np.abs(lam.imag) <= tol * scale
    real_idx = [int(i) for i in np.flatnonzero(is_real)]
    upper = [int(i) for i in np.flatnonzero(~is_real & (lam.imag > 0))]
    lower = [int(i) for i in np.flatnonzero(~is_real & (lam.imag < 0))]
    upper.sort(key=lambda i: (lam[i].real, lam[i].imag))
    pairs = []
    for c in upper:
        if not lower:
            raise ClassificationError(f"eigenvalue {lam[c]} has no conjugate partner")
        dist = [abs(lam[j] - np.conj(lam[c])) for j in lower]
        best = int(np.argmin(dist))
        if dist[best] > tol * scale[c]:
            raise ClassificationError(f"eigenvalue {lam[c]} has no conjugate partner")
        pairs.append((c, lower.pop(best)))
    if lower:
        raise ClassificationError(f"eigenvalue {lam[lower[0]]} has no conjugate partner")
    return real_idx, pairs


@dataclass
class SpectralDecomposition:
    """Eigen-structure of a superoperator ``P = sum_k lambda_k P_k``.

    ``projectors[k] = v_k w_k^+`` with ``left_vectors @ right_vectors = 1``.
    ``clusters`` groups numerically equal eigenvalues; logarithms and branches
    use the merged cluster projectors, and ``branch_pairs`` holds one
    ``(P_c, P_c*)`` per conjugate pair of clusters.
    """

    eigenvalues: np.ndarray
    right_vectors: np.ndarray
    left_vectors: np.ndarray
    projectors: np.ndarray
    real_indices: list
    pair_indices: list
    condition_number: float
    period: float
    cluster_values: np.ndarray = field(repr=False)
    cluster_projectors: np.ndarray = field(repr=False)
    cluster_is_real: np.ndarray = field(repr=False)
    branch_pairs: list = field(repr=False)
    merged: bool = False

    @property
    def m(self) -> int:
        return len(self.real_indices)

    @property
    def n(self) -> int:
        """Number of integer branch variables."""
        return len(self.branch_pairs)

    @property
    def dim(self) -> int:
        return int(round(np.sqrt(self.eigenvalues.size)))

    @property
    def omega(self) -> float:
        return 2 * np.pi / self.period

    def reconstruct(self) -> np.ndarray:
        return np.einsum("k,kij->ij", self.eigenvalues, self.projectors)


def _cluster(lam: np.ndarray, tol: float) -> list[list[int]]:
    clusters: list[list[int]] = []
    for i in np.argsort(-np.abs(lam), kind="stable"):
        for cl in clusters:
            ref = lam[cl[0]]
            if abs(lam[i] - ref) <= tol * max(1.0, abs(ref)):
                cl.append(int(i))
                break
        else:
            clusters.append([int(i)])
    return clusters


def eigendecompose(
    superop: np.ndarray,
    period: float,
    tol: float = PAIRING_TOL,
    max_condition: float = MAX_CONDITION,
) -> SpectralDecomposition:
    """Eigendecomposition of a Hermiticity-preserving superoperator."""
    superop = np.asarray(superop, dtype=complex)
    n = int(round(np.sqrt(superop.shape[0])))
    b = hermitian_basis(n)
    real_form = to_real_basis(superop).real
    lam, vr = np.linalg.eig(real_form)
    vr = vr / np.linalg.norm(vr, axis=0)
    cond = float(np.linalg.cond(vr))
    if not np.isfinite(cond) or cond > max_condition:
        raise NearDefectiveError(f"eigenvector condition number {cond:.3e} exceeds {max_condition:.0e}")
    wr = np.linalg.inv(vr)
    right = b @ vr
    left = wr @ b.conj().T
    projectors = np.einsum("ik,kj->kij", right, left)

    real_idx, pair_idx = classify_spectrum(lam, tol)

    clusters = _cluster(lam, tol)
    values = np.array([lam[cl].mean() for cl in clusters])
    cproj = np.stack([projectors[cl].sum(axis=0) for cl in clusters])
    scale = np.maximum(1.0, np.abs(values))
    is_real = np.abs(values.imag) <= tol * scale
    values = np.where(is_real, values.real, values)

    upper = [c for c in range(len(clusters)) if not is_real[c] and values[c].imag > 0]
    lower = [c for c in range(len(clusters)) if not is_real[c] and values[c].imag < 0]
    branch_pairs = []
    for c in sorted(upper, key=lambda c: (values[c].real, values[c].imag)):
        dist = [abs(values[j] - np.conj(values[c])) for j in lower]
        if not dist or min(dist) > tol * scale[c]:
            raise ClassificationError(f"eigenvalue {values[c]} has no conjugate partner")
        partner = lower.pop(int(np.argmin(dist)))
        branch_pairs.append((cproj[c], cproj[partner]))

    return SpectralDecomposition(
        eigenvalues=lam.astype(complex),
        right_vectors=right,
        left_vectors=left,
        projectors=projectors,
        real_indices=real_idx,
        pair_indices=pair_idx,
        condition_number=cond,
        period=float(period),
        cluster_values=values.astype(complex),
        cluster_projectors=cproj,
        cluster_is_real=is_real,
        branch_pairs=branch_pairs,
        merged=len(clusters) < lam.size,
    )


def eigendecompose_map(fmap, **kwargs) -> SpectralDecomposition:
    """Decompose a :class:`~floqlind.propagator.FloquetMap`."""
    return eigendecompose(fmap.entries, fmap.period, **kwargs)


def principal_log(decomp: SpectralDecomposition) -> np.ndarray:
    """Principal generator ``K_0 = sum Log(lambda) P / T``."""
    values = decomp.cluster_values
    if np.any(np.abs(values) < ZERO_TOL):
        raise SingularMapError("map has an eigenvalue at zero")
    angle = np.abs(np.angle(values))
    if np.any(np.abs(angle - np.pi) < CUT_TOL):
        bad = values[np.abs(angle - np.pi) < CUT_TOL][0]
        raise BranchAmbiguityError(f"eigenvalue {bad} lies on the negative real axis")
    logs = np.where(
        decomp.cluster_is_real, np.log(np.abs(values)) + 0j, np.log(values)
    )
    return np.einsum("k,kij->ij", logs, decomp.cluster_projectors) / decomp.period


def branch_offsets(decomp: SpectralDecomposition) -> list[np.ndarray]:
    """``i omega (P_c - P_c*)`` for each branch variable."""
    return [1j * decomp.omega * (pc - pcs) for pc, pcs in decomp.branch_pairs]


def branch(k0: np.ndarray, decomp: SpectralDecomposition, x) -> np.ndarray:
    """Logarithm branch ``K_x = K_0 + i omega sum x_c (P_c - P_c*)``."""
    x = np.atleast_1d(np.asarray(x, dtype=float)) if np.size(x) else np.zeros(0)
    if x.size != decomp.n:
        raise DimensionError(f"branch vector has length {x.size}, expected {decomp.n}")
    out = np.array(k0, dtype=complex, copy=True)
    for xc, off in zip(x, branch_offsets(decomp)):
        if xc:
            out = out + xc * off
    return out


@dataclass(frozen=True)
class VMatrices:
    v0: np.ndarray
    vc: list

    def deflated(self) -> tuple[np.ndarray, np.ndarray]:
        """Restrictions to range(Phi_perp), Hermitized: shapes (M, M) and (n, M, M)."""
        d0 = deflate(self.v0)
        d0 = (d0 + d0.conj().T) / 2
        if self.vc:
            dc = deflate(np.stack(self.vc))
            dc = (dc + np.swapaxes(dc, -1, -2).conj()) / 2
        else:
            m = d0.shape[0]
            dc = np.zeros((0, m, m), dtype=complex)
        return d0, dc


def v_matrices(decomp: SpectralDecomposition, k0: np.ndarray) -> VMatrices:
    """Projected Choi matrices whose integer combinations decide Lindbladianity."""
    perp = phi_projectors(decomp.dim).phi_perp
    v0 = perp @ reshuffle(k0) @ perp
    vc = [perp @ reshuffle(off) @ perp for off in branch_offsets(decomp)]
    return VMatrices(v0, vc)
