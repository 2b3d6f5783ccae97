"""Feature encodings of Choi matrices for the classifiers.

Five schemes are available:

``eigvals``
    Choi eigenvalues in descending order.
``eigvals_roots``
    The eigenvalues followed by their square and fourth roots.
``elements``
    Real parts of the upper triangle and imaginary parts of the strict lower
    triangle, stacked column by column.
``eigensystem``
    Eigenvalues plus hyperspherical angles of every eigenvector, keeping only
    the angles that belong to real-part coordinates.
``eigensystem_normalized``
    As ``eigensystem`` with the eigenvalues mixed by a fixed sign matrix and
    the angles shrunk to ``[0, 0.25]``.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .choi import reshuffle
from .errors import DomainError, FLAG_DEGENERATE_EIGENSYSTEM

SCHEMES = ("eigvals", "eigvals_roots", "elements", "eigensystem", "eigensystem_normalized")

DEGENERACY_GAP = 1e-8
PHASE_EPS = 1e-12
ANGLE_SCALE = 0.25

# eigenvalue mixing for the normalized eigensystem; rows act on (lambda - 0.5)
EIGVAL_MIX = np.array(
    [
        [1, 1, 1, 1],
        [1, -1, -1, 1],
        [-1, 1, -1, 1],
        [-1, -1, 1, 1],
    ],
    dtype=float,
)


@dataclass(frozen=True)
class ChoiEigensystem:
    eigenvalues: np.ndarray
    eigenvectors: np.ndarray


@dataclass(frozen=True)
class FeatureVector:
    scheme: str
    values: np.ndarray
    flags: tuple = field(default=())

    @property
    def width(self) -> int:
        return int(self.values.size)


def _entries(fmap):
    return fmap.entries if hasattr(fmap, "entries") else np.asarray(fmap)


def choi_matrix(fmap) -> np.ndarray:
    """Hermitized Choi matrix of a map (FloquetMap or bare superoperator)."""
    c = reshuffle(_entries(fmap))
    return (c + c.conj().T) / 2


def choi_eigensystem(fmap) -> ChoiEigensystem:
    """Eigenvalues (descending) and matching eigenvectors of the Choi matrix."""
    w, v = np.linalg.eigh(choi_matrix(fmap))
    order = np.argsort(-w, kind="stable")
    return ChoiEigensystem(w[order], v[:, order])


def features_eigvals(es: ChoiEigensystem) -> FeatureVector:
    return FeatureVector("eigvals", es.eigenvalues.copy())


def features_eigvals_roots(es: ChoiEigensystem) -> FeatureVector:
    lam = np.clip(es.eigenvalues, 0.0, None)
    return FeatureVector("eigvals_roots", np.concatenate([lam, np.sqrt(lam), np.sqrt(np.sqrt(lam))]))


def elements_matrix(c: np.ndarray) -> np.ndarray:
    """Real matrix with Re C on and above the diagonal and Im C below it."""
    c = np.asarray(c)
    upper = np.triu(np.ones(c.shape, dtype=bool))
    return np.where(upper, c.real, c.imag)


def elements_to_choi(r: np.ndarray) -> np.ndarray:
    """Inverse of :func:`elements_matrix` for Hermitian C."""
    r = np.asarray(r, dtype=float)
    upper = np.triu(r)
    lower = np.tril(r, -1)
    re = upper + np.triu(r, 1).T
    im = lower - lower.T
    return re + 1j * im


def features_elements(fmap) -> FeatureVector:
    r = elements_matrix(choi_matrix(fmap))
    return FeatureVector("elements", r.reshape(-1, order="F"))


def to_spherical(v, tol: float = 1e-10) -> np.ndarray:
    """Hyperspherical angles of a real unit vector of length L (L - 1 angles).

    ``phi_i = arccot(x_i / |x_{i+1:}|)`` lies in [0, pi] for i < L - 1; the last
    angle is the azimuth ``atan2(x_L, x_{L-1})`` in [0, 2 pi). When the tail is
    entirely zero the remaining angles are 0.
    """
    v = np.asarray(v, dtype=float)
    norm = np.linalg.norm(v)
    if abs(norm - 1) > tol:
        raise DomainError(f"expected a unit vector, norm is {norm}")
    # tail[i] = |x_{i+1:}|, computed from the back to avoid cancellation
    tail = np.sqrt(np.cumsum((v**2)[::-1])[::-1])
    angles = np.arctan2(tail[1:-1], v[:-2])
    last = np.arctan2(v[-1], v[-2]) % (2 * np.pi)
    if last >= 2 * np.pi:  # -tiny wraps to exactly 2 pi in floating point
        last = 0.0
    return np.append(angles, last)


def from_spherical(angles, radius: float = 1.0) -> np.ndarray:
    angles = np.asarray(angles, dtype=float)
    size = angles.size + 1
    out = np.empty(size)
    s = radius
    for i, a in enumerate(angles):
        out[i] = s * np.cos(a)
        s = s * np.sin(a)
    out[size - 1] = s
    return out


def fix_phase(vec: np.ndarray, eps: float = PHASE_EPS) -> np.ndarray:
    """Remove the global phase of a complex vector.

    The last component with modulus above ``eps`` is made real, then the sign
    is chosen so that the first real part above ``eps`` is positive.
    """
    v = np.asarray(vec, dtype=complex).copy()
    big = np.flatnonzero(np.abs(v) > eps)
    if big.size == 0:
        return v
    k = big[-1]
    v = v * (np.conj(v[k]) / abs(v[k]))
    v[k] = v[k].real
    first = np.flatnonzero(np.abs(v.real) > eps)
    if first.size and v.real[first[0]] < 0:
        v = -v
    return v


def unfold(vec: np.ndarray) -> np.ndarray:
    """Interleave real and imaginary parts: (Re x1, Im x1, Re x2, ...)."""
    v = np.asarray(vec, dtype=complex)
    return np.column_stack([v.real, v.imag]).reshape(-1)


def eigenvector_angles(vec: np.ndarray, purge: bool = True) -> np.ndarray:
    """Angles of one eigenvector divided by pi, last (azimuthal) angle dropped.

    With ``purge`` only angles indexed by real-part slots (even 0-based
    positions of the unfolded vector) are kept.
    """
    real = unfold(fix_phase(vec))
    real = real / np.linalg.norm(real)
    angles = to_spherical(real)[:-1] / np.pi
    if purge:
        angles = angles[0::2]
    return angles


def normalize_eigenvalues(lam) -> np.ndarray:
    """``0.5 (lambda - 0.5) M`` with ``lambda`` as a row vector."""
    lam = np.asarray(lam, dtype=float)
    return 0.5 * (lam - 0.5) @ EIGVAL_MIX


def features_eigensystem(es: ChoiEigensystem, purge: bool = True, normalize: bool = False) -> FeatureVector:
    lam = es.eigenvalues
    flags = ()
    if np.any(np.abs(np.diff(lam)) < DEGENERACY_GAP):
        flags = (FLAG_DEGENERATE_EIGENSYSTEM,)
    blocks = [eigenvector_angles(es.eigenvectors[:, k], purge) for k in range(lam.size)]
    angles = np.concatenate(blocks)
    if normalize:
        if lam.size != EIGVAL_MIX.shape[0]:
            raise DomainError("eigenvalue normalization is defined for single-qubit maps")
        head = normalize_eigenvalues(lam)
        angles = ANGLE_SCALE * angles
        scheme = "eigensystem_normalized"
    else:
        head = lam.copy()
        scheme = "eigensystem"
    return FeatureVector(scheme, np.concatenate([head, angles]), flags)


def featurize(fmap, scheme: str) -> FeatureVector:
    """Feature vector of a map under one of :data:`SCHEMES`."""
    if scheme == "elements":
        return features_elements(fmap)
    es = choi_eigensystem(fmap)
    if scheme == "eigvals":
        return features_eigvals(es)
    if scheme == "eigvals_roots":
        return features_eigvals_roots(es)
    if scheme == "eigensystem":
        return features_eigensystem(es, purge=True, normalize=False)
    if scheme == "eigensystem_normalized":
        return features_eigensystem(es, purge=True, normalize=True)
    raise ValueError(f"unknown feature scheme {scheme!r}")


def feature_width(scheme: str, dim: int = 2) -> int:
    d2 = dim * dim
    return {
        "eigvals": d2,
        "eigvals_roots": 3 * d2,
        "elements": d2 * d2,
        # 2 d2 - 2 angles per vector before the purge, every other one kept
        "eigensystem": d2 + d2 * (d2 - 1),
        "eigensystem_normalized": d2 + d2 * (d2 - 1),
    }[scheme]
