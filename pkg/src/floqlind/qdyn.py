"""Hamiltonians, jump operators and Lindbladian superoperators.

Superoperators act on column-stacked density matrices,

    vec(A X B) = (B^T kron A) vec(X),

so ``vec(X) = X.reshape(-1, order="F")``. Every other module relies on this
single convention.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from .errors import DimensionError, DomainError, UnsupportedModelError

SIGMA_X = np.array([[0, 1], [1, 0]], dtype=complex)
SIGMA_Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
SIGMA_Z = np.array([[1, 0], [0, -1]], dtype=complex)
# lowering operator, sigma_z|0> = +|0>
SIGMA_MINUS = (SIGMA_X - 1j * SIGMA_Y) / 2

PROBLEMS = ("I", "II", "custom")

# benchmark parameters used for both driven models
DEFAULT_DELTA = 1.0
DEFAULT_GAMMA = 0.01


def vec(matrix: np.ndarray) -> np.ndarray:
    """Column-stack a matrix into a vector."""
    return np.asarray(matrix).reshape(-1, order="F")


def unvec(vector: np.ndarray, dim: Optional[int] = None) -> np.ndarray:
    vector = np.asarray(vector)
    if dim is None:
        dim = int(round(np.sqrt(vector.size)))
    if dim * dim != vector.size:
        raise DimensionError(f"vector of length {vector.size} is not a vectorized square matrix")
    return vector.reshape((dim, dim), order="F")


@dataclass(frozen=True)
class ModelSpec:
    """Parameters of a time-periodic qubit model.

    ``problem_id`` is ``"I"`` or ``"II"`` for the two driven benchmark models,
    or ``"custom"`` for a constant user-supplied generator passed via
    ``generator`` (an ``N^2 x N^2`` superoperator).
    """

    problem_id: str = "I"
    delta: float = DEFAULT_DELTA
    gamma: float = DEFAULT_GAMMA
    amplitude: float = 0.0
    omega: float = 1.0
    phase: float = 0.0
    dim: int = 2
    generator: Optional[np.ndarray] = field(default=None, compare=False, repr=False)

    def __post_init__(self):
        if self.problem_id not in PROBLEMS:
            raise UnsupportedModelError(f"unknown problem id {self.problem_id!r}")
        if not np.isfinite(self.gamma) or self.gamma < 0:
            raise DomainError(f"gamma must be >= 0, got {self.gamma}")
        if not np.isfinite(self.omega) or self.omega <= 0:
            raise DomainError(f"omega must be > 0, got {self.omega}")
        if not np.isfinite(self.amplitude) or self.amplitude < 0:
            raise DomainError(f"amplitude must be >= 0, got {self.amplitude}")
        if self.dim < 2:
            raise DomainError(f"dim must be >= 2, got {self.dim}")
        if self.problem_id in ("I", "II") and self.dim != 2:
            raise DomainError("the driven benchmark models are single-qubit (dim=2)")
        if self.problem_id == "custom":
            if self.generator is None:
                raise DomainError("custom models need a constant generator")
            g = np.asarray(self.generator, dtype=complex)
            if g.shape != (self.dim**2, self.dim**2):
                raise DimensionError(
                    f"generator shape {g.shape} does not match dim={self.dim}"
                )
            object.__setattr__(self, "generator", g)

    @property
    def period(self) -> float:
        return 2 * np.pi / self.omega


def _static_hamiltonian(model: ModelSpec) -> np.ndarray:
    if model.problem_id == "I":
        return model.delta / 2 * SIGMA_Z
    if model.problem_id == "II":
        return model.delta / 2 * (SIGMA_Z + SIGMA_Y)
    raise UnsupportedModelError("custom models have no built-in Hamiltonian")


def hamiltonian_at(model: ModelSpec, t: float) -> np.ndarray:
    """H(t) for Problem I or II; the drive couples through sigma_x."""
    h0 = _static_hamiltonian(model)
    return h0 + model.amplitude * np.cos(model.omega * t + model.phase) * SIGMA_X


def commutator_superop(h: np.ndarray) -> np.ndarray:
    """Superoperator of rho -> -i[H, rho]."""
    h = np.asarray(h, dtype=complex)
    eye = np.eye(h.shape[0])
    return -1j * (np.kron(eye, h) - np.kron(h.T, eye))


def dissipator_superop(jump: np.ndarray, rate: float = 1.0) -> np.ndarray:
    """Superoperator of rho -> rate * (L rho L^+ - {L^+ L, rho}/2)."""
    jump = np.asarray(jump, dtype=complex)
    eye = np.eye(jump.shape[0])
    ldl = jump.conj().T @ jump
    return rate * (
        np.kron(jump.conj(), jump) - 0.5 * np.kron(eye, ldl) - 0.5 * np.kron(ldl.T, eye)
    )


def lindbladian_superop(
    h: np.ndarray, jumps: Sequence[np.ndarray] = (), rates: Sequence[float] = ()
) -> np.ndarray:
    """Matrix of the GKSL generator with Hamiltonian ``h``.

    Parameters
    ----------
    h : (N, N) array
        Hermitian Hamiltonian.
    jumps : sequence of (N, N) arrays
        Jump operators.
    rates : sequence of float
        Non-negative rates, one per jump operator.

    Returns
    -------
    (N^2, N^2) complex array acting on column-stacked density matrices.
    """
    h = np.asarray(h, dtype=complex)
    if h.ndim != 2 or h.shape[0] != h.shape[1]:
        raise DimensionError(f"Hamiltonian must be square, got shape {h.shape}")
    n = h.shape[0]
    if len(jumps) != len(rates):
        raise DimensionError(f"{len(jumps)} jump operators but {len(rates)} rates")
    out = commutator_superop(h)
    for jump, rate in zip(jumps, rates):
        jump = np.asarray(jump, dtype=complex)
        if jump.shape != (n, n):
            raise DimensionError(f"jump operator shape {jump.shape} != {(n, n)}")
        if not np.isfinite(rate) or rate < 0:
            raise DomainError(f"rates must be non-negative, got {rate}")
        out = out + dissipator_superop(jump, rate)
    return out


def depolarizing_generator(dim: int) -> np.ndarray:
    """Generator of rho -> tr(rho) 1/dim - rho."""
    if dim < 2:
        raise DomainError(f"dim must be >= 2, got {dim}")
    v = vec(np.eye(dim))
    return np.outer(v, v.conj()) / dim - np.eye(dim * dim)


def generator_parts(model: ModelSpec) -> tuple[np.ndarray, np.ndarray]:
    """Split L(t) = static + cos(omega t + phase) * drive.

    The drive part already carries the amplitude. For custom models it is zero.
    """
    if model.problem_id == "custom":
        return model.generator, np.zeros_like(model.generator)
    static = lindbladian_superop(_static_hamiltonian(model), [SIGMA_MINUS], [model.gamma])
    drive = commutator_superop(model.amplitude * SIGMA_X)
    return static, drive


def lindbladian_at(model: ModelSpec, t: float) -> np.ndarray:
    static, drive = generator_parts(model)
    return static + np.cos(model.omega * t + model.phase) * drive


def trace_annihilation_defect(generator: np.ndarray) -> float:
    """max |vec(1)^+ L| for a generator; zero for trace-annihilating L."""
    n = int(round(np.sqrt(generator.shape[0])))
    return float(np.max(np.abs(vec(np.eye(n)).conj() @ generator)))


def trace_preservation_defect(superop: np.ndarray) -> float:
    n = int(round(np.sqrt(superop.shape[0])))
    v = vec(np.eye(n))
    return float(np.max(np.abs(v.conj() @ superop - v.conj())))


def superop_from_action(action, dim: int) -> np.ndarray:
    """Build the matrix of a linear map from its action on basis matrices E_ij."""
    out = np.zeros((dim * dim, dim * dim), dtype=complex)
    for j in range(dim):
        for i in range(dim):
            basis = np.zeros((dim, dim), dtype=complex)
            basis[i, j] = 1.0
            out[:, i + dim * j] = vec(action(basis))
    return out
