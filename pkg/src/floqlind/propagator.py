"""One-period propagators of time-periodic Lindbladians.

The Floquet map U(T) solves dU/dt = L(t) U with U(0) = 1. Integration uses
classical fixed-step RK4; the step count doubles until two successive
refinements agree to ``CONVERGENCE_TOL`` in max-entry norm.

Many models are integrated together in one batch: with ``L(t) = S + cos(omega t
+ phase) D`` the drive factor at step ``k`` is ``cos(2 pi k / steps + phase)``
for every model, so only the step length differs across the batch.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .choi import reshuffle
from .errors import DomainError, IntegrationAccuracyError
from .qdyn import ModelSpec, generator_parts, trace_preservation_defect
from .spectral import hermitian_basis

log = logging.getLogger(__name__)

DEFAULT_STEPS = 4096
MAX_STEPS = 2**20
MIN_STEPS = 100
CONVERGENCE_TOL = 1e-8
CPTP_TOL = 1e-9


@dataclass(frozen=True)
class FloquetMap:
    entries: np.ndarray
    period: float
    model: ModelSpec
    integrator_steps: int
    # max-entry change on the last step doubling
    convergence_defect: float = 0.0

    @property
    def dim(self) -> int:
        return int(round(np.sqrt(self.entries.shape[0])))


@dataclass(frozen=True)
class CPTPReport:
    trace_defect: float
    min_choi_eigenvalue: float
    choi_trace_defect: float
    hermiticity_defect: float

    def ok(self, tol: float = CPTP_TOL) -> bool:
        return (
            self.trace_defect < tol
            and self.choi_trace_defect < tol
            and self.hermiticity_defect < tol
            and self.min_choi_eigenvalue >= -tol
        )


def _rk4_step_matrices(static, drive, h, c0, ch, c1):
    """RK4 one-step propagators R with U_{k+1} = R U_k, for stacks of steps.

    ``static``/``drive``/``h`` carry a batch axis, the drive factors a leading
    step axis: output shape (steps, B, d, d).
    """
    eye = np.eye(static.shape[-1])
    l0 = static + c0[..., None, None] * drive
    lh = static + ch[..., None, None] * drive
    l1 = static + c1[..., None, None] * drive
    a1 = l0
    a2 = lh + 0.5 * h * (lh @ a1)
    a3 = lh + 0.5 * h * (lh @ a2)
    a4 = l1 + h * (l1 @ a3)
    return eye + (h / 6) * (a1 + 2 * a2 + 2 * a3 + a4)


def _ordered_product(mats):
    """mats[-1] @ ... @ mats[0] along the leading axis by pairwise reduction."""
    while mats.shape[0] > 1:
        if mats.shape[0] % 2:
            head = mats[-1:]
            mats = np.concatenate([mats[1:-1:2] @ mats[0:-1:2], head])
        else:
            mats = mats[1::2] @ mats[0::2]
    return mats[0]


def _rk4_batch(static, drive, period, phase, steps, chunk=256):
    """RK4 for a batch of generators ``static + cos(2 pi t/T + phase) drive``."""
    batch, d, _ = static.shape
    h = (period / steps)[:, None, None]
    u = np.broadcast_to(np.eye(d, dtype=static.dtype), (batch, d, d)).copy()
    frac = 2 * np.pi / steps
    for start in range(0, steps, chunk):
        k = np.arange(start, min(start + chunk, steps), dtype=float)[:, None]
        c0 = np.cos(frac * k + phase)
        ch = np.cos(frac * (k + 0.5) + phase)
        c1 = np.cos(frac * (k + 1) + phase)
        r = _rk4_step_matrices(static[None], drive[None], h[None], c0, ch, c1)
        u = _ordered_product(r) @ u
    return u


def integrate_fixed(models: Sequence[ModelSpec], steps: int) -> np.ndarray:
    """U(T) for each model with exactly ``steps`` RK4 steps; shape (B, N^2, N^2)."""
    if steps < 1:
        raise DomainError("steps must be positive")
    parts = [generator_parts(m) for m in models]
    static = np.stack([p[0] for p in parts])
    drive = np.stack([p[1] for p in parts])
    period = np.array([m.period for m in models])
    phase = np.array([m.phase for m in models])
    # Hermiticity-preserving generators are real in a Hermitian operator basis
    b = hermitian_basis(models[0].dim)
    static_r = b.conj().T @ static @ b
    drive_r = b.conj().T @ drive @ b
    if max(np.abs(static_r.imag).max(), np.abs(drive_r.imag).max()) < 1e-13:
        u = _rk4_batch(static_r.real.copy(), drive_r.real.copy(), period, phase, steps)
        return b @ u @ b.conj().T
    return _rk4_batch(static, drive, period, phase, steps)


def floquet_maps(
    models: Sequence[ModelSpec],
    steps_per_period: int = DEFAULT_STEPS,
    tol: float = CONVERGENCE_TOL,
    max_steps: int = MAX_STEPS,
    strict: bool = True,
) -> list[FloquetMap]:
    """Converged Floquet maps for a batch of models of equal dimension.

    Each model starts at ``steps_per_period`` and is doubled until the result
    moves by less than ``tol``. With ``strict=False`` models that never
    converge are returned with their last (finest) result and a
    ``convergence_defect`` above ``tol`` instead of raising.
    """
    if steps_per_period < MIN_STEPS:
        raise DomainError(f"steps_per_period must be >= {MIN_STEPS}")
    models = list(models)
    if not models:
        return []
    dims = {m.dim for m in models}
    if len(dims) != 1:
        raise DomainError("batched models must share a Hilbert-space dimension")

    results: list = [None] * len(models)
    pending = list(range(len(models)))
    steps = steps_per_period
    coarse = integrate_fixed(models, steps)
    while pending:
        fine = integrate_fixed([models[i] for i in pending], 2 * steps)
        defect = np.max(np.abs(fine - coarse), axis=(1, 2))
        still = []
        for j, i in enumerate(pending):
            if defect[j] < tol:
                results[i] = FloquetMap(fine[j], models[i].period, models[i], 2 * steps, float(defect[j]))
            else:
                still.append(j)
        if still and 4 * steps > max_steps:
            if strict:
                j = still[0]
                raise IntegrationAccuracyError(
                    f"no convergence at {2 * steps} steps (defect {defect[j]:.3e})",
                    float(defect[j]),
                    float(defect[j]),
                )
            for j in still:
                i = pending[j]
                results[i] = FloquetMap(fine[j], models[i].period, models[i], 2 * steps, float(defect[j]))
            break
        pending = [pending[j] for j in still]
        coarse = fine[still]
        steps *= 2
        if pending:
            log.debug("%d models need %d steps", len(pending), 2 * steps)
    return results


def floquet_map(model: ModelSpec, steps_per_period: int = DEFAULT_STEPS, **kwargs) -> FloquetMap:
    return floquet_maps([model], steps_per_period, **kwargs)[0]


def cptp_report(fmap) -> CPTPReport:
    """Defects of trace preservation, Choi positivity, Choi trace and Hermiticity.

    Accepts a :class:`FloquetMap` or a bare superoperator matrix.
    """
    entries = fmap.entries if isinstance(fmap, FloquetMap) else np.asarray(fmap)
    n = int(round(np.sqrt(entries.shape[0])))
    choi = reshuffle(entries)
    herm = float(np.max(np.abs(choi - choi.conj().T)))
    sym = (choi + choi.conj().T) / 2
    return CPTPReport(
        trace_defect=trace_preservation_defect(entries),
        min_choi_eigenvalue=float(np.linalg.eigvalsh(sym)[0]),
        choi_trace_defect=float(abs(np.trace(choi) - n)),
        hermiticity_defect=herm,
    )
