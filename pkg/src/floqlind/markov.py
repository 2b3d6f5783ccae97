"""Integer feasibility test for Floquet-Lindbladians and the distance from Markovianity.

A map has a Lindbladian logarithm iff some integer vector ``x`` makes
``V_x = V_0 + sum_c x_c V_c`` positive semidefinite on the complement of the
maximally entangled state. All eigenvalue work happens on that
``(N^2 - 1)``-dimensional complement, where ``x -> lambda_min(V_x)`` is concave.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np
from scipy.optimize import minimize_scalar

from . import errors as E
from .choi import deflate, reshuffle
from .qdyn import depolarizing_generator
from .spectral import branch, eigendecompose_map, principal_log, v_matrices

PSD_TOL = 1e-9
MU_TOL = 1e-6
SCAN_WINDOW = 64.0
SCAN_STEP = 0.25
INTERVAL_TOL = 1e-6
BOX_RADIUS = 8
MU_BISECT_TOL = 1e-8
MU_CAP = 1e4


@dataclass
class LabelReport:
    """Outcome of the Lindbladian test for one map.

    ``answer`` is None when the point was flagged (see ``diagnostics``).
    """

    answer: Optional[bool]
    witness_x: Optional[tuple] = None
    best_min_eig: float = float("nan")
    mu_min: Optional[float] = None
    branches_searched: int = 0
    n: int = 0
    interval: Optional[tuple] = None
    bounded_search: bool = False
    diagnostics: dict = field(default_factory=dict)

    @property
    def flagged(self) -> bool:
        return self.answer is None

    @property
    def label(self) -> Optional[int]:
        return None if self.answer is None else int(self.answer)


def _min_eig(d0, dc, xs):
    """lambda_min of d0 + sum_c x_c dc[c] for each row of ``xs`` (shape (k, n))."""
    xs = np.asarray(xs, dtype=float)
    if dc.shape[0] == 0:
        count = xs.shape[0] if xs.ndim else 1
        return np.full(count, np.linalg.eigvalsh(d0)[0])
    xs = xs.reshape(-1, dc.shape[0])
    mats = d0[None] + np.einsum("kc,cij->kij", xs, dc)
    return np.linalg.eigvalsh(mats)[:, 0]


def _as_deflated(v):
    v = np.asarray(v, dtype=complex)
    side = v.shape[-1]
    root = int(round(math.sqrt(side)))
    if root * root == side:
        v = deflate(v)
    return (v + np.swapaxes(v, -1, -2).conj()) / 2


def real_feasible_interval(
    v0,
    v1,
    window: float = SCAN_WINDOW,
    step: float = SCAN_STEP,
    tol: float = INTERVAL_TOL,
    level: float = -PSD_TOL,
):
    """Real interval of ``x`` with ``lambda_min(v0 + x v1) >= level``, or None.

    ``v0``, ``v1`` are Phi_perp-projected N^2 x N^2 matrices (or already
    deflated ones). The window ``[-window, window]`` is scanned with ``step``;
    if no scan point is feasible the concave maximum near the best scan point
    is located before giving up, so intervals thinner than ``step`` are kept.
    Endpoints are bisected to ``tol``; an endpoint at the window edge is
    returned as the edge itself.
    """
    d0 = _as_deflated(v0)
    d1 = _as_deflated(v1)[None]
    f = lambda x: float(_min_eig(d0, d1, [x])[0])  # noqa: E731

    xs = np.arange(-window, window + step / 2, step)
    vals = _min_eig(d0, d1, xs[:, None])
    ok = np.flatnonzero(vals >= level)
    if ok.size == 0:
        i = int(np.argmax(vals))
        a, b = xs[max(i - 1, 0)], xs[min(i + 1, xs.size - 1)]
        res = minimize_scalar(lambda x: -f(x), bounds=(a, b), method="bounded", options={"xatol": tol / 10})
        if -res.fun < level:
            return None
        inside = float(res.x)
        # a thin interval: both neighbouring scan points are infeasible
        return (_bisect(f, a, inside, level, tol), _bisect(f, b, inside, level, tol))
    i0, i1 = int(ok[0]), int(ok[-1])
    lo = xs[0] if i0 == 0 else _bisect(f, xs[i0 - 1], xs[i0], level, tol)
    hi = xs[-1] if i1 == xs.size - 1 else _bisect(f, xs[i1 + 1], xs[i1], level, tol)
    return (float(lo), float(hi))


def _bisect(f, outside, inside, level, tol):
    """Boundary between an infeasible and a feasible point; returns the feasible side."""
    while abs(inside - outside) > tol:
        mid = 0.5 * (inside + outside)
        if f(mid) >= level:
            inside = mid
        else:
            outside = mid
    return float(inside)


def _analyze(fmap):
    decomp = eigendecompose_map(fmap)
    k0 = principal_log(decomp)
    vm = v_matrices(decomp, k0)
    d0, dc = vm.deflated()
    return decomp, k0, d0, dc


def _flag_for(exc) -> str:
    return {
        E.NearDefectiveError: E.FLAG_NEAR_DEFECTIVE,
        E.BranchAmbiguityError: E.FLAG_BRANCH_AMBIGUITY,
        E.SingularMapError: E.FLAG_SINGULAR,
        E.ClassificationError: E.FLAG_CLASSIFICATION,
        E.UnreachableNoiseError: E.FLAG_UNREACHABLE_NOISE,
    }[type(exc)]


_FLAGGABLE = (
    E.NearDefectiveError,
    E.BranchAmbiguityError,
    E.SingularMapError,
    E.ClassificationError,
)


def _search_set(n, box_radius, window):
    if n == 0:
        return np.zeros((1, 0))
    if n == 1:
        w = int(math.floor(window))
        return np.arange(-w, w + 1, dtype=float)[:, None]
    r = range(-box_radius, box_radius + 1)
    return np.array(list(itertools.product(r, repeat=n)), dtype=float)


def _decide(d0, dc, box_radius, window, psd_tol):
    n = dc.shape[0]
    interval = None
    bounded = False
    if n == 0:
        cands = np.zeros((1, 0))
    elif n == 1:
        interval = real_feasible_interval(d0, dc[0], window=window, level=-psd_tol)
        w = int(math.floor(window))
        if interval is not None:
            lo = max(math.floor(interval[0]) - 1, -w)
            hi = min(math.ceil(interval[1]) + 1, w)
        else:
            # nothing feasible; still report the best integers near the peak
            xs = np.arange(-w, w + 1, dtype=float)
            peak = float(xs[int(np.argmax(_min_eig(d0, dc, xs[:, None])))])
            lo, hi = max(int(peak) - 1, -w), min(int(peak) + 1, w)
        cands = np.arange(lo, hi + 1, dtype=float)[:, None]
    else:
        bounded = True
        cands = _search_set(n, box_radius, window)
    return cands, _min_eig(d0, dc, cands), interval, bounded


def _report(decomp, d0, dc, box_radius, window, psd_tol, with_mu):
    cands, vals, interval, bounded = _decide(d0, dc, box_radius, window, psd_tol)
    feasible = np.flatnonzero(vals >= -psd_tol)
    answer = feasible.size > 0
    diag = {}
    if decomp.merged:
        diag["merged-degenerate"] = True
    if bounded:
        diag["bounded-box"] = box_radius
    witness = None
    if answer:
        # smallest |x|_1 among feasible branches, ties to the larger eigenvalue
        order = sorted(feasible, key=lambda k: (np.abs(cands[k]).sum(), -vals[k]))
        witness = tuple(int(v) for v in cands[order[0]])
    mu = None
    if with_mu:
        try:
            mu = 0.0 if answer else _mu_min(d0, dc, box_radius, window, psd_tol)[0]
        except E.UnreachableNoiseError as exc:
            diag[E.FLAG_UNREACHABLE_NOISE] = str(exc)
    return LabelReport(
        answer=bool(answer),
        witness_x=witness,
        best_min_eig=float(np.max(vals)),
        mu_min=mu,
        branches_searched=len(cands),
        n=decomp.n,
        interval=interval,
        bounded_search=bounded,
        diagnostics=diag,
    )


def decide_markovianity(
    fmap,
    box_radius: int = BOX_RADIUS,
    window: float = SCAN_WINDOW,
    psd_tol: float = PSD_TOL,
    strict: bool = False,
) -> LabelReport:
    """Search integer branches for a Lindbladian logarithm of ``fmap``.

    Flagged maps (near-defective, branch cut, singular, unpaired spectrum)
    give a report with ``answer=None`` unless ``strict`` is set, in which case
    the underlying error is raised. ``mu_min`` is left unset; see
    :func:`label_map` for the combined computation.
    """
    try:
        decomp, _, d0, dc = _analyze(fmap)
    except _FLAGGABLE as exc:
        if strict:
            raise
        return LabelReport(answer=None, diagnostics={_flag_for(exc): str(exc)})
    return _report(decomp, d0, dc, box_radius, window, psd_tol, with_mu=False)


def noise_curve(d0, dc, x, mus):
    """m_x(mu): deflated lambda_min of the branch-x generator plus mu * depolarizing noise."""
    dim = int(round(math.sqrt(d0.shape[0] + 1)))
    dn = _as_deflated(reshuffle(depolarizing_generator(dim)))
    base = d0 + np.einsum("c,cij->ij", np.asarray(x, dtype=float), dc)
    mus = np.atleast_1d(np.asarray(mus, dtype=float))
    return np.linalg.eigvalsh(base[None] + mus[:, None, None] * dn[None])[:, 0]


def _mu_min(d0, dc, box_radius, window, psd_tol, cap=MU_CAP, tol=MU_BISECT_TOL):
    dim = int(round(math.sqrt(d0.shape[0] + 1)))
    dn = _as_deflated(reshuffle(depolarizing_generator(dim)))
    xs = _search_set(dc.shape[0], box_radius, window)
    base = d0[None] + np.einsum("kc,cij->kij", xs, dc)

    def m(mu):
        return np.linalg.eigvalsh(base + mu[:, None, None] * dn[None])[:, 0]

    at0 = m(np.zeros(len(xs)))
    if np.any(at0 >= -psd_tol):
        return 0.0, len(xs)
    hi = np.ones(len(xs))
    while True:
        vals = m(hi)
        short = vals < 0
        if not np.any(short):
            break
        grow = short & (hi < cap)
        if not np.any(grow):
            break
        hi = np.where(grow, np.minimum(2 * hi, cap), hi)
    reach = m(hi) >= 0
    if not np.any(reach):
        raise E.UnreachableNoiseError(f"no branch becomes Lindbladian for mu <= {cap:g}")
    lo = np.zeros(len(xs))
    lo, hi = lo[reach], hi[reach]
    base = base[reach]
    while np.max(hi - lo) > tol:
        mid = 0.5 * (lo + hi)
        ok = np.linalg.eigvalsh(base + mid[:, None, None] * dn[None])[:, 0] >= 0
        hi = np.where(ok, mid, hi)
        lo = np.where(ok, lo, mid)
    return float(np.min(hi)), len(xs)


def mu_min(
    fmap,
    box_radius: int = BOX_RADIUS,
    window: float = SCAN_WINDOW,
    psd_tol: float = PSD_TOL,
) -> float:
    """Smallest depolarizing strength making some searched branch Lindbladian.

    Branches searched: all integers in the scan window for one conjugate
    pair, the box ``|x|_inf <= box_radius`` for more.
    """
    _, _, d0, dc = _analyze(fmap)
    return _mu_min(d0, dc, box_radius, window, psd_tol)[0]


def label_map(
    fmap,
    box_radius: int = BOX_RADIUS,
    window: float = SCAN_WINDOW,
    psd_tol: float = PSD_TOL,
) -> LabelReport:
    """Decision plus distance from Markovianity, sharing one decomposition."""
    try:
        decomp, _, d0, dc = _analyze(fmap)
    except _FLAGGABLE as exc:
        return LabelReport(answer=None, diagnostics={_flag_for(exc): str(exc)})
    return _report(decomp, d0, dc, box_radius, window, psd_tol, with_mu=True)


def witness_generator(fmap, report: LabelReport) -> np.ndarray:
    """The Lindbladian branch named by ``report.witness_x``."""
    if report.witness_x is None:
        raise ValueError("report carries no witness")
    decomp = eigendecompose_map(fmap)
    return branch(principal_log(decomp), decomp, report.witness_x)


def brute_force_decision(fmap, window: float = SCAN_WINDOW, psd_tol: float = PSD_TOL):
    """Reference decision for n <= 1: evaluate every integer in the window."""
    _, _, d0, dc = _analyze(fmap)
    xs = _search_set(dc.shape[0], 0, window)
    vals = _min_eig(d0, dc, xs)
    return bool(np.max(vals) >= -psd_tol), float(np.max(vals))
