"""Parameter sweeps, labeled rows, train/validation/test protocol and CSV files."""
from __future__ import annotations

import csv
import io
import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Iterable, Optional, Sequence

import numpy as np

from .errors import DomainError, FLAG_CONVERGENCE, ParseError, SchemaError
from .features import SCHEMES, feature_width, featurize
from .markov import LabelReport, label_map
from .propagator import CONVERGENCE_TOL, DEFAULT_STEPS, FloquetMap, floquet_maps
from .qdyn import ModelSpec

TRAIN_PHASES = (0.0, np.pi / 4, np.pi / 3, np.pi / 2, 2 * np.pi / 3, 3 * np.pi / 4)
TEST_PHASES = (np.pi / 8, 5 * np.pi / 8)
STEP = np.pi / 25

THREADS_ENV = "FLOQLIND_THREADS"
BASE_COLUMNS = ("problem", "E", "omega", "phi", "label", "mu_min")


def _axis(lo, hi, step):
    if step <= 0:
        raise DomainError("grid steps must be positive")
    count = int(math.floor((hi - lo) / step + 1e-9)) + 1
    return lo + step * np.arange(count)


@dataclass(frozen=True)
class GridSpec:
    """Lattice of (problem, phase, E, omega) points; endpoints are inclusive."""

    e_min: float = 0.0
    e_max: float = np.pi
    e_step: float = STEP
    omega_min: float = STEP
    omega_max: float = 2 * np.pi
    omega_step: float = STEP
    phases: tuple = TRAIN_PHASES
    problems: tuple = ("I",)

    def __post_init__(self):
        if self.e_step <= 0 or self.omega_step <= 0:
            raise DomainError("grid steps must be positive")
        if self.omega_min <= 0:
            raise DomainError("omega_min must be positive (the period diverges at 0)")
        if self.e_min < 0:
            raise DomainError("amplitudes must be non-negative")
        object.__setattr__(self, "phases", tuple(float(p) for p in self.phases))
        object.__setattr__(self, "problems", tuple(self.problems))

    @property
    def amplitudes(self) -> np.ndarray:
        return _axis(self.e_min, self.e_max, self.e_step)

    @property
    def omegas(self) -> np.ndarray:
        return _axis(self.omega_min, self.omega_max, self.omega_step)

    def templates(self) -> list[ModelSpec]:
        return [p if isinstance(p, ModelSpec) else ModelSpec(problem_id=p) for p in self.problems]

    def blocks(self):
        """(template, phase) pairs in lattice order."""
        return [(t, phi) for t in self.templates() for phi in self.phases]

    def block_models(self, template: ModelSpec, phase: float) -> list[ModelSpec]:
        return [
            ModelSpec(
                problem_id=template.problem_id,
                delta=template.delta,
                gamma=template.gamma,
                amplitude=float(e),
                omega=float(w),
                phase=phase,
            )
            for e in self.amplitudes
            for w in self.omegas
        ]

    def __len__(self):
        return len(self.problems) * len(self.phases) * self.amplitudes.size * self.omegas.size


@dataclass
class SweepPoint:
    """A labeled lattice point; keeps the Floquet map for later featurization."""

    fmap: FloquetMap
    report: LabelReport

    @property
    def model(self) -> ModelSpec:
        return self.fmap.model

    @property
    def flags(self) -> tuple:
        flags = tuple(sorted(k for k in self.report.diagnostics if k in _SKIP_KEYS))
        if self.fmap.convergence_defect >= CONVERGENCE_TOL:
            flags = flags + (FLAG_CONVERGENCE,)
        return flags


_SKIP_KEYS = {"near-defective", "branch-ambiguity", "singular", "classification", "unreachable-noise"}


@dataclass
class LabeledRow:
    problem: str
    E: float
    omega: float
    phi: float
    label: Optional[int]
    mu_min: float
    features: np.ndarray
    scheme: str
    skip_flags: tuple = field(default=())


def _label_block(args):
    template, phase, grid, steps = args
    maps = floquet_maps(grid.block_models(template, phase), steps, strict=False)
    return [SweepPoint(m, label_map(m)) for m in maps]


def _threads(threads):
    if threads is not None:
        return max(1, int(threads))
    try:
        return max(1, int(os.environ.get(THREADS_ENV, "1")))
    except ValueError:
        return 1


def sweep_points(grid: GridSpec, steps_per_period: int = DEFAULT_STEPS, threads: Optional[int] = None) -> list[SweepPoint]:
    """Integrate and label every lattice point; output follows lattice order.

    Blocks of equal (problem, phase) are integrated together and may run in
    separate processes (``threads`` or the ``FLOQLIND_THREADS`` variable).
    """
    jobs = [(t, phi, grid, steps_per_period) for t, phi in grid.blocks()]
    n = _threads(threads)
    if n == 1 or len(jobs) == 1:
        blocks = [_label_block(j) for j in jobs]
    else:
        with ProcessPoolExecutor(max_workers=n) as pool:
            blocks = list(pool.map(_label_block, jobs))
    return [p for block in blocks for p in block]


def rows_from_points(points: Iterable[SweepPoint], scheme: str) -> list[LabeledRow]:
    """One row per point; points whose label is missing carry skip flags and no features."""
    if scheme not in SCHEMES:
        raise SchemaError(f"unknown scheme {scheme!r}")
    rows = []
    for p in points:
        m = p.model
        flags = p.flags
        if p.report.answer is None:
            feats = np.full(feature_width(scheme, m.dim), np.nan)
            flags = flags or ("unlabeled",)
        else:
            fv = featurize(p.fmap, scheme)
            feats = fv.values
            flags = flags + fv.flags
        mu = p.report.mu_min if p.report.mu_min is not None else float("nan")
        rows.append(LabeledRow(m.problem_id, m.amplitude, m.omega, m.phase, p.report.label, mu, feats, scheme, flags))
    return rows


def sweep(grid: GridSpec, scheme: str, **kwargs) -> list[LabeledRow]:
    return rows_from_points(sweep_points(grid, **kwargs), scheme)


def labeled(rows: Sequence[LabeledRow]) -> list[LabeledRow]:
    """Rows that carry a label (the ones written to datasets)."""
    return [r for r in rows if r.label is not None]


def skip_report(rows: Sequence[LabeledRow]) -> list[LabeledRow]:
    return [r for r in rows if r.skip_flags]


def split(rows: Sequence, ratio: float, seed) -> tuple[list, list]:
    """Shuffle with PCG64 (numpy ``default_rng``) and cut at ``ceil(ratio * n)``.

    ``seed`` may be an int or a ``numpy.random.Generator``.
    """
    if not 0 < ratio < 1:
        raise DomainError(f"ratio must lie in (0, 1), got {ratio}")
    rng = seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)
    perm = rng.permutation(len(rows))
    cut = math.ceil(ratio * len(rows))
    return [rows[i] for i in perm[:cut]], [rows[i] for i in perm[cut:]]


@dataclass(frozen=True)
class Protocol:
    """Train/validation phases split per (problem, phase) block; test phases held out."""

    train_phases: tuple = TRAIN_PHASES
    test_phases: tuple = TEST_PHASES
    ratio: float = 0.9
    seed: int = 0

    def __post_init__(self):
        overlap = set(np.round(self.train_phases, 12)) & set(np.round(self.test_phases, 12))
        if overlap:
            raise DomainError(f"train and test phases overlap: {sorted(overlap)}")

    def grid(self, problems=("I", "II"), **kwargs) -> GridSpec:
        return GridSpec(phases=tuple(self.train_phases) + tuple(self.test_phases), problems=problems, **kwargs)

    def apply(self, rows: Sequence[LabeledRow]):
        """Return (train, validation, test) from labeled rows of a protocol grid."""
        rng = np.random.default_rng(self.seed)
        train, val, test = [], [], []
        blocks: dict = {}
        for r in labeled(rows):
            blocks.setdefault((r.problem, round(r.phi, 12)), []).append(r)
        train_keys = {round(p, 12) for p in self.train_phases}
        test_keys = {round(p, 12) for p in self.test_phases}
        for key in sorted(blocks, key=lambda k: (k[0], k[1])):
            block = blocks[key]
            if key[1] in test_keys:
                test.extend(block)
            elif key[1] in train_keys:
                tr, va = split(block, self.ratio, rng)
                train.extend(tr)
                val.extend(va)
        return train, val, test


def as_arrays(rows: Sequence[LabeledRow]) -> tuple[np.ndarray, np.ndarray]:
    rows = labeled(rows)
    if not rows:
        return np.zeros((0, 0)), np.zeros(0, dtype=int)
    x = np.vstack([r.features for r in rows])
    y = np.array([r.label for r in rows], dtype=int)
    return x, y


def _fmt(v: float) -> str:
    return "%.17g" % v


def header(scheme: str, width: int) -> list[str]:
    return list(BASE_COLUMNS) + [f"f{i}" for i in range(width)] + ["scheme"]


def dumps_csv(rows: Sequence[LabeledRow], scheme: str, width: Optional[int] = None) -> str:
    if width is None:
        width = rows[0].features.size if rows else feature_width(scheme)
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header(scheme, width))
    for r in rows:
        if r.label is None:
            continue
        if r.scheme != scheme or r.features.size != width:
            raise SchemaError(f"row with scheme {r.scheme!r}/width {r.features.size} in a {scheme!r} file")
        w.writerow(
            [r.problem, _fmt(r.E), _fmt(r.omega), _fmt(r.phi), int(r.label), _fmt(r.mu_min)]
            + [_fmt(v) for v in r.features]
            + [scheme]
        )
    return buf.getvalue()


def atomic_write(path, text: str) -> None:
    """Write through a temporary file and rename, so failures leave no partial file."""
    path = os.fspath(path)
    tmp = f"{path}.tmp{os.getpid()}"
    with open(tmp, "w", encoding="utf-8", newline="") as fh:
        fh.write(text)
    os.replace(tmp, path)


def write_csv(rows: Sequence[LabeledRow], path, scheme: Optional[str] = None) -> None:
    """Write labeled rows; columns ``problem,E,omega,phi,label,mu_min,f0..,scheme``."""
    if scheme is None:
        if not rows:
            raise SchemaError("scheme is required for an empty file")
        scheme = rows[0].scheme
    atomic_write(path, dumps_csv(rows, scheme))


def read_csv(path, scheme: Optional[str] = None) -> list[LabeledRow]:
    """Read rows written by :func:`write_csv`.

    A ``scheme`` different from the file's raises :class:`SchemaError`;
    malformed content raises :class:`ParseError` with the line number.
    """
    with open(path, encoding="utf-8", newline="") as fh:
        reader = csv.reader(fh)
        try:
            head = next(reader)
        except StopIteration:
            raise ParseError("empty file (no header)", 1) from None
        if tuple(head[: len(BASE_COLUMNS)]) != BASE_COLUMNS or not head or head[-1] != "scheme":
            raise ParseError(f"unexpected header {head[:7]}...", 1)
        feat_cols = head[len(BASE_COLUMNS) : -1]
        if feat_cols != [f"f{i}" for i in range(len(feat_cols))]:
            raise ParseError("feature columns must be f0..f{k-1}", 1)
        width = len(feat_cols)
        rows = []
        file_scheme = None
        for lineno, rec in enumerate(reader, start=2):
            if len(rec) != len(head):
                raise ParseError(f"expected {len(head)} fields, got {len(rec)}", lineno)
            try:
                label = int(rec[4])
                if label not in (0, 1):
                    raise ValueError(f"label {label} not in {{0, 1}}")
                vals = [float(v) for v in rec[1:4]] + [float(rec[5])]
                feats = np.array([float(v) for v in rec[6:-1]])
            except ValueError as exc:
                raise ParseError(str(exc), lineno) from None
            if file_scheme is None:
                file_scheme = rec[-1]
            elif rec[-1] != file_scheme:
                raise ParseError(f"mixed schemes {file_scheme!r} and {rec[-1]!r}", lineno)
            rows.append(LabeledRow(rec[0], vals[0], vals[1], vals[2], label, vals[3], feats, rec[-1]))
    if file_scheme is not None and file_scheme not in SCHEMES:
        raise SchemaError(f"unknown scheme {file_scheme!r} in {path}")
    if scheme is not None:
        if file_scheme is not None and file_scheme != scheme:
            raise SchemaError(f"file holds {file_scheme!r} features, {scheme!r} requested")
        if width != feature_width(scheme):
            raise SchemaError(f"file has {width} feature columns, {scheme!r} needs {feature_width(scheme)}")
    return rows


def write_skip_report(rows: Sequence[LabeledRow], path) -> int:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["problem", "E", "omega", "phi", "flags"])
    skipped = skip_report(rows)
    for r in skipped:
        w.writerow([r.problem, _fmt(r.E), _fmt(r.omega), _fmt(r.phi), ";".join(r.skip_flags)])
    atomic_write(path, buf.getvalue())
    return len(skipped)


def save_points(points: Sequence[SweepPoint], path) -> None:
    """Cache maps and labels in an ``.npz`` file."""
    models = [p.model for p in points]
    rep = [p.report for p in points]
    np.savez_compressed(
        path,
        entries=np.stack([p.fmap.entries for p in points]),
        steps=np.array([p.fmap.integrator_steps for p in points]),
        defect=np.array([p.fmap.convergence_defect for p in points]),
        problem=np.array([m.problem_id for m in models]),
        params=np.array([[m.delta, m.gamma, m.amplitude, m.omega, m.phase] for m in models]),
        answer=np.array([-1 if r.answer is None else int(r.answer) for r in rep]),
        best=np.array([r.best_min_eig for r in rep]),
        mu=np.array([np.nan if r.mu_min is None else r.mu_min for r in rep]),
        n=np.array([r.n for r in rep]),
        witness=np.array([r.witness_x[0] if r.witness_x else 0 for r in rep]),
        flags=np.array([";".join(sorted(r.diagnostics)) for r in rep]),
    )


def load_points(path) -> list[SweepPoint]:
    with np.load(path) as npz:
        data = {k: npz[k] for k in npz.files}
    out = []
    for i in range(data["entries"].shape[0]):
        d, g, e, w, phi = data["params"][i]
        model = ModelSpec(str(data["problem"][i]), d, g, e, w, phi)
        fmap = FloquetMap(data["entries"][i], model.period, model, int(data["steps"][i]), float(data["defect"][i]))
        a = int(data["answer"][i])
        n = int(data["n"][i])
        flags = str(data["flags"][i])
        rep = LabelReport(
            answer=None if a < 0 else bool(a),
            witness_x=((int(data["witness"][i]),) if n == 1 else ()) if a == 1 else None,
            best_min_eig=float(data["best"][i]),
            mu_min=None if np.isnan(data["mu"][i]) else float(data["mu"][i]),
            n=n,
            diagnostics={k: True for k in flags.split(";") if k},
        )
        out.append(SweepPoint(fmap, rep))
    return out
