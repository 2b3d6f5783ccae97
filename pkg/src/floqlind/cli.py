"""Command-line front end: label, dataset, features, train, eval, diagram.

Exit codes: 0 success (``label``: yes), 2 usage/input error, 3 ``label`` answered
no, 4 ``label`` flagged.
"""
from __future__ import annotations

import argparse
import io
import json
import math
import re
import sys
from pathlib import Path
from xml.sax.saxutils import escape

import numpy as np

from . import dataset as ds
from . import ml
from .errors import FloqlindError, SchemaError
from .features import SCHEMES, featurize
from .markov import label_map
from .propagator import floquet_map
from .qdyn import DEFAULT_DELTA, DEFAULT_GAMMA, ModelSpec

EXIT_OK, EXIT_USAGE, EXIT_NO, EXIT_FLAGGED = 0, 2, 3, 4

_PI_RE = re.compile(r"^\s*([+-]?[0-9.]*)\s*\*?\s*pi\s*(?:/\s*([0-9.]+))?\s*$")


class UsageError(Exception):
    pass


def angle(text: str) -> float:
    """A float, or a multiple of pi such as ``pi/4``, ``3pi/4``, ``2*pi/3``."""
    m = _PI_RE.match(text.lower())
    if m:
        num = m.group(1)
        coef = float(num) if num not in ("", "+", "-") else (-1.0 if num == "-" else 1.0)
        return coef * math.pi / (float(m.group(2)) if m.group(2) else 1.0)
    try:
        return float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a number or multiple of pi: {text!r}") from None


def _model_args(p):
    p.add_argument("--problem", choices=["I", "II"], default="I")
    p.add_argument("--E", type=angle, required=True, help="drive amplitude")
    p.add_argument("--omega", type=angle, required=True, help="drive frequency")
    p.add_argument("--phi", type=angle, default=0.0, help="drive phase")
    p.add_argument("--delta", type=float, default=DEFAULT_DELTA)
    p.add_argument("--gamma", type=float, default=DEFAULT_GAMMA)


def _model(a) -> ModelSpec:
    return ModelSpec(a.problem, a.delta, a.gamma, a.E, a.omega, a.phi)


def _emit(text: str, out):
    out.write(text if text.endswith("\n") else text + "\n")


def cmd_label(a, out) -> int:
    fmap = floquet_map(_model(a))
    rep = label_map(fmap)
    doc = {
        "answer": None if rep.answer is None else ("yes" if rep.answer else "no"),
        "witness": list(rep.witness_x) if rep.witness_x is not None else None,
        "mu_min": rep.mu_min,
        "best_min_eigenvalue": rep.best_min_eig,
        "n": rep.n,
        "branches_searched": rep.branches_searched,
        "integrator_steps": fmap.integrator_steps,
        "diagnostics": {k: v for k, v in rep.diagnostics.items()},
    }
    if a.json:
        _emit(json.dumps(doc, sort_keys=True), out)
    else:
        for k in ("answer", "witness", "mu_min", "best_min_eigenvalue", "n", "branches_searched", "integrator_steps"):
            _emit(f"{k}: {doc[k]}", out)
        for k, v in doc["diagnostics"].items():
            _emit(f"diagnostic {k}: {v}", out)
    if rep.answer is None:
        return EXIT_FLAGGED
    return EXIT_OK if rep.answer else EXIT_NO


def _grid(a, phases) -> ds.GridSpec:
    return ds.GridSpec(
        e_min=a.e_min, e_max=a.e_max, e_step=a.e_step,
        omega_min=a.omega_min, omega_max=a.omega_max, omega_step=a.omega_step,
        phases=tuple(phases), problems=tuple(a.problem or ["I"]),
    )


def cmd_dataset(a, out) -> int:
    proto = ds.Protocol(ratio=a.ratio, seed=a.seed)
    if a.protocol:
        phases = list(proto.train_phases) + list(proto.test_phases)
    else:
        phases = a.phi if a.phi else list(ds.TRAIN_PHASES)
    grid = _grid(a, phases)
    if a.points and Path(a.points).exists():
        points = ds.load_points(a.points)
    else:
        points = ds.sweep_points(grid, threads=a.threads)
        if a.points:
            ds.save_points(points, a.points)
    rows = ds.rows_from_points(points, a.scheme)
    out_path = Path(a.out)
    if a.protocol:
        out_path.mkdir(parents=True, exist_ok=True)
        parts = dict(zip(("train", "validation", "test"), proto.apply(rows)))
        for name, part in parts.items():
            ds.write_csv(part, out_path / f"{name}.csv", a.scheme)
            _emit(f"{name}: {len(part)} rows -> {out_path / f'{name}.csv'}", out)
        skip_path = out_path / "skipped.csv"
    else:
        ds.write_csv(ds.labeled(rows), out_path, a.scheme)
        _emit(f"{len(ds.labeled(rows))} rows -> {out_path}", out)
        skip_path = Path(a.skip_report) if a.skip_report else out_path.with_suffix(".skipped.csv")
    n_skip = ds.write_skip_report(rows, skip_path)
    _emit(f"skip report: {n_skip} flagged points -> {skip_path}", out)
    return EXIT_OK


def cmd_features(a, out) -> int:
    fv = featurize(floquet_map(_model(a)), a.scheme)
    _emit(",".join("%.17g" % v for v in fv.values), out)
    if fv.flags:
        _emit("flags: " + ";".join(fv.flags), out)
    return EXIT_OK


def _hyper(pairs) -> dict:
    hp = {}
    for item in pairs or []:
        if "=" not in item:
            raise UsageError(f"hyperparameter {item!r} must look like name=value")
        k, v = item.split("=", 1)
        hp[k] = json.loads(v)
    return hp


def cmd_train(a, out) -> int:
    train_rows = ds.read_csv(a.train, a.scheme)
    if a.search:
        if not a.validation:
            raise UsageError("--search needs --validation")
        val_rows = ds.read_csv(a.validation, a.scheme)
        grid = {k: v if isinstance(v, list) else [v] for k, v in _hyper(a.set).items()} or None
        res = ml.grid_search(a.algorithm, train_rows, val_rows, grid=grid, seed=a.seed)
        model = res.model
        for hp, acc in res.table:
            _emit(f"validation accuracy {acc:.6f}  {json.dumps(hp, sort_keys=True)}", out)
    else:
        model = ml.train(ml.ClassifierSpec(a.algorithm, _hyper(a.set), override=a.override), train_rows, a.seed)
    ml.save(model, a.out)
    _emit(f"model {a.algorithm} {json.dumps(model.spec.hyperparameters, sort_keys=True)} -> {a.out}", out)
    return EXIT_OK


def _check_width(model, rows, path):
    if rows and rows[0].features.size != model.width:
        raise SchemaError(f"{path} has {rows[0].features.size} features, model expects {model.width}")


def cmd_eval(a, out) -> int:
    model = ml.load(a.model)
    report = {}
    for name in ("train", "validation", "test"):
        path = getattr(a, name)
        if not path:
            continue
        rows = ds.read_csv(path)
        _check_width(model, rows, path)
        if not rows:
            raise UsageError(f"{path} holds no rows")
        report[name] = ml.evaluate(model, rows).as_dict()
    if not report:
        raise UsageError("give at least one of --train/--validation/--test")
    report["roster_note"] = "SVM variants are not implemented: " + ", ".join(ml.EXCLUDED_ALGORITHMS)
    if a.json:
        ds.atomic_write(a.json, json.dumps(report, sort_keys=True, indent=2) + "\n")
    for name in ("train", "validation", "test"):
        if name in report:
            r = report[name]
            auc = "absent" if r["auc"] is None else f"{r['auc']:.6f}"
            _emit(f"{name:<10} accuracy {r['accuracy']:.6f}  f1 {r['f1']:.6f}  auc {auc}", out)
    _emit(report["roster_note"], out)
    return EXIT_OK


# -- diagrams ----------------------------------------------------------------

CELL = 8
COLORS = {1: "#2b6cb0", 0: "#f6e05e", "agree": "#ffffff", "disagree": "#c53030"}


def diagram_cells(rows, truth, pred):
    """CSV text of the (E, omega) partition with truth, prediction and disagreement."""
    buf = io.StringIO()
    buf.write("E,omega,truth,prediction,disagree\n")
    for r, t, p in zip(rows, truth, pred):
        pv = "" if p is None else str(int(p))
        dv = "" if p is None else str(int(t != p))
        buf.write(f"{r.E:.17g},{r.omega:.17g},{int(t)},{pv},{dv}\n")
    return buf.getvalue()


def diagram_svg(rows, truth, pred) -> str:
    es = sorted({r.E for r in rows})
    ws = sorted({r.omega for r in rows})
    ei = {e: i for i, e in enumerate(es)}
    wi = {w: i for i, w in enumerate(ws)}
    panels = [("truth", [COLORS[int(t)] for t in truth])]
    if pred is not None:
        panels.append(("prediction", [COLORS[int(p)] for p in pred]))
        panels.append(("disagreement", [COLORS["disagree" if t != p else "agree"] for t, p in zip(truth, pred)]))
    pw, ph = len(ws) * CELL, len(es) * CELL
    gap, top = 20, 20
    width = len(panels) * (pw + gap) + gap
    height = ph + top + gap
    parts = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" viewBox="0 0 {width} {height}">',
    ]
    for k, (title, colors) in enumerate(panels):
        x0 = gap + k * (pw + gap)
        parts.append(f'<g id="{title}"><text x="{x0}" y="14" font-size="12">{escape(title)} (rows: E, columns: omega)</text>')
        for r, c in zip(rows, colors):
            # E grows upward, omega to the right
            x = x0 + wi[r.omega] * CELL
            y = top + (len(es) - 1 - ei[r.E]) * CELL
            parts.append(f'<rect x="{x}" y="{y}" width="{CELL}" height="{CELL}" fill="{c}"/>')
        parts.append("</g>")
    parts.append("</svg>")
    return "\n".join(parts) + "\n"


def cmd_diagram(a, out) -> int:
    rows = ds.read_csv(a.data)
    rows = [r for r in rows if (a.problem is None or r.problem == a.problem)]
    if a.phi is not None:
        rows = [r for r in rows if abs(r.phi - a.phi) < 1e-9]
    if not rows:
        raise UsageError("no grid cells match the selection")
    truth = np.array([r.label for r in rows])
    pred = None
    if a.model:
        model = ml.load(a.model)
        _check_width(model, rows, a.data)
        x, _ = ds.as_arrays(rows)
        pred = ml.predict(model, x)
    ds.atomic_write(a.csv, diagram_cells(rows, truth, [None] * len(rows) if pred is None else pred))
    if a.svg:
        ds.atomic_write(a.svg, diagram_svg(rows, truth, pred))
    msg = f"{len(rows)} cells, yes fraction {truth.mean():.4f}"
    if pred is not None:
        msg += f", disagreements {int(np.sum(pred != truth))}"
    _emit(msg, out)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="floqlind", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)

    q = sub.add_parser("label", help="decide whether one Floquet map has a Lindbladian logarithm")
    _model_args(q)
    q.add_argument("--json", action="store_true", help="print a JSON object")
    q.set_defaults(func=cmd_label)

    q = sub.add_parser("dataset", help="sweep a grid and write labeled feature CSV files")
    q.add_argument("--problem", action="append", choices=["I", "II"], help="repeatable; default I")
    q.add_argument("--phi", type=angle, action="append", help="repeatable; default the six training phases")
    q.add_argument("--scheme", choices=SCHEMES, default="eigensystem_normalized")
    q.add_argument("--out", required=True, help="CSV path, or a directory with --protocol")
    q.add_argument("--skip-report", help="CSV of flagged points (default next to --out)")
    q.add_argument("--protocol", action="store_true", help="write train/validation/test files")
    q.add_argument("--ratio", type=float, default=0.9)
    q.add_argument("--seed", type=int, default=0)
    q.add_argument("--points", help="cache of integrated maps and labels (.npz), reused if present")
    q.add_argument("--threads", type=int, help=f"worker processes (default ${ds.THREADS_ENV} or 1)")
    for name, default in (("e-min", 0.0), ("e-max", math.pi), ("e-step", ds.STEP),
                          ("omega-min", ds.STEP), ("omega-max", 2 * math.pi), ("omega-step", ds.STEP)):
        q.add_argument(f"--{name}", type=angle, default=default)
    q.set_defaults(func=cmd_dataset)

    q = sub.add_parser("features", help="print the feature vector of one map")
    _model_args(q)
    q.add_argument("--scheme", choices=SCHEMES, default="eigensystem_normalized")
    q.set_defaults(func=cmd_features)

    q = sub.add_parser("train", help="fit a classifier on a CSV file")
    q.add_argument("--algorithm", choices=ml.ALGORITHMS, required=True)
    q.add_argument("--train", required=True)
    q.add_argument("--validation")
    q.add_argument("--scheme", choices=SCHEMES, help="require this feature scheme")
    q.add_argument("--set", action="append", metavar="NAME=JSON", help="hyperparameter (a list with --search)")
    q.add_argument("--search", action="store_true", help="grid search scored on --validation")
    q.add_argument("--override", action="store_true", help="allow hyperparameters outside the documented ranges")
    q.add_argument("--seed", type=int, default=0)
    q.add_argument("--out", required=True)
    q.set_defaults(func=cmd_train)

    q = sub.add_parser("eval", help="accuracy, f1 and AUC of a model on CSV files")
    q.add_argument("--model", required=True)
    q.add_argument("--train")
    q.add_argument("--validation")
    q.add_argument("--test")
    q.add_argument("--json", help="also write the report as JSON")
    q.set_defaults(func=cmd_eval)

    q = sub.add_parser("diagram", help="yes/no partition of the (E, omega) plane")
    q.add_argument("--data", required=True, help="labeled CSV file")
    q.add_argument("--problem", choices=["I", "II"])
    q.add_argument("--phi", type=angle)
    q.add_argument("--model", help="add prediction and disagreement panels")
    q.add_argument("--csv", required=True)
    q.add_argument("--svg")
    q.set_defaults(func=cmd_diagram)
    return p


def main(argv=None, out=None) -> int:
    out = sys.stdout if out is None else out
    parser = build_parser()
    try:
        a = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return a.func(a, out)
    except (UsageError, FloqlindError, FileNotFoundError, IsADirectoryError, PermissionError) as exc:
        sys.stderr.write(f"floqlind {a.command}: error: {exc}\n")
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
