"""Classifier specifications, training, scoring, grid search and model files."""
from __future__ import annotations

import itertools
import json
import math
from dataclasses import dataclass, field
from typing import Any, Optional

import numpy as np

from ..errors import DataError, DegenerateTrainingError, DimensionError, DomainError, SchemaError
from . import gaussian, mlp, neighbors, trees
from .metrics import THRESHOLD, metrics

ALGORITHMS = ("knn", "decision_tree", "random_forest", "adaboost", "mlp", "gaussian_nb", "lda", "qda")
EXCLUDED_ALGORITHMS = ("svm_linear", "svm_rbf", "svm_poly")
FORMAT = "floqlind-model"
FORMAT_VERSION = 1

DEFAULTS: dict[str, dict] = {
    "knn": {"k": 5},
    "decision_tree": {"max_depth": 10},
    "random_forest": {"n_trees": 100, "max_depth": 9},
    "adaboost": {"n_stumps": 200, "max_depth": 1},
    "mlp": {"hidden": [64, 64], "epochs": 60, "learning_rate": 1e-3, "batch_size": 64},
    "gaussian_nb": {},
    "lda": {},
    "qda": {"regularizer": gaussian.RIDGE},
}

# documented ranges (inclusive); ``hidden`` counts hidden layers and their widths
RANGES: dict[str, dict] = {
    "knn": {"k": (3, 7)},
    "decision_tree": {"max_depth": (3, 15)},
    "random_forest": {"n_trees": (50, 300), "max_depth": (2, 9)},
    "adaboost": {"n_stumps": (50, 300), "max_depth": (1, 3)},
    "mlp": {"hidden_layers": (2, 3), "hidden_width": (8, 512)},
}


@dataclass(frozen=True)
class ClassifierSpec:
    """An algorithm and its hyperparameters (missing ones take defaults).

    Values outside :data:`RANGES` are rejected unless ``override`` is set.
    """

    algorithm: str
    hyperparameters: dict = field(default_factory=dict)
    override: bool = False

    def __post_init__(self):
        if self.algorithm not in ALGORITHMS:
            raise DomainError(f"unknown algorithm {self.algorithm!r}; choose from {', '.join(ALGORITHMS)}")
        hp = dict(DEFAULTS[self.algorithm])
        unknown = set(self.hyperparameters) - set(hp)
        if unknown:
            raise DomainError(f"unknown hyperparameters for {self.algorithm}: {sorted(unknown)}")
        hp.update(self.hyperparameters)
        if "hidden" in hp:
            hp["hidden"] = [int(h) for h in hp["hidden"]]
        object.__setattr__(self, "hyperparameters", hp)
        if not self.override:
            self._check_ranges()

    def _check_ranges(self):
        hp = self.hyperparameters
        for name, (lo, hi) in RANGES.get(self.algorithm, {}).items():
            if name == "hidden_layers":
                values = [len(hp["hidden"])]
            elif name == "hidden_width":
                values = hp["hidden"]
            else:
                values = [hp[name]]
            for v in values:
                if not lo <= v <= hi:
                    raise DomainError(f"{self.algorithm}.{name}={v} outside [{lo}, {hi}] (set override=True)")

    @property
    def complexity(self) -> float:
        """Ordering used to break validation ties in favor of smaller models."""
        hp = self.hyperparameters
        a = self.algorithm
        if a == "knn":
            return -hp["k"]
        if a == "decision_tree":
            return 2 ** hp["max_depth"]
        if a == "random_forest":
            return hp["n_trees"] * 2 ** hp["max_depth"]
        if a == "adaboost":
            return hp["n_stumps"] * 2 ** hp["max_depth"]
        if a == "mlp":
            sizes = hp["hidden"]
            return sum(p * q for p, q in zip(sizes[:-1], sizes[1:])) + sum(sizes)
        if a == "qda":
            return -hp["regularizer"]
        return 0.0


@dataclass(frozen=True)
class TrainedModel:
    spec: ClassifierSpec
    state: Any
    width: int
    seed: int


def _arrays(data):
    if isinstance(data, tuple) and len(data) == 2:
        x, y = data
    else:
        from ..dataset import as_arrays

        x, y = as_arrays(data)
    return np.asarray(x, dtype=float), np.asarray(y)


def _validate_training(x, y):
    if x.ndim != 2 or x.shape[0] != y.size or x.shape[0] == 0:
        raise DimensionError(f"features {x.shape} do not match {y.size} labels")
    if not np.all(np.isfinite(x)):
        raise DataError("non-finite feature value in training data")
    if not np.all((y == 0) | (y == 1)):
        raise DataError("labels must be 0 or 1")
    if np.unique(y).size < 2:
        raise DegenerateTrainingError("training data holds a single class")


def train(spec: ClassifierSpec, data, seed: int = 0) -> TrainedModel:
    """Fit ``spec`` on labeled rows or an ``(x, y)`` pair; deterministic in ``seed``."""
    x, y = _arrays(data)
    _validate_training(x, y)
    y = y.astype(int)
    hp = spec.hyperparameters
    a = spec.algorithm
    if a == "knn":
        state = {"x": x.copy(), "y": y.copy()}
    elif a == "decision_tree":
        state = trees.fit_tree(x, y, max_depth=hp["max_depth"])
    elif a == "random_forest":
        state = trees.fit_forest(x, y, hp["n_trees"], hp["max_depth"], seed)
    elif a == "adaboost":
        state = trees.fit_adaboost(x, y, hp["n_stumps"], hp["max_depth"])
    elif a == "mlp":
        rng = np.random.default_rng(seed)
        state = mlp.fit_mlp(x, y, hp["hidden"], hp["epochs"], hp["learning_rate"], hp["batch_size"], rng)
    elif a == "gaussian_nb":
        state = gaussian.fit_gaussian_nb(x, y)
    elif a == "lda":
        state = gaussian.fit_lda(x, y)
    else:
        state = gaussian.fit_qda(x, y, hp["regularizer"])
    return TrainedModel(spec, state, int(x.shape[1]), int(seed))


def predict_score(model: TrainedModel, features) -> np.ndarray:
    """Class-1 scores in [0, 1]; labels are ``score >= 0.5``."""
    x = np.atleast_2d(np.asarray(features, dtype=float))
    if x.shape[1] != model.width:
        raise DimensionError(f"model expects {model.width} features, got {x.shape[1]}")
    s = model.state
    a = model.spec.algorithm
    if a == "knn":
        return neighbors.knn_score(s["x"], s["y"], x, model.spec.hyperparameters["k"])
    if a == "decision_tree":
        return s.predict_score(x)
    if a == "random_forest":
        return trees.forest_score(s, x)
    if a == "adaboost":
        return trees.adaboost_score(s[0], s[1], x)
    if a == "mlp":
        return mlp.mlp_score(s, x)
    if a == "gaussian_nb":
        return gaussian.gaussian_nb_score(s, x)
    if a == "lda":
        return gaussian.lda_score(s, x)
    return gaussian.qda_score(s, x)


def predict(model: TrainedModel, features, threshold: float = THRESHOLD) -> np.ndarray:
    return (predict_score(model, features) >= threshold).astype(int)


def evaluate(model: TrainedModel, data, threshold: float = THRESHOLD):
    x, y = _arrays(data)
    return metrics(y, predict_score(model, x), threshold)


# -- serialization -----------------------------------------------------------


def _encode(value):
    if isinstance(value, trees.Tree):
        return {"__tree__": value.to_state()}
    if isinstance(value, np.ndarray):
        return {"__array__": value.tolist(), "dtype": value.dtype.str}
    if isinstance(value, dict):
        return {k: _encode(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_encode(v) for v in value]
    if isinstance(value, np.generic):
        return value.item()
    return value


def _decode(value):
    if isinstance(value, dict):
        if "__tree__" in value:
            return trees.Tree.from_state(value["__tree__"])
        if "__array__" in value:
            return np.array(value["__array__"], dtype=np.dtype(value["dtype"]))
        return {k: _decode(v) for k, v in value.items()}
    if isinstance(value, list):
        return [_decode(v) for v in value]
    return value


def dumps(model: TrainedModel) -> str:
    """Versioned JSON text; identical models give identical text."""
    doc = {
        "format": FORMAT,
        "version": FORMAT_VERSION,
        "algorithm": model.spec.algorithm,
        "hyperparameters": model.spec.hyperparameters,
        "override": model.spec.override,
        "width": model.width,
        "seed": model.seed,
        "state": _encode(model.state),
    }
    return json.dumps(doc, sort_keys=True, separators=(",", ":")) + "\n"


def loads(text: str) -> TrainedModel:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise SchemaError(f"model file is not valid JSON: {exc}") from None
    if not isinstance(doc, dict) or doc.get("format") != FORMAT:
        raise SchemaError("not a floqlind model file")
    if doc.get("version") != FORMAT_VERSION:
        raise SchemaError(f"unsupported model format version {doc.get('version')}")
    spec = ClassifierSpec(doc["algorithm"], doc["hyperparameters"], doc.get("override", False))
    state = _decode(doc["state"])
    if spec.algorithm == "adaboost":
        state = (state[0], state[1])
    return TrainedModel(spec, state, int(doc["width"]), int(doc["seed"]))


def save(model: TrainedModel, path) -> None:
    from ..dataset import atomic_write

    atomic_write(path, dumps(model))


def load(path) -> TrainedModel:
    with open(path, encoding="utf-8") as fh:
        return loads(fh.read())


# -- hyperparameter search ---------------------------------------------------

DEFAULT_GRIDS: dict[str, dict] = {
    "knn": {"k": [3, 5, 7]},
    "decision_tree": {"max_depth": [3, 6, 9, 12, 15]},
    "random_forest": {"n_trees": [100], "max_depth": [6, 9]},
    "adaboost": {"n_stumps": [100, 300], "max_depth": [1, 3]},
    "mlp": {"hidden": [[64, 64], [128, 128, 128]], "epochs": [60]},
    "gaussian_nb": {},
    "lda": {},
    "qda": {"regularizer": [1e-6]},
}


@dataclass(frozen=True)
class SearchResult:
    model: TrainedModel
    validation_accuracy: float
    table: list  # (hyperparameters, validation accuracy) per grid cell


def grid_search(algorithm: str, train_data, validation_data, grid: Optional[dict] = None, seed: int = 0) -> SearchResult:
    """Best model by validation accuracy; ties go to the smaller model."""
    grid = DEFAULT_GRIDS[algorithm] if grid is None else grid
    names = sorted(grid)
    vx, vy = _arrays(validation_data)
    best = None
    table = []
    for values in itertools.product(*(grid[n] for n in names)):
        spec = ClassifierSpec(algorithm, dict(zip(names, values)))
        model = train(spec, train_data, seed)
        acc = float(np.mean(predict(model, vx) == vy)) if vy.size else math.nan
        table.append((spec.hyperparameters, acc))
        key = (acc, -spec.complexity)
        if best is None or key > best[0]:
            best = (key, model, acc)
    return SearchResult(best[1], best[2], table)
