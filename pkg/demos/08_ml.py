"""Classifying maps from their Choi features.

Trains every classifier of the roster on a coarse protocol dataset, tunes
each by validation accuracy, and reports test accuracy, f1 and AUC on the
held-out drive phases. Models round-trip through their JSON files.

Run: python3 demos/08_ml.py      (about a minute)
"""
import numpy as np

from floqlind import dataset as ds
from floqlind.ml import model as M

protocol = ds.Protocol()
grid = ds.GridSpec(0, np.pi, 3 * ds.STEP, ds.STEP, 2 * np.pi, 3 * ds.STEP,
                   phases=protocol.train_phases + protocol.test_phases, problems=("I", "II"))
train, val, test = protocol.apply(ds.sweep(grid, "eigensystem_normalized"))
small = {
    "random_forest": {"n_trees": [50], "max_depth": [6, 9]},
    "adaboost": {"n_stumps": [100], "max_depth": [1, 3]},
    "mlp": {"hidden": [[32, 32]], "epochs": [40]},
}
for algorithm in M.ALGORITHMS:
    result = M.grid_search(algorithm, train, val, grid=small.get(algorithm))
    rep = M.evaluate(result.model, test)
    print(f"{algorithm:14s} {str(result.model.spec.hyperparameters):60s} "
          f"accuracy {rep.accuracy:.3f}  f1 {rep.f1:.3f}  AUC {rep.auc:.3f}")
    assert M.dumps(M.loads(M.dumps(result.model))) == M.dumps(result.model)
