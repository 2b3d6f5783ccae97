"""Labeled datasets: grid sweeps, the phase-holdout protocol and CSV files.

Sweeps a coarse (E, omega) lattice for both models at the six training
phases and two test phases, splits it into train/validation/test sets,
writes and re-reads the CSV files, and reports the class balance.

Run: python3 demos/07_dataset.py
"""
import tempfile
from pathlib import Path

import numpy as np

from floqlind import dataset as ds

protocol = ds.Protocol()
grid = ds.GridSpec(0, np.pi, 4 * ds.STEP, ds.STEP, 2 * np.pi, 4 * ds.STEP,
                   phases=protocol.train_phases + protocol.test_phases, problems=("I", "II"))
rows = ds.sweep(grid, "eigensystem_normalized")
print(f"{len(rows)} lattice points; yes fraction {np.mean([r.label for r in ds.labeled(rows)]):.3f}")
train, val, test = protocol.apply(rows)
print(f"train {len(train)}, validation {len(val)}, test {len(test)} (test phases: pi/8, 5pi/8)")

with tempfile.TemporaryDirectory() as tmp:
    path = Path(tmp) / "train.csv"
    ds.write_csv(train, path)
    print("header:", path.read_text().splitlines()[0][:80], "...")
    back = ds.read_csv(path)
    print("round trip exact:", all(np.array_equal(a.features, b.features) for a, b in zip(train, back)))
    ds.write_skip_report(rows, Path(tmp) / "skipped.csv")
    print("rows marked in the skip report:", len((Path(tmp) / "skipped.csv").read_text().splitlines()) - 1)
