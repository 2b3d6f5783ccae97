"""Feature encodings of a Floquet map's Choi matrix.

Five schemes: the Choi eigenvalues, their roots, the raw Choi elements, and
the eigensystem in hyperspherical angles (plain and with normalized
eigenvalues). Widths are 4, 12, 16, 16 and 16 for a qubit.

Run: python3 demos/06_features.py
"""
import numpy as np

from floqlind.features import SCHEMES, choi_eigensystem, featurize
from floqlind.propagator import floquet_map
from floqlind.qdyn import ModelSpec

fmap = floquet_map(ModelSpec("II", amplitude=1.0, omega=0.8, phase=np.pi / 8))
es = choi_eigensystem(fmap)
print("Choi eigenvalues:", np.round(es.eigenvalues, 6), "sum", round(float(es.eigenvalues.sum()), 12))
np.set_printoptions(precision=4, suppress=True, linewidth=110)
for scheme in SCHEMES:
    fv = featurize(fmap, scheme)
    print(f"{scheme:24s} width {fv.values.size:2d}: {fv.values}")
