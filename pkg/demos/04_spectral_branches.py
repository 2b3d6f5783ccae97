"""Spectral decomposition of a Floquet map and its logarithm branches.

The map's eigenvalues are real or come in conjugate pairs. Every logarithm
of the map differs from the principal one by integer multiples of
i omega (P_c - P_c*), one integer per conjugate pair; each branch
exponentiates back to the same map.

Run: python3 demos/04_spectral_branches.py
"""
import numpy as np
from scipy.linalg import expm

from floqlind.propagator import floquet_map
from floqlind.qdyn import ModelSpec
from floqlind.spectral import branch, eigendecompose_map, principal_log

fmap = floquet_map(ModelSpec("I", amplitude=1.0, omega=1.0))
decomp = eigendecompose_map(fmap)
print("eigenvalues:", np.round(decomp.eigenvalues, 5))
print(f"{decomp.m} real, {decomp.n} conjugate pair(s); eigenvector condition number {decomp.condition_number:.2f}")
print("projectors resolve the identity:", np.allclose(decomp.projectors.sum(axis=0), np.eye(4)))

k0 = principal_log(decomp)
for x in range(-2, 3):
    kx = branch(k0, decomp, [x])
    err = np.max(np.abs(expm(kx * fmap.period) - fmap.entries))
    print(f"  branch x={x:+d}: |exp(T K_x) - P| = {err:.1e}")
