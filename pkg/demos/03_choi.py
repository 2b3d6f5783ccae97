"""Choi matrices by reshuffling, and the conditional complete-positivity test.

The reshuffle is an index permutation, so applying it twice is the identity.
A generator is a valid Lindbladian exactly when its reshuffled matrix is
positive on the complement of the maximally entangled vector.

Run: python3 demos/03_choi.py
"""
import numpy as np

from floqlind.choi import ccp_min_eigenvalue, reshuffle
from floqlind.qdyn import SIGMA_X, SIGMA_Z, depolarizing_generator, lindbladian_superop

rng = np.random.default_rng(0)
m = rng.normal(size=(4, 4)) + 1j * rng.normal(size=(4, 4))
print("reshuffle twice is the identity:", np.array_equal(reshuffle(reshuffle(m)), m))
print("reshuffle(identity) / 2 is the projector on |Phi>:\n", np.round(reshuffle(np.eye(4)).real / 2, 3))

lindblad = lindbladian_superop(0.5 * SIGMA_Z, [SIGMA_X], [0.2])
print(f"dephasing-plus-flip generator: min conditional eigenvalue {ccp_min_eigenvalue(lindblad):+.3f}")
print(f"depolarizing generator:        min conditional eigenvalue {ccp_min_eigenvalue(depolarizing_generator(2)):+.3f}")
print(f"negated generator:             min conditional eigenvalue {ccp_min_eigenvalue(-lindblad):+.3f}  (not a Lindbladian)")
