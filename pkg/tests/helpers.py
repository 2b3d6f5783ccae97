"""Shared constructors for tests."""
import numpy as np
from scipy.linalg import expm

from floqlind.propagator import FloquetMap
from floqlind.qdyn import ModelSpec, lindbladian_superop


def random_lindbladian(rng, n=2, n_jumps=2, scale=1.0):
    a = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
    jumps = [rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n)) for _ in range(n_jumps)]
    return scale * lindbladian_superop((a + a.conj().T) / 2, jumps, list(rng.uniform(0, 1, n_jumps)))


def constant_map(generator, period):
    """Floquet map of a time-independent generator, built with an independent exponential."""
    n = int(round(np.sqrt(generator.shape[0])))
    model = ModelSpec("custom", omega=2 * np.pi / period, dim=n, generator=generator)
    return FloquetMap(expm(generator * period), period, model, 0)


def random_principal_lindbladian(rng, n=2, period=1.0, max_decay=np.inf):
    """Random generator whose exponential has all eigenvalue phases inside (-pi, pi).

    ``max_decay`` bounds ``|Re lambda| * period``: a map that contracts some
    direction by ``exp(-max_decay)`` determines its logarithm only to about
    ``eps * exp(max_decay)`` in double precision.
    """
    while True:
        l = random_lindbladian(rng, n, scale=rng.uniform(0.05, 1.0))
        lam = np.linalg.eigvals(l) * period
        if np.abs(lam.imag).max() < 0.95 * np.pi and np.abs(lam.real).max() <= max_decay:
            return l
