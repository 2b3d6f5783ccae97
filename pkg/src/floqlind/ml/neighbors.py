"""k-nearest-neighbour scores under the Euclidean metric."""
from __future__ import annotations

import numpy as np

CHUNK = 512


def knn_score(train_x: np.ndarray, train_y: np.ndarray, x: np.ndarray, k: int) -> np.ndarray:
    """Fraction of class-1 labels among the ``k`` nearest training points.

    Training points tied with the k-th distance all vote, so the score does
    not depend on the order of the training set.
    """
    k = min(k, train_x.shape[0])
    sq_train = np.einsum("ij,ij->i", train_x, train_x)
    y = train_y.astype(float)
    out = np.empty(x.shape[0])
    for start in range(0, x.shape[0], CHUNK):
        q = x[start : start + CHUNK]
        d2 = np.einsum("ij,ij->i", q, q)[:, None] - 2 * q @ train_x.T + sq_train[None]
        kth = np.partition(d2, k - 1, axis=1)[:, k - 1 : k]
        near = d2 <= kth
        out[start : start + CHUNK] = (near @ y) / near.sum(axis=1)
    return out
