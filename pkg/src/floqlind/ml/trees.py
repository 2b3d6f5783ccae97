"""CART trees (Gini impurity), random forests and two-class AdaBoost."""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.special import expit

LEAF = -1
ALPHA_CAP = 0.5 * math.log((1 - 1e-10) / 1e-10)


@dataclass
class Tree:
    """Flat binary tree: node ``i`` sends ``x[feature[i]] <= threshold[i]`` left.

    Leaves have ``feature == -1`` and hold the class-1 (weighted) frequency.
    """

    feature: np.ndarray
    threshold: np.ndarray
    left: np.ndarray
    right: np.ndarray
    value: np.ndarray

    @property
    def node_count(self) -> int:
        return int(self.feature.size)

    @property
    def depth(self) -> int:
        depth = np.zeros(self.node_count, dtype=int)
        for i in range(self.node_count):
            if self.feature[i] != LEAF:
                depth[self.left[i]] = depth[self.right[i]] = depth[i] + 1
        return int(depth.max())

    def apply(self, x: np.ndarray) -> np.ndarray:
        """Leaf index reached by each row of ``x``."""
        node = np.zeros(x.shape[0], dtype=int)
        active = np.flatnonzero(self.feature[node] != LEAF)
        while active.size:
            n = node[active]
            go_left = x[active, self.feature[n]] <= self.threshold[n]
            node[active] = np.where(go_left, self.left[n], self.right[n])
            active = active[self.feature[node[active]] != LEAF]
        return node

    def predict_score(self, x: np.ndarray) -> np.ndarray:
        return self.value[self.apply(x)]

    def to_state(self) -> dict:
        return {
            "feature": self.feature.tolist(),
            "threshold": self.threshold.tolist(),
            "left": self.left.tolist(),
            "right": self.right.tolist(),
            "value": self.value.tolist(),
        }

    @classmethod
    def from_state(cls, s: dict) -> "Tree":
        return cls(
            np.array(s["feature"], dtype=int),
            np.array(s["threshold"], dtype=float),
            np.array(s["left"], dtype=int),
            np.array(s["right"], dtype=int),
            np.array(s["value"], dtype=float),
        )


def _best_split(x, y, w, feats):
    """Lowest weighted Gini split of the node data over the candidate features.

    Returns (feature, threshold, impurity) or None when no split separates
    distinct values. Ties go to the earlier feature, then the lower threshold.
    """
    xn = x[:, feats]
    order = np.argsort(xn, axis=0, kind="stable")
    xs = np.take_along_axis(xn, order, 0)
    ws = w[order]
    ps = (w * y)[order]
    total_w = ws[:, 0].sum()
    total_p = ps[:, 0].sum()
    cw = np.cumsum(ws, axis=0)[:-1]
    cp = np.cumsum(ps, axis=0)[:-1]
    rw = total_w - cw
    rp = total_p - cp
    with np.errstate(divide="ignore", invalid="ignore"):
        imp = (2 * cp * (cw - cp) / cw + 2 * rp * (rw - rp) / rw) / total_w
    valid = (xs[1:] > xs[:-1]) & (cw > 0) & (rw > 0)
    imp = np.where(valid, imp, np.inf)
    if not np.isfinite(imp).any():
        return None
    flat = int(np.argmin(imp.T.reshape(-1)))
    fi, pos = divmod(flat, imp.shape[0])
    lo, hi = xs[pos, fi], xs[pos + 1, fi]
    thr = 0.5 * (lo + hi)
    if not lo <= thr < hi:
        thr = lo
    return int(feats[fi]), float(thr), float(imp[pos, fi])


def fit_tree(x, y, sample_weight=None, max_depth: int = 10, max_features=None, rng=None, min_samples_split: int = 2) -> Tree:
    """Grow a CART classification tree.

    ``max_features`` below the feature count draws a random subset at every
    split from ``rng``; otherwise all features are tried in order.
    """
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    w = np.ones(y.size) if sample_weight is None else np.asarray(sample_weight, dtype=float)
    d = x.shape[1]
    subset = max_features is not None and max_features < d
    feature, threshold, left, right, value = [], [], [], [], []

    def new_node(idx):
        feature.append(LEAF)
        threshold.append(0.0)
        left.append(LEAF)
        right.append(LEAF)
        value.append(float(np.dot(w[idx], y[idx]) / w[idx].sum()))
        return len(feature) - 1

    root = new_node(np.arange(y.size))
    stack = [(root, np.arange(y.size), 0)]
    while stack:
        node, idx, depth = stack.pop()
        yi = y[idx]
        if depth >= max_depth or idx.size < min_samples_split or yi.min() == yi.max():
            continue
        feats = np.sort(rng.choice(d, max_features, replace=False)) if subset else np.arange(d)
        found = _best_split(x[idx], yi, w[idx], feats)
        if found is None:
            continue
        f, thr, _ = found
        mask = x[idx, f] <= thr
        li, ri = idx[mask], idx[~mask]
        feature[node], threshold[node] = f, thr
        left[node] = new_node(li)
        right[node] = new_node(ri)
        # right pushed first so the left subtree is numbered depth-first first
        stack.append((right[node], ri, depth + 1))
        stack.append((left[node], li, depth + 1))
    return Tree(
        np.array(feature, dtype=int),
        np.array(threshold, dtype=float),
        np.array(left, dtype=int),
        np.array(right, dtype=int),
        np.array(value, dtype=float),
    )


def tree_rngs(seed: int, count: int) -> list:
    """Independent generators for the members of an ensemble."""
    return [np.random.default_rng(s) for s in np.random.SeedSequence(seed).spawn(count)]


def bootstrap_indices(rng, n: int) -> np.ndarray:
    return rng.integers(0, n, n)


def default_max_features(d: int) -> int:
    return max(1, math.ceil(math.sqrt(d)))


def fit_forest(x, y, n_trees: int, max_depth: int, seed: int, max_features=None) -> list[Tree]:
    """Bagged trees; each tree sees a bootstrap sample and per-split feature subsets."""
    n, d = x.shape
    m = default_max_features(d) if max_features is None else int(max_features)
    trees = []
    for rng in tree_rngs(seed, n_trees):
        boot = bootstrap_indices(rng, n)
        trees.append(fit_tree(x[boot], y[boot], max_depth=max_depth, max_features=m, rng=rng))
    return trees


def forest_score(trees, x) -> np.ndarray:
    return np.mean([t.predict_score(x) for t in trees], axis=0)


def fit_adaboost(x, y, n_stumps: int, max_depth: int = 1):
    """Discrete two-class AdaBoost; returns (trees, alphas).

    Weak learners vote ``+1`` where their weighted leaf frequency is >= 0.5.
    Boosting stops early when a learner is no better than chance or perfect.
    """
    y = np.asarray(y, dtype=float)
    sign = 2 * y - 1
    w = np.full(y.size, 1.0 / y.size)
    trees, alphas = [], []
    for _ in range(n_stumps):
        tree = fit_tree(x, y, sample_weight=w, max_depth=max_depth)
        h = np.where(tree.predict_score(x) >= 0.5, 1.0, -1.0)
        err = float(w[h != sign].sum() / w.sum())
        if err >= 0.5:
            if not trees:
                trees.append(tree)
                alphas.append(0.0)
            break
        alpha = ALPHA_CAP if err <= 1e-10 else 0.5 * math.log((1 - err) / err)
        trees.append(tree)
        alphas.append(alpha)
        if err <= 1e-10:
            break
        w = w * np.exp(-alpha * sign * h)
        w /= w.sum()
    return trees, alphas


def adaboost_margin(trees, alphas, x) -> np.ndarray:
    f = np.zeros(x.shape[0])
    for t, a in zip(trees, alphas):
        f += a * np.where(t.predict_score(x) >= 0.5, 1.0, -1.0)
    return f


def adaboost_score(trees, alphas, x) -> np.ndarray:
    """Logistic link of the staged margin, ``1 / (1 + exp(-2 F))``."""
    return expit(2 * adaboost_margin(trees, alphas, x))
