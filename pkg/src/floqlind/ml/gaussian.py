"""Gaussian generative classifiers: naive Bayes, LDA and QDA."""
from __future__ import annotations

import numpy as np
from scipy.special import expit

RIDGE = 1e-6
VAR_SMOOTHING = 1e-9


def _priors(y):
    p1 = float(np.mean(y))
    return np.log([1 - p1, p1])


def fit_gaussian_nb(x, y) -> dict:
    eps = VAR_SMOOTHING * max(float(x.var(axis=0).max()), 1.0)
    means = np.stack([x[y == c].mean(axis=0) for c in (0, 1)])
    var = np.stack([x[y == c].var(axis=0) for c in (0, 1)]) + eps
    return {"means": means, "var": var, "log_prior": _priors(y)}


def gaussian_nb_score(s, x) -> np.ndarray:
    ll = [
        s["log_prior"][c] - 0.5 * np.sum(np.log(2 * np.pi * s["var"][c]) + (x - s["means"][c]) ** 2 / s["var"][c], axis=1)
        for c in (0, 1)
    ]
    return expit(ll[1] - ll[0])


def fit_lda(x, y, ridge: float = RIDGE) -> dict:
    """Pooled-covariance discriminant, reduced to a linear score ``x . w + b``."""
    means = np.stack([x[y == c].mean(axis=0) for c in (0, 1)])
    resid = x - means[y]
    cov = resid.T @ resid / max(x.shape[0] - 2, 1) + ridge * np.eye(x.shape[1])
    w = np.linalg.solve(cov, means[1] - means[0])
    lp = _priors(y)
    b = -0.5 * float((means[1] + means[0]) @ w) + lp[1] - lp[0]
    return {"w": w, "b": b}


def lda_score(s, x) -> np.ndarray:
    return expit(x @ s["w"] + s["b"])


def fit_qda(x, y, regularizer: float = RIDGE) -> dict:
    means, precisions, logdets = [], [], []
    for c in (0, 1):
        xc = x[y == c]
        mu = xc.mean(axis=0)
        r = xc - mu
        cov = r.T @ r / max(xc.shape[0] - 1, 1) + regularizer * np.eye(x.shape[1])
        means.append(mu)
        precisions.append(np.linalg.inv(cov))
        logdets.append(np.linalg.slogdet(cov)[1])
    return {"means": np.stack(means), "precisions": np.stack(precisions), "logdets": np.array(logdets), "log_prior": _priors(y)}


def qda_score(s, x) -> np.ndarray:
    ll = []
    for c in (0, 1):
        r = x - s["means"][c]
        maha = np.einsum("ij,jk,ik->i", r, s["precisions"][c], r)
        ll.append(s["log_prior"][c] - 0.5 * (s["logdets"][c] + maha))
    return expit(ll[1] - ll[0])
