"""Fully connected network: ReLU hidden layers, logistic output, cross-entropy loss.

Training is mini-batch gradient descent with Adam step sizes on standardized
inputs.
"""
from __future__ import annotations

import numpy as np
from scipy.special import expit

ADAM_BETAS = (0.9, 0.999)
ADAM_EPS = 1e-8


def init_params(sizes, rng) -> list:
    """He-normal weights and zero biases for layer widths ``sizes``."""
    params = []
    for fan_in, fan_out in zip(sizes[:-1], sizes[1:]):
        params.append(rng.normal(0.0, np.sqrt(2.0 / fan_in), (fan_in, fan_out)))
        params.append(np.zeros(fan_out))
    return params


def forward_logit(params, x) -> np.ndarray:
    h = x
    n_layers = len(params) // 2
    for i in range(n_layers):
        z = h @ params[2 * i] + params[2 * i + 1]
        h = np.maximum(z, 0.0) if i < n_layers - 1 else z
    return h[:, 0]


def loss_and_grad(params, x, y):
    """Mean binary cross-entropy of the logistic output and its gradient."""
    n_layers = len(params) // 2
    hs = [x]
    zs = []
    h = x
    for i in range(n_layers):
        z = h @ params[2 * i] + params[2 * i + 1]
        zs.append(z)
        h = np.maximum(z, 0.0) if i < n_layers - 1 else z
        hs.append(h)
    logit = zs[-1][:, 0]
    # log(1 + e^z) - y z, written stably
    loss = float(np.mean(np.logaddexp(0.0, logit) - y * logit))
    delta = ((expit(logit) - y) / y.size)[:, None]
    grads = [None] * len(params)
    for i in reversed(range(n_layers)):
        grads[2 * i] = hs[i].T @ delta
        grads[2 * i + 1] = delta.sum(axis=0)
        if i:
            delta = (delta @ params[2 * i].T) * (zs[i - 1] > 0)
    return loss, grads


def standardizer(x):
    mean = x.mean(axis=0)
    std = x.std(axis=0)
    return mean, np.where(std > 0, std, 1.0)


def fit_mlp(x, y, hidden, epochs: int, learning_rate: float, batch_size: int, rng) -> dict:
    mean, std = standardizer(x)
    xs = (x - mean) / std
    y = y.astype(float)
    params = init_params([x.shape[1], *hidden, 1], rng)
    m = [np.zeros_like(p) for p in params]
    v = [np.zeros_like(p) for p in params]
    b1, b2 = ADAM_BETAS
    t = 0
    for _ in range(epochs):
        perm = rng.permutation(y.size)
        for start in range(0, y.size, batch_size):
            idx = perm[start : start + batch_size]
            _, grads = loss_and_grad(params, xs[idx], y[idx])
            t += 1
            for j, g in enumerate(grads):
                m[j] = b1 * m[j] + (1 - b1) * g
                v[j] = b2 * v[j] + (1 - b2) * g * g
                mhat = m[j] / (1 - b1**t)
                vhat = v[j] / (1 - b2**t)
                params[j] = params[j] - learning_rate * mhat / (np.sqrt(vhat) + ADAM_EPS)
    return {"mean": mean, "std": std, "params": params}


def mlp_score(s, x) -> np.ndarray:
    return expit(forward_logit(s["params"], (x - s["mean"]) / s["std"]))
