"""Losses, Adam/SGD, fan-in uniform initialization, and the mini-batch loop.

Everything is deterministic for a fixed seed: one PCG64 generator drives
shuffling, parameter updates are single-threaded, and batch reductions keep
numpy's fixed summation order.  Stored weights are never clamped; the sign
constraints live in the layer forward maps, so the optimizer is a plain
unconstrained one.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import backend
from .errors import ConstraintError, TrainingAbort
from .network import Network

LOSS_MSE = "mse"
LOSS_BCE = "bce"


@dataclass
class TrainConfig:
    learning_rate: float = 1e-3
    epochs: int = 100
    batch_size: int = 32
    seed: int = 0
    loss: str = LOSS_MSE
    optimizer: str = "adam"
    beta1: float = 0.9
    beta2: float = 0.999
    eps: float = 1e-8

    def __post_init__(self):
        if self.learning_rate <= 0:
            raise ConstraintError("learning_rate must be > 0")
        if self.batch_size < 1:
            raise ConstraintError("batch_size must be >= 1")
        if self.loss not in (LOSS_MSE, LOSS_BCE):
            raise ConstraintError(f"unknown loss {self.loss!r}")
        if self.optimizer not in ("adam", "sgd"):
            raise ConstraintError(f"unknown optimizer {self.optimizer!r}")


def init_params(net: Network, seed: int) -> Network:
    """Fresh copy with W and b uniform in +-1/sqrt(fan_in) (fan-in rule)."""
    out = net.copy()
    rng = np.random.default_rng(seed)
    for layer in (out.free_subnet or []) + out.layers:
        fan_in = max(1, layer.spec.in_dim)
        bound = 1.0 / np.sqrt(fan_in)
        layer.params.W[...] = rng.uniform(-bound, bound, size=layer.params.W.shape)
        layer.params.b[...] = rng.uniform(-bound, bound, size=layer.params.b.shape)
    return out


def mse_loss(pred, target):
    """Mean squared error and its gradient w.r.t. pred."""
    pred = np.asarray(pred, dtype=np.float64)
    target = np.asarray(target, dtype=np.float64)
    diff = pred - target
    n = diff.size
    return float(np.mean(diff * diff)), (2.0 / n) * diff


def bce_loss(logit, target):
    """Mean binary cross-entropy of a sigmoid-squashed logit; targets in {0,1}."""
    z = np.asarray(logit, dtype=np.float64)
    t = np.asarray(target, dtype=np.float64)
    if not np.all((t == 0.0) | (t == 1.0)):
        raise ConstraintError("bce targets must be 0 or 1")
    # per-element: max(z,0) - z*t + log(1+exp(-|z|))
    n = z.size
    loss = np.maximum(z, 0.0) - z * t + np.log1p(np.exp(-np.abs(z)))
    sig = np.where(z >= 0.0, 1.0 / (1.0 + np.exp(-z)), np.exp(z) / (1.0 + np.exp(z)))
    return float(np.mean(loss)), (sig - t) / n


def loss(kind, pred, target):
    if kind == LOSS_MSE:
        return mse_loss(pred, target)
    if kind == LOSS_BCE:
        return bce_loss(pred, target)
    raise ConstraintError(f"unknown loss {kind!r}")


class _Adam:
    def __init__(self, params, config: TrainConfig):
        self.cfg = config
        self.m = [np.zeros_like(p) for p in params]
        self.v = [np.zeros_like(p) for p in params]
        self.t = 0

    def step(self, params, grads):
        self.t += 1
        c = self.cfg
        bc1 = 1.0 - c.beta1 ** self.t
        bc2 = 1.0 - c.beta2 ** self.t
        for p, g, m, v in zip(params, grads, self.m, self.v):
            backend.adam_step(p, g, m, v, c.learning_rate, c.beta1, c.beta2, c.eps,
                              bc1, bc2)


class _SGD:
    def __init__(self, params, config: TrainConfig):
        self.cfg = config

    def step(self, params, grads):
        for p, g in zip(params, grads):
            backend.sgd_step(p, g, self.cfg.learning_rate)


def fit(net: Network, X, y, config: TrainConfig):
    """Shuffled mini-batch training; returns (trained copy, per-epoch losses)."""
    X = np.asarray(X, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    if X.ndim != 2 or X.shape[0] == 0:
        raise ConstraintError("dataset must be a nonempty (n, d) array")
    if y.ndim == 1:
        y = y[:, None]
    out = net.copy()
    params = out.parameters()
    opt = (_Adam if config.optimizer == "adam" else _SGD)(params, config)
    rng = np.random.default_rng(config.seed)
    n = X.shape[0]
    curve = []
    for epoch in range(config.epochs):
        order = rng.permutation(n)
        total = 0.0
        for start in range(0, n, config.batch_size):
            idx = order[start:start + config.batch_size]
            xb, yb = X[idx], y[idx]
            pred = out.forward(xb)
            value, dpred = loss(config.loss, pred, yb)
            if not np.isfinite(value):
                raise TrainingAbort(
                    f"non-finite loss at epoch {epoch}, batch {start // config.batch_size}"
                )
            grads, _ = out.backward_batch(xb, dpred)
            opt.step(params, grads)
            total += value * len(idx)
        curve.append(total / n)
    return out, curve
