"""Dense matrix/vector plumbing and the finite-difference gradient oracle.

The architecture is a fixed chain, so layer-level analytic backprop
(layers.py) replaces a general tape.  Everything is float64; matvec keeps
numpy's deterministic left-to-right row reduction so runs are reproducible
for a fixed seed.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ShapeError


@dataclass
class GradPair:
    """Gradients of one affine layer: dW/db match the layer, dx matches its input."""

    dW: np.ndarray
    db: np.ndarray
    dx: np.ndarray


def as_matrix(W) -> np.ndarray:
    W = np.asarray(W, dtype=np.float64)
    if W.ndim != 2:
        raise ShapeError(f"expected a matrix, got ndim={W.ndim}")
    return W


def as_vector(x) -> np.ndarray:
    x = np.asarray(x, dtype=np.float64)
    if x.ndim != 1:
        raise ShapeError(f"expected a vector, got ndim={x.ndim}")
    return x


def matvec(W, x) -> np.ndarray:
    W, x = as_matrix(W), as_vector(x)
    if W.shape[1] != x.shape[0]:
        raise ShapeError(f"matvec: {W.shape} @ {x.shape}")
    return W @ x


def backward_affine(W, x, upstream) -> GradPair:
    """Reverse-mode through y = W x + b: dW = u (x) x, db = u, dx = W^T u."""
    W, x, u = as_matrix(W), as_vector(x), as_vector(upstream)
    if W.shape[1] != x.shape[0] or W.shape[0] != u.shape[0]:
        raise ShapeError(f"backward_affine: W {W.shape}, x {x.shape}, upstream {u.shape}")
    return GradPair(dW=np.outer(u, x), db=u.copy(), dx=W.T @ u)


def finite_diff_grad(f, x, h: float = 1e-5) -> np.ndarray:
    """Central-difference gradient of a scalar function, the oracle for all
    analytic-gradient tests."""
    if h <= 0:
        raise ValueError(f"step must be positive, got {h}")
    x = as_vector(x)
    grad = np.empty_like(x)
    for i in range(x.shape[0]):
        step = np.zeros_like(x)
        step[i] = h
        fp = float(f(x + step))
        fm = float(f(x - step))
        if not (np.isfinite(fp) and np.isfinite(fm)):
            raise FloatingPointError(f"non-finite evaluation at coordinate {i}")
        grad[i] = (fp - fm) / (2.0 * h)
    return grad
