"""Numba-jitted twins of kernels_numpy.

Same semantics, loop-fused and compiled.  Kept in lockstep with the numpy
reference; tests/test_kernels.py asserts elementwise agreement.
"""

import math

import numpy as np
from numba import njit

from .kernels_numpy import (
    CELU,
    ELU,
    EXP,
    EXP_CLAMP,
    GELU,
    LEAKYRELU,
    LOGSIGMOID,
    PRELU,
    RELU,
    RELU6,
    SELU,
    SIGMOID,
    SILU,
    SOFTPLUS,
    SOFTSIGN,
    TANH,
)

_INV_SQRT2 = 1.0 / math.sqrt(2.0)
_INV_SQRT2PI = 1.0 / math.sqrt(2.0 * math.pi)


@njit(cache=True)
def _clamp(x):
    if x > EXP_CLAMP:
        return EXP_CLAMP
    if x < -EXP_CLAMP:
        return -EXP_CLAMP
    return x


@njit(cache=True)
def _sigmoid(x):
    z = math.exp(-abs(_clamp(x)))
    if x >= 0.0:
        return 1.0 / (1.0 + z)
    return z / (1.0 + z)


@njit(cache=True)
def _softplus(x):
    return math.log1p(math.exp(-abs(_clamp(x)))) + max(x, 0.0)


@njit(cache=True)
def _base_eval(code, alpha, lam, x):
    if code == RELU:
        return max(x, 0.0)
    if code == LEAKYRELU or code == PRELU:
        return x if x >= 0.0 else alpha * x
    if code == RELU6:
        return min(max(x, 0.0), 6.0)
    if code == ELU:
        return x if x >= 0.0 else alpha * math.expm1(_clamp(x))
    if code == SELU:
        return lam * (x if x >= 0.0 else alpha * math.expm1(_clamp(x)))
    if code == CELU:
        return x if x >= 0.0 else alpha * math.expm1(_clamp(x / alpha))
    if code == GELU:
        return x * 0.5 * (1.0 + math.erf(x * _INV_SQRT2))
    if code == SILU:
        return x * _sigmoid(x)
    if code == SIGMOID:
        return _sigmoid(x)
    if code == TANH:
        return math.tanh(x)
    if code == EXP:
        return math.exp(_clamp(x))
    if code == SOFTSIGN:
        return x / (1.0 + abs(x))
    if code == SOFTPLUS:
        return _softplus(x)
    if code == LOGSIGMOID:
        return -_softplus(-x)
    return np.nan


@njit(cache=True)
def _base_deriv(code, alpha, lam, x):
    if code == RELU:
        return 1.0 if x >= 0.0 else 0.0
    if code == LEAKYRELU or code == PRELU:
        return 1.0 if x >= 0.0 else alpha
    if code == RELU6:
        return 1.0 if (x >= 0.0 and x < 6.0) else 0.0
    if code == ELU:
        return 1.0 if x >= 0.0 else alpha * math.exp(_clamp(x))
    if code == SELU:
        return lam * (1.0 if x >= 0.0 else alpha * math.exp(_clamp(x)))
    if code == CELU:
        return 1.0 if x >= 0.0 else math.exp(_clamp(x / alpha))
    if code == GELU:
        phi = 0.5 * (1.0 + math.erf(x * _INV_SQRT2))
        return phi + x * _INV_SQRT2PI * math.exp(-0.5 * min(x * x, EXP_CLAMP))
    if code == SILU:
        s = _sigmoid(x)
        return s * (1.0 + x * (1.0 - s))
    if code == SIGMOID:
        s = _sigmoid(x)
        return s * (1.0 - s)
    if code == TANH:
        t = math.tanh(x)
        return 1.0 - t * t
    if code == EXP:
        return math.exp(_clamp(x))
    if code == SOFTSIGN:
        d = 1.0 + abs(x)
        return 1.0 / (d * d)
    if code == SOFTPLUS:
        return _sigmoid(x)
    if code == LOGSIGMOID:
        return _sigmoid(-x)
    return np.nan


@njit(cache=True)
def _act_eval_flat(code, alpha, lam, reflected, scale, shift, x, out):
    for i in range(x.size):
        t = -x[i] if reflected else x[i]
        v = _base_eval(code, alpha, lam, t)
        if reflected:
            v = -v
        out[i] = scale * v + shift


@njit(cache=True)
def _act_deriv_flat(code, alpha, lam, reflected, scale, x, out):
    for i in range(x.size):
        t = -x[i] if reflected else x[i]
        out[i] = scale * _base_deriv(code, alpha, lam, t)


def act_eval(code, alpha, lam, reflected, scale, shift, x):
    x = np.ascontiguousarray(x, dtype=np.float64)
    out = np.empty(x.size, dtype=np.float64)
    _act_eval_flat(code, alpha, lam, reflected, scale, shift, x.ravel(), out)
    return out.reshape(x.shape)


def act_deriv(code, alpha, lam, reflected, scale, shift, x):
    x = np.ascontiguousarray(x, dtype=np.float64)
    out = np.empty(x.size, dtype=np.float64)
    _act_deriv_flat(code, alpha, lam, reflected, scale, x.ravel(), out)
    return out.reshape(x.shape)


@njit(cache=True)
def _adam_flat(param, grad, m, v, lr, beta1, beta2, eps, bc1, bc2):
    for i in range(param.size):
        g = grad[i]
        m[i] = beta1 * m[i] + (1.0 - beta1) * g
        v[i] = beta2 * v[i] + (1.0 - beta2) * g * g
        param[i] -= lr * (m[i] / bc1) / (math.sqrt(v[i] / bc2) + eps)


def adam_step(param, grad, m, v, lr, beta1, beta2, eps, bc1, bc2):
    _adam_flat(
        param.reshape(-1), np.ascontiguousarray(grad, dtype=np.float64).reshape(-1),
        m.reshape(-1), v.reshape(-1), lr, beta1, beta2, eps, bc1, bc2,
    )


@njit(cache=True)
def _sgd_flat(param, grad, lr):
    for i in range(param.size):
        param[i] -= lr * grad[i]


def sgd_step(param, grad, lr):
    _sgd_flat(param.reshape(-1), np.ascontiguousarray(grad, dtype=np.float64).reshape(-1), lr)
