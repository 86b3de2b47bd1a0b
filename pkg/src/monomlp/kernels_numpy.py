"""Pure-numpy elementwise kernels.

These are the reference implementations of the hot inner loops: scalar
activation evaluation/derivative over arrays and the Adam parameter update.
`monomlp.backend` swaps them for numba-jitted twins (kernels_numba) unless
MONOMLP_BACKEND=numpy is set.

Activation families are addressed by integer code so both backends share one
dispatch table.  Kink convention is the right-derivative.  Exp-based forms
clamp their exponent argument to +-700 (float64 exp overflows near 709).
"""

import numpy as np
from scipy.special import erf

RELU = 0
LEAKYRELU = 1
PRELU = 2
RELU6 = 3
ELU = 4
SELU = 5
CELU = 6
GELU = 7
SILU = 8
SIGMOID = 9
TANH = 10
EXP = 11
SOFTSIGN = 12
SOFTPLUS = 13
LOGSIGMOID = 14

EXP_CLAMP = 700.0

_INV_SQRT2 = 1.0 / np.sqrt(2.0)
_INV_SQRT2PI = 1.0 / np.sqrt(2.0 * np.pi)


def _clamp(x):
    return np.clip(x, -EXP_CLAMP, EXP_CLAMP)


def _sigmoid(x):
    z = np.exp(-np.abs(_clamp(x)))
    return np.where(x >= 0.0, 1.0 / (1.0 + z), z / (1.0 + z))


def _softplus(x):
    return np.log1p(np.exp(-np.abs(_clamp(x)))) + np.maximum(x, 0.0)


def _base_eval(code, alpha, lam, x):
    if code == RELU:
        return np.maximum(x, 0.0)
    if code == LEAKYRELU or code == PRELU:
        return np.where(x >= 0.0, x, alpha * x)
    if code == RELU6:
        return np.clip(x, 0.0, 6.0)
    if code == ELU:
        return np.where(x >= 0.0, x, alpha * np.expm1(_clamp(x)))
    if code == SELU:
        return lam * np.where(x >= 0.0, x, alpha * np.expm1(_clamp(x)))
    if code == CELU:
        return np.where(x >= 0.0, x, alpha * np.expm1(_clamp(x / alpha)))
    if code == GELU:
        return x * 0.5 * (1.0 + erf(x * _INV_SQRT2))
    if code == SILU:
        return x * _sigmoid(x)
    if code == SIGMOID:
        return _sigmoid(x)
    if code == TANH:
        return np.tanh(x)
    if code == EXP:
        return np.exp(_clamp(x))
    if code == SOFTSIGN:
        return x / (1.0 + np.abs(x))
    if code == SOFTPLUS:
        return _softplus(x)
    if code == LOGSIGMOID:
        return -_softplus(-x)
    raise ValueError(f"unknown activation code {code}")


def _base_deriv(code, alpha, lam, x):
    if code == RELU:
        return np.where(x >= 0.0, 1.0, 0.0)
    if code == LEAKYRELU or code == PRELU:
        return np.where(x >= 0.0, 1.0, alpha)
    if code == RELU6:
        return np.where((x >= 0.0) & (x < 6.0), 1.0, 0.0)
    if code == ELU:
        return np.where(x >= 0.0, 1.0, alpha * np.exp(_clamp(x)))
    if code == SELU:
        return lam * np.where(x >= 0.0, 1.0, alpha * np.exp(_clamp(x)))
    if code == CELU:
        return np.where(x >= 0.0, 1.0, np.exp(_clamp(x / alpha)))
    if code == GELU:
        phi = 0.5 * (1.0 + erf(x * _INV_SQRT2))
        return phi + x * _INV_SQRT2PI * np.exp(-0.5 * np.minimum(x * x, EXP_CLAMP))
    if code == SILU:
        s = _sigmoid(x)
        return s * (1.0 + x * (1.0 - s))
    if code == SIGMOID:
        s = _sigmoid(x)
        return s * (1.0 - s)
    if code == TANH:
        t = np.tanh(x)
        return 1.0 - t * t
    if code == EXP:
        return np.exp(_clamp(x))
    if code == SOFTSIGN:
        d = 1.0 + np.abs(x)
        return 1.0 / (d * d)
    if code == SOFTPLUS:
        return _sigmoid(x)
    if code == LOGSIGMOID:
        return _sigmoid(-x)
    raise ValueError(f"unknown activation code {code}")


def act_eval(code, alpha, lam, reflected, scale, shift, x):
    """Evaluate scale * sigma_r(x) + shift where sigma_r is the (optionally
    point-reflected) base activation: sigma_r(x) = -sigma(-x) when reflected."""
    x = np.asarray(x, dtype=np.float64)
    if reflected:
        y = -_base_eval(code, alpha, lam, -x)
    else:
        y = _base_eval(code, alpha, lam, x)
    if scale != 1.0 or shift != 0.0:
        y = scale * y + shift
    return y


def act_deriv(code, alpha, lam, reflected, scale, shift, x):
    """Derivative of act_eval w.r.t. x: scale * sigma'(+-x)."""
    x = np.asarray(x, dtype=np.float64)
    if reflected:
        d = _base_deriv(code, alpha, lam, -x)
    else:
        d = _base_deriv(code, alpha, lam, x)
    if scale != 1.0:
        d = scale * d
    return d


def adam_step(param, grad, m, v, lr, beta1, beta2, eps, bc1, bc2):
    """In-place Adam update.  bc1/bc2 are the bias corrections 1 - beta^t."""
    m *= beta1
    m += (1.0 - beta1) * grad
    v *= beta2
    v += (1.0 - beta2) * (grad * grad)
    param -= lr * (m / bc1) / (np.sqrt(v / bc2) + eps)


def sgd_step(param, grad, lr):
    param -= lr * grad
