"""The four layer forms: constrained affine, free affine, and the two
activation switches.

Storage is always the raw unconstrained matrix W; constraints are applied
functionally by the forward map (abs/square reparametrization or the
W+ = max(W,0) / W- = min(W,0) sign split), never by mutating storage, so any
unconstrained optimizer applies.

A layer may be a hybrid: its first ``mono_cols`` input columns take the
monotone form while the remaining columns enter as a plain affine term.
This is how unconstrained free-subnet outputs join the first monotone layer,
and how the output layer routes monotone units through non-negative (abs)
weights.  With mono_cols == in_dim the forms reduce to the pure equations.
"""

from __future__ import annotations

import copy
from dataclasses import dataclass, field

import numpy as np

from . import activations as act
from .activations import ActivationSpec
from .diffcore import GradPair
from .errors import ConstraintError, ShapeError

KIND_CONSTRAINED = "constrained_affine"
KIND_FREE = "free_affine"
KIND_SWITCH_PRE = "switch_pre"
KIND_SWITCH_POST = "switch_post"
KINDS = (KIND_CONSTRAINED, KIND_FREE, KIND_SWITCH_PRE, KIND_SWITCH_POST)

SIGN_NON_NEGATIVE = "non_negative"
SIGN_NON_POSITIVE = "non_positive"

REPARAM_ABS = "abs"
REPARAM_SQUARE = "square"


@dataclass
class LayerSpec:
    kind: str
    in_dim: int
    out_dim: int
    activation: ActivationSpec | None = None
    sign: str = SIGN_NON_NEGATIVE
    reparam: str = REPARAM_ABS
    mono_cols: int | None = None  # default: in_dim except for free_affine (0)

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ConstraintError(f"unknown layer kind {self.kind!r}")
        if self.in_dim < 0 or self.out_dim < 0:
            raise ConstraintError("layer dimensions must be >= 0")
        if self.sign not in (SIGN_NON_NEGATIVE, SIGN_NON_POSITIVE):
            raise ConstraintError(f"unknown sign {self.sign!r}")
        if self.reparam not in (REPARAM_ABS, REPARAM_SQUARE):
            raise ConstraintError(f"unknown reparam {self.reparam!r}")
        if self.mono_cols is None:
            self.mono_cols = 0 if self.kind == KIND_FREE else self.in_dim
        if not 0 <= self.mono_cols <= self.in_dim:
            raise ConstraintError(
                f"mono_cols must be in [0, {self.in_dim}], got {self.mono_cols}"
            )
        if self.kind in (KIND_SWITCH_PRE, KIND_SWITCH_POST):
            if self.activation is None or not act.usable_for_switch(self.activation):
                raise ConstraintError(
                    f"{self.kind} requires a monotone saturating activation"
                )
        if self.kind == KIND_CONSTRAINED and self.activation is not None:
            if not act.monotone(self.activation):
                raise ConstraintError("constrained_affine requires a monotone activation")


@dataclass
class LayerParams:
    W: np.ndarray  # (out_dim, in_dim), raw unconstrained values
    b: np.ndarray  # (out_dim,)


def split_signs(W) -> tuple[np.ndarray, np.ndarray]:
    """Elementwise positive/negative parts: W+ + W- == W bit-exactly."""
    W = np.asarray(W, dtype=np.float64)
    return np.maximum(W, 0.0), np.minimum(W, 0.0)


def _sign_plus(W):
    # abs subgradient; entries at exactly 0 route to the W+ branch
    return np.where(W >= 0.0, 1.0, -1.0)


def _reparam_apply(W, reparam):
    return np.abs(W) if reparam == REPARAM_ABS else W * W


def _reparam_grad(W, reparam):
    return _sign_plus(W) if reparam == REPARAM_ABS else 2.0 * W


def _as_batch(x):
    x = np.asarray(x, dtype=np.float64)
    if x.ndim == 1:
        return x[None, :], True
    if x.ndim == 2:
        return x, False
    raise ShapeError(f"input must be a vector or a batch, got ndim={x.ndim}")


def _check_dims(W, b, X):
    if X.shape[1] != W.shape[1]:
        raise ShapeError(f"input dim {X.shape[1]} != layer in_dim {W.shape[1]}")
    if b.shape[0] != W.shape[0]:
        raise ShapeError(f"bias dim {b.shape[0]} != layer out_dim {W.shape[0]}")


def _split_cols(A, m):
    return A[:, :m], A[:, m:]


def forward_constrained(W, b, x, sign=SIGN_NON_NEGATIVE, reparam=REPARAM_ABS,
                        activation=None, mono_cols=None):
    """sigma(s*g(W) x + b); the output layer (no activation) omits sigma."""
    W = np.asarray(W, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    X, squeeze = _as_batch(x)
    _check_dims(W, b, X)
    m = W.shape[1] if mono_cols is None else mono_cols
    s = 1.0 if sign == SIGN_NON_NEGATIVE else -1.0
    Wm, Wf = _split_cols(W, m)
    Xm, Xf = _split_cols(X, m)
    z = Xm @ (s * _reparam_apply(Wm, reparam)).T + Xf @ Wf.T + b
    y = act.eval_array(activation, z) if activation is not None else z
    return y[0] if squeeze else y


def forward_free(W, b, x, activation=None, mono_cols=0):
    """Plain affine; columns below mono_cols are routed through abs (the
    non-negative output routing)."""
    return forward_constrained(W, b, x, sign=SIGN_NON_NEGATIVE, reparam=REPARAM_ABS,
                               activation=activation, mono_cols=mono_cols)


def forward_switch_pre(W, b, x, activation, mono_cols=None):
    """sigma(W+ x + b) - sigma(W- x + b), shared bias; free columns enter the
    plus branch."""
    W = np.asarray(W, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    X, squeeze = _as_batch(x)
    _check_dims(W, b, X)
    m = W.shape[1] if mono_cols is None else mono_cols
    Wm, Wf = _split_cols(W, m)
    Xm, Xf = _split_cols(X, m)
    Wp, Wn = split_signs(Wm)
    zp = Xm @ Wp.T + Xf @ Wf.T + b
    zm = Xm @ Wn.T + b
    y = act.eval_array(activation, zp) - act.eval_array(activation, zm)
    return y[0] if squeeze else y


def forward_switch_post(W, b, x, activation, mono_cols=None):
    """W+ sigma(x) + W- sigma(-x) + b; free columns enter as a plain affine term."""
    W = np.asarray(W, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    X, squeeze = _as_batch(x)
    _check_dims(W, b, X)
    m = W.shape[1] if mono_cols is None else mono_cols
    Wm, Wf = _split_cols(W, m)
    Xm, Xf = _split_cols(X, m)
    Wp, Wn = split_signs(Wm)
    y = (act.eval_array(activation, Xm) @ Wp.T
         + act.eval_array(activation, -Xm) @ Wn.T
         + Xf @ Wf.T + b)
    return y[0] if squeeze else y


def _as_upstream(upstream, out_dim, batch):
    U = np.asarray(upstream, dtype=np.float64)
    if U.ndim == 1:
        U = U[None, :]
    if U.shape != (batch, out_dim):
        raise ShapeError(f"upstream shape {U.shape} != ({batch}, {out_dim})")
    return U


def _pack_grads(dW, db, dX, squeeze):
    return GradPair(dW=dW, db=db, dx=dX[0] if squeeze else dX)


def backward_constrained(W, b, x, upstream, sign=SIGN_NON_NEGATIVE,
                         reparam=REPARAM_ABS, activation=None, mono_cols=None):
    W = np.asarray(W, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    X, squeeze = _as_batch(x)
    _check_dims(W, b, X)
    m = W.shape[1] if mono_cols is None else mono_cols
    s = 1.0 if sign == SIGN_NON_NEGATIVE else -1.0
    Wm, Wf = _split_cols(W, m)
    Xm, Xf = _split_cols(X, m)
    G = _reparam_apply(Wm, reparam)
    U = _as_upstream(upstream, W.shape[0], X.shape[0])
    if activation is not None:
        z = Xm @ (s * G).T + Xf @ Wf.T + b
        U = U * act.deriv_array(activation, z)
    dW = np.empty_like(W)
    dW[:, :m] = (s * (U.T @ Xm)) * _reparam_grad(Wm, reparam)
    dW[:, m:] = U.T @ Xf
    dX = np.empty_like(X)
    dX[:, :m] = s * (U @ G)
    dX[:, m:] = U @ Wf
    return _pack_grads(dW, U.sum(axis=0), dX, squeeze)


def backward_free(W, b, x, upstream, activation=None, mono_cols=0):
    return backward_constrained(W, b, x, upstream, sign=SIGN_NON_NEGATIVE,
                                reparam=REPARAM_ABS, activation=activation,
                                mono_cols=mono_cols)


def backward_switch_pre(W, b, x, upstream, activation, mono_cols=None):
    W = np.asarray(W, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    X, squeeze = _as_batch(x)
    _check_dims(W, b, X)
    m = W.shape[1] if mono_cols is None else mono_cols
    Wm, Wf = _split_cols(W, m)
    Xm, Xf = _split_cols(X, m)
    Wp, Wn = split_signs(Wm)
    zp = Xm @ Wp.T + Xf @ Wf.T + b
    zm = Xm @ Wn.T + b
    U = _as_upstream(upstream, W.shape[0], X.shape[0])
    Up = U * act.deriv_array(activation, zp)
    Um = U * act.deriv_array(activation, zm)
    plus_mask = Wm >= 0.0
    dW = np.empty_like(W)
    dW[:, :m] = np.where(plus_mask, Up.T @ Xm, -(Um.T @ Xm))
    dW[:, m:] = Up.T @ Xf
    dX = np.empty_like(X)
    dX[:, :m] = Up @ Wp - Um @ Wn
    dX[:, m:] = Up @ Wf
    return _pack_grads(dW, (Up - Um).sum(axis=0), dX, squeeze)


def backward_switch_post(W, b, x, upstream, activation, mono_cols=None):
    W = np.asarray(W, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    X, squeeze = _as_batch(x)
    _check_dims(W, b, X)
    m = W.shape[1] if mono_cols is None else mono_cols
    Wm, Wf = _split_cols(W, m)
    Xm, Xf = _split_cols(X, m)
    Wp, Wn = split_signs(Wm)
    U = _as_upstream(upstream, W.shape[0], X.shape[0])
    sx = act.eval_array(activation, Xm)
    snx = act.eval_array(activation, -Xm)
    plus_mask = Wm >= 0.0
    dW = np.empty_like(W)
    dW[:, :m] = np.where(plus_mask, U.T @ sx, U.T @ snx)
    dW[:, m:] = U.T @ Xf
    dX = np.empty_like(X)
    dX[:, :m] = ((U @ Wp) * act.deriv_array(activation, Xm)
                 - (U @ Wn) * act.deriv_array(activation, -Xm))
    dX[:, m:] = U @ Wf
    return _pack_grads(dW, U.sum(axis=0), dX, squeeze)


@dataclass
class Layer:
    """One layer: a LayerSpec plus its parameters."""

    spec: LayerSpec
    params: LayerParams = field(default=None)

    def __post_init__(self):
        if self.params is None:
            self.params = LayerParams(
                W=np.zeros((self.spec.out_dim, self.spec.in_dim)),
                b=np.zeros(self.spec.out_dim),
            )
        W, b = self.params.W, self.params.b
        if W.shape != (self.spec.out_dim, self.spec.in_dim) or b.shape != (self.spec.out_dim,):
            raise ShapeError(
                f"params {W.shape}/{b.shape} do not match spec "
                f"({self.spec.out_dim}, {self.spec.in_dim})"
            )

    def forward(self, x):
        s = self.spec
        if s.kind == KIND_CONSTRAINED:
            return forward_constrained(self.params.W, self.params.b, x, s.sign,
                                       s.reparam, s.activation, s.mono_cols)
        if s.kind == KIND_FREE:
            return forward_free(self.params.W, self.params.b, x, s.activation, s.mono_cols)
        if s.kind == KIND_SWITCH_PRE:
            return forward_switch_pre(self.params.W, self.params.b, x, s.activation,
                                      s.mono_cols)
        return forward_switch_post(self.params.W, self.params.b, x, s.activation,
                                   s.mono_cols)

    def backward(self, x, upstream) -> GradPair:
        s = self.spec
        if s.kind == KIND_CONSTRAINED:
            return backward_constrained(self.params.W, self.params.b, x, upstream,
                                        s.sign, s.reparam, s.activation, s.mono_cols)
        if s.kind == KIND_FREE:
            return backward_free(self.params.W, self.params.b, x, upstream,
                                 s.activation, s.mono_cols)
        if s.kind == KIND_SWITCH_PRE:
            return backward_switch_pre(self.params.W, self.params.b, x, upstream,
                                       s.activation, s.mono_cols)
        return backward_switch_post(self.params.W, self.params.b, x, upstream,
                                    s.activation, s.mono_cols)

    def effective_weight(self) -> np.ndarray:
        """The matrix actually multiplying the input (activation aside)."""
        s = self.spec
        W = self.params.W
        m = s.mono_cols
        Wm, Wf = W[:, :m], W[:, m:]
        if s.kind == KIND_CONSTRAINED:
            sgn = 1.0 if s.sign == SIGN_NON_NEGATIVE else -1.0
            return np.hstack([sgn * _reparam_apply(Wm, s.reparam), Wf])
        if s.kind == KIND_FREE:
            return np.hstack([np.abs(Wm), Wf])
        raise ConstraintError(f"{s.kind} has no single effective weight matrix")

    def copy(self) -> "Layer":
        spec = copy.copy(self.spec)  # activation specs are frozen, shareable
        return Layer(spec=spec,
                     params=LayerParams(W=self.params.W.copy(), b=self.params.b.copy()))
