"""Networks: layer composition, per-feature monotonicity annotations, the
structural monotonicity certificate, the flip/rescale equivalence transforms,
and JSON (de)serialization.

Dataflow of a partially monotone network:

    x ->  monotone features (decreasing ones negated at entry)  \
                                                                 > trunk -> y
    x ->  free features -> unconstrained free subnet            /

The free representation joins the first trunk layer as its unconstrained
trailing columns (mono_cols < in_dim); every other trunk layer treats all of
its inputs monotonically.  The output layer is a free_affine whose monotone
columns are abs-routed, which keeps the whole monotone path sign-definite.
"""

from __future__ import annotations

import copy
import json
from dataclasses import dataclass, field

import numpy as np

from . import activations as act
from .errors import ConstraintError, ModelFormatError, ModelVersionError, ShapeError
from .layers import (
    KIND_CONSTRAINED,
    KIND_FREE,
    KIND_SWITCH_POST,
    KIND_SWITCH_PRE,
    KINDS,
    REPARAM_SQUARE,
    SIGN_NON_NEGATIVE,
    SIGN_NON_POSITIVE,
    Layer,
    LayerParams,
    LayerSpec,
)

MODEL_VERSION = 1

INCREASING = "increasing"
DECREASING = "decreasing"
FREE = "free"
_DIRECTIONS = (INCREASING, DECREASING, FREE)


@dataclass(frozen=True)
class FeatureAnnotation:
    """Per input feature: increasing, decreasing, or free."""

    directions: tuple

    def __post_init__(self):
        for d in self.directions:
            if d not in _DIRECTIONS:
                raise ConstraintError(f"unknown feature direction {d!r}")

    @property
    def mono_idx(self):
        return tuple(i for i, d in enumerate(self.directions) if d != FREE)

    @property
    def free_idx(self):
        return tuple(i for i, d in enumerate(self.directions) if d == FREE)

    @property
    def mono_signs(self):
        return np.array([1.0 if self.directions[i] == INCREASING else -1.0
                         for i in self.mono_idx])

    def __len__(self):
        return len(self.directions)


def annotate(increasing=(), decreasing=(), free=(), n_features=None):
    """Build a FeatureAnnotation from index lists."""
    idx = {}
    for name, seq in ((INCREASING, increasing), (DECREASING, decreasing), (FREE, free)):
        for i in seq:
            if i in idx:
                raise ConstraintError(f"feature {i} annotated twice")
            idx[i] = name
    n = n_features if n_features is not None else (max(idx) + 1 if idx else 0)
    return FeatureAnnotation(tuple(idx.get(i, FREE) for i in range(n)))


@dataclass
class MonotoneCertificate:
    """Outcome of the structural check; rejection is a value, not an error."""

    ok: bool
    reason: str
    non_positive_count: int = 0
    monotone_features: tuple = ()

    def __bool__(self):
        return self.ok


class Network:
    def __init__(self, annotation: FeatureAnnotation, layers, free_subnet=None):
        self.annotation = annotation
        self.layers = list(layers)
        self.free_subnet = list(free_subnet) if free_subnet else None
        if not self.layers:
            raise ConstraintError("a network needs at least one layer")
        n_mono = len(annotation.mono_idx)
        n_free = len(annotation.free_idx)
        if self.free_subnet is not None:
            if n_free == 0:
                raise ConstraintError("free subnet present but no free features")
            if self.free_subnet[0].spec.in_dim != n_free:
                raise ShapeError("free subnet input dim does not match free features")
            free_repr = self.free_subnet[-1].spec.out_dim
        else:
            free_repr = n_free
        first = self.layers[0].spec
        if first.in_dim != n_mono + free_repr:
            raise ShapeError(
                f"first layer in_dim {first.in_dim} != {n_mono} monotone + {free_repr} free"
            )
        for prev, nxt in zip(self.layers, self.layers[1:]):
            if prev.spec.out_dim != nxt.spec.in_dim:
                raise ShapeError("layer dimensions do not chain")

    @property
    def input_dim(self):
        return len(self.annotation)

    @property
    def out_dim(self):
        return self.layers[-1].spec.out_dim

    def _as_batch(self, x):
        x = np.asarray(x, dtype=np.float64)
        squeeze = x.ndim == 1
        X = x[None, :] if squeeze else x
        if X.ndim != 2 or X.shape[1] != self.input_dim:
            raise ShapeError(f"input shape {x.shape} != ({self.input_dim},)")
        if not np.all(np.isfinite(X)):
            raise FloatingPointError("non-finite network input")
        return X, squeeze

    def _trunk_input(self, X, cache=None):
        ann = self.annotation
        Xm = X[:, ann.mono_idx] * ann.mono_signs
        F = X[:, ann.free_idx]
        if self.free_subnet is not None:
            for layer in self.free_subnet:
                if cache is not None:
                    cache.append(F)
                F = layer.forward(F)
        return np.hstack([Xm, F])

    def forward(self, x):
        X, squeeze = self._as_batch(x)
        T = self._trunk_input(X)
        for layer in self.layers:
            T = layer.forward(T)
        return T[0] if squeeze else T

    def parameters(self):
        """Flat parameter list in a fixed order: free subnet first, then trunk."""
        out = []
        for layer in (self.free_subnet or []):
            out.append(layer.params.W)
            out.append(layer.params.b)
        for layer in self.layers:
            out.append(layer.params.W)
            out.append(layer.params.b)
        return out

    def backward_batch(self, x, upstream):
        """Parameter gradients (aligned with parameters()) and input gradients.

        Gradients are summed over the batch.
        """
        X, squeeze = self._as_batch(x)
        free_cache = []
        T = self._trunk_input(X, cache=free_cache)
        trunk_cache = []
        for layer in self.layers:
            trunk_cache.append(T)
            T = layer.forward(T)
        U = np.asarray(upstream, dtype=np.float64)
        if U.ndim == 1:
            U = U[None, :]
        if U.shape != (X.shape[0], self.out_dim):
            raise ShapeError(f"upstream shape {U.shape} != {(X.shape[0], self.out_dim)}")
        trunk_grads = []
        for layer, inp in zip(reversed(self.layers), reversed(trunk_cache)):
            g = layer.backward(inp, U)
            trunk_grads.append(g)
            U = g.dx
        trunk_grads.reverse()
        n_mono = len(self.annotation.mono_idx)
        dXm = U[:, :n_mono] * self.annotation.mono_signs
        dF = U[:, n_mono:]
        free_grads = []
        if self.free_subnet is not None:
            for layer, inp in zip(reversed(self.free_subnet), reversed(free_cache)):
                g = layer.backward(inp, dF)
                free_grads.append(g)
                dF = g.dx
            free_grads.reverse()
        dX = np.zeros_like(X)
        dX[:, self.annotation.mono_idx] = dXm
        dX[:, self.annotation.free_idx] = dF
        grads = []
        for g in free_grads:
            grads.extend((g.dW, g.db))
        for g in trunk_grads:
            grads.extend((g.dW, g.db))
        return grads, (dX[0] if squeeze else dX)

    def input_gradient(self, x):
        """d(sum of outputs)/dx at each point; equals the Jacobian row for
        scalar-output networks."""
        X, squeeze = self._as_batch(x)
        _, dX = self.backward_batch(X, np.ones((X.shape[0], self.out_dim)))
        return dX[0] if squeeze else dX

    def copy(self) -> "Network":
        return Network(
            self.annotation,
            [layer.copy() for layer in self.layers],
            [layer.copy() for layer in self.free_subnet] if self.free_subnet else None,
        )


def certify_monotone(net: Network) -> MonotoneCertificate:
    """Structural certificate: every trunk layer is a monotone form and the
    number of non-positive constrained layers is even."""
    ann = net.annotation
    mono_features = tuple(ann.mono_idx)
    if not mono_features:
        return MonotoneCertificate(True, "no monotone features annotated (vacuous)",
                                   monotone_features=mono_features)
    non_positive = 0
    for i, layer in enumerate(net.layers):
        s = layer.spec
        if i > 0 and s.mono_cols != s.in_dim:
            return MonotoneCertificate(
                False, f"layer {i}: unconstrained columns on the monotone path")
        if s.activation is not None and not act.monotone(s.activation):
            return MonotoneCertificate(
                False, f"layer {i}: non-monotone activation {s.activation.name!r}")
        if s.kind == KIND_CONSTRAINED:
            if s.sign == SIGN_NON_POSITIVE:
                non_positive += 1
        elif s.kind in (KIND_SWITCH_PRE, KIND_SWITCH_POST):
            if not act.usable_for_switch(s.activation):
                return MonotoneCertificate(
                    False,
                    f"layer {i}: activation {s.activation.name!r} not usable for a switch")
        elif s.kind == KIND_FREE:
            if s.in_dim > 0 and s.mono_cols != s.in_dim:
                return MonotoneCertificate(
                    False, f"layer {i}: free_affine without full monotone routing")
        else:  # pragma: no cover
            return MonotoneCertificate(False, f"layer {i}: unknown kind {s.kind!r}")
    if non_positive % 2 != 0:
        return MonotoneCertificate(
            False,
            f"odd number ({non_positive}) of non-positive layers: "
            "the composition is non-increasing",
            non_positive_count=non_positive,
        )
    return MonotoneCertificate(True, "monotone by construction",
                               non_positive_count=non_positive,
                               monotone_features=mono_features)


def flip_transform(net: Network, k: int) -> Network:
    """Rewrite the constrained pair (k, k+1) with flipped weight-sign
    constraints and a point-reflected activation between them; function
    values are identical.

    Defined for a same-sign constrained pair in either direction, so applying
    it twice restores the original network.
    """
    if not 0 <= k < len(net.layers) - 1:
        raise ConstraintError(f"no layer pair at index {k}")
    lo, hi = net.layers[k].spec, net.layers[k + 1].spec
    if lo.kind != KIND_CONSTRAINED or hi.kind != KIND_CONSTRAINED:
        raise ConstraintError("flip requires two constrained_affine layers")
    if lo.sign != hi.sign:
        raise ConstraintError("flip requires the pair to share a sign constraint")
    if lo.activation is None:
        raise ConstraintError("flip requires an activation between the pair")
    out = net.copy()
    flipped = (SIGN_NON_POSITIVE if lo.sign == SIGN_NON_NEGATIVE else SIGN_NON_NEGATIVE)
    a, b = out.layers[k], out.layers[k + 1]
    a.spec.sign = flipped
    b.spec.sign = flipped
    a.spec.activation = act.reflect(a.spec.activation)
    a.params.b = -a.params.b
    m = a.spec.mono_cols
    a.params.W[:, m:] = -a.params.W[:, m:]  # hybrid first layer: free columns negate
    return out


def rescale_activation_transform(net: Network, k: int, a: float, b: float) -> Network:
    """Replace layer k's activation by a*sigma+b and compensate in layer k+1
    (weights divided by a, bias shifted), preserving the function exactly.

    Only defined when layer k+1 applies its weights before its activation
    (constrained or free affine)."""
    if a <= 0.0:
        raise ConstraintError(f"rescale factor must be > 0, got {a}")
    if not 0 <= k < len(net.layers) - 1:
        raise ConstraintError(f"no layer pair at index {k}")
    if net.layers[k].spec.activation is None:
        raise ConstraintError("layer has no activation to rescale")
    nxt = net.layers[k + 1].spec
    if nxt.kind not in (KIND_CONSTRAINED, KIND_FREE):
        raise ConstraintError("compensation needs an affine-first following layer")
    out = net.copy()
    lk, ln = out.layers[k], out.layers[k + 1]
    lk.spec.activation = act.rescale_equivalent(lk.spec.activation, a, b)
    if ln.spec.kind == KIND_CONSTRAINED and ln.spec.reparam == REPARAM_SQUARE:
        ln.params.W /= np.sqrt(a)
    else:
        ln.params.W /= a
    ln.params.b -= b * ln.effective_weight().sum(axis=1)
    return out


def _layer_to_dict(layer: Layer) -> dict:
    s = layer.spec
    doc = {
        "kind": s.kind,
        "in_dim": s.in_dim,
        "out_dim": s.out_dim,
        "mono_cols": s.mono_cols,
        "activation": act.to_dict(s.activation) if s.activation is not None else None,
        "W": layer.params.W.reshape(-1).tolist(),
        "b": layer.params.b.tolist(),
    }
    if s.kind == KIND_CONSTRAINED:
        doc["sign"] = s.sign
        doc["reparam"] = s.reparam
    return doc


def _layer_from_dict(doc: dict) -> Layer:
    kind = doc.get("kind")
    if kind not in KINDS:
        raise ModelFormatError(f"unknown layer kind {kind!r}")
    try:
        in_dim, out_dim = int(doc["in_dim"]), int(doc["out_dim"])
        activation = doc.get("activation")
        spec = LayerSpec(
            kind=kind,
            in_dim=in_dim,
            out_dim=out_dim,
            activation=act.from_dict(activation) if activation else None,
            sign=doc.get("sign", SIGN_NON_NEGATIVE),
            reparam=doc.get("reparam", "abs"),
            mono_cols=int(doc["mono_cols"]) if "mono_cols" in doc else None,
        )
        W = np.asarray(doc["W"], dtype=np.float64).reshape(out_dim, in_dim)
        b = np.asarray(doc["b"], dtype=np.float64)
    except (KeyError, TypeError, ValueError) as exc:
        raise ModelFormatError(f"malformed layer document: {exc}") from exc
    return Layer(spec=spec, params=LayerParams(W=W, b=b))


def serialize(net: Network) -> str:
    doc = {
        "version": MODEL_VERSION,
        "annotation": list(net.annotation.directions),
        "layers": [_layer_to_dict(layer) for layer in net.layers],
    }
    if net.free_subnet is not None:
        doc["free_subnet"] = [_layer_to_dict(layer) for layer in net.free_subnet]
    return json.dumps(doc, indent=1)


def deserialize(text) -> Network:
    if isinstance(text, bytes):
        text = text.decode("utf-8")
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ModelFormatError(
            f"invalid model document at line {exc.lineno}, column {exc.colno}: {exc.msg}"
        ) from exc
    if not isinstance(doc, dict):
        raise ModelFormatError("model document must be a JSON object")
    version = doc.get("version")
    if version != MODEL_VERSION:
        raise ModelVersionError(
            f"unsupported model version {version!r} (expected {MODEL_VERSION})")
    try:
        annotation = FeatureAnnotation(tuple(doc["annotation"]))
        layers = [_layer_from_dict(d) for d in doc["layers"]]
        free = [_layer_from_dict(d) for d in doc.get("free_subnet", [])] or None
    except KeyError as exc:
        raise ModelFormatError(f"missing field {exc}") from exc
    return Network(annotation, layers, free)


def save_model(net: Network, path):
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(serialize(net))


def load_model(path) -> Network:
    with open(path, encoding="utf-8") as fh:
        return deserialize(fh.read())


def make_network(
    annotation: FeatureAnnotation,
    mono_kind: str = KIND_SWITCH_POST,
    activation: act.ActivationSpec | None = None,
    mono_layers: int = 3,
    mono_width: int = 64,
    free_layers: int = 3,
    free_width: int | None = None,
    out_dim: int = 1,
    sign: str = SIGN_NON_NEGATIVE,
    reparam: str = "abs",
    free_activation: act.ActivationSpec | None = None,
) -> Network:
    """Assemble a zero-initialized network for the annotation; use
    training.init_params to draw weights."""
    activation = activation if activation is not None else act.get("relu")
    free_activation = free_activation if free_activation is not None else activation
    if not act.monotone(activation):
        raise ConstraintError("trunk activation must be monotone")
    n_mono = len(annotation.mono_idx)
    n_free = len(annotation.free_idx)
    free_width = mono_width if free_width is None else free_width

    if n_mono == 0:
        # fully unconstrained model
        dims = [n_free] + [mono_width] * mono_layers
        layers = [
            Layer(LayerSpec(KIND_FREE, dims[i], dims[i + 1], activation=free_activation))
            for i in range(mono_layers)
        ]
        layers.append(Layer(LayerSpec(KIND_FREE, dims[-1], out_dim)))
        return Network(annotation, layers)

    free_subnet = None
    free_repr = n_free
    if n_free > 0 and free_layers > 0:
        dims = [n_free] + [free_width] * free_layers
        free_subnet = [
            Layer(LayerSpec(KIND_FREE, dims[i], dims[i + 1], activation=free_activation))
            for i in range(free_layers)
        ]
        free_repr = free_width

    def trunk_layer(in_dim, width, mono_cols):
        return Layer(LayerSpec(mono_kind, in_dim, width, activation=activation,
                               sign=sign, reparam=reparam, mono_cols=mono_cols))

    layers = [trunk_layer(n_mono + free_repr, mono_width, n_mono)]
    for _ in range(mono_layers - 1):
        layers.append(trunk_layer(mono_width, mono_width, mono_width))
    layers.append(Layer(LayerSpec(KIND_FREE, mono_width, out_dim,
                                  mono_cols=mono_width)))
    return Network(annotation, layers, free_subnet)
