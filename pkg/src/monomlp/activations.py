"""Scalar activation catalog with derivatives and saturation metadata.

Each entry is a monotone (or explicitly flagged non-monotone) scalar
nonlinearity.  A spec can additionally carry a point reflection
(sigma'(x) = -sigma(-x), which swaps the saturation side) and an outer
affine rescale a*sigma(x)+b, which is what makes the "saturate to zero"
normalization and the rescaling-equivalence checks expressible.

Names are the stable lowercase strings used in config files and model
documents.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace

import numpy as np

from . import backend
from . import kernels_numpy as K
from .errors import ConstraintError

# name -> (code, monotone, needs_alpha, default_alpha)
_FAMILIES = {
    "relu": (K.RELU, True, False, 0.0),
    "leakyrelu": (K.LEAKYRELU, True, True, 0.01),
    "prelu": (K.PRELU, True, True, 0.25),
    "relu6": (K.RELU6, True, False, 0.0),
    "elu": (K.ELU, True, True, 1.0),
    "selu": (K.SELU, True, True, 1.6733),
    "celu": (K.CELU, True, True, 1.0),
    "gelu": (K.GELU, False, False, 0.0),
    "silu": (K.SILU, False, False, 0.0),
    "sigmoid": (K.SIGMOID, True, False, 0.0),
    "tanh": (K.TANH, True, False, 0.0),
    "exp": (K.EXP, True, False, 0.0),
    "softsign": (K.SOFTSIGN, True, False, 0.0),
    "softplus": (K.SOFTPLUS, True, False, 0.0),
    "logsigmoid": (K.LOGSIGMOID, True, False, 0.0),
}

SELU_LAMBDA = 1.0507

CATALOG = tuple(_FAMILIES)


@dataclass(frozen=True)
class SaturationInfo:
    """Finite limits of the activation; a side is None iff it does not saturate."""

    left: float | None
    right: float | None


@dataclass(frozen=True)
class ActivationSpec:
    name: str
    alpha: float | None = None
    reflected: bool = False
    scale: float = 1.0
    shift: float = 0.0
    lam: float = field(default=SELU_LAMBDA)

    def __post_init__(self):
        if self.name not in _FAMILIES:
            raise ConstraintError(
                f"unknown activation {self.name!r}; known: {', '.join(CATALOG)}"
            )
        code, _, needs_alpha, default_alpha = _FAMILIES[self.name]
        if self.alpha is None:
            object.__setattr__(self, "alpha", default_alpha)
        if needs_alpha and self.alpha < 0.0:
            raise ConstraintError(f"{self.name} requires alpha >= 0, got {self.alpha}")
        if self.name == "celu" and self.alpha <= 0.0:
            raise ConstraintError(f"celu requires alpha > 0, got {self.alpha}")
        if self.scale < 0.0:
            raise ConstraintError(f"scale must be >= 0, got {self.scale}")

    @property
    def code(self) -> int:
        return _FAMILIES[self.name][0]


def get(name: str, alpha: float | None = None, reflected: bool = False) -> ActivationSpec:
    """Catalog lookup by name."""
    return ActivationSpec(name=name, alpha=alpha, reflected=reflected)


def eval_array(spec: ActivationSpec, x) -> np.ndarray:
    return backend.act_eval(
        spec.code, spec.alpha, spec.lam, spec.reflected, spec.scale, spec.shift, x
    )


def deriv_array(spec: ActivationSpec, x) -> np.ndarray:
    return backend.act_deriv(
        spec.code, spec.alpha, spec.lam, spec.reflected, spec.scale, spec.shift, x
    )


def eval(spec: ActivationSpec, x: float) -> float:  # noqa: A001 - spec'd name
    return float(eval_array(spec, np.asarray([x], dtype=np.float64))[0])


def derivative(spec: ActivationSpec, x: float) -> float:
    """d sigma/dx; right-derivative at kinks, chain rule sigma'(-x) when reflected."""
    return float(deriv_array(spec, np.asarray([x], dtype=np.float64))[0])


def _base_saturation(spec: ActivationSpec) -> tuple[float | None, float | None]:
    name, a = spec.name, spec.alpha
    if name == "relu":
        return 0.0, None
    if name in ("leakyrelu", "prelu"):
        return (0.0, None) if a == 0.0 else (None, None)
    if name == "relu6":
        return 0.0, 6.0
    if name == "elu":
        return -a, None
    if name == "selu":
        return -spec.lam * a, None
    if name == "celu":
        return -a, None
    if name in ("gelu", "silu", "exp", "softplus"):
        return 0.0, None
    if name == "sigmoid":
        return 0.0, 1.0
    if name == "tanh":
        return -1.0, 1.0
    if name == "softsign":
        return -1.0, 1.0
    if name == "logsigmoid":
        return None, 0.0
    raise AssertionError(name)


def saturation(spec: ActivationSpec) -> SaturationInfo:
    """Saturation limits; reflection swaps sides and negates, rescale maps them."""
    left, right = _base_saturation(spec)
    if spec.reflected:
        left, right = (None if right is None else -right,
                       None if left is None else -left)
    if spec.scale == 0.0:
        return SaturationInfo(left=spec.shift, right=spec.shift)
    left = None if left is None else spec.scale * left + spec.shift
    right = None if right is None else spec.scale * right + spec.shift
    return SaturationInfo(left=left, right=right)


def monotone(spec: ActivationSpec) -> bool:
    """Non-decreasing everywhere (reflection and a >= 0 rescale preserve this)."""
    return _FAMILIES[spec.name][1]


def usable_for_switch(spec: ActivationSpec) -> bool:
    """Monotone and saturating on at least one side."""
    if not monotone(spec):
        return False
    sat = saturation(spec)
    return sat.left is not None or sat.right is not None


def rescale_equivalent(spec: ActivationSpec, a: float, b: float) -> ActivationSpec:
    """New spec computing a*sigma(x)+b for a >= 0."""
    if a < 0.0:
        raise ConstraintError(f"rescale factor must be >= 0, got {a}")
    return replace(spec, scale=a * spec.scale, shift=a * spec.shift + b)


def reflect(spec: ActivationSpec) -> ActivationSpec:
    """Point reflection -sigma(-x) of the full spec (involution)."""
    return replace(spec, reflected=not spec.reflected, shift=-spec.shift)


def saturates_left(spec: ActivationSpec) -> bool:
    return saturation(spec).left is not None


def saturates_right(spec: ActivationSpec) -> bool:
    return saturation(spec).right is not None


def to_dict(spec: ActivationSpec) -> dict:
    """JSON form; defaults are omitted."""
    doc = {"name": spec.name, "reflected": spec.reflected}
    default_alpha = _FAMILIES[spec.name][3]
    if spec.alpha != default_alpha:
        doc["alpha"] = spec.alpha
    if spec.lam != SELU_LAMBDA:
        doc["lam"] = spec.lam
    if spec.scale != 1.0:
        doc["scale"] = spec.scale
    if spec.shift != 0.0:
        doc["shift"] = spec.shift
    return doc


def from_dict(doc: dict) -> ActivationSpec:
    return ActivationSpec(
        name=doc["name"],
        alpha=doc.get("alpha"),
        reflected=bool(doc.get("reflected", False)),
        scale=float(doc.get("scale", 1.0)),
        shift=float(doc.get("shift", 0.0)),
        lam=float(doc.get("lam", SELU_LAMBDA)),
    )
