"""Monotone-by-construction multilayer perceptrons.

Sign-constrained and activation-switch layers, a constructive universal
interpolator, trainers, and empirical verifiers.
"""

from .activations import (
    ActivationSpec,
    SaturationInfo,
    derivative,
    eval,  # noqa: A004
    monotone,
    reflect,
    rescale_equivalent,
    saturation,
    usable_for_switch,
)
from .backend import BACKEND
from .diffcore import GradPair, backward_affine, finite_diff_grad, matvec
from .interpolator import (
    HalfSpace,
    InterpolationProblem,
    build,
    build_report,
    heaviside_compose,
    separating_halfspace,
)
from .layers import Layer, LayerParams, LayerSpec, split_signs
from .network import (
    FeatureAnnotation,
    MonotoneCertificate,
    Network,
    certify_monotone,
    deserialize,
    flip_transform,
    load_model,
    make_network,
    rescale_activation_transform,
    save_model,
    serialize,
)
from .training import TrainConfig, fit, init_params, loss
from .verifier import (
    ViolationReport,
    equivalence_oracle,
    fuzz_monotone,
    grad_sign_check,
    midpoint_convexity_check,
)

__version__ = "0.1.0"

__all__ = [
    "ActivationSpec", "SaturationInfo", "derivative", "eval", "monotone",
    "reflect", "rescale_equivalent", "saturation", "usable_for_switch",
    "BACKEND", "GradPair", "backward_affine", "finite_diff_grad", "matvec",
    "HalfSpace", "InterpolationProblem", "build", "build_report",
    "heaviside_compose", "separating_halfspace",
    "Layer", "LayerParams", "LayerSpec", "split_signs",
    "FeatureAnnotation", "MonotoneCertificate", "Network", "certify_monotone",
    "deserialize", "flip_transform", "load_model", "make_network",
    "rescale_activation_transform", "save_model", "serialize",
    "TrainConfig", "fit", "init_params", "loss",
    "ViolationReport", "equivalence_oracle", "fuzz_monotone",
    "grad_sign_check", "midpoint_convexity_check",
    "__version__",
]
