import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from monomlp import activations as act
from monomlp.diffcore import finite_diff_grad
from monomlp.errors import ConstraintError

USABLE = ("relu", "relu6", "elu", "selu", "celu", "sigmoid", "tanh", "exp",
          "softsign", "softplus", "logsigmoid")
KINKS = {"relu": (0.0,), "leakyrelu": (0.0,), "prelu": (0.0,),
         "relu6": (0.0, 6.0), "elu": (0.0,), "selu": (0.0,), "celu": (0.0,)}


def test_eval_hand_values():
    assert act.eval(act.get("relu"), -2.0) == 0.0
    assert act.eval(act.get("relu", reflected=True), 3.0) == 0.0
    assert abs(act.eval(act.get("elu"), -20.0) - (-1.0)) < 1e-8
    assert act.eval(act.get("relu6"), 7.5) == 6.0
    assert act.eval(act.get("sigmoid"), 0.0) == 0.5


def test_derivative_hand_values():
    assert act.derivative(act.get("sigmoid"), 0.0) == 0.25
    assert act.derivative(act.get("relu"), 0.0) == 1.0  # right-derivative
    assert act.derivative(act.get("softplus"), 0.0) == 0.5


def test_saturation_metadata():
    info = act.saturation(act.get("relu"))
    assert info.left == 0.0 and info.right is None
    info = act.saturation(act.get("relu", reflected=True))
    assert info.left is None and info.right == 0.0
    info = act.saturation(act.get("tanh"))
    assert info.left == -1.0 and info.right == 1.0
    info = act.saturation(act.get("logsigmoid"))
    assert info.left is None and info.right == 0.0
    info = act.saturation(act.get("selu"))
    assert info.left == pytest.approx(-1.0507 * 1.6733) and info.right is None


def test_saturation_limits_numerically():
    for name in act.CATALOG:
        spec = act.get(name)
        info = act.saturation(spec)
        if info.left is not None:
            assert abs(act.eval(spec, -1e6) - info.left) < 1e-6, name
        if info.right is not None:
            assert abs(act.eval(spec, 1e6) - info.right) < 1e-6, name


def test_usable_for_switch():
    assert act.usable_for_switch(act.get("relu"))
    assert not act.usable_for_switch(act.get("leakyrelu", alpha=0.01))
    assert not act.usable_for_switch(act.get("gelu"))
    assert not act.usable_for_switch(act.get("silu"))
    assert act.usable_for_switch(act.get("sigmoid"))
    assert act.usable_for_switch(act.get("tanh"))
    # alpha = 0 collapses leakyrelu onto relu, which saturates
    assert act.usable_for_switch(act.get("leakyrelu", alpha=0.0))


def test_negative_alpha_rejected():
    with pytest.raises(ConstraintError):
        act.get("elu", alpha=-0.5)
    with pytest.raises(ConstraintError):
        act.get("leakyrelu", alpha=-0.01)


def test_unknown_name_rejected():
    with pytest.raises(ConstraintError):
        act.get("swishish")


def test_rescale_equivalent():
    spec = act.rescale_equivalent(act.get("relu"), 1.0, 0.0)
    xs = np.linspace(-3, 3, 41)
    assert np.array_equal(act.eval_array(spec, xs),
                          act.eval_array(act.get("relu"), xs))
    centered = act.rescale_equivalent(act.get("sigmoid"), 2.0, -1.0)
    assert act.eval(centered, 0.0) == 0.0
    constant = act.rescale_equivalent(act.get("relu"), 0.0, 3.0)
    assert act.eval(constant, -5.0) == 3.0 and act.eval(constant, 5.0) == 3.0
    with pytest.raises(ConstraintError):
        act.rescale_equivalent(act.get("relu"), -1.0, 0.0)


def test_rescaled_saturation_maps_limits():
    spec = act.rescale_equivalent(act.get("sigmoid"), 2.0, -1.0)
    info = act.saturation(spec)
    assert info.left == -1.0 and info.right == 1.0


def test_derivative_nonnegative_at_scale():
    # monotone catalog entries: derivative >= 0 at a million sampled points
    x = np.random.default_rng(0).uniform(-50.0, 50.0, 1_000_000)
    for name in act.CATALOG:
        if not act.monotone(act.get(name)):
            continue
        assert np.all(act.deriv_array(act.get(name), x) >= 0.0), name


@settings(deadline=None, max_examples=30)
@given(st.integers(0, 2 ** 32 - 1))
def test_monotonicity_usable_catalog(seed):
    r = np.random.default_rng(seed)
    x = np.sort(r.uniform(-50, 50, 200))
    for name in USABLE:
        for spec in (act.get(name), act.reflect(act.get(name))):
            y = act.eval_array(spec, x)
            assert np.all(np.diff(y) >= -1e-12), (name, spec.reflected)


@settings(deadline=None, max_examples=30)
@given(st.integers(0, 2 ** 32 - 1))
def test_reflection_involution(seed):
    r = np.random.default_rng(seed)
    x = r.uniform(-20, 20, 50)
    for name in act.CATALOG:
        spec = act.get(name)
        twice = act.reflect(act.reflect(spec))
        assert np.allclose(act.eval_array(spec, x), act.eval_array(twice, x),
                           atol=1e-15)


def test_reflection_negates_function():
    spec = act.get("softplus")
    refl = act.reflect(spec)
    x = np.linspace(-4, 4, 33)
    assert np.allclose(act.eval_array(refl, x), -act.eval_array(spec, -x))


def test_derivative_matches_finite_differences(rng):
    for name in act.CATALOG:
        for spec in (act.get(name), act.reflect(act.get(name))):
            xs = rng.uniform(-8.0, 8.0, 40)
            kinks = KINKS.get(name, ())
            for kink in kinks:
                xs = xs[np.abs(xs - kink) > 1e-3]
                xs = xs[np.abs(-xs - kink) > 1e-3]
            for x in xs:
                fd = finite_diff_grad(lambda v: act.eval(spec, float(v[0])),
                                      np.array([x]), h=1e-6)[0]
                an = act.derivative(spec, float(x))
                assert an == pytest.approx(fd, rel=1e-6, abs=1e-8), (name, x)


def test_monotone_flags():
    assert act.monotone(act.get("relu"))
    assert not act.monotone(act.get("gelu"))
    assert not act.monotone(act.get("silu"))


def test_gelu_silu_saturate_left():
    # non-monotone rows still carry saturation metadata
    assert act.saturation(act.get("gelu")).left == 0.0
    assert act.saturation(act.get("silu")).left == 0.0


def test_exp_overflow_clamp():
    big = act.eval(act.get("exp"), 1e9)
    assert math.isfinite(big) and big == math.exp(700.0)
    assert math.isfinite(act.eval(act.get("sigmoid"), -1e9))


def test_serialization_roundtrip():
    for name in act.CATALOG:
        spec = act.rescale_equivalent(act.reflect(act.get(name)), 2.0, 0.5)
        back = act.from_dict(act.to_dict(spec))
        assert back == spec
