import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from monomlp import activations as act
from monomlp.diffcore import finite_diff_grad
from monomlp.errors import ConstraintError, ShapeError
from monomlp.layers import (
    backward_constrained,
    backward_free,
    backward_switch_post,
    backward_switch_pre,
    forward_constrained,
    forward_free,
    forward_switch_post,
    forward_switch_pre,
    Layer,
    LayerSpec,
    split_signs,
)

RELU = act.get("relu")
SIGMOID = act.get("sigmoid")


def test_split_signs_hand():
    Wp, Wm = split_signs([[1.0, -2.0], [0.0, 3.0]])
    assert np.array_equal(Wp, [[1.0, 0.0], [0.0, 3.0]])
    assert np.array_equal(Wm, [[0.0, -2.0], [0.0, 0.0]])


def test_split_signs_one_sided():
    W = np.array([[0.5, 2.0]])
    Wp, Wm = split_signs(W)
    assert np.array_equal(Wp, W) and not Wm.any()


@settings(deadline=None, max_examples=50)
@given(st.integers(0, 2 ** 32 - 1))
def test_split_signs_partition(seed):
    W = np.random.default_rng(seed).standard_normal((4, 3))
    Wp, Wm = split_signs(W)
    assert np.all(Wp >= 0.0) and np.all(Wm <= 0.0)
    assert np.array_equal(Wp + Wm, W)  # bit-exact partition


def test_forward_constrained_hand():
    W, b, x = np.array([[-2.0]]), np.array([0.0]), np.array([1.5])
    assert forward_constrained(W, b, x)[0] == 3.0            # |W| = 2
    assert forward_constrained(W, b, x, sign="non_positive")[0] == -3.0
    assert forward_constrained(np.array([[3.0]]), b, x, reparam="square")[0] == 13.5


def test_forward_switch_pre_hand():
    W, b = np.array([[1.0, -1.0]]), np.array([0.0])
    y = forward_switch_pre(W, b, np.array([2.0, 3.0]), RELU)
    assert y[0] == 2.0  # ReLU(2) - ReLU(-3)


def test_forward_switch_pre_one_sided_reduction():
    rng = np.random.default_rng(1)
    b = rng.standard_normal(3)
    X = rng.standard_normal((20, 4))
    W = np.abs(rng.standard_normal((3, 4)))
    got = forward_switch_pre(W, b, X, SIGMOID)
    want = act.eval_array(SIGMOID, X @ np.abs(W).T + b) - act.eval_array(SIGMOID, b)
    assert np.max(np.abs(got - want)) <= 1e-12
    Wn = -W
    got = forward_switch_pre(Wn, b, X, SIGMOID)
    want = act.eval_array(SIGMOID, b) - act.eval_array(SIGMOID, X @ (-np.abs(Wn)).T + b)
    assert np.max(np.abs(got - want)) <= 1e-12


def test_forward_switch_post_hand():
    W, b = np.array([[-1.0]]), np.array([0.0])
    assert forward_switch_post(W, b, np.array([2.0]), RELU)[0] == 0.0
    assert forward_switch_post(W, b, np.array([-2.0]), RELU)[0] == -2.0
    W2, b2 = np.array([[1.0, -2.0]]), np.array([1.0])
    assert forward_switch_post(W2, b2, np.array([3.0, -1.0]), RELU)[0] == 2.0
    Wp = np.array([[0.5, 1.5]])
    X = np.random.default_rng(0).standard_normal((10, 2))
    got = forward_switch_post(Wp, b2, X, RELU)
    want = act.eval_array(RELU, X) @ Wp.T + b2
    assert np.allclose(got, want, atol=1e-15)


def test_switch_requires_usable_activation():
    with pytest.raises(ConstraintError):
        LayerSpec("switch_post", 2, 2, activation=act.get("leakyrelu"))
    with pytest.raises(ConstraintError):
        LayerSpec("switch_pre", 2, 2, activation=act.get("gelu"))
    with pytest.raises(ConstraintError):
        LayerSpec("constrained_affine", 2, 2, activation=act.get("silu"))


def test_backward_zero_upstream_is_zero():
    rng = np.random.default_rng(0)
    W, b = rng.standard_normal((3, 2)), rng.standard_normal(3)
    x, u = rng.standard_normal(2), np.zeros(3)
    for fn in (backward_constrained, backward_free):
        g = fn(W, b, x, u, activation=SIGMOID)
        assert not g.dW.any() and not g.db.any() and not g.dx.any()
    for fn in (backward_switch_pre, backward_switch_post):
        g = fn(W, b, x, u, activation=RELU)
        assert not g.dW.any() and not g.db.any() and not g.dx.any()


def test_backward_switch_post_scalar_chain_rule():
    w = 0.7
    x = np.array([1.3])
    g = backward_switch_post(np.array([[w]]), np.array([0.0]), x, np.array([2.0]),
                             RELU)
    assert g.dW[0, 0] == pytest.approx(2.0 * act.eval(RELU, 1.3))


def _check_against_fd(forward, backward, W, b, x, activation, seed, **kw):
    rng = np.random.default_rng(seed)
    c = rng.standard_normal(W.shape[0])  # random linear functional of the output

    def loss_of(Wf, bf, xf):
        y = forward(Wf.reshape(W.shape), bf, xf, activation=activation, **kw)
        return float(c @ y)

    g = backward(W, b, x, c, activation=activation, **kw)
    fd_W = finite_diff_grad(lambda v: loss_of(v, b, x), W.reshape(-1))
    fd_b = finite_diff_grad(lambda v: loss_of(W.reshape(-1), v, x), b)
    fd_x = finite_diff_grad(lambda v: loss_of(W.reshape(-1), b, v), x)
    for got, want, label in ((g.dW.reshape(-1), fd_W, "dW"), (g.db, fd_b, "db"),
                             (g.dx, fd_x, "dx")):
        scale = np.maximum(np.abs(want), 1.0)
        assert np.max(np.abs(got - want) / scale) < 1e-5, label


def _nonkink_params(rng, out_dim, in_dim):
    # weights bounded away from 0 keep abs/split subgradients off their kinks
    W = rng.choice([-1.0, 1.0], size=(out_dim, in_dim)) * rng.uniform(0.2, 1.0,
                                                                      (out_dim, in_dim))
    b = rng.uniform(-0.5, 0.5, out_dim)
    x = rng.choice([-1.0, 1.0], size=in_dim) * rng.uniform(0.3, 1.5, in_dim)
    return W, b, x


@pytest.mark.parametrize("case", range(4))
def test_backward_matches_finite_differences(case):
    checks = 0
    for seed in range(25):
        rng = np.random.default_rng(1000 * case + seed)
        W, b, x = _nonkink_params(rng, 3, 4)
        if case == 0:
            sign = "non_negative" if seed % 2 else "non_positive"
            reparam = "abs" if seed % 3 else "square"
            spec = SIGMOID if seed % 2 else act.get("softplus")
            _check_against_fd(forward_constrained, backward_constrained, W, b, x,
                              spec, seed, sign=sign, reparam=reparam)
        elif case == 1:
            spec = SIGMOID if seed % 2 else act.get("celu")
            z = x @ split_signs(W)[0].T + b, x @ split_signs(W)[1].T + b
            if min(np.abs(z[0]).min(), np.abs(z[1]).min()) < 1e-3:
                continue
            _check_against_fd(forward_switch_pre, backward_switch_pre, W, b, x,
                              spec, seed)
        elif case == 2:
            spec = SIGMOID if seed % 2 else RELU
            _check_against_fd(forward_switch_post, backward_switch_post, W, b, x,
                              spec, seed)
        else:
            _check_against_fd(forward_free, backward_free, W, b, x, SIGMOID, seed,
                              mono_cols=2)
        checks += 1
    assert checks >= 20


def test_hybrid_columns_match_finite_differences():
    rng = np.random.default_rng(7)
    W, b, x = _nonkink_params(rng, 3, 5)
    _check_against_fd(forward_constrained, backward_constrained, W, b, x, SIGMOID,
                      7, mono_cols=3)
    _check_against_fd(forward_switch_post, backward_switch_post, W, b, x, SIGMOID,
                      7, mono_cols=3)
    _check_against_fd(forward_switch_pre, backward_switch_pre, W, b, x, SIGMOID,
                      7, mono_cols=3)


@pytest.mark.parametrize("form", ["constrained", "switch_pre", "switch_post"])
def test_single_layer_monotone(form):
    rng = np.random.default_rng(42)
    W = rng.standard_normal((6, 3))
    b = rng.standard_normal(6)
    X = rng.uniform(-4, 4, (2000, 3))
    deltas = rng.uniform(0.0, 1.0, X.shape)
    if form == "constrained":
        f = lambda v: forward_constrained(W, b, v, activation=RELU)
    elif form == "switch_pre":
        f = lambda v: forward_switch_pre(W, b, v, RELU)
    else:
        f = lambda v: forward_switch_post(W, b, v, RELU)
    diff = f(X + deltas) - f(X)
    assert diff.min() >= -1e-12


def test_batch_and_vector_agree():
    rng = np.random.default_rng(3)
    W, b = rng.standard_normal((4, 3)), rng.standard_normal(4)
    X = rng.standard_normal((8, 3))
    batched = forward_switch_post(W, b, X, RELU)
    rows = np.stack([forward_switch_post(W, b, X[i], RELU) for i in range(8)])
    assert np.array_equal(batched, rows)


def test_shape_errors():
    with pytest.raises(ShapeError):
        forward_constrained(np.eye(2), np.zeros(2), np.zeros(3))
    with pytest.raises(ShapeError):
        Layer(LayerSpec("free_affine", 2, 2),
              params=None).backward(np.zeros(2), np.zeros(3))
