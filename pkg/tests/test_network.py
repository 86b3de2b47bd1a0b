import numpy as np
import pytest

from monomlp import activations as act
from monomlp import training as tr
from monomlp.errors import ConstraintError, ModelFormatError, ModelVersionError
from monomlp.layers import (
    KIND_CONSTRAINED,
    KIND_FREE,
    KIND_SWITCH_POST,
    SIGN_NON_POSITIVE,
    Layer,
    LayerParams,
    LayerSpec,
)
from monomlp.network import (
    FeatureAnnotation,
    Network,
    certify_monotone,
    deserialize,
    flip_transform,
    make_network,
    rescale_activation_transform,
    serialize,
)
from monomlp.verifier import equivalence_oracle, fuzz_monotone
from conftest import random_certified_net

RELU = act.get("relu")
INC = FeatureAnnotation(("increasing",))


def identity_head(dim, mono=True):
    return Layer(LayerSpec(KIND_FREE, dim, 1, mono_cols=dim if mono else 0),
                 LayerParams(W=np.ones((1, dim)), b=np.zeros(1)))


def test_single_free_affine_identity():
    net = Network(FeatureAnnotation(("free",)),
                  [Layer(LayerSpec(KIND_FREE, 1, 1),
                         LayerParams(W=np.array([[1.0]]), b=np.array([0.0])))])
    assert net.forward(np.array([5.5]))[0] == 5.5


def test_two_nonpositive_layers_hand_trace():
    # w1 = w2 = 1, sigma = ReLU, x = -1: layer1 = ReLU(1) = 1, layer2 = ReLU(-1) = 0
    mk = lambda: Layer(
        LayerSpec(KIND_CONSTRAINED, 1, 1, activation=RELU, sign=SIGN_NON_POSITIVE),
        LayerParams(W=np.array([[1.0]]), b=np.array([0.0])))
    net = Network(INC, [mk(), mk(), identity_head(1)])
    assert net.forward(np.array([-1.0]))[0] == 0.0


def test_decreasing_features_negate_at_entry():
    dec = FeatureAnnotation(("decreasing",))
    layer = Layer(LayerSpec(KIND_CONSTRAINED, 1, 1, activation=None),
                  LayerParams(W=np.array([[2.0]]), b=np.array([0.0])))
    net = Network(dec, [layer, identity_head(1)])
    assert net.forward(np.array([3.0]))[0] == -6.0
    rep = fuzz_monotone(net, n_pairs=2000)
    assert rep.violations == 0


def test_certify_switch_stack():
    net = make_network(INC, mono_kind=KIND_SWITCH_POST, activation=RELU,
                       mono_layers=4, mono_width=6, free_layers=0)
    cert = certify_monotone(net)
    assert cert.ok and cert.non_positive_count == 0


def test_certify_rejects_odd_nonpositive():
    mk = lambda: Layer(LayerSpec(KIND_CONSTRAINED, 1, 1, activation=RELU,
                                 sign=SIGN_NON_POSITIVE))
    net = Network(INC, [mk(), mk(), mk(), identity_head(1)])
    cert = certify_monotone(net)
    assert not cert.ok and "non-increasing" in cert.reason


def test_certify_rejects_nonmonotone_activation():
    net = Network(INC, [Layer(LayerSpec(KIND_FREE, 1, 4, activation=act.get("gelu"),
                                        mono_cols=1)),
                        identity_head(4)])
    cert = certify_monotone(net)
    assert not cert.ok and "gelu" in cert.reason


def test_certify_rejects_unrouted_head():
    net = Network(INC, [Layer(LayerSpec(KIND_CONSTRAINED, 1, 3, activation=RELU)),
                        identity_head(3, mono=False)])
    assert not certify_monotone(net).ok


def test_certify_vacuous_without_monotone_features():
    net = make_network(FeatureAnnotation(("free", "free")), mono_layers=2,
                       mono_width=4)
    cert = certify_monotone(net)
    assert cert.ok and "vacuous" in cert.reason


def test_flip_equivalence_numeric():
    for seed in range(5):
        net = tr.init_params(
            Network(FeatureAnnotation(("increasing", "increasing")), [
                Layer(LayerSpec(KIND_CONSTRAINED, 2, 6, activation=RELU,
                                sign=SIGN_NON_POSITIVE)),
                Layer(LayerSpec(KIND_CONSTRAINED, 6, 6, activation=RELU,
                                sign=SIGN_NON_POSITIVE)),
                identity_head(6),
            ]), seed)
        flipped = flip_transform(net, 0)
        assert flipped.layers[0].spec.sign == "non_negative"
        assert flipped.layers[0].spec.activation.reflected
        assert equivalence_oracle(net, flipped, n_points=10_000, seed=seed) <= 1e-12
        assert certify_monotone(flipped).ok


def test_flip_twice_restores():
    net = tr.init_params(
        Network(INC, [
            Layer(LayerSpec(KIND_CONSTRAINED, 1, 4, activation=act.get("celu"),
                            sign=SIGN_NON_POSITIVE)),
            Layer(LayerSpec(KIND_CONSTRAINED, 4, 4, activation=act.get("celu"),
                            sign=SIGN_NON_POSITIVE)),
            identity_head(4),
        ]), 3)
    twice = flip_transform(flip_transform(net, 0), 0)
    assert twice.layers[0].spec.sign == net.layers[0].spec.sign
    assert equivalence_oracle(net, twice, n_points=2000) == 0.0


def test_flip_four_layer_alternation():
    mk = lambda d_in, d_out: Layer(LayerSpec(KIND_CONSTRAINED, d_in, d_out,
                                             activation=RELU,
                                             sign=SIGN_NON_POSITIVE))
    net = tr.init_params(Network(INC, [mk(1, 4), mk(4, 4), mk(4, 4), mk(4, 4),
                                       identity_head(4)]), 11)
    out = flip_transform(flip_transform(net, 0), 2)
    acts = [layer.spec.activation.reflected for layer in out.layers[:4]]
    assert acts == [True, False, True, False]
    assert equivalence_oracle(net, out, n_points=5000) <= 1e-12


def test_flip_requires_matching_pair():
    net = make_network(INC, mono_kind=KIND_SWITCH_POST, activation=RELU,
                       mono_layers=2, mono_width=4, free_layers=0)
    with pytest.raises(ConstraintError):
        flip_transform(net, 0)


def test_rescale_transform_equivalence():
    for seed in range(5):
        net = tr.init_params(
            make_network(INC, mono_kind=KIND_CONSTRAINED, activation=act.get("sigmoid"),
                         mono_layers=3, mono_width=5, free_layers=0), seed)
        out = rescale_activation_transform(net, 1, 2.0, -1.0)
        assert equivalence_oracle(net, out, n_points=10_000, seed=seed) <= 1e-12


def test_serialize_roundtrip_bit_exact():
    for seed in range(4):
        net = random_certified_net(seed, n_free=2)
        back = deserialize(serialize(net))
        X = np.random.default_rng(seed).uniform(-4, 4, (64, net.input_dim))
        assert np.array_equal(net.forward(X), back.forward(X))


def test_serialize_unknown_kind_named_in_error():
    net = random_certified_net(0)
    text = serialize(net).replace("free_affine", "banana_affine")
    with pytest.raises(ModelFormatError, match="banana_affine"):
        deserialize(text)


def test_serialize_version_check():
    net = random_certified_net(0)
    text = serialize(net).replace('"version": 1', '"version": 99', 1)
    with pytest.raises(ModelVersionError):
        deserialize(text)


def test_deserialize_parse_error_location():
    with pytest.raises(ModelFormatError, match="line"):
        deserialize("{not json")


def test_free_feature_isolation():
    ann = FeatureAnnotation(("increasing", "free"))
    net = make_network(ann, mono_kind=KIND_SWITCH_POST, activation=RELU,
                       mono_layers=2, mono_width=8, free_layers=2, free_width=4)
    net = tr.init_params(net, 5)
    rng = np.random.default_rng(5)
    X = rng.uniform(-3, 3, (500, 2))
    # free feature influences the output but carries no monotone claim
    bumped = X.copy()
    bumped[:, 1] += 1.0
    assert np.any(net.forward(bumped) != net.forward(X))
    assert fuzz_monotone(net, n_pairs=20_000, seed=1).violations == 0
    # monotone feature respects its direction
    inc = X.copy()
    inc[:, 0] += rng.uniform(0.1, 1.0, 500)
    assert np.all(net.forward(inc) - net.forward(X) >= -1e-12)


def test_input_gradient_matches_finite_difference():
    net = random_certified_net(9, n_free=1)
    rng = np.random.default_rng(9)
    from monomlp.diffcore import finite_diff_grad
    for _ in range(5):
        x = rng.uniform(-2, 2, net.input_dim)
        fd = finite_diff_grad(lambda v: float(net.forward(v)[0]), x)
        an = net.input_gradient(x)
        assert np.allclose(an, fd, rtol=1e-4, atol=1e-6)
