import numpy as np
import pytest

from monomlp import activations as act
from monomlp import training as tr
from monomlp.layers import (
    KIND_CONSTRAINED,
    KIND_FREE,
    KIND_SWITCH_POST,
    KIND_SWITCH_PRE,
    SIGN_NON_NEGATIVE,
    SIGN_NON_POSITIVE,
    Layer,
    LayerSpec,
)
from monomlp.network import FREE, INCREASING, FeatureAnnotation, Network

# activations safe for random-weight fuzzing (exp overflows composed layers)
FUZZ_ACTIVATIONS = ("relu", "relu6", "elu", "celu", "sigmoid", "tanh",
                    "softplus", "softsign", "logsigmoid", "selu")


def monotone_points(n, d, seed, box=(-2.0, 2.0)):
    """Random points with targets from a strictly monotone function, so the
    set is monotone-consistent by construction."""
    rng = np.random.default_rng(seed)
    X = rng.uniform(box[0], box[1], size=(n, d))
    w = rng.uniform(0.2, 1.5, size=d)
    y = np.log1p(np.exp(X)).sum(axis=1) + X @ w + 0.3 * np.tanh(X.sum(axis=1))
    return X, y


def random_certified_net(seed, n_mono=None, n_free=0, depth=None, width=None):
    """Random architecture mixing constrained and switch layers with an even
    number of non-positive constrained layers; certifiably monotone."""
    rng = np.random.default_rng(seed)
    n_mono = int(rng.integers(1, 4)) if n_mono is None else n_mono
    depth = int(rng.integers(2, 7)) if depth is None else depth
    width = int(rng.integers(4, 25)) if width is None else width

    directions = [INCREASING] * n_mono + [FREE] * n_free
    annotation = FeatureAnnotation(tuple(directions))

    free_subnet = None
    free_repr = n_free
    if n_free > 0 and rng.random() < 0.7:
        free_repr = int(rng.integers(2, 6))
        free_subnet = [
            Layer(LayerSpec(KIND_FREE, n_free, free_repr,
                            activation=act.get("tanh"))),
        ]

    kinds = []
    i = 0
    while i < depth:
        r = rng.random()
        if r < 0.25 and i + 1 < depth:
            kinds.extend(["nonpos_pair_a", "nonpos_pair_b"])
            i += 2
        elif r < 0.5:
            kinds.append("nonneg")
            i += 1
        elif r < 0.75:
            kinds.append("switch_pre")
            i += 1
        else:
            kinds.append("switch_post")
            i += 1

    def pick_activation(for_switch):
        name = FUZZ_ACTIVATIONS[int(rng.integers(0, len(FUZZ_ACTIVATIONS)))]
        spec = act.get(name)
        if not for_switch and rng.random() < 0.3:
            spec = act.reflect(spec)
        return spec

    layers = []
    in_dim = n_mono + free_repr
    mono_cols = n_mono
    for kind in kinds:
        if kind == "switch_pre":
            spec = LayerSpec(KIND_SWITCH_PRE, in_dim, width,
                             activation=pick_activation(True), mono_cols=mono_cols)
        elif kind == "switch_post":
            spec = LayerSpec(KIND_SWITCH_POST, in_dim, width,
                             activation=pick_activation(True), mono_cols=mono_cols)
        else:
            sign = SIGN_NON_NEGATIVE if kind == "nonneg" else SIGN_NON_POSITIVE
            spec = LayerSpec(KIND_CONSTRAINED, in_dim, width,
                             activation=pick_activation(False), sign=sign,
                             mono_cols=mono_cols)
        layers.append(Layer(spec))
        in_dim, mono_cols = width, width
    layers.append(Layer(LayerSpec(KIND_FREE, in_dim, 1, mono_cols=in_dim)))
    net = Network(annotation, layers, free_subnet)
    return tr.init_params(net, seed)


@pytest.fixture
def rng():
    return np.random.default_rng(0)
