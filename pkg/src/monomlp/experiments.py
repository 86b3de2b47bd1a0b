"""Diagnostics and desk-scale experiments: the cos(x)+x toy comparison, the
gradient-vs-depth pathology table, the init output-distribution table, and
metric evaluation.  All emissions are plain CSV, deterministic for fixed
seeds; rendering is left to external tools.

Depth counts affine layers (the network's weight matrices), so "depth 4"
means 3 hidden layers plus the output map, mirroring the constructive
interpolator's three hidden layers.
"""

from __future__ import annotations

import os
from dataclasses import dataclass, field

import numpy as np

from . import training as tr
from .activations import get as get_activation
from .datasets import TASK_CLASSIFICATION, TASK_REGRESSION, write_csv
from .errors import ConstraintError, ShapeError
from .layers import KIND_CONSTRAINED, KIND_FREE, KIND_SWITCH_POST, KIND_SWITCH_PRE
from .network import FREE, INCREASING, FeatureAnnotation, Network, make_network


@dataclass
class ExperimentResult:
    metric: str
    values: list
    mean: float = field(init=False)
    std: float = field(init=False)

    def __post_init__(self):
        arr = np.asarray(self.values, dtype=np.float64)
        self.mean = float(arr.mean())
        self.std = float(arr.std(ddof=1)) if arr.size > 1 else 0.0

    def __str__(self):
        return f"{self.metric}: {self.mean:.4f} +- {self.std:.4f} (n={len(self.values)})"


def evaluate(net: Network, X, y, task: str) -> dict:
    """Test metrics: MSE/RMSE for regression, accuracy at 0.5 for classification."""
    X = np.asarray(X, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64).reshape(-1)
    if X.ndim != 2 or X.shape[0] != y.shape[0]:
        raise ShapeError("X and y sizes do not match")
    pred = net.forward(X)[:, 0]
    if task == TASK_REGRESSION:
        mse = float(np.mean((pred - y) ** 2))
        return {"mse": mse, "rmse": float(np.sqrt(mse))}
    if task == TASK_CLASSIFICATION:
        # prediction at probability 0.5 == logit 0
        hits = (pred >= 0.0) == (y >= 0.5)
        return {"accuracy": float(np.mean(hits))}
    raise ConstraintError(f"unknown task {task!r}")


# ---------------------------------------------------------------------------
# cos(x) + x toy comparison

TOY_MODELS = ("unconstrained", "nonneg_relu", "nonneg_sigmoid", "switch_relu")


@dataclass
class ToyConfig:
    interval: tuple = (-6.0, 6.0)
    n_samples: int = 256
    width: int = 128
    hidden_layers: int = 3
    epochs: int = 2000
    learning_rate: float = 1e-3
    batch_size: int = 32
    seed: int = 0
    grid_points: int = 512


def _toy_net(model: str, width: int, hidden: int) -> Network:
    mono = FeatureAnnotation((INCREASING,))
    if model == "unconstrained":
        return make_network(FeatureAnnotation((FREE,)), mono_layers=hidden,
                            mono_width=width)
    if model == "nonneg_relu":
        return make_network(mono, mono_kind=KIND_CONSTRAINED,
                            activation=get_activation("relu"),
                            mono_layers=hidden, mono_width=width, free_layers=0)
    if model == "nonneg_sigmoid":
        return make_network(mono, mono_kind=KIND_CONSTRAINED,
                            activation=get_activation("sigmoid"),
                            mono_layers=hidden, mono_width=width, free_layers=0)
    if model == "switch_relu":
        return make_network(mono, mono_kind=KIND_SWITCH_POST,
                            activation=get_activation("relu"),
                            mono_layers=hidden, mono_width=width, free_layers=0)
    raise ConstraintError(f"unknown toy model {model!r}")


def toy_experiment(config: ToyConfig = ToyConfig(), out_dir=None):
    """Train the four parametrizations on cos(x)+x; returns per-model loss
    curves, final MSE, and dense-grid predictions; optionally writes
    toy_losses.csv and toy_predictions.csv."""
    lo, hi = config.interval
    X = np.linspace(lo, hi, config.n_samples)[:, None]
    y = np.cos(X[:, 0]) + X[:, 0]
    grid = np.linspace(lo, hi, config.grid_points)[:, None]
    curves, preds, nets = {}, {}, {}
    for model in TOY_MODELS:
        net = tr.init_params(_toy_net(model, config.width, config.hidden_layers),
                             config.seed)
        cfg = tr.TrainConfig(learning_rate=config.learning_rate, epochs=config.epochs,
                             batch_size=config.batch_size, seed=config.seed)
        trained, curve = tr.fit(net, X, y, cfg)
        curves[model] = curve
        preds[model] = trained.forward(grid)[:, 0]
        nets[model] = trained
    if out_dir is not None:
        os.makedirs(out_dir, exist_ok=True)
        write_csv(os.path.join(out_dir, "toy_losses.csv"),
                  ["epoch"] + list(TOY_MODELS),
                  [[e] + [repr(curves[m][e]) for m in TOY_MODELS]
                   for e in range(config.epochs)])
        gy = np.cos(grid[:, 0]) + grid[:, 0]
        write_csv(os.path.join(out_dir, "toy_predictions.csv"),
                  ["x", "target"] + list(TOY_MODELS),
                  [[repr(float(grid[i, 0])), repr(float(gy[i]))]
                   + [repr(float(preds[m][i])) for m in TOY_MODELS]
                   for i in range(config.grid_points)])
    return {"curves": curves, "predictions": preds, "networks": nets,
            "final_mse": {m: curves[m][-1] for m in TOY_MODELS}}


# ---------------------------------------------------------------------------
# gradient magnitude vs depth

GRAD_PARAMETRIZATIONS = ("constrained_relu", "constrained_sigmoid", "switch_relu")


def _grad_net(parametrization: str, depth: int, width: int) -> Network:
    hidden = depth - 1
    if hidden < 1:
        raise ConstraintError("depth must be >= 2 affine layers")
    ann = FeatureAnnotation((INCREASING,))
    if parametrization == "constrained_relu":
        return make_network(ann, mono_kind=KIND_CONSTRAINED,
                            activation=get_activation("relu"),
                            mono_layers=hidden, mono_width=width, free_layers=0)
    if parametrization == "constrained_sigmoid":
        return make_network(ann, mono_kind=KIND_CONSTRAINED,
                            activation=get_activation("sigmoid"),
                            mono_layers=hidden, mono_width=width, free_layers=0)
    if parametrization == "switch_relu":
        return make_network(ann, mono_kind=KIND_SWITCH_POST,
                            activation=get_activation("relu"),
                            mono_layers=hidden, mono_width=width, free_layers=0)
    raise ConstraintError(f"unknown parametrization {parametrization!r}")


def mean_abs_param_grad(net: Network, inputs) -> float:
    """Mean of |d output / d theta| over every parameter, averaged over inputs."""
    vals = []
    for x in np.atleast_2d(inputs):
        grads, _ = net.backward_batch(x[None, :], np.ones((1, net.out_dim)))
        total = sum(float(np.abs(g).sum()) for g in grads)
        count = sum(g.size for g in grads)
        vals.append(total / count)
    return float(np.mean(vals))


def grad_depth_experiment(depths=(4, 6, 8, 10), width=128, n_seeds=20, n_inputs=16,
                          input_seed=123, out_path=None):
    """Freshly initialized nets at standard-normal inputs: mean |d out/d theta|
    per (parametrization, depth, seed); returns arrays of shape
    (n_seeds, len(depths)) keyed by parametrization."""
    for depth in depths:
        if not 2 <= depth <= 16:
            raise ConstraintError(f"depth {depth} outside [2, 16]")
    xs = np.random.default_rng(input_seed).standard_normal((n_inputs, 1))
    results = {}
    rows = []
    for name in GRAD_PARAMETRIZATIONS:
        table = np.zeros((n_seeds, len(depths)))
        for di, depth in enumerate(depths):
            proto = _grad_net(name, depth, width)
            for seed in range(n_seeds):
                net = tr.init_params(proto, seed)
                table[seed, di] = mean_abs_param_grad(net, xs)
                rows.append([name, depth, seed, repr(float(table[seed, di]))])
        results[name] = table
    if out_path is not None:
        write_csv(out_path, ["parametrization", "depth", "seed", "mean_abs_grad"], rows)
    return results


# ---------------------------------------------------------------------------
# output distribution at initialization

INIT_PARAMETRIZATIONS = ("unconstrained", "constrained_naive", "switch_pre",
                         "switch_post")


def _init_net(parametrization: str, width: int, depth: int, in_dim: int) -> Network:
    hidden = depth - 1
    ann = FeatureAnnotation((INCREASING,) * in_dim)
    if parametrization == "unconstrained":
        return make_network(FeatureAnnotation((FREE,) * in_dim),
                            mono_layers=hidden, mono_width=width)
    kind = {"constrained_naive": KIND_CONSTRAINED, "switch_pre": KIND_SWITCH_PRE,
            "switch_post": KIND_SWITCH_POST}[parametrization]
    return make_network(ann, mono_kind=kind, activation=get_activation("relu"),
                        mono_layers=hidden, mono_width=width, free_layers=0)


def init_output_experiment(widths=(8, 32, 128), depths=(4,), n_samples=200,
                           in_dim=4, zero_bias=False, seed=0, out_path=None):
    """Output mean/std of freshly initialized nets at standard-normal inputs,
    per (parametrization, width, depth)."""
    rng = np.random.default_rng(seed)
    rows = []
    results = {}
    for name in INIT_PARAMETRIZATIONS:
        for depth in depths:
            for width in widths:
                proto = _init_net(name, width, depth, in_dim)
                outs = np.empty(n_samples)
                for k in range(n_samples):
                    net = tr.init_params(proto, int(rng.integers(0, 2**31)))
                    if zero_bias:
                        for layer in (net.free_subnet or []) + net.layers:
                            layer.params.b[...] = 0.0
                    x = rng.standard_normal(in_dim)
                    outs[k] = float(net.forward(x)[0])
                mean, std = float(outs.mean()), float(outs.std())
                results[(name, width, depth)] = (mean, std)
                rows.append([name, width, depth, repr(mean), repr(std)])
    if out_path is not None:
        write_csv(out_path, ["parametrization", "width", "depth", "mean", "std"], rows)
    return results
