"""Command-line interface.

Subcommands: train, eval, verify, construct, diagnose (grads|init), toy,
demo-heaviside.  Config files are JSON with sections {dataset, network,
train}; see configs/ for the shipped dataset defaults.

Exit codes: 0 success, 1 usage error, 2 data error, 3 numeric abort.
"""

from __future__ import annotations

import argparse
import json
import sys

import numpy as np

from . import experiments as ex
from . import interpolator as itp
from . import training as tr
from . import verifier as vf
from .activations import from_dict as activation_from_dict
from .activations import get as get_activation
from .datasets import DatasetSpec, load_dataset, write_csv
from .errors import (
    ConstraintError,
    ConvergenceError,
    DataError,
    InconsistencyError,
    ModelFormatError,
    ShapeError,
    TrainingAbort,
)
from .network import certify_monotone, load_model, make_network, save_model

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_DATA = 2
EXIT_NUMERIC = 3


class _Parser(argparse.ArgumentParser):
    def error(self, message):  # argparse defaults to exit code 2; the CLI uses 1
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _load_config(path) -> dict:
    try:
        with open(path, encoding="utf-8") as fh:
            return json.load(fh)
    except OSError as exc:
        raise DataError(f"cannot read config {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise DataError(f"invalid JSON in {path}: line {exc.lineno}: {exc.msg}") from exc


def _network_from_config(doc: dict, annotation):
    a = doc.get("activation", {"name": "relu"})
    spec = activation_from_dict(a) if isinstance(a, dict) else get_activation(a)
    fa = doc.get("free_activation")
    free_spec = (activation_from_dict(fa) if isinstance(fa, dict)
                 else get_activation(fa)) if fa else None
    return make_network(
        annotation,
        mono_kind=doc.get("kind", "switch_post"),
        activation=spec,
        mono_layers=int(doc.get("mono_layers", 3)),
        mono_width=int(doc.get("mono_width", 16)),
        free_layers=int(doc.get("free_layers", 3)),
        free_width=int(doc["free_width"]) if "free_width" in doc else None,
        sign=doc.get("sign", "non_negative"),
        reparam=doc.get("reparam", "abs"),
        free_activation=free_spec,
    )


def _cmd_train(args):
    config = _load_config(args.config)
    spec = DatasetSpec.from_dict(config.get("dataset", {}))
    train_table, test_table = load_dataset(spec)
    try:
        tcfg = tr.TrainConfig(**config.get("train", {}))
    except TypeError as exc:
        raise ConstraintError(f"bad train section: {exc}") from exc
    net = _network_from_config(config.get("network", {}), train_table.annotation)
    net = tr.init_params(net, tcfg.seed)
    trained, curve = tr.fit(net, train_table.X, train_table.y, tcfg)
    metrics = ex.evaluate(trained, test_table.X, test_table.y, spec.task)
    metrics["final_train_loss"] = curve[-1]
    save_model(trained, args.out)
    if args.metrics:
        with open(args.metrics, "w", encoding="utf-8") as fh:
            json.dump({"test": metrics, "loss_curve": curve}, fh, indent=1)
    print(json.dumps({"model": args.out, "test": metrics}, indent=1))
    return EXIT_OK


def _cmd_eval(args):
    net = load_model(args.model)
    config = _load_config(args.config)
    spec = DatasetSpec.from_dict(config.get("dataset", {}))
    _, test_table = load_dataset(spec)
    metrics = ex.evaluate(net, test_table.X, test_table.y, spec.task)
    print(json.dumps(metrics, indent=1))
    return EXIT_OK


def _cmd_verify(args):
    net = load_model(args.model)
    cert = certify_monotone(net)
    box = (args.box[0], args.box[1])
    fuzz = vf.fuzz_monotone(net, box=box, n_pairs=args.pairs, tol=args.tol,
                            seed=args.seed)
    grad = vf.grad_sign_check(net, box=box, n_points=max(1, args.pairs // 10),
                              tol=args.tol, seed=args.seed)
    report = {
        "certificate": {"ok": cert.ok, "reason": cert.reason},
        "fuzz_monotone": fuzz.to_dict(),
        "grad_sign_check": grad.to_dict(),
    }
    text = json.dumps(report, indent=1)
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(text)
    print(text)
    return EXIT_OK


def _read_points(path):
    import csv as _csv

    try:
        with open(path, newline="", encoding="utf-8") as fh:
            rows = [r for r in _csv.reader(fh) if r]
    except OSError as exc:
        raise DataError(f"cannot read {path}: {exc}") from exc
    if len(rows) < 2:
        raise DataError(f"{path}: need a header and at least one point")
    header = rows[0]
    if len(header) < 2:
        raise DataError(f"{path}: need at least one coordinate column plus the target")
    try:
        data = np.array([[float(c) for c in r] for r in rows[1:]])
    except ValueError as exc:
        raise DataError(f"{path}: non-numeric cell ({exc})") from exc
    return data[:, :-1], data[:, -1]


def _cmd_construct(args):
    x, y = _read_points(args.points)
    problem = itp.InterpolationProblem(x=x, y=y, alternation=args.alternation,
                                       tol=args.tol)
    result = itp.build_report(problem)
    save_model(result.network, args.out)
    report = {
        "points": int(len(y)),
        "residual": result.residual,
        "tolerance": problem.tol,
        "sharpness": result.lam,
        "alternation": args.alternation,
        "certificate": certify_monotone(result.network).ok,
    }
    if args.report:
        with open(args.report, "w", encoding="utf-8") as fh:
            json.dump(report, fh, indent=1)
    print(json.dumps(report, indent=1))
    return EXIT_OK


def _cmd_diagnose(args):
    if args.what == "grads":
        results = ex.grad_depth_experiment(depths=tuple(args.depths),
                                           width=args.width, n_seeds=args.seeds,
                                           out_path=args.out)
        for name, table in results.items():
            means = " ".join(f"{v:.4g}" for v in table.mean(axis=0))
            print(f"{name}: depth means {means}")
    else:
        results = ex.init_output_experiment(widths=tuple(args.widths),
                                            depths=tuple(args.depths),
                                            n_samples=args.samples,
                                            out_path=args.out)
        for key, (mean, std) in sorted(results.items()):
            print(f"{key}: mean={mean:.4g} std={std:.4g}")
    if args.out:
        print(f"wrote {args.out}")
    return EXIT_OK


def _cmd_toy(args):
    cfg = ex.ToyConfig(epochs=args.epochs, width=args.width, seed=args.seed)
    out = ex.toy_experiment(cfg, out_dir=args.out_dir)
    print(json.dumps({"final_mse": out["final_mse"]}, indent=1))
    return EXIT_OK


def _cmd_demo_heaviside(args):
    grid = np.linspace(-args.span, args.span, args.grid)
    values = itp.heaviside_compose(args.alpha, grid)
    form1, form2 = itp.heaviside_forms(args.alpha, grid)
    if args.out:
        write_csv(args.out, ["x", "heaviside", "form_pre", "form_post"],
                  [[repr(float(g)), repr(float(v)), repr(float(a)), repr(float(b))]
                   for g, v, a, b in zip(grid, values, form1, form2)])
        print(f"wrote {args.out}")
    mid = args.grid // 2
    print(f"alpha={args.alpha}: value at -{args.span}={values[0]}, "
          f"0~{values[mid]:.3g}, +{args.span}={values[-1]}")
    return EXIT_OK


def build_parser() -> _Parser:
    parser = _Parser(prog="monomlp",
                     description="Monotone-by-construction MLPs: train, verify, "
                                 "construct, and diagnose.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("train", help="train a model from a config file")
    p.add_argument("config")
    p.add_argument("--out", default="model.json")
    p.add_argument("--metrics", default=None)
    p.set_defaults(func=_cmd_train)

    p = sub.add_parser("eval", help="evaluate a model on a dataset config")
    p.add_argument("model")
    p.add_argument("config")
    p.set_defaults(func=_cmd_eval)

    p = sub.add_parser("verify", help="certificate + empirical monotonicity checks")
    p.add_argument("model")
    p.add_argument("--box", nargs=2, type=float, default=(-5.0, 5.0))
    p.add_argument("--pairs", type=int, default=100_000)
    p.add_argument("--tol", type=float, default=1e-9)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", default=None)
    p.set_defaults(func=_cmd_verify)

    p = sub.add_parser("construct",
                       help="build an interpolating network from a points CSV "
                            "(coordinates columns, target last)")
    p.add_argument("points")
    p.add_argument("--alternation", choices=itp.ALTERNATIONS,
                   default=itp.ALT_MINUS_PLUS_MINUS)
    p.add_argument("--tol", type=float, default=1e-6)
    p.add_argument("--out", default="constructed.json")
    p.add_argument("--report", default=None)
    p.set_defaults(func=_cmd_construct)

    p = sub.add_parser("diagnose", help="gradient-vs-depth or init-output tables")
    p.add_argument("what", choices=("grads", "init"))
    p.add_argument("--depths", nargs="+", type=int, default=[4, 6, 8, 10])
    p.add_argument("--width", type=int, default=128)
    p.add_argument("--widths", nargs="+", type=int, default=[8, 32, 128])
    p.add_argument("--seeds", type=int, default=20)
    p.add_argument("--samples", type=int, default=200)
    p.add_argument("--out", default=None)
    p.set_defaults(func=_cmd_diagnose)

    p = sub.add_parser("toy", help="cos(x)+x comparison of the four parametrizations")
    p.add_argument("--epochs", type=int, default=2000)
    p.add_argument("--width", type=int, default=128)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out-dir", default="toy_out")
    p.set_defaults(func=_cmd_toy)

    p = sub.add_parser("demo-heaviside", help="step-function composition demo")
    p.add_argument("--alpha", type=float, default=1e6)
    p.add_argument("--span", type=float, default=1.0)
    p.add_argument("--grid", type=int, default=1001)
    p.add_argument("--out", default=None)
    p.set_defaults(func=_cmd_demo_heaviside)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (DataError, ModelFormatError, InconsistencyError, ShapeError) as exc:
        print(f"data error: {exc}", file=sys.stderr)
        return EXIT_DATA
    except ConstraintError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (TrainingAbort, ConvergenceError, FloatingPointError) as exc:
        print(f"numeric abort: {exc}", file=sys.stderr)
        return EXIT_NUMERIC


if __name__ == "__main__":
    sys.exit(main())
