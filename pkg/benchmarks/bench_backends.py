#!/usr/bin/env python3
"""Benchmark the numba kernels against the pure-numpy fallbacks.

Covers the hot paths: elementwise activation evaluation/derivative, a full
forward+backward batch through a switch network, an Adam sweep, and a
monotonicity fuzz run.  The active backend for library-level runs follows
MONOMLP_BACKEND; the kernel micro-benchmarks call both implementations
directly.

Run:  python benchmarks/bench_backends.py [--quick]
"""

import argparse
import time

import numpy as np

from monomlp import backend
from monomlp import kernels_numpy as knp

try:
    from monomlp import kernels_numba as knb
except ImportError:
    knb = None


def timeit(fn, repeats):
    fn()  # warmup (includes JIT compilation for numba)
    t0 = time.perf_counter()
    for _ in range(repeats):
        fn()
    return (time.perf_counter() - t0) / repeats


def bench_kernels(n, repeats):
    x = np.random.default_rng(0).uniform(-5, 5, n)
    print(f"\nelementwise kernels on {n:,} values")
    print(f"{'kernel':28s} {'numpy ms':>10s} {'numba ms':>10s} {'speedup':>8s}")
    for label, code, alpha in [("relu eval", knp.RELU, 0.0),
                               ("celu eval", knp.CELU, 1.0),
                               ("sigmoid eval", knp.SIGMOID, 0.0),
                               ("softplus eval", knp.SOFTPLUS, 0.0)]:
        t_np = timeit(lambda: knp.act_eval(code, alpha, 1.0507, False, 1.0, 0.0, x),
                      repeats)
        if knb is None:
            print(f"{label:28s} {t_np * 1e3:10.3f} {'n/a':>10s}")
            continue
        t_nb = timeit(lambda: knb.act_eval(code, alpha, 1.0507, False, 1.0, 0.0, x),
                      repeats)
        print(f"{label:28s} {t_np * 1e3:10.3f} {t_nb * 1e3:10.3f} {t_np / t_nb:7.2f}x")
    for label, code, alpha in [("relu deriv", knp.RELU, 0.0),
                               ("sigmoid deriv", knp.SIGMOID, 0.0)]:
        t_np = timeit(lambda: knp.act_deriv(code, alpha, 1.0507, False, 1.0, 0.0, x),
                      repeats)
        if knb is None:
            continue
        t_nb = timeit(lambda: knb.act_deriv(code, alpha, 1.0507, False, 1.0, 0.0, x),
                      repeats)
        print(f"{label:28s} {t_np * 1e3:10.3f} {t_nb * 1e3:10.3f} {t_np / t_nb:7.2f}x")


def bench_adam(n, repeats):
    rng = np.random.default_rng(1)
    print(f"\nadam update on {n:,} parameters")
    for name, mod in (("numpy", knp),) + ((("numba", knb),) if knb else ()):
        p = rng.standard_normal(n)
        g = rng.standard_normal(n)
        m = np.zeros(n)
        v = np.zeros(n)
        t = timeit(lambda: mod.adam_step(p, g, m, v, 1e-3, 0.9, 0.999, 1e-8, 0.1, 0.001),
                   repeats)
        print(f"  {name:6s} {t * 1e3:8.3f} ms")


def bench_library(repeats):
    from monomlp import activations as act
    from monomlp import network as nw
    from monomlp import training as tr
    from monomlp import verifier as vf
    from monomlp.layers import KIND_SWITCH_POST

    ann = nw.FeatureAnnotation(("increasing",) * 4)
    net = nw.make_network(ann, mono_kind=KIND_SWITCH_POST,
                          activation=act.get("relu"), mono_layers=3,
                          mono_width=128, free_layers=0)
    net = tr.init_params(net, 0)
    X = np.random.default_rng(2).uniform(-3, 3, (512, 4))
    up = np.ones((512, 1))
    print(f"\nlibrary hot paths (active backend: {backend.BACKEND})")
    t = timeit(lambda: net.forward(X), repeats)
    print(f"  forward 512x ..................... {t * 1e3:8.3f} ms")
    t = timeit(lambda: net.backward_batch(X, up), repeats)
    print(f"  forward+backward 512x ............ {t * 1e3:8.3f} ms")
    t = timeit(lambda: vf.fuzz_monotone(net, n_pairs=20_000), max(1, repeats // 4))
    print(f"  fuzz_monotone 20k pairs .......... {t * 1e3:8.3f} ms")


def main():
    parser = argparse.ArgumentParser()
    parser.add_argument("--quick", action="store_true")
    args = parser.parse_args()
    n = 200_000 if args.quick else 1_000_000
    repeats = 5 if args.quick else 20
    print(f"active backend: {backend.BACKEND}"
          + ("" if knb else "  (numba unavailable: numpy only)"))
    bench_kernels(n, repeats)
    bench_adam(n, repeats)
    bench_library(repeats)


if __name__ == "__main__":
    main()
