"""Empirical checks: monotonicity fuzzing, input-gradient sign checks,
midpoint-convexity detection, and a numeric equivalence oracle.

These are sanity layers over the structural certificate, not proofs: a
certified network must come through every check clean, and the convexity
detector makes the "non-negative weights + convex activation can only be
convex" limitation directly observable.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ConstraintError, ShapeError
from .network import DECREASING, INCREASING, Network

DEFAULT_BOX = (-5.0, 5.0)
DEFAULT_TOL = 1e-9


@dataclass
class WorstPair:
    x: np.ndarray
    x_prime: np.ndarray
    fx: float
    fx_prime: float

    @property
    def gap(self) -> float:
        return self.fx - self.fx_prime


@dataclass
class ViolationReport:
    checked: int
    violations: int
    worst: WorstPair | None
    tol: float

    @property
    def ok(self) -> bool:
        return self.violations == 0

    def to_dict(self) -> dict:
        doc = {
            "checked": self.checked,
            "violations": self.violations,
            "tolerance": self.tol,
            "ok": self.ok,
        }
        if self.worst is not None:
            doc["worst"] = {
                "x": self.worst.x.tolist(),
                "x_prime": self.worst.x_prime.tolist(),
                "f_x": self.worst.fx,
                "f_x_prime": self.worst.fx_prime,
            }
        return doc


def _box_samples(rng, n, d, box):
    lo, hi = box
    if not (np.isfinite(lo) and np.isfinite(hi) and lo < hi):
        raise ConstraintError(f"invalid domain box {box!r}")
    return rng.uniform(lo, hi, size=(n, d))


def _scalar_outputs(net, X):
    y = net.forward(X)
    return y[:, 0] if y.ndim == 2 else y


def fuzz_monotone(net: Network, box=DEFAULT_BOX, n_pairs=100_000, tol=DEFAULT_TOL,
                  seed=0) -> ViolationReport:
    """Random ordered pairs: perturb one or more annotated coordinates in
    their monotone direction (free coordinates held fixed) and count
    f(x') < f(x) - tol."""
    if n_pairs < 1:
        raise ConstraintError("n_pairs must be >= 1")
    rng = np.random.default_rng(seed)
    d = net.input_dim
    X = _box_samples(rng, n_pairs, d, box)
    directions = np.zeros(d)
    for i, dirn in enumerate(net.annotation.directions):
        if dirn == INCREASING:
            directions[i] = 1.0
        elif dirn == DECREASING:
            directions[i] = -1.0
    mono = np.flatnonzero(directions)
    if mono.size == 0:
        deltas = np.zeros_like(X)
    else:
        mask = rng.random((n_pairs, mono.size)) < 0.5
        none_active = ~mask.any(axis=1)
        mask[none_active, rng.integers(0, mono.size, none_active.sum())] = True
        # increments uniform in (0,1], applied along the annotated direction
        inc = (1.0 - rng.random((n_pairs, mono.size))) * mask
        deltas = np.zeros_like(X)
        deltas[:, mono] = inc * directions[mono]
    Xp = X + deltas
    f0 = _scalar_outputs(net, X)
    f1 = _scalar_outputs(net, Xp)
    gaps = f0 - f1
    bad = gaps > tol
    worst = None
    if bad.any():
        i = int(np.argmax(gaps))
        worst = WorstPair(X[i].copy(), Xp[i].copy(), float(f0[i]), float(f1[i]))
    return ViolationReport(checked=n_pairs, violations=int(bad.sum()), worst=worst,
                           tol=tol)


def grad_sign_check(net: Network, box=DEFAULT_BOX, n_points=10_000, tol=DEFAULT_TOL,
                    seed=0) -> ViolationReport:
    """Analytic input gradients at sampled points; flags entries pointing
    against an annotated direction."""
    rng = np.random.default_rng(seed)
    X = _box_samples(rng, n_points, net.input_dim, box)
    G = net.input_gradient(X)
    inc = [i for i, d in enumerate(net.annotation.directions) if d == INCREASING]
    dec = [i for i, d in enumerate(net.annotation.directions) if d == DECREASING]
    viol = np.zeros(n_points, dtype=bool)
    score = np.zeros(n_points)
    if inc:
        v = np.minimum(G[:, inc].min(axis=1), 0.0)
        viol |= v < -tol
        score = np.minimum(score, v)
    if dec:
        v = -np.maximum(G[:, dec].max(axis=1), 0.0)
        viol |= v < -tol
        score = np.minimum(score, v)
    worst = None
    if viol.any():
        i = int(np.argmin(score))
        fx = float(_scalar_outputs(net, X[i:i + 1])[0])
        worst = WorstPair(X[i].copy(), X[i].copy(), fx, fx)
    return ViolationReport(checked=n_points, violations=int(viol.sum()), worst=worst,
                           tol=tol)


def midpoint_convexity_check(net: Network, box=DEFAULT_BOX, n_pairs=100_000,
                             tol=DEFAULT_TOL, seed=0) -> ViolationReport:
    """Flags pairs with f((a+b)/2) > (f(a)+f(b))/2 + tol, i.e. evidence that
    the function is not convex."""
    if net.out_dim != 1:
        raise ShapeError("convexity check needs a scalar-output network")
    rng = np.random.default_rng(seed)
    d = net.input_dim
    A = _box_samples(rng, n_pairs, d, box)
    B = _box_samples(rng, n_pairs, d, box)
    M = 0.5 * (A + B)
    fa = _scalar_outputs(net, A)
    fb = _scalar_outputs(net, B)
    fm = _scalar_outputs(net, M)
    gaps = fm - 0.5 * (fa + fb)
    bad = gaps > tol
    worst = None
    if bad.any():
        i = int(np.argmax(gaps))
        worst = WorstPair(A[i].copy(), B[i].copy(), float(fm[i]),
                          float(0.5 * (fa[i] + fb[i])))
    return ViolationReport(checked=n_pairs, violations=int(bad.sum()), worst=worst,
                           tol=tol)


def equivalence_oracle(net_a: Network, net_b: Network, box=DEFAULT_BOX,
                       n_points=10_000, seed=0) -> float:
    """Max |f_a - f_b| over sampled points."""
    if net_a.input_dim != net_b.input_dim:
        raise ShapeError("networks take different input dimensions")
    rng = np.random.default_rng(seed)
    X = _box_samples(rng, n_points, net_a.input_dim, box)
    ya = net_a.forward(X)
    yb = net_b.forward(X)
    if ya.shape != yb.shape:
        raise ShapeError("networks produce different output dimensions")
    return float(np.max(np.abs(ya - yb)))
