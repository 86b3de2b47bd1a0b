"""Constructive interpolation: an explicit 3-hidden-layer network with
non-negative weights and saturation-alternating activations that hits n
monotone-consistent points, plus the Heaviside-composition demo.

Construction sketch (points sorted by target value):

  layer 1  one unit per pair (i, j) with y_i < y_j: a sharp half-space unit
           for a hyperplane with non-negative normal separating x_i from x_j;
  layer 2  unit i conjoins its pair units into an indicator of a set that
           contains x_i but no strictly-larger point;
  layer 3  unit i conjoins complements of the previous sets into a level-set
           indicator {x : f(x) >= f(x_i)} (or <= for the opposite alternation);
  output   telescoping weights (consecutive target differences) over the
           level-set indicators.

Activations are normalized (shifted) to saturate at zero on the side the
alternation requires; the proof's infinite sharpness is replaced by a finite
schedule that doubles until the residual meets tol.  Per-layer sharpness
grows as lambda^4 / lambda^2 / lambda so that slowly-decaying (polynomial)
tails in earlier layers are still flattened by later layers' weights.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import activations as act
from .errors import ConstraintError, ConvergenceError, InconsistencyError
from .layers import KIND_CONSTRAINED, KIND_FREE, Layer, LayerParams, LayerSpec
from .network import INCREASING, FeatureAnnotation, Network

ALT_MINUS_PLUS_MINUS = "minus_plus_minus"
ALT_PLUS_MINUS_PLUS = "plus_minus_plus"
ALTERNATIONS = (ALT_MINUS_PLUS_MINUS, ALT_PLUS_MINUS_PLUS)

MAX_DOUBLINGS = 40


@dataclass(frozen=True)
class HalfSpace:
    """Hyperplane alpha^T (x - beta) = 0 with non-negative normal."""

    alpha: np.ndarray
    beta: np.ndarray

    def signed_distance(self, x) -> float:
        return float(self.alpha @ (np.asarray(x, dtype=np.float64) - self.beta))


def separating_halfspace(xi, xj) -> HalfSpace:
    """Half-space with xj strictly above and xi strictly below: normal is the
    positive part of xj - xi (unit 1-norm), offset the midpoint."""
    xi = np.asarray(xi, dtype=np.float64)
    xj = np.asarray(xj, dtype=np.float64)
    diff = np.maximum(xj - xi, 0.0)
    total = diff.sum()
    if total <= 0.0:
        raise InconsistencyError(
            f"no separating half-space: {xj.tolist()} <= {xi.tolist()} componentwise"
        )
    return HalfSpace(alpha=diff / total, beta=0.5 * (xi + xj))


@dataclass
class InterpolationProblem:
    """Finite point set (x_i, y_i) for the constructive builder."""

    x: np.ndarray                      # (n, d)
    y: np.ndarray                      # (n,)
    alternation: str = ALT_MINUS_PLUS_MINUS
    activations: tuple | None = None   # (sigma1, sigma2, sigma3) or None for ReLU family
    lam: float | None = None           # starting sharpness; None -> 10 / min margin
    tol: float = 1e-6

    def __post_init__(self):
        self.x = np.atleast_2d(np.asarray(self.x, dtype=np.float64))
        self.y = np.asarray(self.y, dtype=np.float64).reshape(-1)
        if self.x.shape[0] != self.y.shape[0]:
            raise ConstraintError("x and y must have the same number of points")
        if self.x.shape[0] == 0:
            raise ConstraintError("need at least one point")
        if not (np.all(np.isfinite(self.x)) and np.all(np.isfinite(self.y))):
            raise ConstraintError("points must be finite")
        if self.alternation not in ALTERNATIONS:
            raise ConstraintError(f"unknown alternation {self.alternation!r}")
        order = np.lexsort(tuple(self.x[:, c] for c in range(self.x.shape[1] - 1, -1, -1))
                           + (self.y,))
        self.x = self.x[order]
        self.y = self.y[order]


def default_triple(alternation: str) -> tuple:
    relu = act.get("relu")
    refl = act.reflect(relu)
    if alternation == ALT_MINUS_PLUS_MINUS:
        return (relu, refl, relu)
    return (refl, relu, refl)


def _required_sides(alternation):
    # per hidden layer: the side whose limit must exist
    if alternation == ALT_MINUS_PLUS_MINUS:
        return ("left", "right", "left")
    return ("right", "left", "right")


def _normalized_triple(problem: InterpolationProblem):
    """Shift each activation so it saturates at exactly zero on its side."""
    triple = problem.activations or default_triple(problem.alternation)
    if len(triple) != 3:
        raise ConstraintError("need exactly three hidden activations")
    sides = _required_sides(problem.alternation)
    out = []
    for k, (spec, side) in enumerate(zip(triple, sides)):
        if not act.monotone(spec):
            raise ConstraintError(f"hidden activation {k + 1} must be monotone")
        sat = act.saturation(spec)
        limit = sat.left if side == "left" else sat.right
        if limit is None:
            raise ConstraintError(
                f"hidden activation {k + 1} must saturate {side} for "
                f"{problem.alternation}"
            )
        out.append(act.rescale_equivalent(spec, 1.0, -limit))
    return tuple(out)


def _solve_bias(spec, target: float) -> tuple[float, float]:
    """Bias b with sigma(b) ~= target (sigma non-decreasing); returns
    (b, realized value) so downstream weights use the exact attained gamma."""
    lo, hi = -60.0, 60.0
    flo, fhi = act.eval(spec, lo), act.eval(spec, hi)
    if not (flo <= target <= fhi):
        raise ConstraintError(
            f"gamma target {target} outside activation range [{flo}, {fhi}]")
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if mid == lo or mid == hi:
            break
        if act.eval(spec, mid) < target:
            lo = mid
        else:
            hi = mid
    b = 0.5 * (lo + hi)
    return b, act.eval(spec, b)


def _gamma_target(spec, want_positive: bool) -> float:
    """|gamma| = 1 when the non-saturating side is unbounded, else half-range."""
    sat = act.saturation(spec)
    if want_positive:
        return 1.0 if sat.right is None else 0.5 * sat.right
    return -1.0 if sat.left is None else 0.5 * sat.left


def _strict_pairs(y):
    n = len(y)
    return [(i, j) for i in range(n) for j in range(i + 1, n) if y[i] < y[j]]


def _check_consistency(x, y, pairs):
    for i, j in pairs:
        if np.array_equal(x[i], x[j]):
            raise InconsistencyError(
                f"duplicate input {x[i].tolist()} with different targets "
                f"{y[i]} and {y[j]}"
            )
        if np.all(x[j] <= x[i]):
            raise InconsistencyError(
                f"points {i} and {j} are ordered oppositely in inputs and targets: "
                f"y[{i}]={y[i]} < y[{j}]={y[j]} but x[{j}] <= x[{i}] componentwise"
            )


@dataclass
class BuildResult:
    network: Network
    residual: float
    lam: float
    schedule: list = field(default_factory=list)  # residual per lambda tried


def _assemble(problem, pairs, halfspaces, lam) -> Network:
    x, y = problem.x, problem.y
    n, d = x.shape
    s1, s2, s3 = _normalized_triple(problem)
    plus_case = problem.alternation == ALT_PLUS_MINUS_PLUS
    lam1, lam2, lam3 = lam ** 4, lam ** 2, lam

    n_pairs = len(pairs)
    W1 = np.zeros((n_pairs, d))
    b1 = np.zeros(n_pairs)
    for p, hs in enumerate(halfspaces):
        W1[p] = lam1 * hs.alpha
        b1[p] = -lam1 * float(hs.alpha @ hs.beta)

    b2_val, gamma2 = _solve_bias(s2, _gamma_target(s2, want_positive=plus_case))
    W2 = np.zeros((n, n_pairs))
    for p, (i, j) in enumerate(pairs):
        W2[j if plus_case else i, p] = lam2
    b2 = np.full(n, b2_val)

    b3_val, gamma3 = _solve_bias(s3, _gamma_target(s3, want_positive=not plus_case))
    W3 = np.zeros((n, n))
    for i in range(n):
        for j in range(n):
            if (j > i) if plus_case else (j < i):
                W3[i, j] = lam3
    b3 = np.full(n, b3_val)

    w_out = np.zeros((1, n))
    if plus_case:
        bias_out = y[n - 1]
        for i in range(n - 1):
            w_out[0, i] = (y[i] - y[i + 1]) / gamma3
    else:
        bias_out = y[0]
        for i in range(1, n):
            w_out[0, i] = (y[i] - y[i - 1]) / gamma3

    def hidden(W, b, spec):
        return Layer(
            LayerSpec(KIND_CONSTRAINED, W.shape[1], W.shape[0], activation=spec),
            LayerParams(W=W, b=b),
        )

    layers = [
        hidden(W1, b1, s1),
        hidden(W2, b2, s2),
        hidden(W3, b3, s3),
        Layer(LayerSpec(KIND_FREE, n, 1, mono_cols=n),
              LayerParams(W=w_out, b=np.array([bias_out]))),
    ]
    annotation = FeatureAnnotation((INCREASING,) * d)
    return Network(annotation, layers)


def _residual(net, problem) -> float:
    pred = net.forward(problem.x)[:, 0]
    return float(np.max(np.abs(pred - problem.y)))


def build_report(problem: InterpolationProblem,
                 max_doublings: int = MAX_DOUBLINGS) -> BuildResult:
    """Build with the doubling sharpness schedule until the residual meets tol."""
    pairs = _strict_pairs(problem.y)
    _check_consistency(problem.x, problem.y, pairs)
    halfspaces = [separating_halfspace(problem.x[i], problem.x[j]) for i, j in pairs]
    margins = [hs.signed_distance(problem.x[j]) for hs, (i, j) in zip(halfspaces, pairs)]
    if problem.lam is not None:
        lam0 = float(problem.lam)
    elif margins:
        lam0 = max(2.0, 10.0 / min(margins))
    else:
        lam0 = 2.0
    schedule = []
    best = None
    for attempt in range(max_doublings + 1):
        lam = lam0 * (2.0 ** attempt)
        net = _assemble(problem, pairs, halfspaces, lam)
        res = _residual(net, problem)
        schedule.append(res)
        if best is None or res < best.residual:
            best = BuildResult(network=net, residual=res, lam=lam)
        if res <= problem.tol:
            return BuildResult(network=net, residual=res, lam=lam, schedule=schedule)
    raise ConvergenceError(
        f"sharpness schedule exhausted after {max_doublings} doublings; "
        f"best residual {best.residual:.3e} > tol {problem.tol:.3e}",
        residual=best.residual,
    )


def build(problem: InterpolationProblem) -> Network:
    """Constructive interpolation: a 4-layer non-negative-weight network with
    |g(x_i) - y_i| <= tol at every point."""
    return build_report(problem).network


def residual_schedule(problem: InterpolationProblem, doublings: int) -> list:
    """Residual at each sharpness doubling, ignoring tol (for convergence
    diagnostics)."""
    pairs = _strict_pairs(problem.y)
    _check_consistency(problem.x, problem.y, pairs)
    halfspaces = [separating_halfspace(problem.x[i], problem.x[j]) for i, j in pairs]
    margins = [hs.signed_distance(problem.x[j]) for hs, (i, j) in zip(halfspaces, pairs)]
    lam0 = problem.lam if problem.lam is not None else (
        max(2.0, 10.0 / min(margins)) if margins else 2.0)
    out = []
    for attempt in range(doublings + 1):
        net = _assemble(problem, pairs, halfspaces, lam0 * (2.0 ** attempt))
        out.append(_residual(net, problem))
    return out


_RELU = act.get("relu")
_RELU_REFL = act.reflect(_RELU)


def heaviside_forms(alpha: float, x):
    """The two step-function compositions of ReLU and its point reflection.

    form1 = ReLU(ReLU'(alpha x - 0.5) + 1) tends to 1[x >= 0];
    form2 = ReLU'(ReLU(alpha x + 0.5) - 1) tends to 1[x >= 0] - 1.
    """
    if alpha <= 0.0:
        raise ConstraintError(f"alpha must be > 0, got {alpha}")
    t = np.atleast_1d(np.asarray(x, dtype=np.float64)) * alpha
    form1 = act.eval_array(_RELU, act.eval_array(_RELU_REFL, t - 0.5) + 1.0)
    form2 = act.eval_array(_RELU_REFL, act.eval_array(_RELU, t + 0.5) - 1.0)
    return form1, form2


def heaviside_compose(alpha: float, x):
    """Step-function approximation; asserts the two compositions agree (they
    are identical up to the additive constant 1)."""
    form1, form2 = heaviside_forms(alpha, x)
    gap = np.max(np.abs(form1 - (form2 + 1.0)))
    if gap > 1e-12:
        raise AssertionError(f"Heaviside compositions disagree by {gap}")
    if np.ndim(x) == 0:
        return float(form1[0])
    return form1
