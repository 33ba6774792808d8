"""Numeric checks of the two elementary power inequalities used for the case split.

geometric:  (1 - x)^p <= 1 / (1 + p x)       on [0, 1]
linear:     (1 - x)^p <= 1 - p x / 2         claimed on [1/p, 1]

The linear one is only true on an initial part of [1/p, 1]; the sweep
reports the worst violation rather than hiding it.  ``case2_conclusion``
checks what the linear step is used for: 1 - (1 - x)^p >= 1/2 on [1/p, 1].
"""

from dataclasses import asdict, dataclass

import numpy as np

from .errors import PreconditionError

VIOLATION_TOL = 1e-15
MAX_P = 128


def _power(x, p):
    # (1 - x)^p via log1p: a few ulps even for tiny x, where the direct power
    # would amplify the rounding of 1 - x by a factor p
    with np.errstate(divide="ignore"):
        return np.exp(p * np.log1p(-np.asarray(x, dtype=float)))


def geometric_ineq_sides(x, p):
    if not 0.0 <= x <= 1.0 or p < 1:
        raise PreconditionError(f"need 0 <= x <= 1 and p >= 1, got x={x}, p={p}")
    return float(_power(x, p)), 1.0 / (1.0 + p * x)


def linear_ineq_sides(x, p):
    if p < 1:
        raise PreconditionError(f"p must be >= 1, got {p}")
    if not 1.0 / p <= x <= 1.0:
        raise PreconditionError(f"x must lie in [1/p, 1] = [{1.0 / p}, 1], got {x}")
    return float(_power(x, p)), 1.0 - p * x / 2.0


@dataclass(frozen=True)
class Certificate:
    name: str
    samples: int
    max_violation: float
    worst_x: float
    worst_p: int
    passed: bool

    def to_dict(self):
        return asdict(self)


def _certificate(name, x, p, lhs, rhs, tol):
    excess = lhs - rhs
    worst = int(np.argmax(excess))
    max_violation = max(float(excess[worst]), 0.0)
    return Certificate(
        name=name,
        samples=int(x.size),
        max_violation=max_violation,
        worst_x=float(x[worst]),
        worst_p=int(p[worst]),
        passed=max_violation <= tol,
    )


def sweep_geometric(samples, rng, max_p=MAX_P, tol=VIOLATION_TOL):
    p = rng.integers(1, max_p + 1, samples)
    x = rng.random(samples)
    return _certificate("geometric", x, p, _power(x, p), 1.0 / (1.0 + p * x), tol)


def sweep_linear(samples, rng, max_p=MAX_P, tol=VIOLATION_TOL):
    """x uniform on [1/p, min(2/p, 1)], where the right side is a probability."""
    p = rng.integers(1, max_p + 1, samples)
    lo = 1.0 / p
    hi = np.minimum(2.0 / p, 1.0)
    x = lo + (hi - lo) * rng.random(samples)
    return _certificate("linear", x, p, _power(x, p), 1.0 - p * x / 2.0, tol)


def sweep_case2_conclusion(samples, rng, max_p=MAX_P, tol=VIOLATION_TOL):
    """1/2 <= 1 - (1 - x)^p for x on [1/p, 1]; the lower end is the worst case."""
    p = rng.integers(1, max_p + 1, samples)
    lo = 1.0 / p
    x = lo + (1.0 - lo) * rng.random(samples)
    return _certificate("case2_conclusion", x, p, np.full(samples, 0.5), 1.0 - _power(x, p), tol)


def geometric_strict_slack(samples, rng, max_p=MAX_P, x_min=1e-6):
    """Smallest ``rhs - lhs`` of the geometric inequality for x >= x_min."""
    p = rng.integers(1, max_p + 1, samples)
    x = x_min + (1.0 - x_min) * rng.random(samples)
    return float(np.min(1.0 / (1.0 + p * x) - _power(x, p)))


def linear_breakpoint(p, grid=200001):
    """Largest ``x * p`` on [1, p] up to which the linear inequality holds (grid estimate)."""
    x = np.linspace(1.0 / p, 1.0, grid)
    ok = _power(x, p) <= 1.0 - p * x / 2.0 + VIOLATION_TOL
    if ok.all():
        return float(p)
    return float(x[np.argmin(ok)] * p)


def run_all(samples, rng):
    return [
        sweep_geometric(samples, rng),
        sweep_linear(samples, rng),
        sweep_case2_conclusion(samples, rng),
    ]
