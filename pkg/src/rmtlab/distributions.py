"""Entry laws for W: symmetric, zero mean, unit variance.

The heavy-tailed kinds satisfy the tail lower bound

    P(|w| >= t) >= c0 * t**(-alpha)   for t >= 1

with equality on their power-law segment.  Every law is sampled by
inverting the tail of |w| and attaching an independent sign.
"""

import enum
import math
from dataclasses import dataclass

import numpy as np
from scipy import special

from .errors import InfeasibleParametersError, PreconditionError

__all__ = [
    "Kind",
    "TailCondition",
    "DistributionSpec",
    "calibrate_pareto",
    "calibrate_truncated_pareto",
    "gaussian_spec",
    "rademacher_spec",
    "canonical_spec",
    "exact_tail",
    "quantile",
    "sample",
    "sample_array",
    "moments",
    "median_of_means",
]

SOLVER_TOL = 1e-12


class Kind(str, enum.Enum):
    PARETO_SYMMETRIC = "pareto_symmetric"
    TRUNCATED_PARETO_SYMMETRIC = "truncated_pareto_symmetric"
    RADEMACHER = "rademacher"
    GAUSSIAN = "gaussian"


@dataclass(frozen=True)
class TailCondition:
    """Parameters of the power-law tail lower bound."""

    alpha: float
    c0: float

    def __post_init__(self):
        if not self.alpha >= 2:
            raise PreconditionError(f"tail exponent alpha must be >= 2, got {self.alpha}")
        if not 0 < self.c0 <= 1:
            raise PreconditionError(f"tail constant c0 must lie in (0, 1], got {self.c0}")

    def lower_bound(self, t):
        return self.c0 * np.power(t, -self.alpha)


@dataclass(frozen=True)
class DistributionSpec:
    """A fully calibrated symmetric entry law.

    ``t_min`` is the lower edge of the support of |w|; ``t_max`` the upper
    truncation (infinite except for the truncated kind, where an atom of
    mass ``c0 * t_max**-alpha`` sits at ``t_max``).
    """

    kind: Kind
    tail: TailCondition | None
    t_min: float
    t_max: float
    analytic_mean: float
    analytic_variance: float

    @property
    def alpha(self):
        return None if self.tail is None else self.tail.alpha

    @property
    def c0(self):
        return None if self.tail is None else self.tail.c0

    def condition_holds_at(self, t):
        """Whether the tail lower bound is guaranteed at ``t`` for this law."""
        return self.tail is not None and 1.0 <= t <= self.t_max

    def to_record(self):
        """Flat JSON-ready record; infinite truncation is written as null."""
        return {
            "kind": self.kind.value,
            "alpha": self.alpha,
            "c0": self.c0,
            "t_min": self.t_min,
            "t_max": None if math.isinf(self.t_max) else self.t_max,
        }


def calibrate_pareto(alpha):
    """Symmetric Pareto law with unit variance.

    ``P(|w| >= t) = (t_min / t)**alpha`` for ``t >= t_min`` with
    ``t_min = sqrt((alpha - 2) / alpha)``, so ``E w**2 = alpha t_min**2 / (alpha - 2) = 1``
    and the tail bound holds with equality, ``c0 = t_min**alpha``.
    """
    alpha = float(alpha)
    if not alpha > 2:
        raise InfeasibleParametersError(
            f"pure Pareto needs alpha > 2: E w^2 diverges for alpha = {alpha}; "
            "truncate at a finite t_max for alpha = 2"
        )
    t_min = math.sqrt((alpha - 2.0) / alpha)
    c0 = t_min**alpha
    return DistributionSpec(
        kind=Kind.PARETO_SYMMETRIC,
        tail=TailCondition(alpha, c0),
        t_min=t_min,
        t_max=math.inf,
        analytic_mean=0.0,
        analytic_variance=alpha * t_min**2 / (alpha - 2.0),
    )


def _truncated_second_moment(s, alpha, t_max):
    # E|w|^2 = s^2 + 2 s^alpha * int_s^t_max t^(1-alpha) dt, written scale-free in s/t_max
    if alpha == 2.0:
        return s * s * (1.0 + 2.0 * math.log(t_max / s))
    ratio = 0.0 if math.isinf(t_max) else (s / t_max) ** (alpha - 2.0)
    return s * s * (1.0 + 2.0 / (alpha - 2.0) * (1.0 - ratio))


def calibrate_truncated_pareto(alpha, t_max):
    """Symmetric Pareto tail capped at ``t_max``, calibrated to unit variance.

    The tail of |w| is ``c0 * t**-alpha`` on ``[t_min, t_max]`` and zero
    beyond, i.e. ``|w| = min(t_min * U**(-1/alpha), t_max)``.  Unit total mass
    forces ``c0 = t_min**alpha``; ``t_min`` is found by bisection on the
    variance equation, which is increasing in ``t_min``.
    """
    alpha = float(alpha)
    t_max = float(t_max)
    if not alpha >= 2:
        raise PreconditionError(f"alpha must be >= 2, got {alpha}")
    if alpha == 2.0 and math.isinf(t_max):
        raise InfeasibleParametersError(
            "alpha = 2 with no truncation has infinite variance; pass a finite t_max > 1"
        )
    # feasibility: the second moment at t_min = 1 is 1 + (positive) iff t_max > 1
    if not t_max > 1.0:
        raise InfeasibleParametersError(
            f"t_max = {t_max!r} cannot carry unit variance with the tail bound on t >= 1; "
            "feasibility threshold is t_max > 1"
        )

    lo, hi = 0.0, 1.0
    while True:
        mid = 0.5 * (lo + hi)
        if mid in (lo, hi):
            break
        if _truncated_second_moment(mid, alpha, t_max) < 1.0:
            lo = mid
        else:
            hi = mid
    candidates = [s for s in (lo, hi) if s > 0.0]
    t_min = min(candidates, key=lambda s: abs(_truncated_second_moment(s, alpha, t_max) - 1.0))
    variance = _truncated_second_moment(t_min, alpha, t_max)
    if abs(variance - 1.0) > SOLVER_TOL:
        raise InfeasibleParametersError(
            f"variance solver stalled at {variance!r} for alpha={alpha}, t_max={t_max}"
        )
    return DistributionSpec(
        kind=Kind.TRUNCATED_PARETO_SYMMETRIC,
        tail=TailCondition(alpha, t_min**alpha),
        t_min=t_min,
        t_max=t_max,
        analytic_mean=0.0,
        analytic_variance=variance,
    )


def gaussian_spec():
    return DistributionSpec(Kind.GAUSSIAN, None, 0.0, math.inf, 0.0, 1.0)


def rademacher_spec():
    return DistributionSpec(Kind.RADEMACHER, None, 1.0, 1.0, 0.0, 1.0)


def canonical_spec(alpha, t_max=None):
    """Calibrated Pareto for ``alpha``; truncated when ``t_max`` is given."""
    if t_max is None:
        return calibrate_pareto(alpha)
    return calibrate_truncated_pareto(alpha, t_max)


def exact_tail(spec, t):
    """Closed-form ``P(|w| >= t)``; accepts scalars or arrays."""
    t_arr = np.asarray(t, dtype=float)
    if np.any(t_arr < 0):
        raise PreconditionError("exact_tail needs t >= 0")
    kind = spec.kind
    if kind is Kind.GAUSSIAN:
        out = special.erfc(t_arr / math.sqrt(2.0))
    elif kind is Kind.RADEMACHER:
        out = np.where(t_arr <= 1.0, 1.0, 0.0)
    else:
        with np.errstate(divide="ignore"):
            power = spec.c0 * np.power(np.maximum(t_arr, spec.t_min), -spec.alpha)
        out = np.where(t_arr <= spec.t_min, 1.0, power)
        out = np.where(t_arr > spec.t_max, 0.0, out)
    return float(out) if out.ndim == 0 else out


def quantile(spec, u):
    """Inverse of ``exact_tail``: the value of |w| whose tail mass is ``u``.

    ``u`` is in (0, 1]; for the truncated kind, values of ``u`` below the
    atom mass map to ``t_max``.
    """
    u = np.asarray(u, dtype=float)
    kind = spec.kind
    if kind is Kind.GAUSSIAN:
        out = math.sqrt(2.0) * special.erfcinv(u)
    elif kind is Kind.RADEMACHER:
        out = np.ones_like(u)
    else:
        out = spec.t_min * np.power(u, -1.0 / spec.alpha)
        if kind is Kind.TRUNCATED_PARETO_SYMMETRIC:
            out = np.minimum(out, spec.t_max)
    return float(out) if out.ndim == 0 else out


def sample_array(spec, rng, size):
    """Draw an array of i.i.d. entries.

    Magnitudes come from ``quantile`` at uniforms on (0, 1]; signs are an
    independent draw.  The consumption pattern of ``rng`` is fixed for a
    given ``size``, which is what makes streams reproducible.
    """
    u = 1.0 - rng.random(size)
    negative = rng.random(size) < 0.5
    magnitude = np.asarray(quantile(spec, u), dtype=float)
    return np.where(negative, -magnitude, magnitude)


def sample(spec, rng):
    """One draw; advances ``rng`` exactly as ``sample_array(spec, rng, 1)``."""
    return float(sample_array(spec, rng, 1)[0])


def moments(spec):
    """Analytic ``(mean, variance, fourth_moment)``."""
    kind = spec.kind
    if kind is Kind.GAUSSIAN:
        return 0.0, 1.0, 3.0
    if kind is Kind.RADEMACHER:
        return 0.0, 1.0, 1.0
    alpha, c0, s = spec.alpha, spec.c0, spec.t_min
    if kind is Kind.PARETO_SYMMETRIC:
        fourth = math.inf if alpha <= 4 else alpha * s**4 / (alpha - 4.0)
        return 0.0, spec.analytic_variance, fourth
    # E|w|^4 = s^4 + 4 c0 int_s^t_max t^(3-alpha) dt
    t_max = spec.t_max
    if math.isinf(t_max):
        integral = math.inf if alpha <= 4 else s ** (4.0 - alpha) / (alpha - 4.0)
    elif alpha == 4.0:
        integral = math.log(t_max / s)
    else:
        integral = (t_max ** (4.0 - alpha) - s ** (4.0 - alpha)) / (4.0 - alpha)
    return 0.0, spec.analytic_variance, s**4 + 4.0 * c0 * integral


def median_of_means(x, blocks=32):
    """Median of the means of ``blocks`` contiguous, equal-sized blocks.

    Trailing samples that do not fill a block are dropped.
    """
    x = np.asarray(x, dtype=float).ravel()
    size = x.size // blocks
    if size == 0:
        raise PreconditionError(f"need at least {blocks} samples, got {x.size}")
    return float(np.median(x[: size * blocks].reshape(blocks, size).mean(axis=1)))
