"""Closed-form lower bounds on P(lambda_max(Gamma_n) >= K) and the quantities behind them.

Notation: ``q = P(w^2 >= nK)`` is the probability that one entry alone
pushes its row over the threshold, and ``x = (n/2) q`` the per-row
lower bound that the union argument gives.
"""

import enum
import math
from dataclasses import dataclass

from .distributions import exact_tail, moments
from .errors import PreconditionError


class Case(str, enum.Enum):
    CASE1 = "case1"  # (n/2) q < 1/p
    CASE2 = "case2"  # (n/2) q >= 1/p


@dataclass(frozen=True)
class BoundReport:
    p: int
    n: int
    K: float
    q: float
    proposition_bound: float | None
    bonferroni_bound: float
    chain_bound: float
    case_label: Case
    silverstein_limit: float

    def to_dict(self):
        return {
            "p": self.p,
            "n": self.n,
            "K": self.K,
            "q": self.q,
            "proposition_bound": self.proposition_bound,
            "bonferroni_bound": self.bonferroni_bound,
            "chain_bound": self.chain_bound,
            "case_label": self.case_label.value,
            "silverstein_limit": self.silverstein_limit,
        }


def _check_dims(p, n):
    if p < 1 or n < 1:
        raise PreconditionError(f"p and n must be positive, got p={p}, n={n}")
    if p > n:
        raise PreconditionError(f"p <= n required (got p={p}, n={n}); transpose W for p > n")


def _check_probability(q):
    if not 0.0 <= q <= 1.0:
        raise PreconditionError(f"q must be a probability, got {q}")


def proposition_lower_bound(p, n, K, tail):
    """``min{c0 p / (4 n^(alpha/2 - 1) K^(alpha/2)), 1/2}``.

    Valid for every ``K >= 1`` whenever the entry law has zero mean, unit
    variance and tail ``P(|w| >= t) >= c0 t^-alpha`` at ``t = sqrt(nK)``.
    """
    if not K >= 1:
        raise PreconditionError(f"K must be >= 1 (the bound is stated for K >= 1), got K={K}")
    _check_dims(p, n)
    half_alpha = tail.alpha / 2.0
    value = tail.c0 * p / (4.0 * n ** (half_alpha - 1.0) * K**half_alpha)
    return min(value, 0.5)


def bonferroni_lower_bound(n, q):
    """Second-order inclusion-exclusion bound on the union of n independent events of mass q.

    ``n q - C(n, 2) q^2 = (n/2) q (2 - (n - 1) q)``, clamped at 0.
    """
    _check_probability(q)
    return max(0.0, 0.5 * n * q * (2.0 - (n - 1) * q))


def chain_lower_bound(p, n, q):
    """``1 - (1 - x)^p`` with ``x = min{(n/2) q, 1}``."""
    _check_probability(q)
    x = min(0.5 * n * q, 1.0)
    return -math.expm1(p * math.log1p(-x)) if x < 1.0 else 1.0


TIE_RTOL = 1e-12


def case_split(p, n, q):
    """Which branch of the argument applies.

    The tie ``(n/2) q = 1/p`` goes to case 2, and so does anything within
    ``TIE_RTOL`` of it, so that ties survive rounding of ``q``.
    """
    return Case.CASE2 if p * n * q >= 2.0 * (1.0 - TIE_RTOL) else Case.CASE1


def remark2_threshold(n, K, tail):
    """Smallest ``p0`` with ``p >= p0`` guaranteeing case 2 under tail equality.

    In exact arithmetic ``p0 = ceil((2/c0) K^(alpha/2) n^(alpha/2 - 1))``.  The
    guarantee is stated for ``alpha < 4``; outside that range the value is
    still returned.  The closed form is corrected by at most a step or two so
    that it agrees with :func:`case_split` evaluated at
    ``q = c0 (nK)^(-alpha/2)``, whatever the rounding.
    """
    if not K >= 1:
        raise PreconditionError(f"K must be >= 1, got K={K}")
    half_alpha = tail.alpha / 2.0
    p0 = max(1, math.ceil((2.0 / tail.c0) * K**half_alpha * n ** (half_alpha - 1.0)))
    q = min(1.0, tail.c0 * math.sqrt(n * K) ** -tail.alpha)
    while case_split(p0, n, q) is Case.CASE1:
        p0 += 1
    while p0 > 1 and case_split(p0 - 1, n, q) is Case.CASE2:
        p0 -= 1
    return p0


def silverstein_limit(beta, variance=1.0):
    """``(1 + sqrt(beta))^2 * variance``, the limit of lambda_max for light tails."""
    if beta < 0:
        raise PreconditionError(f"aspect ratio must be non-negative, got {beta}")
    return (1.0 + math.sqrt(beta)) ** 2 * variance


def silverstein_tail_check(spec, n):
    """``n^4 P(|w| >= n)``: vanishes for the light-tailed regime of the limit theorem."""
    if n < 1:
        raise PreconditionError(f"n must be >= 1, got {n}")
    return n**4 * exact_tail(spec, float(n))


def row_event_probability(spec, n, K):
    """``q = P(w^2 >= nK)`` from the exact tail of ``spec``."""
    return exact_tail(spec, math.sqrt(n * K))


def bound_report(p, n, K, spec, tail=None):
    """All bound quantities at ``(p, n, K)``.

    ``q`` always comes from the exact tail of ``spec``.  ``tail`` overrides
    the tail parameters fed to the proposition bound (defaults to those of
    ``spec``); with neither available the proposition bound is ``None``.
    """
    if not K >= 1:
        raise PreconditionError(f"K must be >= 1, got K={K}")
    _check_dims(p, n)
    tail = tail if tail is not None else spec.tail
    q = row_event_probability(spec, n, K)
    return BoundReport(
        p=p,
        n=n,
        K=K,
        q=q,
        proposition_bound=None if tail is None else proposition_lower_bound(p, n, K, tail),
        bonferroni_bound=bonferroni_lower_bound(n, q),
        chain_bound=chain_lower_bound(p, n, q),
        case_label=case_split(p, n, q),
        silverstein_limit=silverstein_limit(p / n, moments(spec)[1]),
    )
