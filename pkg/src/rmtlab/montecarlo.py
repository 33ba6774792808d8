"""Seeded trial runner, binomial intervals and bound verification.

Each trial draws its own W from a stream keyed by its index, so the
per-trial statistics (and everything aggregated from them) are the same
whatever the worker count or completion order.
"""

import enum
import json
import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass

from scipy import stats as _stats

from .bounds import BoundReport, bound_report
from .errors import EigensolverError, PreconditionError, RMTLabError, TrialError
from .matrix import TrialStatistics, trial_statistics

DEFAULT_CONFIDENCE = 0.999
CLOSING_RTOL = 1e-10
THREADS_ENV = "RMT_THREADS"


class Event(str, enum.Enum):
    LAMBDA_MAX_GE_K = "lambda_max_ge_K"
    ROW_NORM_GE_KN = "row_norm_ge_Kn"


class ClosingInequalityViolation(RMTLabError, AssertionError):
    """lambda_max < max_row_sq_norm / n beyond rounding: the eigensolver is wrong."""


def _bisect(f, lo, hi, iterations=200):
    # f is increasing on [lo, hi] with f(lo) <= 0 <= f(hi)
    for _ in range(iterations):
        mid = 0.5 * (lo + hi)
        if mid in (lo, hi):
            break
        if f(mid) < 0.0:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def clopper_pearson(successes, trials, confidence=0.95):
    """Exact two-sided binomial interval by bisection on the binomial CDF.

    ``low`` solves ``P(X >= k | p) = (1 - confidence) / 2`` and ``high`` solves
    ``P(X <= k | p) = (1 - confidence) / 2``; ``low = 0`` at ``k = 0`` and
    ``high = 1`` at ``k = trials``.
    """
    if not 0 <= successes <= trials or trials < 1:
        raise PreconditionError(f"need 0 <= successes <= trials, trials >= 1; got {successes}/{trials}")
    if not 0.0 < confidence < 1.0:
        raise PreconditionError(f"confidence must lie in (0, 1), got {confidence}")
    tail = 0.5 * (1.0 - confidence)
    binom = _stats.binom
    if successes == 0:
        low = 0.0
    else:
        low = _bisect(lambda r: binom.sf(successes - 1, trials, r) - tail, 0.0, 1.0)
    if successes == trials:
        high = 1.0
    else:
        high = _bisect(lambda r: tail - binom.cdf(successes, trials, r), 0.0, 1.0)
    return low, high


@dataclass(frozen=True)
class TailEstimate:
    event: Event
    successes: int
    trials: int
    p_hat: float
    ci_low: float
    ci_high: float
    confidence: float

    @classmethod
    def from_counts(cls, event, successes, trials, confidence=DEFAULT_CONFIDENCE):
        low, high = clopper_pearson(successes, trials, confidence)
        p_hat = successes / trials
        # bisection endpoints can straddle p_hat by an ulp
        return cls(Event(event), successes, trials, p_hat, min(low, p_hat), max(high, p_hat), confidence)

    def to_dict(self):
        d = asdict(self)
        d["event"] = self.event.value
        return d


@dataclass(frozen=True)
class TrialRun:
    """Both tail estimates for one K, plus the per-trial statistics they came from."""

    lambda_estimate: TailEstimate
    row_estimate: TailEstimate
    statistics: list

    def summary(self):
        lams = [s.lambda_max for s in self.statistics]
        rows = [s.max_row_sq_norm for s in self.statistics]
        return {
            "trials": len(self.statistics),
            "lambda_max_min": min(lams),
            "lambda_max_max": max(lams),
            "max_row_sq_norm_max": max(rows),
            "estimates": [self.lambda_estimate.to_dict(), self.row_estimate.to_dict()],
        }


@dataclass(frozen=True)
class VerificationVerdict:
    bound_report: BoundReport
    lambda_estimate: TailEstimate
    row_estimate: TailEstimate
    margin: float

    @property
    def estimates(self):
        return self.lambda_estimate, self.row_estimate

    @property
    def passed(self):
        return self.margin >= 0.0

    def to_dict(self):
        return {
            "bound_report": self.bound_report.to_dict(),
            "estimates": [e.to_dict() for e in self.estimates],
            "pass": self.passed,
            "margin": self.margin,
        }


def resolve_threads(threads=None):
    if threads is None:
        env = os.environ.get(THREADS_ENV)
        threads = int(env) if env else (os.cpu_count() or 1)
    return max(1, int(threads))


def check_closing_inequality(stat, n, rtol=CLOSING_RTOL):
    if stat.lambda_max < (stat.max_row_sq_norm / n) * (1.0 - rtol):
        raise ClosingInequalityViolation(
            f"trial {stat.trial_index}: lambda_max {stat.lambda_max!r} < "
            f"max_row_sq_norm / n = {stat.max_row_sq_norm / n!r}"
        )


def _run_chunk(config, indices):
    out = []
    for i in indices:
        try:
            stat = trial_statistics(config, i)
        except EigensolverError as exc:
            raise TrialError(i, exc) from exc
        check_closing_inequality(stat, config.n)
        out.append(stat)
    return out


def simulate(config, trials, threads=None, first_trial=0):
    """Per-trial statistics for trials ``first_trial .. first_trial + trials - 1``, in index order."""
    if trials < 1:
        raise PreconditionError(f"trials must be >= 1, got {trials}")
    indices = range(first_trial, first_trial + trials)
    workers = min(resolve_threads(threads), trials)
    if workers == 1:
        return _run_chunk(config, indices)
    chunk = math.ceil(trials / (4 * workers))
    chunks = [indices[i : i + chunk] for i in range(0, trials, chunk)]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        parts = pool.map(lambda idx: _run_chunk(config, idx), chunks)
        return [s for part in parts for s in part]


def estimate(statistics, n, K, confidence=DEFAULT_CONFIDENCE):
    """Tail estimates of both events at threshold K from stored statistics."""
    if not K >= 1:
        raise PreconditionError(f"K must be >= 1, got K={K}")
    trials = len(statistics)
    lam = sum(1 for s in statistics if s.lambda_max >= K)
    row = sum(1 for s in statistics if s.max_row_sq_norm >= K * n)
    return (
        TailEstimate.from_counts(Event.LAMBDA_MAX_GE_K, lam, trials, confidence),
        TailEstimate.from_counts(Event.ROW_NORM_GE_KN, row, trials, confidence),
    )


def run_trials(config, K, trials, confidence=DEFAULT_CONFIDENCE, threads=None):
    """Estimate P(lambda_max >= K) and P(max row sq. norm >= Kn) from ``trials`` trials."""
    if not K >= 1:
        raise PreconditionError(f"K must be >= 1, got K={K}")
    statistics = simulate(config, trials, threads=threads)
    lam, row = estimate(statistics, config.n, K, confidence)
    return TrialRun(lam, row, statistics)


def check_spec_range(spec, n, K):
    """Reject thresholds where the tail bound of ``spec`` is not guaranteed."""
    t = math.sqrt(n * K)
    if spec.tail is not None and t > spec.t_max:
        raise PreconditionError(
            f"sqrt(nK) = {t:.6g} exceeds the truncation limit t_max = {spec.t_max:.6g}; "
            "the tail bound does not hold there"
        )


def verdict_from_run(report, run):
    bound = report.proposition_bound if report.proposition_bound is not None else 0.0
    margin = min(run.lambda_estimate.ci_high, run.row_estimate.ci_high) - bound
    return VerificationVerdict(report, run.lambda_estimate, run.row_estimate, margin)


def verify_bound(config, K, trials, confidence=DEFAULT_CONFIDENCE, threads=None, return_run=False):
    """Check the closed-form bound against Monte Carlo for both events.

    Passes iff the proposition bound does not exceed the upper confidence
    endpoint of either event.  For laws without a tail condition the bound
    is not defined and the verdict passes vacuously.
    """
    if not K >= 1:
        raise PreconditionError(f"K must be >= 1, got K={K}")
    check_spec_range(config.spec, config.n, K)
    report = bound_report(config.p, config.n, K, config.spec)
    run = run_trials(config, K, trials, confidence, threads)
    verdict = verdict_from_run(report, run)
    return (verdict, run) if return_run else verdict


def write_jsonl(statistics, path):
    with open(path, "w") as fh:
        for s in statistics:
            fh.write(json.dumps(s.to_dict()) + "\n")


def read_jsonl(path):
    with open(path) as fh:
        return [TrialStatistics(**json.loads(line)) for line in fh if line.strip()]
