"""Batch runs behind the CLI: verification grids, the light-tail
convergence table and the sampler calibration report."""

import logging
import math
from dataclasses import dataclass, field

import numpy as np

from . import bounds
from .distributions import (
    Kind,
    canonical_spec,
    exact_tail,
    gaussian_spec,
    median_of_means,
    rademacher_spec,
    sample_array,
)
from .errors import PreconditionError
from .matrix import EnsembleConfig
from .montecarlo import DEFAULT_CONFIDENCE, check_spec_range, simulate, verify_bound
from .rng import derive_seed, stream

log = logging.getLogger(__name__)

TAIL_GRID = (1.0, 1.5) + tuple(2.0**k for k in range(1, 11))
CSV_COLUMNS = ("p", "n", "K", "alpha", "bound", "p_hat_row", "p_hat_lambda", "ci_high", "pass")


@dataclass(frozen=True)
class GridConfig:
    alphas: list
    dims: list
    Ks: list
    trials: int
    confidence: float = DEFAULT_CONFIDENCE
    master_seed: int = 0
    t_max: float | None = None

    def __post_init__(self):
        for name in ("alphas", "dims", "Ks"):
            if not getattr(self, name):
                raise PreconditionError(f"grid field {name!r} must be a non-empty list")
        for pair in self.dims:
            if len(pair) != 2:
                raise PreconditionError(f"dims entries must be [p, n] pairs, got {pair!r}")
            p, n = pair
            if not (isinstance(p, int) and isinstance(n, int)) or p < 1 or p > n:
                raise PreconditionError(f"dims entry {pair!r}: need integers with 1 <= p <= n")
        for K in self.Ks:
            if not K >= 1:
                raise PreconditionError(f"K must be >= 1, got {K}")
        if not (isinstance(self.trials, int) and self.trials >= 1):
            raise PreconditionError(f"trials must be a positive integer, got {self.trials!r}")
        if not 0.0 < self.confidence < 1.0:
            raise PreconditionError(f"confidence must lie in (0, 1), got {self.confidence}")

    @classmethod
    def from_dict(cls, data):
        known = {"alphas", "dims", "Ks", "trials", "confidence", "master_seed", "t_max"}
        unknown = set(data) - known
        if unknown:
            raise PreconditionError(f"unknown grid fields: {sorted(unknown)}")
        missing = {"alphas", "dims", "Ks", "trials"} - set(data)
        if missing:
            raise PreconditionError(f"grid is missing fields: {sorted(missing)}")
        data = dict(data)
        data["dims"] = [list(pair) for pair in data["dims"]]
        return cls(**data)

    def cells(self):
        for alpha in self.alphas:
            for p, n in self.dims:
                for K in self.Ks:
                    yield alpha, p, n, K


@dataclass
class GridResult:
    rows: list = field(default_factory=list)
    verdicts: list = field(default_factory=list)
    statistics: list = field(default_factory=list)

    @property
    def all_passed(self):
        return all(row["pass"] for row in self.rows)


def cell_seed(master_seed, alpha, p, n, K):
    return derive_seed(master_seed, "cell", repr(float(alpha)), p, n, repr(float(K)))


def prepare_grid(grid):
    """Calibrate one spec per alpha and check every cell before any simulation."""
    specs = {alpha: canonical_spec(alpha, grid.t_max) for alpha in grid.alphas}
    for alpha, p, n, K in grid.cells():
        try:
            check_spec_range(specs[alpha], n, K)
        except PreconditionError as exc:
            raise PreconditionError(f"cell alpha={alpha}, p={p}, n={n}, K={K}: {exc}") from None
    return specs


def run_grid(grid, threads=None, keep_statistics=False):
    """Run ``verify_bound`` on every cell; each cell has its own seed and trials."""
    specs = prepare_grid(grid)
    result = GridResult()
    for alpha, p, n, K in grid.cells():
        config = EnsembleConfig(p, n, specs[alpha], cell_seed(grid.master_seed, alpha, p, n, K))
        verdict, run = verify_bound(config, K, grid.trials, grid.confidence, threads, return_run=True)
        log.info("alpha=%g p=%d n=%d K=%g margin=%.4g", alpha, p, n, K, verdict.margin)
        report = verdict.bound_report
        result.rows.append(
            {
                "p": p,
                "n": n,
                "K": float(K),
                "alpha": float(alpha),
                "bound": report.proposition_bound,
                "p_hat_row": verdict.row_estimate.p_hat,
                "p_hat_lambda": verdict.lambda_estimate.p_hat,
                "ci_high": min(verdict.row_estimate.ci_high, verdict.lambda_estimate.ci_high),
                "pass": verdict.passed,
            }
        )
        result.verdicts.append(verdict)
        if keep_statistics:
            result.statistics.append(run.statistics)
    return result


def entry_spec(dist, alpha=None, t_max=None):
    if dist == "gaussian":
        return gaussian_spec()
    if dist == "rademacher":
        return rademacher_spec()
    if dist == "pareto":
        if alpha is None:
            raise PreconditionError("--alpha is required for the pareto law")
        return canonical_spec(alpha, t_max)
    raise PreconditionError(f"unknown entry law {dist!r}")


def tail_hypothesis_fails(spec):
    """True when n^4 P(|w| >= n) does not vanish as n grows (power tails with alpha <= 4)."""
    return spec.kind is Kind.PARETO_SYMMETRIC and spec.alpha <= 4


def convergence_table(spec, beta, n_list, trials, master_seed=0, threads=None):
    """Median lambda_max against the light-tail limit for p = round(beta n)."""
    if not 0.0 < beta <= 1.0:
        raise PreconditionError(f"beta must lie in (0, 1] so that p <= n, got {beta}")
    variance = spec.analytic_variance
    rows = []
    for n in n_list:
        p = max(1, round(beta * n))
        config = EnsembleConfig(p, n, spec, derive_seed(master_seed, "convergence", n))
        lams = [s.lambda_max for s in simulate(config, trials, threads=threads)]
        median = float(np.median(lams))
        limit = bounds.silverstein_limit(beta, variance)
        rows.append(
            {
                "n": n,
                "p": p,
                "median_lambda_max": median,
                "limit": limit,
                "relative_error": abs(median - limit) / limit,
                "tail_check": bounds.silverstein_tail_check(spec, n),
            }
        )
    return rows


def calibration_report(spec, samples, master_seed=0, blocks=32):
    """Empirical mean, robust variance and tail frequencies of ``samples`` draws.

    Checks (each recorded with its own pass flag):

    * mean within 5 standard errors of 0 (0.005 at 10^6 draws)
    * median-of-means variance within 0.05 of 1, enforced for alpha >= 3
    * at each grid t, frequency within 4 binomial sigmas of the exact tail
    * at each grid t >= 1 inside the tail bound's range, frequency at least
      ``q - 4 sigma`` with ``q = c0 t^-alpha``
    """
    rng = stream(master_seed, "calibration")
    draws = sample_array(spec, rng, samples)
    mean = float(draws.mean())
    mean_tol = 5.0 / math.sqrt(samples)
    mom_var = median_of_means(draws**2, blocks) - median_of_means(draws, blocks) ** 2
    enforce_var = spec.tail is None or spec.alpha >= 3
    magnitudes = np.sort(np.abs(draws))
    tail_rows = []
    for t in TAIL_GRID:
        if t > spec.t_max:
            continue
        freq = float(samples - np.searchsorted(magnitudes, t, side="left")) / samples
        exact = exact_tail(spec, t)
        band = 4.0 * math.sqrt(exact * (1.0 - exact) / samples)
        row = {"t": t, "exact": exact, "empirical": freq, "matches_exact": abs(freq - exact) <= band}
        if spec.tail is not None:
            q = float(spec.tail.lower_bound(t))
            row["condition_lower"] = q
            row["condition_holds"] = freq >= q - 4.0 * math.sqrt(q * (1.0 - q) / samples)
        tail_rows.append(row)
    checks = {
        "mean": abs(mean) <= mean_tol,
        "variance": (abs(mom_var - 1.0) <= 0.05) if enforce_var else True,
        "tail_matches_exact": all(r["matches_exact"] for r in tail_rows),
        "condition_holds": all(r.get("condition_holds", True) for r in tail_rows),
    }
    return {
        "spec": spec.to_record(),
        "samples": samples,
        "empirical_mean": mean,
        "mean_tolerance": mean_tol,
        "median_of_means_variance": mom_var,
        "variance_enforced": enforce_var,
        "tail": tail_rows,
        "checks": checks,
        "pass": all(checks.values()),
    }
