"""p x n data matrices, their sample covariance and the two statistics per trial."""

from dataclasses import asdict, dataclass

import numpy as np

from . import eigen
from .distributions import DistributionSpec, sample_array
from .errors import PreconditionError, ResourceError
from .rng import stream

DEFAULT_MAX_ENTRIES = 1 << 26  # 512 MiB of float64


@dataclass(frozen=True)
class EnsembleConfig:
    """One matrix ensemble: shape, entry law and master seed."""

    p: int
    n: int
    spec: DistributionSpec
    master_seed: int
    max_entries: int = DEFAULT_MAX_ENTRIES

    def __post_init__(self):
        for name in ("p", "n"):
            value = getattr(self, name)
            if not isinstance(value, (int, np.integer)) or value < 1:
                raise PreconditionError(f"{name} must be a positive integer, got {value!r}")
        if self.p > self.n:
            raise PreconditionError(
                f"p <= n required (got p={self.p}, n={self.n}); "
                "for p > n study the transposed n x p matrix, whose nonzero spectrum is the same"
            )
        _check_budget(self)

    @property
    def beta(self):
        return self.p / self.n


def _check_budget(config):
    if config.p * config.n > config.max_entries:
        raise ResourceError(
            f"{config.p} x {config.n} matrix exceeds the budget of {config.max_entries} entries"
        )


@dataclass(frozen=True)
class TrialStatistics:
    trial_index: int
    lambda_max: float
    max_row_sq_norm: float

    def to_dict(self):
        return asdict(self)


def sample_matrix(config, trial_index):
    """W for one trial, drawn from the stream keyed by (master_seed, trial_index)."""
    _check_budget(config)
    rng = stream(config.master_seed, "trial", int(trial_index))
    return sample_array(config.spec, rng, (config.p, config.n))


def covariance(W, n):
    """Return ``(1/n) W W^T``, symmetrized."""
    W = np.asarray(W, dtype=float)
    if W.ndim != 2 or W.shape[1] != n:
        raise PreconditionError(f"W has shape {W.shape}, expected {n} columns")
    G = (W @ W.T) / n
    return 0.5 * (G + G.T)


def lambda_max(G, tol=1e-12, method="auto"):
    """Largest eigenvalue of the symmetric PSD matrix ``G``.

    Dense LAPACK for p <= 256, Lanczos with full reorthogonalization above;
    ``method`` forces a route (see :func:`rmtlab.eigen.largest_eigenvalue`).
    """
    return eigen.largest_eigenvalue(G, tol=tol, method=method)


def max_row_sq_norm(W):
    """Largest squared Euclidean norm over the rows of ``W``."""
    W = np.asarray(W, dtype=float)
    return float(np.max(np.square(W).sum(axis=1)))


def trial_statistics(config, trial_index, method="auto"):
    W = sample_matrix(config, trial_index)
    return TrialStatistics(
        trial_index=int(trial_index),
        lambda_max=lambda_max(covariance(W, config.n), method=method),
        max_row_sq_norm=max_row_sq_norm(W),
    )
