"""Heavy-tailed sample covariance lab.

Calibrated entry laws with a power-law tail lower bound, closed-form
lower bounds on ``P(lambda_max((1/n) W W^T) >= K)`` and a seeded Monte
Carlo harness that checks them.
"""

from .bounds import (
    BoundReport,
    Case,
    bonferroni_lower_bound,
    bound_report,
    case_split,
    chain_lower_bound,
    proposition_lower_bound,
    remark2_threshold,
    silverstein_limit,
    silverstein_tail_check,
)
from .distributions import (
    DistributionSpec,
    Kind,
    TailCondition,
    calibrate_pareto,
    calibrate_truncated_pareto,
    exact_tail,
    gaussian_spec,
    moments,
    quantile,
    rademacher_spec,
    sample,
    sample_array,
)
from .errors import (
    EigensolverError,
    InfeasibleParametersError,
    PreconditionError,
    ResourceError,
    RMTLabError,
    TrialError,
)
from .matrix import (
    EnsembleConfig,
    TrialStatistics,
    covariance,
    lambda_max,
    max_row_sq_norm,
    sample_matrix,
)
from .montecarlo import (
    TailEstimate,
    VerificationVerdict,
    clopper_pearson,
    run_trials,
    verify_bound,
)
from .rng import stream

__version__ = "0.1.0"
