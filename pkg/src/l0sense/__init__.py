"""l0 cost of one-sparse sensing.

Minimal-cost non-adaptive matrices, adaptive bisection plans, finite-size
lower bounds on the number of nonzero sensing entries, and Monte Carlo
checks of support recovery under Gaussian noise.
"""

from .bounds import (
    BoundReport,
    PackingParams,
    brute_force_min_cost,
    exact_min_binary_cost,
    higher_m_bound,
    ksparse_lower_bound,
    noisy_lower_bound,
    packing_capacity,
)
from .channel import (
    ErrorEstimate,
    MeasurementRecord,
    OneSparseSignal,
    measure,
    ml_decode,
    monte_carlo,
    pairwise_error,
    required_amplitude,
    run_bisection,
    separation_distance,
)
from .errors import (
    ConfigError,
    DomainError,
    InfeasibleError,
    InvalidMatrixError,
    MatrixParseError,
    SensingError,
)
from .matrices import (
    AdaptivePlan,
    CostReport,
    SensingMatrix,
    baseline_matrix,
    bisection_plan,
    grid_packing,
    l0_cost,
    min_cost_binary,
    parse,
    serialize,
)

__version__ = "0.1.0"
