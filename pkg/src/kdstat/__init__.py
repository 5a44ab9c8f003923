"""
kdstat: group-wise distances and t-tests for high-dimensional homogeneity
and independence.

The distance between two observations is built from low-dimensional
groups of coordinates: ``K(x, x') = (sum_i rho_i(x_(i), x'_(i)))^r``.
Plugged into the energy distance or the distance covariance, it gives
statistics that see differences in group-wise marginal laws, which the
plain Euclidean versions miss as the dimension grows.
"""
from .errors import (
    BandwidthError,
    ConfigurationError,
    DegeneracyError,
    DegenerateSampleError,
    DimensionError,
    IngestionError,
    KdstatError,
    NotPSDError,
    SampleSizeError,
    SingularStatisticError,
)
from .grouped import GroupSpec, SemimetricKind, as_sample, load_csv, load_group_spec
from .homogeneity import (
    HomogeneityResult,
    PowerParams,
    approx_power,
    exact_power_mc,
    homogeneity_from_distances,
    homogeneity_test,
)
from .independence import (
    DependenceResult,
    dependence_from_distances,
    dependence_test,
    local_alt_power,
    mdd_sq_unbiased,
)
from .metrics import ResolvedMetric, cross_distances, kdist, resolve_bandwidths, rho_eval
from .statdist import make_rng, noncentral_t_cdf, t_cdf, t_quantile, t_sf
from .ustat import cdcov_sq, dcov_sq_unbiased, energy_stat, pairwise_distances, u_center, u_inner

__version__ = "0.1.0"

__all__ = [
    "BandwidthError", "ConfigurationError", "DegeneracyError", "DegenerateSampleError",
    "DimensionError", "IngestionError", "KdstatError", "NotPSDError", "SampleSizeError",
    "SingularStatisticError",
    "GroupSpec", "SemimetricKind", "as_sample", "load_csv", "load_group_spec",
    "HomogeneityResult", "PowerParams", "approx_power", "exact_power_mc",
    "homogeneity_from_distances", "homogeneity_test",
    "DependenceResult", "dependence_from_distances", "dependence_test",
    "local_alt_power", "mdd_sq_unbiased",
    "ResolvedMetric", "cross_distances", "kdist", "resolve_bandwidths", "rho_eval",
    "make_rng", "noncentral_t_cdf", "t_cdf", "t_quantile", "t_sf",
    "cdcov_sq", "dcov_sq_unbiased", "energy_stat", "pairwise_distances", "u_center", "u_inner",
]
