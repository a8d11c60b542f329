"""Matrix-variate T distribution: local normal approximation, error-decay
study, sampling, and probability-metric estimation."""

__version__ = "0.1.0"

from .matcore import (
    DeltaSpectrum,
    NumericalError,
    SpdMatrix,
    TParams,
    delta_spectrum,
    inv_sqrt,
    load_matrix,
    load_spd,
    save_matrix,
    trace_power,
)
from .specfun import log_gamma, log_multigamma
from .density import (
    in_bulk,
    log_matrix_normal,
    log_matrix_t,
    log_ratio_direct,
    log_ratio_exact,
    log_ratio_from_lambdas,
)
from .expansion import (
    ErrorCurve,
    ExpansionTerms,
    error_exponent_curve,
    expansion_terms,
    sup_error,
    truncated_log_ratio,
)
from .stochastic import (
    MomentReport,
    RestrictedMomentCheck,
    bulk_tail_probability,
    make_rng,
    restricted_moment_check,
    sample_matrix_t,
    sample_wishart,
    trace_moment,
    verify_trace_moments,
    worker_rngs,
)
from .metrics import (
    MetricBound,
    MetricRow,
    hellinger_monte_carlo,
    hellinger_quadrature_1d,
    metric_bound,
    normalization_monte_carlo,
    tv_monte_carlo,
    tv_quadrature_1d,
)

__all__ = [
    "DeltaSpectrum",
    "ErrorCurve",
    "ExpansionTerms",
    "MetricBound",
    "MetricRow",
    "MomentReport",
    "NumericalError",
    "RestrictedMomentCheck",
    "SpdMatrix",
    "TParams",
    "bulk_tail_probability",
    "delta_spectrum",
    "error_exponent_curve",
    "expansion_terms",
    "hellinger_monte_carlo",
    "hellinger_quadrature_1d",
    "in_bulk",
    "inv_sqrt",
    "load_matrix",
    "load_spd",
    "log_gamma",
    "log_matrix_normal",
    "log_matrix_t",
    "log_multigamma",
    "log_ratio_direct",
    "log_ratio_exact",
    "log_ratio_from_lambdas",
    "make_rng",
    "metric_bound",
    "normalization_monte_carlo",
    "restricted_moment_check",
    "sample_matrix_t",
    "sample_wishart",
    "save_matrix",
    "trace_moment",
    "trace_power",
    "truncated_log_ratio",
    "tv_monte_carlo",
    "tv_quadrature_1d",
    "verify_trace_moments",
    "worker_rngs",
]
