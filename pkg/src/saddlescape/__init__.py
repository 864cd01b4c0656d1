"""Gradient-only saddle-point escape: negative-curvature search, accelerated
and stochastic escape loops, analytic landscapes, and verification tools."""

from .core import (
    AdditiveNoiseOracle,
    AlgorithmError,
    Array,
    CountingOracle,
    DivergenceError,
    GradientOracle,
    ParameterError,
    RngStream,
    SmoothnessSpec,
    StochasticOracle,
    Trace,
    TraceRecord,
    gaussian_sample,
    uniform_ball_sample,
)
from .ncfind import (
    NCOutcome,
    NCParams,
    derive_nc_params,
    lemma_decrease_bound,
    nc_find,
    perturb_along_nc,
)
from .ancgd import ANCParams, anc_find_unnormalized, ancgd_run, derive_anc_params, nce_step
from .stochastic import (
    SGDNCParams,
    SNCParams,
    derive_sgdnc_params,
    derive_snc_params,
    sgd_nc_run,
    snc_find,
    snc_find_unnormalized,
)
from .drivers import (
    BaselineParams,
    PGDNCParams,
    derive_pgdnc_params,
    pagd_run,
    pgd_nc_run,
    pgd_run,
    psgd_run,
)
from .testbed import (
    Landscape,
    SaddleInfo,
    VERIFY_IDS,
    get_landscape,
    registry_ids,
    with_noise,
    with_random_quadratic_noise,
)
from .verify import (
    CurvatureReport,
    StationarityVerdict,
    classify,
    dense_hessian,
    dense_hessian_eig,
    fd_quadform,
    grad_power_lambda_min,
)
from .harness import (
    ExperimentConfig,
    ExperimentResult,
    HistogramSummary,
    TrialResult,
    VerifyReport,
    derive_params_for,
    run_dimension_scaling,
    run_experiment,
    run_verify,
)

__version__ = "0.1.0"

__all__ = [
    "AdditiveNoiseOracle",
    "AlgorithmError",
    "ANCParams",
    "Array",
    "BaselineParams",
    "CountingOracle",
    "CurvatureReport",
    "DivergenceError",
    "ExperimentConfig",
    "ExperimentResult",
    "GradientOracle",
    "HistogramSummary",
    "Landscape",
    "NCOutcome",
    "NCParams",
    "ParameterError",
    "PGDNCParams",
    "RngStream",
    "SaddleInfo",
    "VERIFY_IDS",
    "SGDNCParams",
    "SmoothnessSpec",
    "SNCParams",
    "StationarityVerdict",
    "StochasticOracle",
    "Trace",
    "TraceRecord",
    "TrialResult",
    "VerifyReport",
    "anc_find_unnormalized",
    "ancgd_run",
    "classify",
    "dense_hessian",
    "dense_hessian_eig",
    "derive_anc_params",
    "derive_nc_params",
    "derive_pgdnc_params",
    "derive_sgdnc_params",
    "derive_snc_params",
    "fd_quadform",
    "gaussian_sample",
    "get_landscape",
    "grad_power_lambda_min",
    "lemma_decrease_bound",
    "nce_step",
    "nc_find",
    "pagd_run",
    "perturb_along_nc",
    "pgd_nc_run",
    "pgd_run",
    "psgd_run",
    "registry_ids",
    "run_dimension_scaling",
    "run_experiment",
    "derive_params_for",
    "run_verify",
    "sgd_nc_run",
    "snc_find",
    "snc_find_unnormalized",
    "uniform_ball_sample",
    "with_noise",
    "with_random_quadratic_noise",
    "__version__",
]
