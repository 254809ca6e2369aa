"""Truncation dimensions and truncation-error bounds for weighted anchored spaces."""

from .core import (
    DEFAULT_TOL,
    Bracket,
    ExplicitWeights,
    Exponent,
    ProductWeights,
    as_exponent,
    conjugate,
    log_one_plus_product,
    log_one_plus_product_bracket,
    tail_power_bracket,
    tail_power_sum,
)
from .embeddings import EmbeddingNorm, corner_norm, interpolated_bound
from .errors import (
    ConfigError,
    DimensionTooLarge,
    DivergenceError,
    DivergentIntegral,
    DivergentProduct,
    DivergentTail,
    IncompatibleSpec,
    InvalidIndex,
    NoConvergence,
    NonMonotoneWeights,
    TruncdimError,
    Unreachable,
)
from .kernels import (
    AnchoredStep,
    Approximation,
    ConstantResult,
    Custom,
    Exponential,
    Integration,
    PolyExp,
    ProblemSpec,
    SmoothG,
    Uniform01,
    gamma_function,
    CHECK_GRID,
    kappa_bar_norm,
    kappa_hat,
    kappa_tilde,
)
from .oracle import corner_norm_oracle, subset_sum_oracle
from .quadrature import adaptive_quadrature, numerical_sup
from .truncation import (
    DimensionResult,
    TruncationReport,
    combined_error,
    trunc_bound,
    trunc_bound_general,
    trunc_bound_product,
    truncation_dimension,
)

__version__ = "0.1.0"
