"""Verification toolkit for a generalized reciprocal functional equation and its stability bounds."""

from .controls import ControlFunction, ControlKind, PowerAlpha, closed_form_bound, eval_control, series_bound
from .equation import (
    EquationVariant,
    EvalPoint,
    ReciprocalParams,
    Variant,
    eval_f,
    eval_fractional_power,
    lambda_residual,
    lambda_residual_numeric,
    scaling_check,
    specialize_coefficients,
)
from .errors import (
    ConfigError,
    DegenerateDenominator,
    DivisionByZero,
    DomainError,
    HypothesisViolation,
    ParameterExclusion,
    RootBranchError,
)
from .exact import Rational, binomial, even_binomial_sum, rational_pow
from .hyers import (
    PerturbedReciprocal,
    build_sequence,
    direct_method_iterate,
    empirical_control,
    verify_stability,
)
from .padic import (
    PadicContext,
    c0_condition_check,
    compare_bounds,
    corollary_closed_form,
    nonarch_lambda_norm,
    padic_norm,
    submultiplicative_check,
    theorem41_bound,
    valuation,
)

__version__ = "0.1.0"

__all__ = [
    "ConfigError",
    "ControlFunction",
    "ControlKind",
    "DegenerateDenominator",
    "DivisionByZero",
    "DomainError",
    "EquationVariant",
    "EvalPoint",
    "HypothesisViolation",
    "PadicContext",
    "ParameterExclusion",
    "PerturbedReciprocal",
    "PowerAlpha",
    "Rational",
    "ReciprocalParams",
    "RootBranchError",
    "Variant",
    "binomial",
    "build_sequence",
    "c0_condition_check",
    "closed_form_bound",
    "compare_bounds",
    "corollary_closed_form",
    "direct_method_iterate",
    "empirical_control",
    "eval_control",
    "eval_f",
    "eval_fractional_power",
    "even_binomial_sum",
    "lambda_residual",
    "lambda_residual_numeric",
    "nonarch_lambda_norm",
    "padic_norm",
    "rational_pow",
    "scaling_check",
    "series_bound",
    "specialize_coefficients",
    "submultiplicative_check",
    "theorem41_bound",
    "valuation",
    "verify_stability",
]
