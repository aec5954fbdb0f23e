"""Python bindings for the stochastic wave equation laboratory."""

from ._core import (  # noqa: F401
    FieldSample,
    GridSpec,
    ModelParams,
    bivariate_upper_orthant,
    canonical_metric,
    dyadic_increment_correlation,
    gaussian_survival,
    increment_variance,
    lil_constant_estimate,
    make_params,
    orthant_zero_closed_form,
    oscillation_lambda_grid,
    oscillation_scan,
    rectangle_increment_variance,
    sample_fbm_crosssection,
    sample_field,
    segment_cross_energy,
    shift_invariance_residual,
    slepian_identity_check,
    utilde_covariance,
    v1_crosssection_covariance,
    v1_fbm_scale_constant,
)

__all__ = [
    "FieldSample",
    "GridSpec",
    "ModelParams",
    "bivariate_upper_orthant",
    "canonical_metric",
    "dyadic_increment_correlation",
    "gaussian_survival",
    "increment_variance",
    "lil_constant_estimate",
    "make_params",
    "orthant_zero_closed_form",
    "oscillation_lambda_grid",
    "oscillation_scan",
    "rectangle_increment_variance",
    "sample_fbm_crosssection",
    "sample_field",
    "segment_cross_energy",
    "shift_invariance_residual",
    "slepian_identity_check",
    "utilde_covariance",
    "v1_crosssection_covariance",
    "v1_fbm_scale_constant",
]
