"""Copula-based Gaussian kernel dependency measure.

Thin wrapper around the compiled extension; all numerics live in C++.
"""

from ._core import (
    CgkdmError,
    __version__,
    asymptotic_moments,
    cgkdm_bvn,
    dcor,
    estimate,
    estimate_dim2_centered,
    estimate_type_b,
    estimate_type_u,
    estimator_terms,
    exact_null_moments,
    gamma_sq,
    hermite_coeffs,
    kappa,
    kendall,
    lambda_fn,
    load_csv,
    mv_spearman_rho2,
    normalizer,
    pearson,
    population_mc,
    rank_transform,
    run_test,
    sample_mvn,
    sample_mvt,
    sample_scenario,
    simulate_null,
    spearman,
    test_statistic,
)

__all__ = [
    "CgkdmError",
    "__version__",
    "asymptotic_moments",
    "cgkdm_bvn",
    "dcor",
    "estimate",
    "estimate_dim2_centered",
    "estimate_type_b",
    "estimate_type_u",
    "estimator_terms",
    "exact_null_moments",
    "gamma_sq",
    "hermite_coeffs",
    "kappa",
    "kendall",
    "lambda_fn",
    "load_csv",
    "mv_spearman_rho2",
    "normalizer",
    "pearson",
    "population_mc",
    "rank_transform",
    "run_test",
    "sample_mvn",
    "sample_mvt",
    "sample_scenario",
    "simulate_null",
    "spearman",
    "test_statistic",
]
