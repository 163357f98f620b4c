"""Difference-in-differences bounds under anticipation."""

from ._core import (
    AntboundsError,
    DataError,
    DgpConfig,
    DomainError,
    IdentifiedInterval,
    NumericalError,
    SignRegime,
    __version__,
    bounded_outcome_set,
    cic_bounds,
    conditional_estimand,
    counterfactual_quantile,
    coverage_study,
    critical_value_cn,
    did_estimand,
    generate_imperfect,
    generate_two_period,
    identified_set_benchmark,
    identified_set_imperfect,
    panel_infer,
    robust_null_check,
    sensitivity_sweep,
    std_normal_cdf,
    std_normal_quantile,
    summary_infer,
    trimming_set,
    tstar,
)

__all__ = [name for name in dir() if not name.startswith("_")] + ["__version__"]
