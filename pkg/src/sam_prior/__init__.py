"""Self-adapting mixture priors for borrowing historical control data.

The package computes a data-driven mixture weight between an informative
prior built from a historical control arm and a vague prior, forms exact
conjugate mixture posteriors for Beta-binomial and Normal models, and
evaluates frequentist operating characteristics of the resulting trial
designs against standard comparator priors.
"""
from .mixtures import (
    BetaComponent,
    BinarySummary,
    MixtureDistribution,
    NormalComponent,
    NormalSummary,
    beta_log_marginal,
    beta_mixture,
    log_beta_function,
    mixture_cdf,
    mixture_from_dict,
    mixture_mean,
    mixture_quantile,
    mixture_to_dict,
    mixture_update,
    normal_log_marginal,
    normal_mixture,
)
from .sam import (
    SamWeight,
    build_sam_prior,
    estimate_theta_h,
    sam_posterior,
    sam_weight_binary,
    sam_weight_normal,
)
from .comparators import (
    MethodSpec,
    UnsupportedMethodError,
    fixed_mixture_posterior,
    method_spec_from_dict,
    method_spec_to_dict,
    np_posterior,
    power_prior_posterior,
)
from .decision import (
    DecisionResult,
    decide,
    evaluate_decision,
    posterior_point_estimate,
    prob_superiority,
)
from .simulate import (
    CalibrationResult,
    OCMetrics,
    ScenarioSpec,
    analyze_replicate,
    build_historical,
    calibrate_cutoff,
    generate_replicate,
    informative_prior,
    null_scenario,
    relative_metrics,
    replicate_rng,
    run_oc,
    simulate_batch,
    weight_curve,
)

__version__ = "0.1.0"

__all__ = [
    "BetaComponent",
    "NormalComponent",
    "MixtureDistribution",
    "BinarySummary",
    "NormalSummary",
    "beta_mixture",
    "normal_mixture",
    "log_beta_function",
    "beta_log_marginal",
    "normal_log_marginal",
    "mixture_update",
    "mixture_mean",
    "mixture_cdf",
    "mixture_quantile",
    "mixture_to_dict",
    "mixture_from_dict",
    "SamWeight",
    "estimate_theta_h",
    "sam_weight_binary",
    "sam_weight_normal",
    "build_sam_prior",
    "sam_posterior",
    "MethodSpec",
    "UnsupportedMethodError",
    "method_spec_to_dict",
    "method_spec_from_dict",
    "np_posterior",
    "fixed_mixture_posterior",
    "power_prior_posterior",
    "DecisionResult",
    "prob_superiority",
    "decide",
    "posterior_point_estimate",
    "evaluate_decision",
    "ScenarioSpec",
    "CalibrationResult",
    "OCMetrics",
    "build_historical",
    "informative_prior",
    "replicate_rng",
    "generate_replicate",
    "analyze_replicate",
    "calibrate_cutoff",
    "run_oc",
    "weight_curve",
    "relative_metrics",
    "null_scenario",
    "simulate_batch",
    "__version__",
]
