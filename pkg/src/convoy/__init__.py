"""Bayesian decision support for convoys on a hostile road network.

The package fuses three evidence sources into a per-link attack
probability (crossing history, link covariates, regional incident
records), ranks candidate routes by expected utility, and tracks a
convoy's walk across the network while revising the surviving links'
probabilities after every observed crossing.
"""
from .data import (
    RegionalDataset,
    as_history,
    covariate_vector,
    expand_conditioning,
    parse_link_profile,
    parse_regional_csv,
    serialize_regional_csv,
    with_intercept,
)
from .decision import (
    DecisionResult,
    DependencyModel,
    RouteEvaluation,
    UtilitySpec,
    expected_utility,
    recommend,
    route_failure_inclusion_exclusion,
    route_success_independent,
    scale_link_probabilities,
)
from .errors import (
    DegenerateCurveError,
    IllegalObservationError,
    IncoherentModelError,
    PipelineError,
    SeparationError,
    UnreachableSinkError,
)
from .fusion import (
    IntegrationGrid,
    LinkAssessment,
    PriorSpec,
    assess_conditional,
    assess_link,
    posterior_over_p,
)
from .induced import (
    CurveConfig,
    InducedCurve,
    curve_to_csv,
    evaluate_curve,
    flat_curve,
    induce_curve,
    propensity_at,
)
from .likelihood import (
    adversarial_likelihood,
    conventional_likelihood,
    history_likelihood,
    streak_exponent,
)
from .logit import (
    GaussianPrior,
    PosteriorDraws,
    draws_to_csv,
    fit_mle,
    logistic,
    log_unnormalized_posterior,
    sample_posterior,
)
from .network import (
    Link,
    Network,
    Route,
    demo_network,
    enumerate_routes,
    network_from_dict,
    network_from_json,
    network_to_json,
    validate_network,
)
from .pipeline import AssessmentConfig, StageOneCache, assess_from_inputs, stage_one_draws
from .reproduce import Report, run_report
from .sequential import (
    SequentialSession,
    advance,
    continuations,
    create_session,
    reweight_attack_probability,
    session_from_dict,
    session_to_dict,
)

__version__ = "0.1.0"

__all__ = [
    "AssessmentConfig",
    "CurveConfig",
    "DecisionResult",
    "DegenerateCurveError",
    "DependencyModel",
    "GaussianPrior",
    "IllegalObservationError",
    "IncoherentModelError",
    "InducedCurve",
    "IntegrationGrid",
    "Link",
    "LinkAssessment",
    "Network",
    "PipelineError",
    "PosteriorDraws",
    "PriorSpec",
    "RegionalDataset",
    "Report",
    "Route",
    "RouteEvaluation",
    "SeparationError",
    "SequentialSession",
    "StageOneCache",
    "UnreachableSinkError",
    "UtilitySpec",
    "advance",
    "adversarial_likelihood",
    "as_history",
    "assess_conditional",
    "assess_from_inputs",
    "assess_link",
    "continuations",
    "conventional_likelihood",
    "covariate_vector",
    "create_session",
    "curve_to_csv",
    "demo_network",
    "draws_to_csv",
    "enumerate_routes",
    "evaluate_curve",
    "expand_conditioning",
    "expected_utility",
    "fit_mle",
    "flat_curve",
    "history_likelihood",
    "induce_curve",
    "log_unnormalized_posterior",
    "logistic",
    "network_from_dict",
    "network_from_json",
    "network_to_json",
    "parse_link_profile",
    "parse_regional_csv",
    "posterior_over_p",
    "propensity_at",
    "recommend",
    "reweight_attack_probability",
    "route_failure_inclusion_exclusion",
    "route_success_independent",
    "run_report",
    "sample_posterior",
    "scale_link_probabilities",
    "serialize_regional_csv",
    "session_from_dict",
    "session_to_dict",
    "stage_one_draws",
    "streak_exponent",
    "validate_network",
    "with_intercept",
]
