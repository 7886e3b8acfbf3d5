"""Error types shared across the assessment pipeline."""
from __future__ import annotations


class PipelineError(Exception):
    """Numeric or model failure inside the pipeline (not a caller mistake)."""

    code = "pipeline_error"


class SeparationError(PipelineError):
    """Logistic fit diverged; the data are (quasi-)separated."""

    code = "possible_separation"


class DegenerateCurveError(PipelineError):
    """Every induced-likelihood weight collapsed to zero."""

    code = "degenerate_density"


class IncoherentModelError(PipelineError):
    """Dependency model implies a probability outside [0, 1]."""

    code = "incoherent_dependency_model"


class IllegalObservationError(PipelineError):
    """Observation does not match the session's current position."""

    code = "illegal_observation"


class UnreachableSinkError(ValueError):
    """No route exists from source to sink; a malformed-input condition."""
