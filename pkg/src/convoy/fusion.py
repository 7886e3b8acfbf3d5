"""Fusing prior, crossing-history likelihood, and induced likelihood.

The next-crossing attack probability for a link is the posterior mean of
the propensity:

    P(attack) proportional to  integral of p * L(p; history) * curve(p) * prior(p) dp
    P(clear)  proportional to  the same integral with (1 - p) in place of p

and the two integrals' sum is the normalizing constant. All factors enter
only up to positive constants, which cancel in the ratio.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .data import RegionalDataset, as_history
from .errors import PipelineError
from .induced import CurveConfig, InducedCurve, evaluate_curve, induce_curve
from .likelihood import history_likelihood
from .logit import GaussianPrior, fit_mle, sample_posterior


@dataclass(frozen=True)
class PriorSpec:
    """Prior over the propensity: uniform, or Beta(a, b) with a, b > 0."""

    kind: str = "uniform"
    a: float = 1.0
    b: float = 1.0

    def __post_init__(self):
        if self.kind not in ("uniform", "beta"):
            raise ValueError(f"unknown prior kind {self.kind!r}")
        if not (self.a > 0 and self.b > 0):
            raise ValueError("beta prior needs a > 0 and b > 0")
        if self.kind == "uniform" and (self.a != 1.0 or self.b != 1.0):
            raise ValueError("uniform prior is beta(1, 1); do not set a or b")

    def density(self, p) -> np.ndarray:
        """Unnormalized density p^(a-1) (1-p)^(b-1).

        With a < 1 or b < 1 the density diverges at an endpoint; the
        endpoint value is truncated to 0 there so grid quadrature stays
        finite (the excluded mass is an endpoint sliver).
        """
        arr = np.atleast_1d(np.asarray(p, dtype=float))
        out = np.ones_like(arr)
        if self.a != 1.0:
            with np.errstate(divide="ignore"):
                out = out * arr**(self.a - 1.0)
        if self.b != 1.0:
            with np.errstate(divide="ignore"):
                out = out * (1.0 - arr)**(self.b - 1.0)
        out[~np.isfinite(out)] = 0.0
        return out

    def to_dict(self) -> dict:
        if self.kind == "uniform":
            return {"kind": "uniform"}
        return {"kind": "beta", "a": self.a, "b": self.b}


@dataclass(frozen=True)
class IntegrationGrid:
    """Quadrature rule over [0, 1].

    coarse: 20 right-endpoint points 0.05, 0.10, ..., 1.00 with equal
    weights 0.05, the historical evaluation grid kept for reproduction runs.
    fine: trapezoid rule on a uniform grid (default step 0.001), the default
    everywhere else.
    """

    mode: str = "fine"
    step: float = 0.001

    def __post_init__(self):
        if self.mode not in ("coarse", "fine"):
            raise ValueError(f"unknown integration mode {self.mode!r}")
        if self.mode == "fine" and not (0 < self.step <= 0.5):
            raise ValueError("fine integration step must lie in (0, 0.5]")

    @classmethod
    def coarse(cls) -> "IntegrationGrid":
        return cls(mode="coarse")

    @classmethod
    def fine(cls, step: float = 0.001) -> "IntegrationGrid":
        return cls(mode="fine", step=step)

    def points_and_weights(self):
        if self.mode == "coarse":
            pts = np.arange(1, 21) * 0.05
            wts = np.full(20, 0.05)
            return pts, wts
        count = int(round(1.0 / self.step))
        pts = np.linspace(0.0, 1.0, count + 1)
        wts = np.full(pts.size, self.step)
        wts[0] = wts[-1] = self.step / 2.0
        return pts, wts


@dataclass(frozen=True)
class TabulatedDensity:
    """Grid-tabulated density over p, normalized to unit mass on its grid."""

    ps: np.ndarray
    density: np.ndarray
    quad_weights: np.ndarray

    def mean(self) -> float:
        return float(np.sum(self.ps * self.density * self.quad_weights))


@dataclass(frozen=True)
class LinkAssessment:
    """Fused next-crossing attack probability for one link, with audit fields."""

    p_attack: float
    p_clear: float
    unnormalized_attack: float
    unnormalized_clear: float
    normalizing_constant: float
    link_id: str | None = None
    provenance: dict | None = None

    def to_dict(self) -> dict:
        # serialized field names are part of the wire contract
        return {
            "linkId": self.link_id,
            "pAttack": self.p_attack,
            "pClear": self.p_clear,
            "unnormalizedAttack": self.unnormalized_attack,
            "unnormalizedClear": self.unnormalized_clear,
            "normalizingConstant": self.normalizing_constant,
            "provenance": self.provenance or {},
        }


def posterior_over_p(
    curve: InducedCurve,
    prior: PriorSpec = PriorSpec(),
    grid: IntegrationGrid = IntegrationGrid(),
) -> TabulatedDensity:
    """Tabulate the product curve(p) * prior(p), normalized over the grid."""
    pts, wts = grid.points_and_weights()
    vals = evaluate_curve(curve, pts) * prior.density(pts)
    mass = float(np.sum(vals * wts))
    if not mass > 0:
        raise PipelineError("posterior over p is identically zero on the grid")
    return TabulatedDensity(ps=pts, density=vals / mass, quad_weights=wts)


def assess_link(
    history,
    curve: InducedCurve,
    prior: PriorSpec = PriorSpec(),
    likelihood_kind: str = "adversarial",
    grid: IntegrationGrid = IntegrationGrid(),
    link_id: str | None = None,
    likelihood_scale: float = 1.0,
    likelihood_exponent: float = 1.0,
) -> LinkAssessment:
    """Fuse all evidence about one link into its attack probability.

    likelihood_scale multiplies the history likelihood uniformly; it cancels
    in the ratio and exists to demonstrate exactly that. likelihood_exponent
    raises the history likelihood to a positive power, the minimal
    p-dependent strengthening or discounting of the crossing record, and
    does change the result.
    """
    if not likelihood_scale > 0:
        raise ValueError("likelihood_scale must be positive")
    if not likelihood_exponent > 0:
        raise ValueError("likelihood_exponent must be positive")
    x = as_history(history)
    lik = history_likelihood(likelihood_kind)
    pts, wts = grid.points_and_weights()

    hist_vals = likelihood_scale * np.asarray(lik(pts, x), dtype=float) ** likelihood_exponent
    base = hist_vals * evaluate_curve(curve, pts) * prior.density(pts)
    unnorm_attack = float(np.sum(pts * base * wts))
    unnorm_clear = float(np.sum((1.0 - pts) * base * wts))
    constant = unnorm_attack + unnorm_clear
    if not constant > 0:
        raise PipelineError("zero normalizing constant: no probability mass under the grid")

    p_attack = unnorm_attack / constant
    return LinkAssessment(
        p_attack=p_attack,
        p_clear=1.0 - p_attack,
        unnormalized_attack=unnorm_attack,
        unnormalized_clear=unnorm_clear,
        normalizing_constant=constant,
        link_id=link_id,
        provenance={
            "historyLength": int(x.size),
            "historyIncidents": int(x.sum()),
            "likelihoodKind": likelihood_kind,
            "likelihoodScale": likelihood_scale,
            "likelihoodExponent": likelihood_exponent,
            "prior": prior.to_dict(),
            "integration": {"mode": grid.mode, "step": grid.step},
            "curve": curve.meta(),
        },
    )


def assess_conditional(
    target_link: str,
    observation: str,
    data: RegionalDataset,
    z,
    history,
    prior: PriorSpec = PriorSpec(),
    likelihood_kind: str = "adversarial",
    grid: IntegrationGrid = IntegrationGrid(),
    beta_prior: GaussianPrior = GaussianPrior(),
    iterations: int = 11000,
    burn_in: int = 1000,
    seed: int = 0,
    curve_config: CurveConfig | None = None,
    likelihood_scale: float = 1.0,
    likelihood_exponent: float = 1.0,
) -> LinkAssessment:
    """Attack probability conditioned on a neighboring link's known outcome.

    The conditioning event is carried as the trailing indicator covariate:
    `data` must already contain the indicator column and `z` must end with
    1 (incident observed upstream) or 0 (clear). Stage I runs on the
    expanded dataset, Stage II with the extended covariates, and the fused
    history likelihood may be reweighted via likelihood_scale (cancels) or
    likelihood_exponent (does not).
    """
    if observation not in ("incident", "clear"):
        raise ValueError(f"observation must be 'incident' or 'clear', got {observation!r}")
    zv = np.asarray(z, dtype=float).ravel()
    expected_flag = 1.0 if observation == "incident" else 0.0
    if zv.size == 0 or zv[-1] != expected_flag:
        raise ValueError(
            f"covariate indicator entry is {zv[-1] if zv.size else None!r}; "
            f"observation {observation!r} requires {expected_flag:g}"
        )
    if data.dimension != zv.size:
        raise ValueError(
            f"dataset dimension {data.dimension} does not match covariates of length {zv.size}"
        )

    X = np.asarray(data.covariates, dtype=float)
    degenerate = bool(np.linalg.matrix_rank(X) < X.shape[1])
    if not degenerate:
        # Probe for separation so the conditional run fails loudly rather
        # than sampling a posterior whose likelihood surface has no interior
        # maximum; the probe result itself is unused.
        fit_mle(data)

    draws = sample_posterior(data, beta_prior, iterations=iterations, burn_in=burn_in, seed=seed)
    cfg = curve_config or CurveConfig(seed=seed)
    curve = induce_curve(draws, zv, cfg)
    assessment = assess_link(
        history,
        curve,
        prior=prior,
        likelihood_kind=likelihood_kind,
        grid=grid,
        link_id=target_link,
        likelihood_scale=likelihood_scale,
        likelihood_exponent=likelihood_exponent,
    )
    prov = dict(assessment.provenance or {})
    prov["conditioning"] = {
        "observation": observation,
        "degenerateDesign": degenerate,
        "sampler": {"iterations": iterations, "burnIn": burn_in, "seed": seed},
    }
    return LinkAssessment(
        p_attack=assessment.p_attack,
        p_clear=assessment.p_clear,
        unnormalized_attack=assessment.unnormalized_attack,
        unnormalized_clear=assessment.unnormalized_clear,
        normalizing_constant=assessment.normalizing_constant,
        link_id=target_link,
        provenance=prov,
    )
