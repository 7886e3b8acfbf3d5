"""One-shot reproduction report against the published reference values.

Runs the whole pipeline under reference-compatible settings (coarse 0.05
grid, 60 curve samples, window-5 smoothing, uniform propensity prior,
Gaussian(0, 10) coefficient priors, 10,000 retained draws after 1,000
burn-in, 2-decimal scaled marginals) and prints each reference value next
to the computed one.

Deterministic rows (decision layer, closed forms) are hard pass/fail.
Statistical rows (sampler summaries, fused probability) carry tolerances
but a miss is reported, not fatal; Monte Carlo settings and curve
construction freedoms make them soft by nature.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass

from .data import with_intercept
from .decision import UtilitySpec, recommend, scale_link_probabilities
from .fixtures import REFERENCE_ATTACK_PROBABILITY, reference_link_profile, regional_dataset
from .fusion import IntegrationGrid, PriorSpec, assess_link
from .induced import flat_curve
from .logit import fit_mle, sample_skewness
from .network import demo_network
from .pipeline import AssessmentConfig, assess_from_inputs, stage_one_draws

REFERENCE_ML_MAGNITUDES = (1.811, 1.817, 3.299, 4.402, 1.311)
REFERENCE_BAYES_MEANS = (0.635, 1.583, 3.584, 4.382, 1.579)
REFERENCE_UNNORMALIZED = {"attack": 0.129, "clear": 0.293, "constant": 0.422}
# keyed by route link sequence; values are (success, expected utility at x=100)
REFERENCE_ROUTE_VALUES = {
    ("1", "2", "9"): (0.444, 0.414),
    ("1", "2", "3", "4", "5", "6", "7", "8"): (0.441, 0.361),
    ("1", "2", "3", "4", "10"): (0.480, 0.430),
}

DETERMINISTIC = "deterministic"
STATISTICAL = "statistical"
INFORMATIONAL = "informational"


@dataclass(frozen=True)
class ReportRow:
    name: str
    reference: object
    computed: object
    tolerance: float | None
    category: str
    passed: bool | None
    note: str = ""

    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "reference": self.reference,
            "computed": self.computed,
            "tolerance": self.tolerance,
            "category": self.category,
            "passed": self.passed,
            "note": self.note,
        }


@dataclass(frozen=True)
class Report:
    rows: tuple
    meta: dict

    def deterministic_ok(self) -> bool:
        return all(r.passed for r in self.rows if r.category == DETERMINISTIC)

    def to_dict(self) -> dict:
        return {"meta": self.meta, "rows": [r.to_dict() for r in self.rows]}

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2)

    def render_text(self) -> str:
        lines = []
        lines.append("reproduction report")
        lines.append(
            "settings: " + ", ".join(f"{k}={v}" for k, v in self.meta.items())
        )
        header = f"{'row':44s} {'reference':>12s} {'computed':>12s} {'tol':>8s}  status"
        lines.append(header)
        lines.append("-" * len(header))
        for r in self.rows:
            if r.passed is None:
                status = "info"
            elif r.passed:
                status = "PASS"
            elif r.category == STATISTICAL:
                status = "MISS (soft)"
            else:
                status = "FAIL"
            ref = _fmt(r.reference)
            comp = _fmt(r.computed)
            tol = "" if r.tolerance is None else f"{r.tolerance:g}"
            line = f"{r.name:44s} {ref:>12s} {comp:>12s} {tol:>8s}  {status}"
            if r.note:
                line += f"  ({r.note})"
            lines.append(line)
        verdict = "all deterministic rows pass" if self.deterministic_ok() else "DETERMINISTIC FAILURES PRESENT"
        lines.append(verdict)
        return "\n".join(lines)


def _fmt(value) -> str:
    if isinstance(value, float):
        return f"{value:.4f}"
    if isinstance(value, (tuple, list)):
        return "(" + ",".join(str(v) for v in value) + ")"
    return str(value)


def run_report(
    seed: int = 1,
    iterations: int = 11000,
    burn_in: int = 1000,
    sample_count: int = 60,
    window: int = 5,
    fine_integration: bool = False,
) -> Report:
    rows = []
    data = regional_dataset()
    full = with_intercept(data)
    grid = IntegrationGrid.fine() if fine_integration else IntegrationGrid.coarse()

    # Maximum-likelihood comparison. The reference row prints magnitudes
    # only; the fit's own optimality is certified by its score equations.
    mle, diag = fit_mle(full)
    for u, ref in enumerate(REFERENCE_ML_MAGNITUDES):
        rows.append(
            ReportRow(
                name=f"ml coefficient magnitude b{u}",
                reference=ref,
                computed=float(abs(mle[u])),
                tolerance=0.2,
                category=DETERMINISTIC,
                passed=bool(abs(abs(mle[u]) - ref) <= 0.2),
                note=f"signed fit {mle[u]:+.4f}",
            )
        )
    rows.append(
        ReportRow(
            name="ml gradient max-norm",
            reference=0.0,
            computed=diag["gradient_norm"],
            tolerance=1e-8,
            category=DETERMINISTIC,
            passed=bool(diag["gradient_norm"] <= 1e-8),
            note="stationarity of the fit",
        )
    )

    # Posterior sampling summaries.
    config = AssessmentConfig(
        grid=grid,
        iterations=iterations,
        burn_in=burn_in,
        seed=seed,
        sample_count=sample_count,
        window=window,
    )
    draws, _ = stage_one_draws(data, config)
    means = draws.means()
    for u, ref in enumerate(REFERENCE_BAYES_MEANS):
        rows.append(
            ReportRow(
                name=f"posterior mean b{u}",
                reference=ref,
                computed=float(means[u]),
                tolerance=0.5,
                category=STATISTICAL,
                passed=bool(abs(abs(means[u]) - ref) <= 0.5),
                note="compared on magnitudes; reference row appears unsigned",
            )
        )
    for u in (1, 3):
        skew = sample_skewness(draws.betas[:, u])
        rows.append(
            ReportRow(
                name=f"posterior skewness b{u} negative",
                reference="< 0",
                computed=float(skew),
                tolerance=None,
                category=STATISTICAL,
                passed=bool(skew < 0),
            )
        )

    # Fused attack probability for the reference link.
    profile = reference_link_profile()
    assessment, _ = assess_from_inputs(
        data, profile["covariates"], profile["history"], config=config, link_id=profile["link"]
    )
    rows.append(
        ReportRow(
            name="fused attack probability, reference link",
            reference=REFERENCE_ATTACK_PROBABILITY,
            computed=assessment.p_attack,
            tolerance=0.10,
            category=STATISTICAL,
            passed=bool(abs(assessment.p_attack - REFERENCE_ATTACK_PROBABILITY) <= 0.10),
            note="curve construction freedom is the accepted deviation channel",
        )
    )
    for key, computed in (
        ("attack", assessment.unnormalized_attack),
        ("clear", assessment.unnormalized_clear),
        ("constant", assessment.normalizing_constant),
    ):
        rows.append(
            ReportRow(
                name=f"unnormalized {key} component",
                reference=REFERENCE_UNNORMALIZED[key],
                computed=float(computed),
                tolerance=None,
                category=INFORMATIONAL,
                passed=None,
                note="scale depends on curve normalization; logged for audit",
            )
        )

    # Decision layer, fully deterministic from the published reference
    # probability and the 2-decimal scaled marginals.
    net = demo_network()
    marginals = scale_link_probabilities(net, "9", REFERENCE_ATTACK_PROBABILITY, round_2dp=True)
    result100 = recommend(net, marginals, utility=UtilitySpec("length-penalty", 100.0))
    for entry in result100.per_route:
        ref_s, ref_u = REFERENCE_ROUTE_VALUES[tuple(entry.route.link_ids)]
        label = "-".join(entry.route.link_ids)
        rows.append(
            ReportRow(
                name=f"route {label} success probability",
                reference=ref_s,
                computed=entry.p_success,
                tolerance=1e-3,
                category=DETERMINISTIC,
                passed=bool(abs(entry.p_success - ref_s) < 1e-3),
            )
        )
        rows.append(
            ReportRow(
                name=f"route {label} expected utility (x=100)",
                reference=ref_u,
                computed=entry.expected_utility,
                tolerance=1e-3,
                category=DETERMINISTIC,
                passed=bool(abs(entry.expected_utility - ref_u) < 1e-3),
            )
        )
    rows.append(
        ReportRow(
            name="recommended route (x=100)",
            reference="1-2-3-4-10",
            computed="-".join(result100.recommended_route.link_ids),
            tolerance=None,
            category=DETERMINISTIC,
            passed=bool(result100.recommended_route.link_ids == ("1", "2", "3", "4", "10")),
        )
    )
    result10 = recommend(net, marginals, utility=UtilitySpec("length-penalty", 10.0))
    rows.append(
        ReportRow(
            name="recommended route (x=10)",
            reference="1-2-9",
            computed="-".join(result10.recommended_route.link_ids),
            tolerance=None,
            category=DETERMINISTIC,
            passed=bool(result10.recommended_route.link_ids == ("1", "2", "9")),
        )
    )

    # Closed-form oracles on the active grid.
    tol_adv = 1e-4 if fine_integration else 2e-2
    target_adv = 1.0 / (2.0 + math.sqrt(2.0))
    got_adv = assess_link([0, 0, 0, 0], flat_curve(), prior=PriorSpec(), grid=grid).p_attack
    rows.append(
        ReportRow(
            name="closed form: flat curve, 4 clear, adversarial",
            reference=target_adv,
            computed=got_adv,
            tolerance=tol_adv,
            category=DETERMINISTIC,
            passed=bool(abs(got_adv - target_adv) <= tol_adv),
        )
    )
    for n, tol_conv in ((1, 1e-4 if fine_integration else 2e-2), (10, 1e-4 if fine_integration else 3e-2)):
        target = 1.0 / (n + 2.0)
        got = assess_link(
            [0] * n, flat_curve(), prior=PriorSpec(), likelihood_kind="conventional", grid=grid
        ).p_attack
        rows.append(
            ReportRow(
                name=f"closed form: flat curve, {n} clear, conventional",
                reference=target,
                computed=got,
                tolerance=tol_conv,
                category=DETERMINISTIC,
                passed=bool(abs(got - target) <= tol_conv),
                note="" if fine_integration else "coarse-grid quadrature bias included in tolerance",
            )
        )

    meta = {
        "seed": seed,
        "iterations": iterations,
        "burn_in": burn_in,
        "samples": sample_count,
        "window": window,
        "grid": grid.mode,
    }
    return Report(rows=tuple(rows), meta=meta)
