"""Fusion layer: priors, quadrature grids, and per-link assessment."""
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from convoy.data import expand_conditioning, with_intercept
from convoy.errors import PipelineError, SeparationError
from convoy.fixtures import regional_dataset
from convoy.fusion import (
    IntegrationGrid,
    PriorSpec,
    assess_conditional,
    assess_link,
    posterior_over_p,
)
from convoy.induced import InducedCurve, flat_curve
from convoy.likelihood import history_likelihood

FINE = IntegrationGrid.fine()
COARSE = IntegrationGrid.coarse()
FLAT = flat_curve()


def spike_curve(center: float, width: float = 0.01) -> InducedCurve:
    # triangle bump at `center`, zero elsewhere via flat extension
    ps = np.array([center - width, center, center + width])
    ws = np.array([0.0, 1.0, 0.0])
    return InducedCurve(ps=ps, weights=ws, sample_count=3, window=1)


def test_prior_validation():
    PriorSpec()
    PriorSpec(kind="beta", a=2.0, b=5.0)
    with pytest.raises(ValueError):
        PriorSpec(kind="jeffreys")
    with pytest.raises(ValueError):
        PriorSpec(kind="beta", a=0.0, b=1.0)
    with pytest.raises(ValueError):
        PriorSpec(kind="beta", a=1.0, b=-2.0)
    with pytest.raises(ValueError):
        PriorSpec(kind="uniform", a=2.0)


def test_prior_densities():
    ps = np.array([0.0, 0.25, 0.5, 1.0])
    assert np.array_equal(PriorSpec().density(ps), np.ones(4))
    beta21 = PriorSpec(kind="beta", a=2.0, b=1.0)
    assert np.allclose(beta21.density(ps), ps)
    # divergent endpoints are truncated to zero so quadrature stays finite
    half = PriorSpec(kind="beta", a=0.5, b=0.5)
    vals = half.density(ps)
    assert vals[0] == 0.0 and vals[-1] == 0.0
    assert np.all(np.isfinite(vals))


def test_prior_serialization():
    assert PriorSpec().to_dict() == {"kind": "uniform"}
    assert PriorSpec(kind="beta", a=3.0, b=2.0).to_dict() == {"kind": "beta", "a": 3.0, "b": 2.0}


def test_grid_validation():
    with pytest.raises(ValueError):
        IntegrationGrid(mode="simpson")
    with pytest.raises(ValueError):
        IntegrationGrid(mode="fine", step=0.0)
    with pytest.raises(ValueError):
        IntegrationGrid(mode="fine", step=0.7)


def test_coarse_grid_points():
    pts, wts = COARSE.points_and_weights()
    assert np.allclose(pts, np.arange(1, 21) * 0.05)
    assert np.array_equal(wts, np.full(20, 0.05))
    assert pts[0] == pytest.approx(0.05) and pts[-1] == pytest.approx(1.0)


def test_fine_grid_is_trapezoid():
    pts, wts = IntegrationGrid.fine(0.25).points_and_weights()
    assert np.allclose(pts, [0.0, 0.25, 0.5, 0.75, 1.0])
    assert np.allclose(wts, [0.125, 0.25, 0.25, 0.25, 0.125])
    # unit mass, and exact for linear integrands
    assert float(np.sum(wts)) == pytest.approx(1.0, abs=1e-12)
    assert float(np.sum(pts * wts)) == pytest.approx(0.5, abs=1e-12)


def test_posterior_over_p_flat_uniform():
    tab = posterior_over_p(FLAT, PriorSpec(), FINE)
    assert np.allclose(tab.density, 1.0)
    assert tab.mean() == pytest.approx(0.5, abs=1e-12)


def test_posterior_over_p_beta_mean():
    # flat curve leaves the beta(2,1) prior untouched; its mean is 2/3
    tab = posterior_over_p(FLAT, PriorSpec(kind="beta", a=2.0, b=1.0), FINE)
    assert tab.mean() == pytest.approx(2.0 / 3.0, abs=1e-6)


def test_posterior_over_p_concentrates():
    tab = posterior_over_p(spike_curve(0.7), PriorSpec(), FINE)
    assert tab.mean() == pytest.approx(0.7, abs=1e-3)
    mass = float(np.sum(tab.density * tab.quad_weights))
    assert mass == pytest.approx(1.0, abs=1e-12)


def test_posterior_over_p_zero_mass():
    dead = InducedCurve(
        ps=np.array([0.0, 1.0]),
        weights=np.zeros(2),
        sample_count=2,
        window=1,
        normalization="unscaled",
    )
    with pytest.raises(PipelineError):
        posterior_over_p(dead, PriorSpec(), FINE)


def test_all_clear_closed_forms_fine():
    # all-clear histories admit exact posterior means under a flat curve
    # and uniform prior: 1 / (n^(1/n) + 2) discounted, 1 / (n + 2) classical
    for n in range(1, 11):
        history = [0] * n
        adv = assess_link(history, FLAT, grid=FINE)
        con = assess_link(history, FLAT, likelihood_kind="conventional", grid=FINE)
        assert adv.p_attack == pytest.approx(1.0 / (n ** (1.0 / n) + 2.0), abs=1e-4)
        assert con.p_attack == pytest.approx(1.0 / (n + 2.0), abs=1e-4)


def test_all_clear_closed_forms_coarse():
    # the historical 20-point grid is crude; measured error stays under a
    # few percent and is kept only for reproduction parity
    for n in range(1, 11):
        history = [0] * n
        adv = assess_link(history, FLAT, grid=COARSE)
        con = assess_link(history, FLAT, likelihood_kind="conventional", grid=COARSE)
        assert adv.p_attack == pytest.approx(1.0 / (n ** (1.0 / n) + 2.0), abs=2e-2)
        tol = 2e-2 if n <= 2 else 3e-2
        assert con.p_attack == pytest.approx(1.0 / (n + 2.0), abs=tol)


def test_empty_history_reduces_to_posterior_mean():
    curve = spike_curve(0.42, width=0.05)
    prior = PriorSpec(kind="beta", a=2.0, b=3.0)
    a = assess_link([], curve, prior=prior, grid=FINE)
    tab = posterior_over_p(curve, prior, FINE)
    assert a.p_attack == pytest.approx(tab.mean(), abs=1e-12)
    assert a.provenance["historyLength"] == 0


def test_likelihood_scale_is_a_no_op():
    history = [0, 1, 0, 0]
    base = assess_link(history, FLAT, grid=FINE)
    scaled = assess_link(history, FLAT, grid=FINE, likelihood_scale=137.0)
    assert scaled.p_attack == pytest.approx(base.p_attack, abs=1e-13)
    # the unnormalized integrals do move; only the ratio is invariant
    assert scaled.unnormalized_attack == pytest.approx(137.0 * base.unnormalized_attack, rel=1e-12)


def test_curve_scaling_cancels():
    history = [0, 0, 1]
    curve = spike_curve(0.3, width=0.1)
    tripled = InducedCurve(
        ps=curve.ps,
        weights=3.7 * curve.weights,
        sample_count=3,
        window=1,
        normalization="unscaled",
    )
    a = assess_link(history, curve, grid=FINE)
    b = assess_link(history, tripled, grid=FINE)
    assert b.p_attack == pytest.approx(a.p_attack, abs=1e-13)


def test_likelihood_exponent_changes_result():
    history = [0, 0, 0, 0]
    base = assess_link(history, FLAT, grid=FINE)
    sharpened = assess_link(history, FLAT, grid=FINE, likelihood_exponent=2.0)
    # squaring an all-clear likelihood pushes mass toward low p
    assert sharpened.p_attack < base.p_attack - 1e-3


def test_reweighting_validation():
    with pytest.raises(ValueError):
        assess_link([0], FLAT, likelihood_scale=0.0)
    with pytest.raises(ValueError):
        assess_link([0], FLAT, likelihood_exponent=-1.0)


def test_evidence_decomposition():
    history = [0, 1, 0]
    prior = PriorSpec(kind="beta", a=2.0, b=2.0)
    a = assess_link(history, FLAT, prior=prior, grid=FINE)
    assert a.normalizing_constant == pytest.approx(
        a.unnormalized_attack + a.unnormalized_clear, abs=1e-15
    )
    # the constant is the total evidence integral of likelihood * curve * prior
    pts, wts = FINE.points_and_weights()
    lik = history_likelihood("adversarial")
    base = lik(pts, np.array([0, 1, 0])) * prior.density(pts)
    assert a.normalizing_constant == pytest.approx(float(np.sum(base * wts)), abs=1e-12)
    assert a.p_attack + a.p_clear == pytest.approx(1.0, abs=1e-12)
    assert a.p_clear == pytest.approx(a.unnormalized_clear / a.normalizing_constant, abs=1e-12)


@pytest.mark.parametrize("kind", ["adversarial", "conventional"])
def test_appending_incidents_raises_p(kind):
    history = [0, 0, 0]
    prev = assess_link(history, FLAT, likelihood_kind=kind, grid=FINE).p_attack
    for _ in range(4):
        history = history + [1]
        cur = assess_link(history, FLAT, likelihood_kind=kind, grid=FINE).p_attack
        assert cur > prev
        prev = cur


@settings(max_examples=25, deadline=None)
@given(
    bits=st.lists(st.integers(min_value=0, max_value=1), max_size=8),
    a=st.floats(min_value=0.5, max_value=5.0),
    b=st.floats(min_value=0.5, max_value=5.0),
)
def test_assessment_is_a_probability(bits, a, b):
    prior = PriorSpec(kind="beta", a=a, b=b)
    res = assess_link(bits, FLAT, prior=prior, grid=FINE)
    assert 0.0 <= res.p_attack <= 1.0
    assert res.p_attack + res.p_clear == pytest.approx(1.0, abs=1e-9)


def test_assessment_serialization():
    res = assess_link([0, 0], FLAT, grid=FINE, link_id="9")
    doc = res.to_dict()
    assert doc["linkId"] == "9"
    assert set(doc) == {
        "linkId",
        "pAttack",
        "pClear",
        "unnormalizedAttack",
        "unnormalizedClear",
        "normalizingConstant",
        "provenance",
    }
    assert doc["provenance"]["integration"] == {"mode": "fine", "step": 0.001}


def test_conditional_requires_matching_indicator():
    data = expand_conditioning(with_intercept(regional_dataset()), np.zeros(12))
    with pytest.raises(ValueError):
        assess_conditional("9", "observed", data, np.ones(6), [0, 0])
    with pytest.raises(ValueError):
        # covariates say clear while the observation says incident
        assess_conditional("9", "incident", data, [1, 1, 1, 1, 1, 0], [0, 0])
    with pytest.raises(ValueError):
        # dimension mismatch against the expanded dataset
        assess_conditional("9", "clear", data, [1, 1, 1, 0], [0, 0])


def test_conditional_degenerate_design_flagged():
    # an all-zero indicator column makes the design rank deficient; the run
    # must still complete and carry the flag in provenance
    data = expand_conditioning(with_intercept(regional_dataset()), np.zeros(12))
    res = assess_conditional(
        "9",
        "clear",
        data,
        [1.0, 1.0, 1.0, 1.0, 1.0, 0.0],
        [0, 0, 0, 0],
        iterations=600,
        burn_in=100,
        seed=3,
    )
    assert res.provenance["conditioning"]["degenerateDesign"] is True
    assert 0.0 < res.p_attack < 1.0


def test_conditional_separation_propagates():
    base = with_intercept(regional_dataset())
    # indicator equal to the response reproduces it perfectly: separation
    data = expand_conditioning(base, np.asarray(base.responses, dtype=float))
    with pytest.raises(SeparationError):
        assess_conditional("9", "incident", data, [1, 1, 1, 1, 1, 1], [0, 0], iterations=600, burn_in=100)


def test_conditional_full_path(reference_draws):
    rng_data = expand_conditioning(
        with_intercept(regional_dataset()),
        np.array([0, 1, 0, 1, 0, 1, 0, 1, 0, 1, 0, 1], dtype=float),
    )
    res = assess_conditional(
        "9",
        "incident",
        rng_data,
        [1.0, 1.0, 1.0, 1.0, 1.0, 1.0],
        [0, 0, 0, 0],
        iterations=900,
        burn_in=200,
        seed=11,
    )
    assert 0.0 < res.p_attack < 1.0
    cond = res.provenance["conditioning"]
    assert cond["observation"] == "incident"
    assert cond["degenerateDesign"] is False
    assert cond["sampler"] == {"iterations": 900, "burnIn": 200, "seed": 11}
    assert res.link_id == "9"
