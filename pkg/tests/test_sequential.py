"""Sequential walk protocol and the conditionalization toggle."""
import pytest

from convoy.decision import DependencyModel, UtilitySpec
from convoy.errors import IllegalObservationError, PipelineError
from convoy.network import Link, Network
from convoy.sequential import (
    advance,
    continuations,
    create_session,
    latest_recommendation,
    reweight_attack_probability,
    session_from_dict,
    session_to_dict,
)


def rejected_session(reference_marginals, net, w_clear=2.0, w_incident=1.0, propagation="adjacent"):
    return create_session(
        net,
        reference_marginals,
        poc_mode="rejected",
        w_clear=w_clear,
        w_incident=w_incident,
        propagation=propagation,
    )


def test_create_initial_state(net, reference_marginals):
    s = create_session(net, reference_marginals)
    assert s.status == "open"
    assert s.revision == 1
    assert s.current_node == "A"
    assert s.visited == ["A"]
    assert s.traversed == []
    assert s.marginals == s.base_marginals
    first = latest_recommendation(s)
    assert first is not None and first["recommendedLinks"] == ["1", "2", "3", "4", "10"]


def test_create_validation(net, reference_marginals):
    with pytest.raises(ValueError):
        create_session(net, reference_marginals, poc_mode="suspended")
    with pytest.raises(ValueError):
        create_session(net, reference_marginals, propagation="global")
    with pytest.raises(ValueError):
        create_session(net, reference_marginals, poc_mode="rejected", w_clear=0.0)


def test_continuations_no_backtracking(net, reference_marginals):
    s = create_session(net, reference_marginals)
    assert continuations(s) == ["1"]
    advance(s, "1", "clear")
    assert continuations(s) == ["2"]
    advance(s, "2", "clear")
    # node C: onward via the long chain or the direct lateral link
    assert continuations(s) == ["3", "9"]


def test_reweight_formula():
    assert reweight_attack_probability(0.306, 2.0, 1.0) == pytest.approx(
        0.306 / (0.306 + 2.0 * 0.694), abs=1e-15
    )
    assert reweight_attack_probability(0.5, 1.0, 1.0) == pytest.approx(0.5, abs=1e-15)
    assert reweight_attack_probability(0.0, 2.0, 3.0) == 0.0
    assert reweight_attack_probability(1.0, 2.0, 3.0) == 1.0


def test_rejected_reweights_adjacent_only(net, reference_marginals):
    s = rejected_session(reference_marginals, net)
    advance(s, "1", "clear")
    # link 9 touches neither endpoint of link 1, so it is untouched so far
    assert s.marginals["9"] == pytest.approx(0.306, abs=1e-15)
    advance(s, "2", "clear")
    # one reweighting with w_clear=2, w_incident=1
    assert s.marginals["9"] == pytest.approx(0.18063754, abs=1e-8)
    # link 10 runs E to I and never shares a node with links 1 or 2
    assert s.marginals["10"] == pytest.approx(0.15, abs=1e-15)


def test_rejected_all_downstream_propagation(net, reference_marginals):
    s = rejected_session(reference_marginals, net, propagation="all-downstream")
    advance(s, "1", "clear")
    advance(s, "2", "clear")
    # every uncrossed link is reweighted at each of the two advances
    twice = reweight_attack_probability(
        reweight_attack_probability(0.15, 2.0, 1.0), 2.0, 1.0
    )
    assert s.marginals["10"] == pytest.approx(twice, abs=1e-12)
    assert s.marginals["9"] == pytest.approx(
        reweight_attack_probability(
            reweight_attack_probability(0.306, 2.0, 1.0), 2.0, 1.0
        ),
        abs=1e-12,
    )


def test_rejected_equal_weights_noop(net, reference_marginals):
    s = rejected_session(reference_marginals, net, w_clear=1.0, w_incident=1.0)
    advance(s, "1", "clear")
    advance(s, "2", "clear")
    for link_id, p in reference_marginals.items():
        assert s.marginals[link_id] == pytest.approx(p, abs=1e-15)


def test_rejected_per_advance_override(net, reference_marginals):
    s = rejected_session(reference_marginals, net, w_clear=1.0, w_incident=1.0)
    advance(s, "1", "clear")
    advance(s, "2", "clear", w_clear=2.0, w_incident=1.0)
    assert s.marginals["9"] == pytest.approx(0.18063754, abs=1e-8)
    with pytest.raises(ValueError):
        advance(s, "9", "clear", w_clear=-1.0)


def test_upheld_substitutes_conditionals(net, reference_marginals):
    # aggregation stays independent; the stored conditionals drive only the
    # upheld-mode substitution after an observation
    model = DependencyModel(conditionals={("9", "2"): 0.5, ("3", "2"): 0.1})
    s = create_session(net, reference_marginals, model=model, poc_mode="upheld")
    advance(s, "1", "clear")
    assert s.marginals["9"] == pytest.approx(0.306, abs=1e-15)
    advance(s, "2", "incident")
    # incident observed: stored conditionals become the new unconditionals
    assert s.marginals["9"] == pytest.approx(0.5, abs=1e-15)
    assert s.marginals["3"] == pytest.approx(0.1, abs=1e-15)


def test_upheld_clear_derives_complement(net, reference_marginals):
    model = DependencyModel(conditionals={("9", "2"): 0.5})
    s = create_session(net, reference_marginals, model=model, poc_mode="upheld")
    advance(s, "1", "clear")
    advance(s, "2", "clear")
    # p(9 | 2 clear) = (0.306 - 0.5 * 0.2) / 0.8
    assert s.marginals["9"] == pytest.approx((0.306 - 0.1) / 0.8, abs=1e-12)


def test_upheld_without_conditionals_is_inert(net, reference_marginals):
    s = create_session(net, reference_marginals, poc_mode="upheld")
    advance(s, "1", "clear")
    advance(s, "2", "incident")
    for link_id, p in reference_marginals.items():
        assert s.marginals[link_id] == pytest.approx(p, abs=1e-15)


def test_illegal_observations(net, reference_marginals):
    s = create_session(net, reference_marginals)
    with pytest.raises(IllegalObservationError, match="unknown"):
        advance(s, "99", "clear")
    with pytest.raises(IllegalObservationError, match="does not touch"):
        advance(s, "9", "clear")
    with pytest.raises(ValueError, match="outcome"):
        advance(s, "1", "destroyed")
    advance(s, "1", "clear")
    with pytest.raises(IllegalObservationError, match="revisit"):
        advance(s, "1", "clear")


def test_advance_after_completion_rejected(net, reference_marginals):
    s = create_session(net, reference_marginals)
    advance(s, "1", "clear")
    advance(s, "2", "clear")
    result = advance(s, "9", "clear")
    assert result is None
    assert s.status == "complete"
    assert continuations(s) == []
    with pytest.raises(IllegalObservationError, match="complete"):
        advance(s, "9", "clear")


def test_dead_end_raises():
    net = Network(
        nodes=frozenset("ABCD"),
        links=(
            Link("1", "A", "B", 1.0),
            Link("2", "B", "C", 1.0),
            Link("3", "B", "D", 1.0),
        ),
        source="A",
        sink="D",
    )
    s = create_session(net, {"1": 0.1, "2": 0.1, "3": 0.1})
    advance(s, "1", "clear")
    # node C is a spur with no onward path to the sink
    with pytest.raises(PipelineError, match="dead end"):
        advance(s, "2", "clear")


def test_full_walk_traverses_enumerated_route(net, reference_marginals):
    from convoy.network import enumerate_routes

    s = create_session(
        net,
        reference_marginals,
        utility=UtilitySpec(kind="length-penalty", x_util=100.0),
    )
    result = latest_recommendation(s)
    while s.status == "open":
        step = result["recommendedLinks"][0]
        nxt = advance(s, step, "clear")
        result = nxt.to_dict() if nxt is not None else None
    walked = tuple(t["link"] for t in s.traversed)
    assert walked in {tuple(r.link_ids) for r in enumerate_routes(net)}
    assert all(t["outcome"] == "clear" for t in s.traversed)


def test_revision_increments(net, reference_marginals):
    s = create_session(net, reference_marginals)
    assert s.revision == 1
    advance(s, "1", "clear")
    assert s.revision == 2
    advance(s, "2", "incident")
    assert s.revision == 3


def test_session_round_trip(net, reference_marginals):
    s = rejected_session(reference_marginals, net)
    advance(s, "1", "clear")
    advance(s, "2", "incident")
    doc = session_to_dict(s)
    assert doc["sessionId"] == s.session_id
    assert doc["pocMode"] == "rejected"
    assert doc["currentNode"] == "C"
    assert doc["traversedLinks"] == [
        {"link": "1", "outcome": "clear"},
        {"link": "2", "outcome": "incident"},
    ]
    restored = session_from_dict(doc)
    assert session_to_dict(restored) == doc
    # the restored session keeps working
    advance(restored, "9", "clear")
    assert restored.status == "complete"


def test_base_marginals_preserved(net, reference_marginals):
    s = rejected_session(reference_marginals, net)
    advance(s, "1", "clear")
    advance(s, "2", "clear")
    assert s.base_marginals["9"] == pytest.approx(0.306, abs=1e-15)
    assert s.marginals["9"] != s.base_marginals["9"]
