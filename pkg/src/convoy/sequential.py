"""Sequential walk protocol: observe a crossing, update, re-recommend.

After each observed crossing the planner either keeps conditional
probabilities as the new unconditionals (conditionalization upheld) or
rejects that rule and reweights downstream links with two subjective
weights, one on the incident hypothesis and one on the clear hypothesis.
"""
from __future__ import annotations

import uuid
from dataclasses import dataclass

from .decision import DecisionResult, DependencyModel, UtilitySpec, recommend
from .errors import IllegalObservationError, IncoherentModelError, PipelineError, UnreachableSinkError
from .network import Network, _natural_key, network_from_dict

POC_MODES = ("upheld", "rejected")
PROPAGATION_MODES = ("adjacent", "all-downstream")
OUTCOMES = ("clear", "incident")


@dataclass
class SequentialSession:
    """Mutable state of one walk from source toward sink."""

    session_id: str
    network: Network
    marginals: dict
    base_marginals: dict
    model: DependencyModel
    utility: UtilitySpec
    poc_mode: str
    w_clear: float
    w_incident: float
    propagation: str
    current_node: str
    visited: list
    traversed: list
    log: list
    status: str = "open"
    revision: int = 1


def _check_weights(w_clear: float, w_incident: float):
    if not (w_clear > 0 and w_incident > 0):
        raise ValueError("reweighting weights must be positive")


def create_session(
    network: Network,
    marginals: dict,
    model: DependencyModel = DependencyModel(),
    utility: UtilitySpec = UtilitySpec(),
    poc_mode: str = "upheld",
    w_clear: float = 1.0,
    w_incident: float = 1.0,
    propagation: str = "adjacent",
    session_id: str | None = None,
) -> SequentialSession:
    """Open a session at the network source with an initial recommendation."""
    if poc_mode not in POC_MODES:
        raise ValueError(f"poc_mode must be one of {POC_MODES}")
    if propagation not in PROPAGATION_MODES:
        raise ValueError(f"propagation must be one of {PROPAGATION_MODES}")
    _check_weights(w_clear, w_incident)

    first = recommend(network, marginals, model, utility)
    session = SequentialSession(
        session_id=session_id or uuid.uuid4().hex,
        network=network,
        marginals={k: float(v) for k, v in marginals.items()},
        base_marginals={k: float(v) for k, v in marginals.items()},
        model=model,
        utility=utility,
        poc_mode=poc_mode,
        w_clear=float(w_clear),
        w_incident=float(w_incident),
        propagation=propagation,
        current_node=network.source,
        visited=[network.source],
        traversed=[],
        log=[{"event": "created", "observation": None, "recommendation": first.to_dict()}],
    )
    return session


def continuations(session: SequentialSession) -> list:
    """Link ids crossable next: incident to the current node, no backtracking."""
    if session.status != "open":
        return []
    out = [
        lk.id
        for lk in session.network.links_at(session.current_node)
        if lk.other_end(session.current_node) not in session.visited
    ]
    return sorted(out, key=_natural_key)


def reweight_attack_probability(p: float, w_clear: float, w_incident: float) -> float:
    """Two-weight renormalization of one attack probability.

    The incident hypothesis keeps mass w_incident * p, the clear hypothesis
    w_clear * (1 - p); equal weights change nothing.
    """
    mass_incident = w_incident * p
    mass_clear = w_clear * (1.0 - p)
    return mass_incident / (mass_incident + mass_clear)


def _conditional_substitution(session: SequentialSession, observed_link: str, outcome: str):
    """Conditionalization upheld: stored conditionals become the new marginals."""
    p_obs = session.marginals[observed_link]
    for (link, given), cond in session.model.conditionals.items():
        if given != observed_link or link in (t["link"] for t in session.traversed):
            continue
        if link not in session.marginals:
            continue
        if outcome == "incident":
            session.marginals[link] = cond
        else:
            if p_obs >= 1.0:
                raise IncoherentModelError(
                    f"observed a clear crossing of link {observed_link!r} "
                    "whose attack probability was 1"
                )
            derived = (session.marginals[link] - cond * p_obs) / (1.0 - p_obs)
            if not -1e-12 <= derived <= 1.0 + 1e-12:
                raise IncoherentModelError(
                    f"conditional for link {link!r} given a clear {observed_link!r} "
                    f"falls outside [0, 1]: {derived:.6g}"
                )
            session.marginals[link] = min(max(derived, 0.0), 1.0)


def _rejected_reweighting(session: SequentialSession, observed_link: str, w_clear: float, w_incident: float):
    """Conditionalization rejected: subjective two-weight update downstream."""
    observed = session.network.link(observed_link)
    crossed = {t["link"] for t in session.traversed}
    for lk in session.network.links:
        if lk.id in crossed:
            continue
        if session.propagation == "adjacent":
            shares_endpoint = observed.touches(lk.a) or observed.touches(lk.b)
            if not shares_endpoint:
                continue
        session.marginals[lk.id] = reweight_attack_probability(
            session.marginals[lk.id], w_clear, w_incident
        )


def advance(
    session: SequentialSession,
    link_id: str,
    outcome: str,
    w_clear: float | None = None,
    w_incident: float | None = None,
) -> DecisionResult | None:
    """Record one observed crossing, update marginals, and re-recommend.

    Returns the next-leg recommendation, or None when the sink is reached.
    Weight overrides apply to this observation only.
    """
    if session.status != "open":
        raise IllegalObservationError("session already complete")
    if outcome not in OUTCOMES:
        raise ValueError(f"outcome must be one of {OUTCOMES}")
    wc = session.w_clear if w_clear is None else float(w_clear)
    wi = session.w_incident if w_incident is None else float(w_incident)
    _check_weights(wc, wi)

    try:
        link = session.network.link(link_id)
    except KeyError:
        raise IllegalObservationError(f"unknown link {link_id!r}") from None
    if not link.touches(session.current_node):
        raise IllegalObservationError(
            f"link {link_id!r} does not touch the current node {session.current_node!r}"
        )
    nxt = link.other_end(session.current_node)
    if nxt in session.visited:
        raise IllegalObservationError(
            f"crossing link {link_id!r} would revisit node {nxt!r}"
        )

    if session.poc_mode == "upheld":
        _conditional_substitution(session, link_id, outcome)
    else:
        _rejected_reweighting(session, link_id, wc, wi)

    session.traversed.append({"link": link_id, "outcome": outcome})
    session.current_node = nxt
    session.visited.append(nxt)
    session.revision += 1

    if nxt == session.network.sink:
        session.status = "complete"
        session.log.append(
            {"event": "completed", "observation": {"link": link_id, "outcome": outcome},
             "recommendation": None}
        )
        return None

    remaining = _remaining_network(session)
    try:
        result = recommend(remaining, _restrict(session.marginals, remaining), session.model, session.utility)
    except UnreachableSinkError as exc:
        raise PipelineError(f"dead end at node {nxt!r}: {exc}") from exc
    session.log.append(
        {"event": "advanced", "observation": {"link": link_id, "outcome": outcome},
         "recommendation": result.to_dict()}
    )
    return result


def _remaining_network(session: SequentialSession) -> Network:
    """Subnetwork from the current node onward, visited nodes removed."""
    blocked = set(session.visited) - {session.current_node}
    nodes = frozenset(n for n in session.network.nodes if n not in blocked)
    links = tuple(
        lk for lk in session.network.links if lk.a in nodes and lk.b in nodes
    )
    return Network(nodes=nodes, links=links, source=session.current_node, sink=session.network.sink)


def _restrict(marginals: dict, network: Network) -> dict:
    return {l: marginals[l] for l in network.link_ids()}


def latest_recommendation(session: SequentialSession) -> dict | None:
    for entry in reversed(session.log):
        if entry["recommendation"] is not None:
            return entry["recommendation"]
    return None


def session_to_dict(session: SequentialSession) -> dict:
    """Lossless snapshot; the wire/persistence document for one revision."""
    return {
        "sessionId": session.session_id,
        "revision": session.revision,
        "status": session.status,
        "network": session.network.to_dict(),
        "marginals": dict(session.marginals),
        "baseMarginals": dict(session.base_marginals),
        "dependency": session.model.to_dict(),
        "utility": session.utility.to_dict(),
        "pocMode": session.poc_mode,
        "wClear": session.w_clear,
        "wIncident": session.w_incident,
        "propagation": session.propagation,
        "currentNode": session.current_node,
        "visited": list(session.visited),
        "traversedLinks": [dict(t) for t in session.traversed],
        "log": [dict(e) for e in session.log],
    }


def session_from_dict(doc: dict) -> SequentialSession:
    return SequentialSession(
        session_id=str(doc["sessionId"]),
        network=network_from_dict(doc["network"]),
        marginals={str(k): float(v) for k, v in doc["marginals"].items()},
        base_marginals={str(k): float(v) for k, v in doc["baseMarginals"].items()},
        model=DependencyModel.from_dict(doc["dependency"]),
        utility=UtilitySpec.from_dict(doc["utility"]),
        poc_mode=str(doc["pocMode"]),
        w_clear=float(doc["wClear"]),
        w_incident=float(doc["wIncident"]),
        propagation=str(doc["propagation"]),
        current_node=str(doc["currentNode"]),
        visited=[str(n) for n in doc["visited"]],
        traversed=[dict(t) for t in doc["traversedLinks"]],
        log=[dict(e) for e in doc["log"]],
        status=str(doc["status"]),
        revision=int(doc["revision"]),
    )
