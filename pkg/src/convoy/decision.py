"""Route success probabilities, expected utilities, and recommendation."""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import IncoherentModelError
from .network import Network, Route, _natural_key, enumerate_routes


@dataclass(frozen=True)
class DependencyModel:
    """How link attack events relate along a route.

    independent: link events are mutually independent.
    conditional-chain: consecutive route links form a chain; each link's
    event depends on its predecessor's through a stored conditional
    p(link | predecessor attacked), and is independent of earlier links
    given that predecessor. Marginals always live outside this model.
    """

    kind: str = "independent"
    conditionals: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.kind not in ("independent", "conditional-chain"):
            raise ValueError(f"unknown dependency kind {self.kind!r}")
        for pair, value in self.conditionals.items():
            if not (isinstance(pair, tuple) and len(pair) == 2):
                raise ValueError("conditionals must be keyed by (link, given_link) pairs")
            if not 0.0 <= value <= 1.0:
                raise ValueError(f"conditional p{pair} = {value} outside [0, 1]")

    def conditional(self, link: str, given: str) -> float:
        try:
            return self.conditionals[(link, given)]
        except KeyError:
            raise IncoherentModelError(
                f"dependency model defines no conditional for link {link!r} given {given!r}"
            ) from None

    def to_dict(self) -> dict:
        return {
            "kind": self.kind,
            "conditionals": [
                {"link": j, "given": k, "p": v} for (j, k), v in sorted(self.conditionals.items())
            ],
        }

    @classmethod
    def from_dict(cls, doc: dict) -> "DependencyModel":
        conds = {
            (str(e["link"]), str(e["given"])): float(e["p"])
            for e in doc.get("conditionals", [])
        }
        return cls(kind=doc.get("kind", "independent"), conditionals=conds)


@dataclass(frozen=True)
class UtilitySpec:
    """Route utility: binary success indicator, or length-penalized.

    Length-penalized: success on an n-link route is worth 1 - n/x_util and
    failure -n/x_util, so expected utility is pSuccess - n/x_util.
    """

    kind: str = "binary"
    x_util: float | None = None

    def __post_init__(self):
        if self.kind not in ("binary", "length-penalty"):
            raise ValueError(f"unknown utility kind {self.kind!r}")
        if self.kind == "length-penalty":
            if self.x_util is None or not self.x_util > 0:
                raise ValueError("length-penalty utility needs x_util > 0")

    def to_dict(self) -> dict:
        doc = {"kind": self.kind}
        if self.kind == "length-penalty":
            doc["x_util"] = self.x_util
        return doc

    @classmethod
    def from_dict(cls, doc: dict) -> "UtilitySpec":
        return cls(
            kind=doc.get("kind", "binary"),
            x_util=doc.get("x_util"),
        )


@dataclass(frozen=True)
class RouteEvaluation:
    route: Route
    p_success: float
    p_failure: float
    expected_utility: float

    def to_dict(self) -> dict:
        return {
            "links": list(self.route.link_ids),
            "pSuccess": self.p_success,
            "pFailure": self.p_failure,
            "expectedUtility": self.expected_utility,
        }


@dataclass(frozen=True)
class DecisionResult:
    per_route: tuple
    recommended: int
    tie_broken: bool

    @property
    def recommended_route(self) -> Route:
        return self.per_route[self.recommended].route

    def to_dict(self) -> dict:
        return {
            "perRoute": [e.to_dict() for e in self.per_route],
            "recommended": self.recommended,
            "recommendedLinks": list(self.recommended_route.link_ids),
            "tieBroken": self.tie_broken,
        }


def _route_marginals(route: Route, marginals: dict) -> list:
    out = []
    for link_id in route.link_ids:
        if link_id not in marginals:
            raise ValueError(f"no attack probability supplied for link {link_id!r}")
        p = float(marginals[link_id])
        if not 0.0 <= p <= 1.0:
            raise ValueError(f"attack probability for link {link_id!r} outside [0, 1]")
        out.append(p)
    return out


def route_success_independent(route: Route, marginals: dict) -> float:
    """Probability every link on the route stays clear, links independent."""
    ps = _route_marginals(route, marginals)
    return float(np.prod([1.0 - p for p in ps]))


def route_failure_inclusion_exclusion(route: Route, marginals: dict, model: DependencyModel) -> float:
    """Probability at least one route link suffers an attack.

    Under independence this is 1 minus the all-clear product (the union
    expansion collapses to exactly that). Under the conditional chain the
    all-clear probability is built forward: each link's clear probability
    given its clear predecessor is derived from the stored attacked-given-
    attacked conditional and the two marginals by total probability.
    """
    ps = _route_marginals(route, marginals)
    if model.kind == "independent":
        return 1.0 - float(np.prod([1.0 - p for p in ps]))

    links = route.link_ids
    all_clear = 1.0 - ps[0]
    for i in range(1, len(links)):
        if all_clear <= 0.0:
            all_clear = 0.0
            break
        p_prev, p_here = ps[i - 1], ps[i]
        cond = model.conditional(links[i], links[i - 1])
        joint = cond * p_prev
        if joint > p_here + 1e-12:
            raise IncoherentModelError(
                f"conditional chain incoherent at links ({links[i]!r}, {links[i-1]!r}): "
                f"p(both) = {joint:.6g} exceeds marginal {p_here:.6g}"
            )
        if p_prev >= 1.0:
            # guards the division when a marginal rounds to exactly 1
            all_clear = 0.0
            break
        attack_given_prev_clear = (p_here - joint) / (1.0 - p_prev)
        if attack_given_prev_clear > 1.0 + 1e-12:
            raise IncoherentModelError(
                f"conditional chain incoherent at link {links[i]!r}: "
                "attack probability given a clear predecessor exceeds 1"
            )
        all_clear *= 1.0 - min(max(attack_given_prev_clear, 0.0), 1.0)
    failure = 1.0 - all_clear
    if not -1e-12 <= failure <= 1.0 + 1e-12:
        raise IncoherentModelError(f"incoherent dependency model: failure probability {failure}")
    return float(min(max(failure, 0.0), 1.0))


def expected_utility(route: Route, p_success: float, utility: UtilitySpec) -> float:
    """Expected utility of taking the route given its success probability."""
    if not 0.0 <= p_success <= 1.0:
        raise ValueError("p_success must lie in [0, 1]")
    if utility.kind == "binary":
        return float(p_success)
    n = len(route)
    if utility.x_util <= n:
        raise ValueError(
            f"x_util = {utility.x_util:g} must exceed the route length {n} "
            "for success to remain preferable"
        )
    return float(p_success - n / utility.x_util)


def select_best(evaluations) -> tuple:
    """Index of the best evaluation and whether a tie was broken.

    Best means maximum expected utility; exact ties resolve toward fewer
    links, then the naturally smallest link-id sequence.
    """
    best_eu = max(e.expected_utility for e in evaluations)
    candidates = [i for i, e in enumerate(evaluations) if e.expected_utility == best_eu]
    chosen = min(
        candidates,
        key=lambda i: (
            len(evaluations[i].route),
            tuple(_natural_key(l) for l in evaluations[i].route.link_ids),
        ),
    )
    return chosen, len(candidates) > 1


def recommend(
    network: Network,
    marginals: dict,
    model: DependencyModel = DependencyModel(),
    utility: UtilitySpec = UtilitySpec(),
) -> DecisionResult:
    """Evaluate every route and recommend the expected-utility maximizer."""
    missing = [l for l in network.link_ids() if l not in marginals]
    if missing:
        raise ValueError(f"attack probabilities missing for links {sorted(missing, key=_natural_key)}")
    unknown = [l for l in marginals if l not in network.link_ids()]
    if unknown:
        raise ValueError(f"attack probabilities name unknown links {sorted(unknown, key=_natural_key)}")

    routes = enumerate_routes(network)
    if utility.kind == "length-penalty":
        longest = max(len(r) for r in routes)
        if utility.x_util <= longest:
            raise ValueError(
                f"x_util = {utility.x_util:g} must exceed the longest route length {longest}"
            )
    evaluations = []
    for route in routes:
        p_fail = route_failure_inclusion_exclusion(route, marginals, model)
        p_succ = 1.0 - p_fail
        evaluations.append(
            RouteEvaluation(
                route=route,
                p_success=p_succ,
                p_failure=p_fail,
                expected_utility=expected_utility(route, p_succ, utility),
            )
        )
    chosen, tied = select_best(evaluations)
    return DecisionResult(per_route=tuple(evaluations), recommended=chosen, tie_broken=tied)


def scale_link_probabilities(
    network: Network,
    reference_link: str,
    reference_p: float,
    round_2dp: bool = False,
) -> dict:
    """Calibrate every link's attack probability off one reference link.

    p(link) = length_ratio(link) * reference_p. With round_2dp (reproduction
    mode) the scaled values are rounded to 2 decimals; the reference link
    itself keeps its full-precision value.
    """
    if not 0.0 <= reference_p <= 1.0:
        raise ValueError("reference probability must lie in [0, 1]")
    network.link(reference_link)
    out = {}
    for lk in network.links:
        p = lk.length_ratio * reference_p
        if p > 1.0:
            raise ValueError(
                f"scaled probability for link {lk.id!r} is {p:.4g} > 1; "
                "length ratios are too large for this reference"
            )
        if round_2dp and lk.id != reference_link:
            p = round(p, 2)
        out[lk.id] = float(p)
    return out
