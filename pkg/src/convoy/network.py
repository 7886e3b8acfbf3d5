"""Logistics network model and source-to-sink route enumeration."""
from __future__ import annotations

import json
import re
from dataclasses import dataclass

from .errors import UnreachableSinkError


def _natural_key(text: str) -> tuple:
    """Sort key treating digit runs numerically, so "9" orders before "10"."""
    parts = re.split(r"(\d+)", str(text))
    return tuple((0, int(t)) if t.isdigit() else (1, t) for t in parts if t)


@dataclass(frozen=True)
class Link:
    """Undirected link between two nodes with a relative length."""

    id: str
    a: str
    b: str
    length_ratio: float

    def other_end(self, node: str) -> str:
        if node == self.a:
            return self.b
        if node == self.b:
            return self.a
        raise ValueError(f"node {node!r} is not an endpoint of link {self.id!r}")

    def touches(self, node: str) -> bool:
        return node in (self.a, self.b)


@dataclass(frozen=True)
class Network:
    """Immutable link graph with a designated source and sink.

    Links are stored undirected; routes orient them by traversal order.
    """

    nodes: frozenset
    links: tuple
    source: str
    sink: str

    def link(self, link_id: str) -> Link:
        for lk in self.links:
            if lk.id == link_id:
                return lk
        raise KeyError(f"unknown link {link_id!r}")

    def link_ids(self) -> tuple:
        return tuple(lk.id for lk in self.links)

    def links_at(self, node: str) -> list:
        return [lk for lk in self.links if lk.touches(node)]

    def to_dict(self) -> dict:
        return {
            "nodes": sorted(self.nodes, key=_natural_key),
            "links": [
                {"id": lk.id, "a": lk.a, "b": lk.b, "length_ratio": lk.length_ratio}
                for lk in self.links
            ],
            "source": self.source,
            "sink": self.sink,
        }


@dataclass(frozen=True)
class Route:
    """Ordered sequence of link ids forming a simple source-to-sink path."""

    link_ids: tuple

    def __len__(self) -> int:
        return len(self.link_ids)


def network_from_dict(doc: dict) -> Network:
    """Build a Network from the interchange mapping.

    Field names are fixed: nodes, links (id, a, b, length_ratio), source, sink.
    """
    try:
        nodes = frozenset(str(n) for n in doc["nodes"])
        links = tuple(
            Link(str(l["id"]), str(l["a"]), str(l["b"]), float(l["length_ratio"]))
            for l in doc["links"]
        )
        net = Network(nodes=nodes, links=links, source=str(doc["source"]), sink=str(doc["sink"]))
    except (KeyError, TypeError) as exc:
        raise ValueError(f"malformed network document: {exc}") from exc
    problems = validate_network(net)
    if problems:
        raise ValueError("invalid network: " + "; ".join(problems))
    return net


def network_from_json(text: str) -> Network:
    return network_from_dict(json.loads(text))


def network_to_json(net: Network, indent: int = 2) -> str:
    return json.dumps(net.to_dict(), indent=indent)


def validate_network(net: Network) -> list:
    """Return a list of invariant violations; empty list means valid."""
    problems = []
    if net.source == net.sink:
        problems.append("source equals sink")
    if net.source not in net.nodes:
        problems.append(f"source {net.source!r} is not a node")
    if net.sink not in net.nodes:
        problems.append(f"sink {net.sink!r} is not a node")
    seen = set()
    for lk in net.links:
        if lk.id in seen:
            problems.append(f"duplicate link id {lk.id!r}")
        seen.add(lk.id)
        for end in (lk.a, lk.b):
            if end not in net.nodes:
                problems.append(f"link {lk.id!r} endpoint {end!r} is not a node")
        if lk.a == lk.b:
            problems.append(f"link {lk.id!r} is a self-loop")
        if not lk.length_ratio > 0:
            problems.append(f"link {lk.id!r} has nonpositive length_ratio")
    return problems


def demo_network() -> Network:
    """The bundled 9-node, 10-link demonstration network.

    Nodes A through I; three routes from A to I. Link 9 is the calibration
    reference (length_ratio 1.0) and all other ratios are relative to it.
    """
    ratios = {
        "1": 0.66, "2": 0.66,
        "3": 0.20, "4": 0.20, "5": 0.20, "6": 0.20, "7": 0.20, "8": 0.20,
        "9": 1.0, "10": 0.50,
    }
    ends = {
        "1": ("A", "B"), "2": ("B", "C"), "3": ("C", "D"), "4": ("D", "E"),
        "5": ("E", "F"), "6": ("F", "G"), "7": ("G", "H"), "8": ("H", "I"),
        "9": ("C", "I"), "10": ("E", "I"),
    }
    links = tuple(Link(i, ends[i][0], ends[i][1], ratios[i]) for i in ends)
    return Network(
        nodes=frozenset("ABCDEFGHI"),
        links=links,
        source="A",
        sink="I",
    )


def enumerate_routes(net: Network) -> list:
    """All simple paths from source to sink, in deterministic order.

    Routes are ordered by (number of links, link-id sequence), link ids
    compared naturally so "9" precedes "10".
    """
    problems = validate_network(net)
    if problems:
        raise ValueError("invalid network: " + "; ".join(problems))

    found = []

    def walk(node, visited, trail):
        if node == net.sink:
            found.append(Route(tuple(trail)))
            return
        candidates = sorted(net.links_at(node), key=lambda lk: _natural_key(lk.id))
        for lk in candidates:
            nxt = lk.other_end(node)
            if nxt in visited:
                continue
            visited.add(nxt)
            trail.append(lk.id)
            walk(nxt, visited, trail)
            trail.pop()
            visited.remove(nxt)

    walk(net.source, {net.source}, [])
    if not found:
        raise UnreachableSinkError(
            f"unreachable sink: no route from {net.source!r} to {net.sink!r}"
        )
    found.sort(key=lambda r: (len(r), tuple(_natural_key(i) for i in r.link_ids)))
    return found
