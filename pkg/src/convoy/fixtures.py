"""Bundled demonstration fixtures: regional incidents, network, link profile."""
from __future__ import annotations

from importlib import resources

from .data import RegionalDataset, parse_link_profile, parse_regional_csv
from .network import demo_network, network_to_json

REFERENCE_ATTACK_PROBABILITY = 0.306


def _read_text(name: str) -> str:
    return resources.files("convoy").joinpath("_data", name).read_text(encoding="utf-8")


def regional_csv_text() -> str:
    """The bundled 12-row regional incident table as CSV text."""
    return _read_text("regional.csv")


def regional_dataset() -> RegionalDataset:
    """The bundled regional dataset, parsed, without an intercept column."""
    return parse_regional_csv(regional_csv_text())


def reference_link_profile() -> dict:
    """Profile of the calibration link: 4 clear crossings, unit distances."""
    return parse_link_profile(_read_text("link9.json"))


def demo_network_json() -> str:
    """The demonstration network in interchange form."""
    return network_to_json(demo_network())


def write_demo_inputs(directory) -> dict:
    """Drop all fixture files into a directory; returns name -> path."""
    from pathlib import Path

    d = Path(directory)
    d.mkdir(parents=True, exist_ok=True)
    paths = {}
    for name, text in (
        ("regional.csv", regional_csv_text()),
        ("network.json", demo_network_json()),
        ("link9.json", _read_text("link9.json")),
    ):
        target = d / name
        target.write_text(text, encoding="utf-8")
        paths[name] = str(target)
    return paths
