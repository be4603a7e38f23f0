"""Named built-in graphs and systems, addressed as ``fixture:<name>``."""
from __future__ import annotations

import re

from .fields import AdditiveLaplacianSystem, g6_tilde, kuramoto_g6
from .graph_model import GraphError, NetworkGraph, make_Gn, make_named_graph, make_ring

GRAPH_FIXTURES = {
    "ring<n>": "cycle on n >= 3 cells, one edge class",
    "g<n>": "circulant on n >= 5 cells joining nearest and next-nearest neighbours",
    "fig1": "six cells, two edge classes, exotic pattern {1,4},{2,5},{3,6}",
    "fig2": "six cells, cell classes p/q, edge classes theta/phi",
    "fig5": "six cells, edge classes sin/id (the modified G6)",
}

SYSTEM_FIXTURES = {
    "kuramoto-g6": "g6 with sine(1) coupling, zero constants",
    "g6-tilde": "fig5 with sin -> sine(1), id -> linear(1), zero constants",
}

PREFIX = "fixture:"


class UnknownFixture(GraphError):
    pass


def _strip(name: str) -> str:
    return name[len(PREFIX):] if name.startswith(PREFIX) else name


def graph_fixture(name: str) -> NetworkGraph:
    key = _strip(name).lower()
    if m := re.fullmatch(r"ring(\d+)", key):
        return make_ring(int(m.group(1)))
    if m := re.fullmatch(r"g(\d+)", key):
        return make_Gn(int(m.group(1)))
    if key in ("fig1", "fig2", "fig5"):
        return make_named_graph(key)
    if key in SYSTEM_FIXTURES:
        return system_fixture(key).graph
    raise UnknownFixture(f"no graph fixture named {name!r}")


def system_fixture(name: str) -> AdditiveLaplacianSystem:
    key = _strip(name).lower()
    if key == "kuramoto-g6":
        return kuramoto_g6()
    if key == "g6-tilde":
        return g6_tilde()
    raise UnknownFixture(f"no system fixture named {name!r}")


def listing() -> dict:
    return {"graphs": dict(GRAPH_FIXTURES), "systems": dict(SYSTEM_FIXTURES)}
