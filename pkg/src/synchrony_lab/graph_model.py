"""Typed bidirected network graphs.

Cells are 0-based internally; every document and report uses 1-based ids.
Edges are stored undirected as ``(u, v, edge_class)`` with ``u < v``.  A graph
may also carry one-way ``arrows`` ``(tail, head, edge_class)``; such a graph is
not bidirected and only the combinatorial modules (synchrony, automorphism)
accept it.
"""
from __future__ import annotations

import json
from collections import Counter
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Mapping

import numpy as np

__all__ = [
    "GraphError", "SelfEdge", "ConflictingEdgeClass", "CompatibilityViolation",
    "MalformedDocument", "NetworkGraph", "InputSignature", "AdjacencyMatrix",
    "parse_graph", "load_graph", "make_ring", "make_Gn", "make_named_graph",
    "input_signature", "classify", "adjacency_matrices",
]


class GraphError(ValueError):
    pass


class SelfEdge(GraphError):
    pass


class ConflictingEdgeClass(GraphError):
    pass


class CompatibilityViolation(GraphError):
    pass


class MalformedDocument(GraphError):
    pass


@dataclass(frozen=True)
class NetworkGraph:
    n_cells: int
    cell_class: tuple[str, ...]
    edges: tuple[tuple[int, int, str], ...]
    weights: Mapping[tuple[int, int], float] | None = None
    arrows: tuple[tuple[int, int, str], ...] = ()
    _lookup: dict = field(init=False, repr=False, compare=False)
    _arrow_lookup: dict = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        if self.n_cells < 1:
            raise GraphError("a graph needs at least one cell")
        if len(self.cell_class) != self.n_cells:
            raise GraphError("cell_class must name a class for every cell")
        lookup: dict[tuple[int, int], str] = {}
        normalized = []
        for u, v, cls in self.edges:
            if u == v:
                raise SelfEdge(f"self-edge at cell {u + 1}")
            if not (0 <= u < self.n_cells and 0 <= v < self.n_cells):
                raise GraphError(f"edge {u + 1}-{v + 1} out of range")
            a, b = min(u, v), max(u, v)
            prev = lookup.get((a, b))
            if prev is not None and prev != cls:
                raise ConflictingEdgeClass(
                    f"edge {a + 1}-{b + 1} listed with classes {prev!r} and {cls!r}")
            if prev is None:
                lookup[(a, b)] = cls
                normalized.append((a, b, cls))
        arrow_lookup = {}
        for a, b, cls in normalized:
            arrow_lookup[(a, b)] = arrow_lookup[(b, a)] = cls
        one_way = []
        for t, h, cls in self.arrows:
            if t == h:
                raise SelfEdge(f"self-arrow at cell {t + 1}")
            if not (0 <= t < self.n_cells and 0 <= h < self.n_cells):
                raise GraphError(f"arrow {t + 1}->{h + 1} out of range")
            prev = arrow_lookup.get((t, h))
            if prev is not None and prev != cls:
                raise ConflictingEdgeClass(
                    f"arrow {t + 1}->{h + 1} listed with classes {prev!r} and {cls!r}")
            if prev is None:
                arrow_lookup[(t, h)] = cls
                one_way.append((t, h, cls))
        object.__setattr__(self, "arrows", tuple(sorted(one_way)))
        object.__setattr__(self, "_arrow_lookup", arrow_lookup)
        # one edge class must join one unordered pair of cell classes
        ends: dict[str, frozenset] = {}
        for a, b, cls in normalized + one_way:
            pair = frozenset((self.cell_class[a], self.cell_class[b]))
            if ends.setdefault(cls, pair) != pair:
                raise CompatibilityViolation(
                    f"edge class {cls!r} joins cell classes {sorted(ends[cls])} "
                    f"and {sorted(pair)}")
        object.__setattr__(self, "edges", tuple(sorted(normalized)))
        if self.weights is not None:
            w = {}
            for (u, v), val in self.weights.items():
                key = (min(u, v), max(u, v))
                if key not in lookup:
                    raise GraphError(f"weight given for missing edge {u + 1}-{v + 1}")
                w[key] = val
            object.__setattr__(self, "weights", w)
        object.__setattr__(self, "_lookup", lookup)

    @property
    def bidirected(self) -> bool:
        return not self.arrows

    @property
    def edge_classes(self) -> list[str]:
        return sorted({cls for _, _, cls in self.edges + self.arrows})

    @property
    def cell_classes(self) -> list[str]:
        return sorted(set(self.cell_class))

    def edge_class(self, u: int, v: int) -> str | None:
        """Class of the edge between ``u`` and ``v`` (either direction), or None."""
        return self._lookup.get((min(u, v), max(u, v)))

    def arrow_class(self, tail: int, head: int) -> str | None:
        """Class of the arrow ``tail -> head`` (a bidirected edge counts both ways)."""
        return self._arrow_lookup.get((tail, head))

    def weight(self, u: int, v: int) -> float:
        if self.edge_class(u, v) is None:
            return 0.0
        if self.weights is None:
            return 1.0
        return self.weights.get((min(u, v), max(u, v)), 1.0)

    def inputs(self, c: int) -> list[tuple[int, str]]:
        """Sources and classes of all arrows into ``c``."""
        return sorted((t, cls) for (t, h), cls in self._arrow_lookup.items() if h == c)

    def degree(self, c: int) -> int:
        return len(self.inputs(c))

    def to_document(self) -> dict:
        doc = {
            "cells": self.n_cells,
            "cell_classes": list(self.cell_class),
            "edges": [{"u": u + 1, "v": v + 1, "class": cls} for u, v, cls in self.edges],
        }
        if self.arrows:
            doc["arrows"] = [{"from": t + 1, "to": h + 1, "class": cls}
                             for t, h, cls in self.arrows]
        if self.weights is not None:
            doc["weights"] = {f"{u + 1}-{v + 1}": w for (u, v), w in sorted(self.weights.items())}
        return doc

    def serialize(self) -> str:
        return json.dumps(self.to_document(), indent=2) + "\n"


@dataclass(frozen=True)
class InputSignature:
    cell: int
    multiset: dict[str, int]

    @property
    def total(self) -> int:
        return sum(self.multiset.values())


@dataclass(frozen=True)
class AdjacencyMatrix:
    edge_class: str
    entries: np.ndarray


def parse_graph(document: str | Mapping) -> NetworkGraph:
    """Build a validated graph from a JSON string or an already-decoded mapping."""
    if isinstance(document, str):
        try:
            document = json.loads(document)
        except json.JSONDecodeError as exc:
            raise MalformedDocument(f"not valid JSON: {exc}") from exc
    if not isinstance(document, Mapping):
        raise MalformedDocument("graph document must be an object")
    try:
        n = document["cells"]
        raw_edges = document["edges"]
    except KeyError as exc:
        raise MalformedDocument(f"missing key {exc}") from exc
    if not isinstance(n, int) or isinstance(n, bool) or n < 1:
        raise MalformedDocument("'cells' must be a positive integer")
    classes = document.get("cell_classes", ["c"] * n)
    if not isinstance(classes, list) or len(classes) != n:
        raise MalformedDocument("'cell_classes' must list one label per cell")
    edges = []
    for e in raw_edges:
        try:
            u, v, cls = int(e["u"]) - 1, int(e["v"]) - 1, str(e["class"])
        except (KeyError, TypeError, ValueError) as exc:
            raise MalformedDocument(f"bad edge entry {e!r}") from exc
        if u == v:
            raise SelfEdge(f"self-edge at cell {u + 1}")
        if not (0 <= u < n and 0 <= v < n):
            raise MalformedDocument(f"edge {u + 1}-{v + 1} out of range")
        edges.append((u, v, cls))
    arrows = []
    for e in document.get("arrows", []):
        try:
            arrows.append((int(e["from"]) - 1, int(e["to"]) - 1, str(e["class"])))
        except (KeyError, TypeError, ValueError) as exc:
            raise MalformedDocument(f"bad arrow entry {e!r}") from exc
    weights = None
    if "weights" in document and document["weights"] is not None:
        weights = {}
        for key, w in document["weights"].items():
            try:
                a, b = (int(s) - 1 for s in key.split("-"))
                weights[(a, b)] = float(w)
            except (ValueError, AttributeError) as exc:
                raise MalformedDocument(f"bad weight key {key!r}") from exc
    try:
        return NetworkGraph(n, tuple(str(c) for c in classes), tuple(edges), weights,
                            tuple(arrows))
    except SelfEdge:
        raise
    except GraphError as exc:
        if type(exc) is GraphError:
            raise MalformedDocument(str(exc)) from exc
        raise


def load_graph(path: str) -> NetworkGraph:
    with open(path) as fh:
        return parse_graph(fh.read())


def _circulant(n: int, jumps: tuple[int, ...], cls: str = "a") -> NetworkGraph:
    edges = {(min(i, (i + j) % n), max(i, (i + j) % n)) for i in range(n) for j in jumps}
    return NetworkGraph(n, ("c",) * n, tuple((u, v, cls) for u, v in sorted(edges)))


def make_ring(n: int) -> NetworkGraph:
    if n < 3:
        raise GraphError("a ring needs at least 3 cells")
    return _circulant(n, (1,))


def make_Gn(n: int) -> NetworkGraph:
    """Circulant C_n(1, 2): nearest and next-nearest neighbours on a ring."""
    if n < 5:
        raise GraphError("G_n needs at least 5 cells")
    return _circulant(n, (1, 2))


def _from_pairs(n, classes, by_class: dict[str, list[tuple[int, int]]],
                arrows: tuple = ()) -> NetworkGraph:
    edges = [(u - 1, v - 1, cls) for cls, pairs in by_class.items() for u, v in pairs]
    arrows = tuple((t - 1, h - 1, cls) for t, h, cls in arrows)
    return NetworkGraph(n, tuple(classes), tuple(edges), None, arrows)


# Six identical cells, two edge types; Aut = <(12)(36)(45)> and {1,4},{2,5},{3,6}
# is balanced.  No bidirected graph of this kind exists, so two "b" couplings are
# one-way.  Found by scripts/search_fig1_graph.py.
_FIG1 = {
    "a": [(1, 3), (1, 4), (2, 5), (2, 6), (3, 5), (4, 6)],
    "b": [(1, 2), (1, 6), (2, 3), (3, 4), (5, 6)],
}
_FIG1_ARROWS = ((2, 4, "b"), (1, 5, "b"))

_FIG2 = {
    "theta": [(1, 2), (1, 5), (2, 4), (4, 5)],
    "phi": [(1, 6), (2, 3), (3, 4), (5, 6)],
}

_FIG5 = {
    "sin": [(1, 2), (1, 3), (2, 6), (3, 5), (4, 5), (4, 6)],
    "id": [(1, 5), (1, 6), (2, 3), (2, 4), (3, 4), (5, 6)],
}


def make_named_graph(name: str) -> NetworkGraph:
    if name == "fig1":
        return _from_pairs(6, ["c"] * 6, _FIG1, _FIG1_ARROWS)
    if name == "fig2":
        return _from_pairs(6, ["p", "p", "q", "p", "p", "q"], _FIG2)
    if name == "fig5":
        return _from_pairs(6, ["c"] * 6, _FIG5)
    raise GraphError(f"unknown named graph {name!r}")


def input_signature(g: NetworkGraph, c: int) -> InputSignature:
    counts = Counter(cls for _, cls in g.inputs(c))
    return InputSignature(c, dict(sorted(counts.items())))


def classify(g: NetworkGraph) -> str:
    sigs = {tuple(input_signature(g, c).multiset.items()) for c in range(g.n_cells)}
    if len(sigs) > 1:
        return "nonhomogeneous"
    return "regular" if len(g.edge_classes) <= 1 else "homogeneous"


def adjacency_matrices(g: NetworkGraph, exact: bool = False) -> list[AdjacencyMatrix]:
    """One matrix per edge class with ``A[i, j]`` set when ``j -> i`` is an arrow.

    Symmetric for bidirected graphs; weights substituted when present.
    With ``exact=True`` entries are :class:`fractions.Fraction` (object array),
    taken from the decimal form of each weight.
    """
    out = []
    for cls in g.edge_classes:
        m = np.zeros((g.n_cells, g.n_cells), dtype=object if exact else float)
        if exact:
            m[:] = Fraction(0)
        for u, v, c in g.edges:
            if c != cls:
                continue
            w = g.weight(u, v)
            if exact:
                w = Fraction(str(w)) if g.weights is not None else Fraction(1)
            m[u, v] = m[v, u] = w
        for t, h, c in g.arrows:
            if c == cls:
                m[h, t] = Fraction(1) if exact else 1.0
        out.append(AdjacencyMatrix(cls, m))
    return out
