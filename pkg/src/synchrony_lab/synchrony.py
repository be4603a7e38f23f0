"""Balanced partitions (synchrony subspaces) of typed graphs.

A partition is balanced when, for every pair of classes ``K``, ``J`` and every
edge class, all cells of ``K`` receive the same number of inputs from ``J``.
All checks here are integer (or exact rational) arithmetic.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Iterator, Sequence

import numpy as np

from .graph_model import NetworkGraph, adjacency_matrices

__all__ = [
    "Partition", "SynchronyLattice", "MixedCellClasses", "TooManyCells",
    "is_balanced", "is_invariant_under_adjacency", "enumerate_synchrony",
    "iter_partitions", "coarsest_balanced_refinement", "refines",
]

MAX_ENUMERATION_CELLS = 13


class MixedCellClasses(ValueError):
    pass


class TooManyCells(ValueError):
    pass


def _canonical(labels: Sequence[int]) -> tuple[int, ...]:
    relabel: dict[int, int] = {}
    return tuple(relabel.setdefault(x, len(relabel)) for x in labels)


@dataclass(frozen=True, order=True)
class Partition:
    """Cell partition stored as a restricted-growth string (0-based labels)."""
    labels: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "labels", _canonical(self.labels))

    @classmethod
    def from_classes(cls, classes: Iterable[Iterable[int]], n: int | None = None) -> "Partition":
        """Build from 1-based classes; cells not mentioned become singletons."""
        classes = [list(k) for k in classes]
        if n is None:
            n = max(max(k) for k in classes)
        labels = [-1] * n
        for i, k in enumerate(classes):
            for c in k:
                if labels[c - 1] != -1:
                    raise ValueError(f"cell {c} appears twice")
                labels[c - 1] = i
        nxt = len(classes)
        for c in range(n):
            if labels[c] == -1:
                labels[c] = nxt
                nxt += 1
        return cls(tuple(labels))

    @classmethod
    def parse(cls, text: str, n: int) -> "Partition":
        """Parse ``"1,4|2,5|3,6"``."""
        classes = [[int(s) for s in part.split(",") if s.strip()] for part in text.split("|")]
        return cls.from_classes([k for k in classes if k], n)

    @classmethod
    def singletons(cls, n: int) -> "Partition":
        return cls(tuple(range(n)))

    @classmethod
    def total(cls, n: int) -> "Partition":
        return cls((0,) * n)

    @property
    def n_cells(self) -> int:
        return len(self.labels)

    @property
    def n_classes(self) -> int:
        return max(self.labels) + 1

    def classes(self) -> list[list[int]]:
        """Classes as sorted lists of 0-based cells, in label order."""
        out: list[list[int]] = [[] for _ in range(self.n_classes)]
        for c, k in enumerate(self.labels):
            out[k].append(c)
        return out

    def classes_1based(self) -> list[list[int]]:
        return [[c + 1 for c in k] for k in self.classes()]

    @property
    def is_trivial(self) -> bool:
        return self.n_classes == self.n_cells

    @property
    def is_total(self) -> bool:
        return self.n_classes == 1

    def __str__(self) -> str:
        return "|".join(",".join(str(c) for c in k) for k in self.classes_1based())


def refines(fine: Partition, coarse: Partition) -> bool:
    """True when every class of ``fine`` lies inside a class of ``coarse``."""
    seen: dict[int, int] = {}
    for a, b in zip(fine.labels, coarse.labels):
        if seen.setdefault(a, b) != b:
            return False
    return True


@dataclass
class SynchronyLattice:
    patterns: list[Partition]
    refinement_edges: list[tuple[int, int]]
    trivial: list[bool] = field(default_factory=list)

    def to_document(self) -> dict:
        return {
            "patterns": [
                {"classes": p.classes_1based(), "balanced": True, "trivial": t}
                for p, t in zip(self.patterns, self.trivial)
            ],
            "refinements": [list(e) for e in self.refinement_edges],
        }


def _class_counts(g: NetworkGraph, labels: Sequence[int]) -> dict[str, np.ndarray]:
    """counts[cls][c, J] = number of cls-inputs of cell c coming from class J."""
    k = max(labels) + 1
    onehot = np.zeros((g.n_cells, k), dtype=np.int64)
    onehot[np.arange(g.n_cells), list(labels)] = 1
    return {a.edge_class: a.entries.astype(np.int64) @ onehot
            for a in adjacency_matrices(g)}


def _check_cell_classes(g: NetworkGraph, p: Partition) -> None:
    if p.n_cells != g.n_cells:
        raise ValueError(f"partition has {p.n_cells} cells, graph has {g.n_cells}")
    owner: dict[int, str] = {}
    for c, k in enumerate(p.labels):
        if owner.setdefault(k, g.cell_class[c]) != g.cell_class[c]:
            raise MixedCellClasses(f"class of cell {c + 1} mixes cell classes")


def is_balanced(g: NetworkGraph, p: Partition) -> bool:
    _check_cell_classes(g, p)
    counts = _class_counts(g, p.labels)
    for members in p.classes():
        if len(members) < 2:
            continue
        for m in counts.values():
            rows = m[members]
            if (rows != rows[0]).any():
                return False
    return True


def is_invariant_under_adjacency(g: NetworkGraph, p: Partition) -> bool:
    """Exact test that every adjacency matrix maps the polydiagonal into itself.

    A^xi maps Delta into Delta iff, for each class J, the row sums of A^xi over
    the columns in J are constant on each class K.
    """
    if p.n_cells != g.n_cells:
        raise ValueError(f"partition has {p.n_cells} cells, graph has {g.n_cells}")
    classes = p.classes()
    for adj in adjacency_matrices(g, exact=True):
        a = adj.entries
        for cols in classes:
            sums = [sum(a[r, cols], Fraction(0)) for r in range(g.n_cells)]
            for rows in classes:
                if any(sums[r] != sums[rows[0]] for r in rows[1:]):
                    return False
    return True


def iter_partitions(n: int) -> Iterator[Partition]:
    """All set partitions of n cells as restricted-growth strings, lexicographic."""
    labels = [0] * n

    def rec(i: int, k: int):
        if i == n:
            yield Partition(tuple(labels))
            return
        for j in range(k + 1):
            labels[i] = j
            yield from rec(i + 1, max(k, j + 1))

    if n == 0:
        return
    yield from rec(1, 1)


def _balanced_rgs(g: NetworkGraph) -> list[tuple[int, ...]]:
    """Restricted-growth search with interval pruning on partial input counts."""
    n = g.n_cells
    mats = [a.entries.astype(np.int64) for a in adjacency_matrices(g)]
    nbrs = [[np.flatnonzero(m[c]) for c in range(n)] for m in mats]
    labels = [-1] * n
    found: list[tuple[int, ...]] = []

    def feasible(upto: int, k: int) -> bool:
        # cells 0..upto are assigned; a neighbour index > upto is still free
        for cells_by_class in _group(labels[: upto + 1], k):
            if len(cells_by_class) < 2:
                continue
            for nb in nbrs:
                lo = np.zeros((len(cells_by_class), k), dtype=np.int64)
                free = np.zeros(len(cells_by_class), dtype=np.int64)
                for r, c in enumerate(cells_by_class):
                    for d in nb[c]:
                        if d <= upto:
                            lo[r, labels[d]] += 1
                        else:
                            free[r] += 1
                hi = lo + free[:, None]
                if (lo.max(axis=0) > hi.min(axis=0)).any():
                    return False
        return True

    def rec(i: int, k: int):
        if i == n:
            found.append(tuple(labels))
            return
        for j in range(k + 1):
            if j < k and g.cell_class[i] != g.cell_class[labels.index(j)]:
                continue
            labels[i] = j
            kk = max(k, j + 1)
            if feasible(i, kk):
                rec(i + 1, kk)
        labels[i] = -1

    labels[0] = 0
    rec(1, 1)
    return found


def _group(labels: Sequence[int], k: int) -> list[list[int]]:
    out: list[list[int]] = [[] for _ in range(k)]
    for c, j in enumerate(labels):
        out[j].append(c)
    return out


def enumerate_synchrony(g: NetworkGraph, include_trivial: bool = True,
                        max_cells: int = MAX_ENUMERATION_CELLS) -> SynchronyLattice:
    """Every balanced partition of ``g`` plus the refinement (subspace inclusion) edges.

    Patterns are sorted by ascending class count, then lexicographically.  An
    edge ``(i, j)`` means the subspace of pattern ``i`` is properly contained in
    that of pattern ``j`` (``i`` is strictly coarser), restricted to covering
    pairs.
    """
    if g.n_cells > max_cells:
        raise TooManyCells(f"{g.n_cells} cells exceeds the enumeration guard of {max_cells}")
    patterns = sorted((Partition(l) for l in _balanced_rgs(g)),
                      key=lambda p: (p.n_classes, p.labels))
    if not include_trivial:
        patterns = [p for p in patterns if not p.is_trivial or p.is_total]
    below = np.zeros((len(patterns), len(patterns)), dtype=np.float64)
    for i, pi in enumerate(patterns):
        for j, pj in enumerate(patterns):
            if pi.n_classes < pj.n_classes and refines(pj, pi):
                below[i, j] = 1.0
    # (i, j) covers when no m sits strictly between them
    between = (below @ below) > 0
    covering = [(int(i), int(j)) for i, j in zip(*np.nonzero((below > 0) & ~between))]
    return SynchronyLattice(patterns, covering, [p.is_trivial for p in patterns])


def coarsest_balanced_refinement(g: NetworkGraph, p: Partition) -> Partition:
    """Largest balanced partition finer than ``p`` (iterated colour refinement).

    Cells are also split by cell class first, so the result is always a valid
    balanced partition.
    """
    seed: dict[tuple, int] = {}
    labels = Partition(tuple(
        seed.setdefault((p.labels[c], g.cell_class[c]), len(seed))
        for c in range(g.n_cells))).labels
    while True:
        counts = _class_counts(g, labels)
        keys = [
            (labels[c],) + tuple(tuple(counts[cls][c]) for cls in sorted(counts))
            for c in range(g.n_cells)
        ]
        new = Partition(tuple(sorted(set(keys)).index(key) for key in keys)).labels
        if max(new) == max(labels):
            return Partition(labels)
        labels = new
