"""Automorphism groups of typed graphs and exotic-synchrony detection."""
from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

from .graph_model import NetworkGraph, input_signature
from .synchrony import (Partition, SynchronyLattice, TooManyCells, is_balanced)

__all__ = [
    "Permutation", "AutomorphismGroup", "NotBalanced", "ExoticVerdict",
    "find_automorphisms", "orbit_partition", "detect_exotic",
    "conjugacy_group_patterns", "PatternClass", "generate_group",
]

MAX_AUTOMORPHISM_CELLS = 14


class NotBalanced(ValueError):
    pass


@dataclass(frozen=True, order=True)
class Permutation:
    """Bijection on cells; ``image[c]`` is the 0-based image of cell ``c``."""
    image: tuple[int, ...]

    def __post_init__(self):
        if sorted(self.image) != list(range(len(self.image))):
            raise ValueError(f"not a permutation: {self.image}")

    @classmethod
    def identity(cls, n: int) -> "Permutation":
        return cls(tuple(range(n)))

    @classmethod
    def from_cycles(cls, cycles: Iterable[Iterable[int]], n: int) -> "Permutation":
        """From 1-based cycles, e.g. ``[(1, 4), (2, 5)]``."""
        image = list(range(n))
        for cyc in cycles:
            cyc = [c - 1 for c in cyc]
            for a, b in zip(cyc, cyc[1:] + cyc[:1]):
                image[a] = b
        return cls(tuple(image))

    @classmethod
    def parse(cls, text: str, n: int) -> "Permutation":
        """Parse cycle notation such as ``"(1 4)(2 5)"`` or ``"(14)(25)"`` for n < 10."""
        cycles = []
        for chunk in text.replace(")", "").split("(")[1:]:
            parts = chunk.split() if (" " in chunk or "," in chunk) else list(chunk)
            cycles.append([int(s.strip(",")) for s in parts if s.strip(",")])
        return cls.from_cycles(cycles, n)

    def __call__(self, c: int) -> int:
        return self.image[c]

    def __mul__(self, other: "Permutation") -> "Permutation":
        # (self * other)(c) = self(other(c))
        return Permutation(tuple(self.image[c] for c in other.image))

    def inverse(self) -> "Permutation":
        inv = [0] * len(self.image)
        for c, d in enumerate(self.image):
            inv[d] = c
        return Permutation(tuple(inv))

    @property
    def is_identity(self) -> bool:
        return all(c == d for c, d in enumerate(self.image))

    def cycles(self) -> list[list[int]]:
        seen, out = set(), []
        for start in range(len(self.image)):
            if start in seen:
                continue
            cyc, c = [], start
            while c not in seen:
                seen.add(c)
                cyc.append(c)
                c = self.image[c]
            if len(cyc) > 1:
                out.append(cyc)
        return out

    def __str__(self) -> str:
        cyc = self.cycles()
        if not cyc:
            return "()"
        return "".join("(" + " ".join(str(c + 1) for c in k) + ")" for k in cyc)

    def act(self, p: Partition) -> Partition:
        """Image of a partition: cell gamma(c) takes the class of c."""
        labels = [0] * len(p.labels)
        for c, k in enumerate(p.labels):
            labels[self.image[c]] = k
        return Partition(tuple(labels))


def generate_group(gens: Sequence[Permutation], n: int) -> list[Permutation]:
    """Closure of ``gens`` under composition, sorted."""
    ident = Permutation.identity(n)
    elems = {ident}
    frontier = [ident]
    while frontier:
        nxt = []
        for a in frontier:
            for g in gens:
                b = g * a
                if b not in elems:
                    elems.add(b)
                    nxt.append(b)
        frontier = nxt
    return sorted(elems)


@dataclass
class AutomorphismGroup:
    n: int
    elements: list[Permutation]
    generators: list[Permutation]

    @property
    def order(self) -> int:
        return len(self.elements)

    def __contains__(self, item: Permutation) -> bool:
        return item in set(self.elements)


def _invariant(g: NetworkGraph, c: int) -> tuple:
    return (g.cell_class[c], tuple(input_signature(g, c).multiset.items()))


def find_automorphisms(g: NetworkGraph, max_cells: int = MAX_AUTOMORPHISM_CELLS) -> AutomorphismGroup:
    """All class-preserving automorphisms by backtracking.

    Candidates for the image of a cell must share its cell class and its
    per-edge-class degree; each partial map is checked against all edges among
    already-mapped cells.
    """
    n = g.n_cells
    if n > max_cells:
        raise TooManyCells(f"{n} cells exceeds the automorphism guard of {max_cells}")
    inv = [_invariant(g, c) for c in range(n)]
    cls = [[g.arrow_class(u, v) for v in range(n)] for u in range(n)]
    image = [-1] * n
    used = [False] * n
    found: list[Permutation] = []

    def rec(c: int):
        if c == n:
            found.append(Permutation(tuple(image)))
            return
        for d in range(n):
            if used[d] or inv[d] != inv[c]:
                continue
            if any(cls[c][b] != cls[d][image[b]] or cls[b][c] != cls[image[b]][d]
                   for b in range(c)):
                continue
            image[c], used[d] = d, True
            rec(c + 1)
            image[c], used[d] = -1, False

    rec(0)
    found.sort()
    return AutomorphismGroup(n, found, _greedy_generators(found, n))


def _greedy_generators(elements: list[Permutation], n: int) -> list[Permutation]:
    gens: list[Permutation] = []
    span = {Permutation.identity(n)}
    # larger-support, higher-order elements first tends to give short lists
    for e in sorted(elements, key=lambda p: (-len(p.cycles()), p.image)):
        if e not in span:
            gens.append(e)
            span = set(generate_group(gens, n))
            if len(span) == len(elements):
                break
    return gens


def orbit_partition(grp_subset: Sequence[Permutation], n: int) -> Partition:
    """Orbits of the group generated by ``grp_subset``."""
    parent = list(range(n))

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for p in grp_subset:
        for c, d in enumerate(p.image):
            a, b = find(c), find(d)
            if a != b:
                parent[max(a, b)] = min(a, b)
    return Partition(tuple(find(c) for c in range(n)))


@dataclass
class ExoticVerdict:
    pattern: Partition
    symmetric: bool
    witness: list[Permutation]

    @property
    def label(self) -> str:
        return "symmetric" if self.symmetric else "exotic"


def detect_exotic(g: NetworkGraph, p: Partition, group: AutomorphismGroup | None = None) -> ExoticVerdict:
    """Decide whether a balanced partition is the orbit partition of some subgroup.

    Uses the stabiliser H of every class: a subgroup realising ``p`` must lie in
    H, and H's orbits refine ``p``; so ``p`` is symmetric iff H's orbits equal it.
    """
    if not is_balanced(g, p):
        raise NotBalanced(f"{p} is not balanced")
    group = group or find_automorphisms(g)
    classes = [frozenset(k) for k in p.classes()]
    stab = [e for e in group.elements
            if all(frozenset(e.image[c] for c in k) == k for k in classes)]
    if orbit_partition(stab, g.n_cells) == p:
        return ExoticVerdict(p, True, _greedy_generators(stab, g.n_cells))
    return ExoticVerdict(p, False, [])


def canonical_representative(p: Partition, group: AutomorphismGroup) -> Partition:
    return min(e.act(p) for e in group.elements)


@dataclass
class PatternClass:
    representative: Partition
    members: list[Partition]


def conjugacy_group_patterns(g: NetworkGraph, lattice: SynchronyLattice,
                             group: AutomorphismGroup | None = None) -> list[PatternClass]:
    """Group the lattice's patterns into Aut(G)-orbits, one canonical representative each."""
    group = group or find_automorphisms(g)
    buckets: dict[Partition, list[Partition]] = {}
    for p in lattice.patterns:
        buckets.setdefault(canonical_representative(p, group), []).append(p)
    return [PatternClass(rep, sorted(ms)) for rep, ms in
            sorted(buckets.items(), key=lambda kv: (kv[0].n_classes, kv[0].labels))]
