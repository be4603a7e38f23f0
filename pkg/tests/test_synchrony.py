from collections import Counter
import pytest
from hypothesis import given, strategies as st

from synchrony_lab.automorphism import find_automorphisms
from synchrony_lab.graph_model import NetworkGraph, make_Gn, make_named_graph, make_ring
from synchrony_lab.synchrony import (MixedCellClasses, Partition, coarsest_balanced_refinement,
                                     enumerate_synchrony, is_balanced,
                                     is_invariant_under_adjacency, iter_partitions, refines)


def balanced_oracle(g, p):
    """Input multisets (edge class, class of source) agree within every class."""
    def sig(c):
        return Counter((cls, p.labels[d]) for d, cls in g.inputs(c))
    return all(sig(a) == sig(b) for k in p.classes() for a in k for b in k)


def bell(n):
    row = [1]
    for _ in range(n - 1):
        new = [row[-1]]
        for x in row:
            new.append(new[-1] + x)
        row = new
    return row[-1]


@pytest.mark.parametrize("n", range(1, 8))
def test_iter_partitions_counts_bell_numbers(n):
    parts = list(iter_partitions(n))
    assert len(parts) == bell(n) == len(set(parts))


def test_partition_parse_and_str():
    p = Partition.parse("1,4|2,5|3,6", 6)
    assert p.labels == (0, 1, 2, 0, 1, 2)
    assert str(p) == "1,4|2,5|3,6"
    assert Partition.from_classes([[3, 6], [2, 5], [1, 4]]) == p


def test_balanced_examples():
    assert is_balanced(make_Gn(6), Partition.parse("1,4|2,5|3,6", 6))
    assert is_balanced(make_Gn(6), Partition.singletons(6))
    assert not is_balanced(make_ring(4), Partition.parse("1,2|3|4", 4))


def test_invariance_examples():
    assert is_invariant_under_adjacency(make_named_graph("fig5"), Partition.total(6))
    assert not is_invariant_under_adjacency(make_Gn(6), Partition.parse("1,2|3,4,5,6", 6))


def test_mixed_cell_classes_rejected():
    with pytest.raises(MixedCellClasses):
        is_balanced(make_named_graph("fig2"), Partition.total(6))


def test_weighted_invariance_uses_exact_sums():
    g = NetworkGraph(3, ("c",) * 3, ((0, 1, "a"), (0, 2, "a")), {(0, 1): 0.1, (0, 2): 0.2})
    assert not is_invariant_under_adjacency(g, Partition.parse("1|2,3", 3))
    g = NetworkGraph(3, ("c",) * 3, ((0, 1, "a"), (0, 2, "a")), {(0, 1): 0.3, (0, 2): 0.3})
    assert is_invariant_under_adjacency(g, Partition.parse("1|2,3", 3))


def test_ring3_lattice():
    lat = enumerate_synchrony(make_ring(3))
    assert [str(p) for p in lat.patterns] == ["1,2,3", "1,2|3", "1,3|2", "1|2,3", "1|2|3"]
    assert lat.trivial == [False, False, False, False, True]


def test_g6_lattice():
    lat = enumerate_synchrony(make_Gn(6))
    assert len(lat.patterns) == 31
    assert Partition.parse("1,4|2,5|3,6", 6) in lat.patterns
    without = enumerate_synchrony(make_Gn(6), include_trivial=False)
    assert len(without.patterns) == 30 and Partition.total(6) in without.patterns


def test_fig1_contains_exotic_pattern():
    assert Partition.parse("1,4|2,5|3,6", 6) in enumerate_synchrony(make_named_graph("fig1")).patterns


GRAPHS = {
    "ring4": make_ring(4), "ring5": make_ring(5), "g5": make_Gn(5), "g6": make_Gn(6),
    "fig1": make_named_graph("fig1"), "fig2": make_named_graph("fig2"),
    "fig5": make_named_graph("fig5"),
}


@pytest.mark.parametrize("name", sorted(GRAPHS))
def test_enumeration_matches_brute_force(name):
    g = GRAPHS[name]
    brute = []
    for p in iter_partitions(g.n_cells):
        try:
            if balanced_oracle(g, p):
                _ = is_balanced(g, p)   # must not raise MixedCellClasses
                brute.append(p)
        except MixedCellClasses:
            pass
    brute = [p for p in brute
             if all(len({g.cell_class[c] for c in k}) == 1 for k in p.classes())]
    assert set(enumerate_synchrony(g).patterns) == set(brute)


@pytest.mark.parametrize("name", ["g6", "fig5"])
def test_lattice_closed_under_automorphisms(name):
    g = GRAPHS[name]
    pats = set(enumerate_synchrony(g).patterns)
    for e in find_automorphisms(g).elements:
        assert {e.act(p) for p in pats} == pats


@pytest.mark.parametrize("name", sorted(GRAPHS))
def test_lattice_structure(name):
    lat = enumerate_synchrony(GRAPHS[name])
    n = GRAPHS[name].n_cells
    assert Partition.singletons(n) in lat.patterns
    if len(GRAPHS[name].cell_classes) == 1:
        assert Partition.total(n) in lat.patterns
    for i, j in lat.refinement_edges:
        assert lat.patterns[i].n_classes < lat.patterns[j].n_classes
        assert refines(lat.patterns[j], lat.patterns[i])


@st.composite
def graph_and_partition(draw):
    n = draw(st.integers(2, 7))
    pairs = [(u, v) for u in range(n) for v in range(u + 1, n)]
    chosen = draw(st.lists(st.sampled_from(pairs), unique=True))
    classes = draw(st.lists(st.sampled_from("ab"), min_size=len(chosen), max_size=len(chosen)))
    g = NetworkGraph(n, ("c",) * n, tuple((u, v, k) for (u, v), k in zip(chosen, classes)))
    labels = draw(st.lists(st.integers(0, n - 1), min_size=n, max_size=n))
    return g, Partition.from_classes(
        [[c + 1 for c in range(n) if labels[c] == k] for k in sorted(set(labels))], n)


@given(graph_and_partition())
def test_balanced_iff_invariant(gp):
    g, p = gp
    assert is_balanced(g, p) == is_invariant_under_adjacency(g, p) == balanced_oracle(g, p)


@given(graph_and_partition())
def test_coarsest_refinement_is_balanced_and_finer(gp):
    g, p = gp
    q = coarsest_balanced_refinement(g, p)
    assert is_balanced(g, q) and refines(q, p)
    # no balanced pattern between q and p is coarser than q
    for r in enumerate_synchrony(g).patterns:
        if refines(r, p):
            assert refines(r, q)
