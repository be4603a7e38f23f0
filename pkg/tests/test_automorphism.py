import random
from itertools import permutations

import pytest

from synchrony_lab.automorphism import (NotBalanced, Permutation, canonical_representative,
                                        conjugacy_group_patterns, detect_exotic,
                                        find_automorphisms, generate_group, orbit_partition)
from synchrony_lab.graph_model import make_Gn, make_named_graph, make_ring
from synchrony_lab.synchrony import Partition, enumerate_synchrony, is_balanced


def brute_automorphisms(g):
    out = []
    for img in permutations(range(g.n_cells)):
        if any(g.cell_class[c] != g.cell_class[img[c]] for c in range(g.n_cells)):
            continue
        if all(g.arrow_class(img[a], img[b]) == g.arrow_class(a, b)
               for a in range(g.n_cells) for b in range(g.n_cells) if a != b):
            out.append(Permutation(img))
    return sorted(out)


def all_subgroups(elements, n):
    """Every subgroup, as the closure of every subset of at most two generators."""
    seen = set()
    for a in elements:
        for b in elements:
            seen.add(frozenset(generate_group([a, b], n)))
    return seen


@pytest.mark.parametrize("g", [make_ring(4), make_ring(5), make_ring(6), make_Gn(5), make_Gn(6),
                               make_named_graph("fig1"), make_named_graph("fig2"),
                               make_named_graph("fig5")])
def test_matches_brute_force(g):
    assert find_automorphisms(g).elements == brute_automorphisms(g)


@pytest.mark.parametrize("n", range(3, 11))
def test_ring_is_dihedral(n):
    assert find_automorphisms(make_ring(n)).order == 2 * n


def test_g6_group():
    grp = find_automorphisms(make_Gn(6))
    assert grp.order == 48
    for cyc in ([(1, 4)], [(2, 5)], [(1, 2, 3, 4, 5, 6)], [(1, 6), (2, 5), (3, 4)]):
        assert Permutation.from_cycles(cyc, 6) in grp


def test_fig5_group():
    grp = find_automorphisms(make_named_graph("fig5"))
    gens = [Permutation.parse(s, 6) for s in ("(15)(24)", "(12)(36)(45)", "(156)(234)")]
    assert sorted(generate_group(gens, 6)) == grp.elements and grp.order == 12


def test_fig1_group():
    grp = find_automorphisms(make_named_graph("fig1"))
    assert grp.elements == sorted([Permutation.identity(6), Permutation.parse("(12)(36)(45)", 6)])


def test_group_axioms_spot_check():
    grp = find_automorphisms(make_Gn(6))
    members = set(grp.elements)
    rng = random.Random(0)
    for _ in range(100):
        a, b = rng.choice(grp.elements), rng.choice(grp.elements)
        assert a * b in members and a.inverse() in members
        assert (a * a.inverse()).is_identity


def test_permutation_parse_and_cycles():
    p = Permutation.parse("(1 4)(2 5)", 6)
    assert p.cycles() == [[0, 3], [1, 4]]
    assert str(p) == "(1 4)(2 5)"
    assert Permutation.parse("(14)(25)", 6) == p


def test_orbit_examples():
    assert orbit_partition([Permutation.identity(6)], 6) == Partition.singletons(6)
    assert str(orbit_partition([Permutation.parse("(14)(25)(36)", 6)], 6)) == "1,4|2,5|3,6"
    assert str(orbit_partition([Permutation.parse("(156)(234)", 6)], 6)) == "1,5,6|2,3,4"


def test_fig1_pattern_is_exotic():
    g = make_named_graph("fig1")
    v = detect_exotic(g, Partition.parse("1,4|2,5|3,6", 6))
    assert not v.symmetric and v.label == "exotic"


def test_unbalanced_rejected():
    with pytest.raises(NotBalanced):
        detect_exotic(make_ring(4), Partition.parse("1,2|3|4", 4))


@pytest.mark.parametrize("g", [make_ring(5), make_ring(6), make_Gn(6), make_named_graph("fig1"),
                               make_named_graph("fig5")])
def test_stabiliser_criterion_matches_subgroup_search(g):
    grp = find_automorphisms(g)
    orbits = {orbit_partition(list(h), g.n_cells) for h in all_subgroups(grp.elements, g.n_cells)}
    for p in enumerate_synchrony(g).patterns:
        v = detect_exotic(g, p, grp)
        assert v.symmetric == (p in orbits)
        if v.symmetric:
            assert orbit_partition(v.witness, g.n_cells) == p


@pytest.mark.parametrize("g", [make_Gn(6), make_named_graph("fig5")])
def test_subgroup_orbits_are_balanced(g):
    grp = find_automorphisms(g)
    for h in all_subgroups(grp.elements, g.n_cells):
        assert is_balanced(g, orbit_partition(list(h), g.n_cells))


@pytest.mark.parametrize("n", [5, 6, 7])
def test_gn_and_rings_have_no_exotic_patterns(n):
    for g in (make_Gn(n), make_ring(n)):
        grp = find_automorphisms(g)
        assert all(detect_exotic(g, p, grp).symmetric for p in enumerate_synchrony(g).patterns)


def nontrivial_classes(g):
    return [c for c in conjugacy_group_patterns(g, enumerate_synchrony(g))
            if not (c.representative.is_trivial or c.representative.is_total)]


def test_g6_has_eight_conjugacy_classes():
    reps = {str(c.representative) for c in nontrivial_classes(make_Gn(6))}
    grp = find_automorphisms(make_Gn(6))
    expected = ["1,4|2|3|5|6", "1,2,4,5|3|6", "1,2|3|4,5|6", "1,4|2,5|3|6", "1,2,4,5|3,6",
                "1,2,3|4,5,6", "1,2|3,6|4,5", "1,4|2,5|3,6"]
    assert reps == {str(canonical_representative(Partition.parse(s, 6), grp)) for s in expected}


def test_fig5_has_five_conjugacy_classes():
    assert len(nontrivial_classes(make_named_graph("fig5"))) == 5


def test_singleton_is_its_own_class():
    classes = conjugacy_group_patterns(make_Gn(6), enumerate_synchrony(make_Gn(6)))
    single = [c for c in classes if c.representative.is_trivial]
    assert len(single) == 1 and single[0].members == [Partition.singletons(6)]


@pytest.mark.parametrize("n, expected", [(8, 0), (9, 0), (11, 0)])
def test_exotic_census_gn(n, expected):
    from synchrony_lab.checks import exotic_count
    assert exotic_count(make_Gn(n)) == expected


def test_g10_has_exotic_patterns():
    from synchrony_lab.checks import exotic_count
    assert exotic_count(make_Gn(10)) == 45
