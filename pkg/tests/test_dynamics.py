import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from synchrony_lab.dynamics import (GOLDEN_TABLE1, GraphNotRegular, NotBalanced, NotEquilibrium,
                                    SearchOptions, StepTooLarge, SynchronyChart,
                                    classify_stability, equality_partition, find_equilibria,
                                    finest_pattern, generic_jacobian_check, integrate,
                                    lyapunov_tube_check, spread, table1_report)
from synchrony_lab.fields import OddCoupling, build_additive_system, g6_tilde, kuramoto_g6
from synchrony_lab.graph_model import make_ring
from synchrony_lab.synchrony import Partition, enumerate_synchrony, is_balanced

PI = math.pi


def circ(a):
    """Distance of an angle to 0 on the circle."""
    a = np.mod(a, 2 * PI)
    return np.minimum(a, 2 * PI - a)


def found(recs, x, torus=True):
    x = np.asarray(x, dtype=float)
    d = [np.max(circ(r.point - x)) if torus else np.max(np.abs(r.point - x)) for r in recs]
    return min(d) <= 1e-6


# ---------------------------------------------------------------- verdicts

def test_split_point():
    rec = classify_stability(kuramoto_g6(), np.array([0, 0, 0.5, 1, 1, 1.5]) * PI)
    c = rec.spectrum.counts
    assert (c.c_G, c.c_Gplus, c.c_Gminus) == (3, 4, 4)
    assert rec.interval == (1, 2) and rec.n_plus == 1 and rec.verdict == "unstable"


def test_tilde_odd_k_unstable():
    rec = classify_stability(g6_tilde(), np.array([0, 1, 1, 1, 0, 0]) * PI)
    assert rec.counts_triple == (2, 1, 1) and rec.interval == (1, 5) and rec.verdict == "unstable"


def test_tilde_even_k_stable():
    rec = classify_stability(g6_tilde(), np.array([0, 2, 2, 2, 0, 0]) * PI)
    assert rec.n_plus == 0 and rec.spectrum.n_zero == 1
    assert rec.verdict == "stable_modulo_diagonal" and not rec.family_hint


def test_degenerate_verdict():
    rec = classify_stability(kuramoto_g6(), np.array([0, 1, 0, 0, 1, 0]) * PI)
    assert rec.verdict == "unstable"
    zero = build_additive_system(make_ring(4), {"a": OddCoupling.linear(0.0)})
    rec = classify_stability(zero, np.zeros(4))
    assert rec.verdict == "degenerate" and rec.family_hint


def test_not_equilibrium():
    with pytest.raises(NotEquilibrium):
        classify_stability(kuramoto_g6(), np.array([0, 0.3, 0, 0, 0, 0]))


def test_record_gauge_and_wrap():
    rec = classify_stability(kuramoto_g6(), np.array([1, 1, 1 + PI, 1, 1, 1]))
    assert rec.point[0] == 0.0 and np.allclose(rec.point, [0, 0, PI, 0, 0, 0])
    assert str(rec.pattern) == "1,2,4,5|3|6"   # {1,2,4,5,6},{3} is not balanced


# ---------------------------------------------------------------- generic Jacobian

def test_generic_jacobian_kuramoto():
    rep = generic_jacobian_check(kuramoto_g6())
    assert np.allclose(rep.alpha, -4) and np.allclose(rep.beta, 1) and rep.residual < 1e-12
    assert not rep.degenerate


def test_generic_jacobian_zero_coupling():
    rep = generic_jacobian_check(build_additive_system(make_ring(5), {"a": OddCoupling.linear(0)}))
    assert np.allclose(rep.alpha, 0) and np.allclose(rep.beta, 0) and rep.degenerate


def test_generic_jacobian_amplitude():
    rep = generic_jacobian_check(build_additive_system(make_ring(5), {"a": OddCoupling.sine(2)}))
    assert np.allclose(rep.beta, 2) and np.allclose(rep.alpha, -4)


def test_generic_jacobian_needs_regular_graph():
    with pytest.raises(GraphNotRegular):
        generic_jacobian_check(g6_tilde())


# ---------------------------------------------------------------- charts

@given(st.sampled_from(enumerate_synchrony(kuramoto_g6().graph).patterns),
       st.lists(st.floats(-3, 3), min_size=5, max_size=5))
def test_chart_round_trip_and_invariance(p, vals):
    chart = SynchronyChart(p)
    v = np.array(vals[:chart.dim])
    x = chart.embed(v)
    assert x[0] == 0.0
    assert all(len({x[c] for c in k}) == 1 for k in p.classes())
    assert np.allclose(chart.restrict(x), v)
    # f maps the polydiagonal into itself
    fx = kuramoto_g6()(x)
    assert all(np.ptp(fx[k]) < 1e-12 for k in p.classes())


def test_equality_partition_on_torus():
    x = np.array([0.0, 2 * PI - 1e-9, PI, PI + 1e-8])
    assert str(equality_partition(x, torus=True)) == "1,2|3,4"
    assert str(equality_partition(x, torus=False)) == "1|2|3,4"


def test_finest_pattern_is_balanced():
    x = np.array([0, 0, 1, 0, 0, 1]) * PI
    p = finest_pattern(kuramoto_g6(), x)
    assert str(p) == "1,2,4,5|3,6" and is_balanced(kuramoto_g6().graph, p)


# ---------------------------------------------------------------- equilibria

def test_total_pattern_gives_origin():
    for sys in (kuramoto_g6(), g6_tilde()):
        recs = find_equilibria(sys, Partition.total(6))
        assert len(recs) == 1 and not recs[0].point.any()


def test_unbalanced_pattern_rejected():
    with pytest.raises(NotBalanced):
        find_equilibria(kuramoto_g6(), Partition.parse("1,2|3,4,5,6", 6))


def test_nonzero_constant_sum_warns():
    sys = build_additive_system(make_ring(4), {"a": OddCoupling.sine()}, {"c": 0.1})
    with pytest.warns(UserWarning):
        assert find_equilibria(sys, Partition.total(4)) == []


@pytest.fixture(scope="module")
def fix14():
    return find_equilibria(kuramoto_g6(), Partition.parse("1,4|2|3|5|6", 6))


def test_fix14_isolated_points(fix14):
    for x in ([0, 1, 0, 0, 1, 0], [0, 4 / 3, 2 / 3, 0, 4 / 3, 2 / 3], [0, 0, 1, 0, 0, 0]):
        assert found(fix14, np.array(x) * PI)


@pytest.mark.parametrize("on_family", [
    lambda x: circ(x[1] + x[4]) < 1e-6 and circ(x[2] - PI) < 1e-6 and circ(x[5] - PI) < 1e-6,
    lambda x: circ(x[4] - x[1] - PI) < 1e-6 and circ(x[2] - PI) < 1e-6 and circ(x[5] - PI) < 1e-6,
    lambda x: circ(x[2] + x[5]) < 1e-6 and circ(x[1] - PI) < 1e-6 and circ(x[4] - PI) < 1e-6,
    lambda x: circ(x[5] - x[2] - PI) < 1e-6 and circ(x[1] - PI) < 1e-6 and circ(x[4] - PI) < 1e-6,
])
def test_fix14_families(fix14, on_family):
    generic = [r for r in fix14 if on_family(r.point) and r.pattern.n_classes >= 4]
    assert generic


def test_fix14_points_are_equilibria_in_chart(fix14):
    sys = kuramoto_g6()
    for r in fix14:
        assert np.abs(sys(r.point)).max() <= 1e-10
        assert circ(r.point[0] - r.point[3]) < 1e-9
        assert r.interval[0] <= r.n_plus <= r.interval[1]
        # every equilibrium off the diagonal is unstable
        if r.pattern.n_classes > 1:
            assert r.n_plus >= 1


def test_tilde_census():
    recs = find_equilibria(g6_tilde(), Partition.parse("1,5|2,4|3|6", 6))
    assert len(recs) == 5
    for k in range(-2, 3):
        hit = [r for r in recs if np.abs(r.point - np.array([0, k, k, k, 0, 0]) * PI).max() <= 1e-6]
        assert len(hit) == 1
        assert hit[0].verdict == ("stable_modulo_diagonal" if k % 2 == 0 else "unstable")
        assert hit[0].spectrum.signature == ((0, 1, 5) if k % 2 == 0 else (1, 3, 2))


@pytest.mark.parametrize("chart", ["1,4|2,5|3,6", "1,2|4,5|3,6"])
def test_tilde_other_charts_only_diagonal(chart):
    recs = find_equilibria(g6_tilde(), Partition.parse(chart, 6))
    assert len(recs) == 1 and np.abs(recs[0].point).max() <= 1e-6


def test_tilde_census_independent_of_grid():
    p = Partition.parse("1,5|2,4|3|6", 6)
    base = [r.point for r in find_equilibria(g6_tilde(), p, SearchOptions(grid=8))]
    for grid in (9, 10):
        other = [r.point for r in find_equilibria(g6_tilde(), p, SearchOptions(grid=grid))]
        assert np.allclose(sorted(map(tuple, base)), sorted(map(tuple, other)), atol=1e-6)


# ---------------------------------------------------------------- integration

def test_integrate_constant_on_diagonal():
    traj = integrate(kuramoto_g6(), np.full(6, 0.7), t_end=5.0, dt=0.1)
    assert np.allclose(traj.states, 0.7)


def test_integrate_converges_and_dissipates():
    rng = np.random.default_rng(4)
    x0 = rng.uniform(-0.2, 0.2, size=(20, 6))
    traj = integrate(kuramoto_g6(), x0, t_end=100.0, dt=0.05, record_every=20)
    assert spread(traj.final).max() < 1e-6
    assert np.diff(traj.energy, axis=0).max() <= 0.0
    # coordinate sum is conserved when the constants cancel
    assert np.allclose(traj.final.sum(axis=1), x0.sum(axis=1), atol=1e-8)


def test_coordinate_sum_drifts_with_constants():
    sys = build_additive_system(make_ring(4), {"a": OddCoupling.sine()}, {"c": 0.25})
    x0 = np.array([0.1, -0.2, 0.3, 0.0])
    traj = integrate(sys, x0, t_end=4.0, dt=0.01)
    assert traj.final.sum() - x0.sum() == pytest.approx(4.0 * 1.0, abs=1e-8)


def test_step_too_large():
    sys = build_additive_system(make_ring(4), {"a": OddCoupling.linear(1.0)})
    with pytest.raises(StepTooLarge):
        integrate(sys, np.array([0.0, 1.0, 0.0, 1.0]), t_end=10.0, dt=2.0)
    with pytest.raises(ValueError):
        integrate(sys, np.zeros(4), t_end=1.0, dt=0.0)


@pytest.mark.parametrize("sys", [kuramoto_g6(), g6_tilde()], ids=["kuramoto", "tilde"])
def test_tube_check(sys):
    rep = lyapunov_tube_check(sys, epsilon=1.0, n_trials=1000, seed=0)
    assert rep.passed and rep.n_trials == 1000


def test_tube_check_needs_sign_condition():
    sys = build_additive_system(make_ring(4), {"a": OddCoupling.sine(-1)})
    with pytest.raises(ValueError):
        lyapunov_tube_check(sys, epsilon=1.0, n_trials=10)


@settings(max_examples=20)
@given(st.floats(-PI, PI))
def test_diagonal_is_orthogonal_to_field(c):
    x = np.full(6, c)
    assert float(kuramoto_g6()(x) @ x) == 0.0


# ---------------------------------------------------------------- census

@pytest.fixture(scope="module")
def report():
    return table1_report()


def row(report, n):
    return next(r for r in report["rows"] if r["row"] == n)


def test_table1_row5(report):
    r = row(report, 5)
    assert r["match"] and [f["counts"] + f["n_plus_interval"] for f in r["found"]] == [[3, 1, 1, 2, 5]]


def test_table1_row6(report):
    r = row(report, 6)
    assert r["match"] and [f["counts"] + f["n_plus_interval"] for f in r["found"]] == [[2, 1, 1, 1, 5]]


def test_table1_row4_isolated_point(report):
    hits = [f for f in row(report, 4)["found"] if f["counts"] == [6, 3, 3]]
    assert len(hits) == 1 and hits[0]["n_plus_interval"] == [3, 3] and hits[0]["exact_n_plus"] == 3


@pytest.mark.parametrize("n", [2, 3, 5, 6, 7, 8])
def test_table1_rows_that_match(report, n):
    assert row(report, n)["match"]


def test_table1_exact_n_plus_in_intervals(report):
    for r in report["rows"]:
        for f in r["found"]:
            lo, hi = f["n_plus_interval"]
            assert lo <= f["exact_n_plus"] <= hi and f["exact_n_plus"] >= 1


def test_table1_row1_has_no_points(report):
    assert row(report, 1)["found"] == [] and row(report, 1)["match"]


def test_golden_table_shape():
    assert [r.row for r in GOLDEN_TABLE1] == list(range(1, 9))
    assert GOLDEN_TABLE1[7].entries[0].counts == (6, 1, 1)


def test_table1_independent_of_grid(report):
    other = table1_report(grid=10)
    for a, b in zip(report["rows"], other["rows"]):
        assert [f["counts"] + f["n_plus_interval"] for f in a["found"]] == \
               [f["counts"] + f["n_plus_interval"] for f in b["found"]]
