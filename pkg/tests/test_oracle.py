import math

import numpy as np
import pytest
from hypothesis import assume, given, settings, strategies as st

from pou_lab import oracle
from pou_lab.cost import best_response, f_max_response, f_sum, pure_cost
from pou_lab.equilibrium import GameParams, tme_sum_disjoint, tmecor_value
from pou_lab.errors import GridCapExceeded, SupportCapExceeded
from pou_lab.graph import disjoint_paths_graph, enumerate_st_paths
from pou_lab.strategy import PathDistribution, ProductStrategy, point_mass, uniform_strategy

from conftest import dags


def test_point_mass_equals_pure_cost(crossing):
    paths = enumerate_st_paths(crossing)
    s = ProductStrategy(paths, [np.eye(len(paths))[0], np.eye(len(paths))[2]])
    for kind in ("sum", "max"):
        want = pure_cost([paths[0], paths[2]], ("e4", "e4"), 1.5, kind)
        assert oracle.exhaustive_expected_cost(s, ("e4", "e4"), 1.5, kind) == want


def test_exhaustive_examples(three_parallel, two_routes):
    s = uniform_strategy(enumerate_st_paths(three_parallel), 2)
    assert oracle.exhaustive_expected_cost(s, (three_parallel.edge_ids[0],), 3.0, "sum") == pytest.approx(10 / 3)
    paths = enumerate_st_paths(two_routes)
    half = ProductStrategy.iid(PathDistribution(paths, [0.5, 0.5]), 2)
    assert oracle.exhaustive_expected_cost(half, ("p02e01",), 1.0, "max") == pytest.approx(2.5, abs=1e-15)


def test_exhaustive_cap(three_parallel):
    s = uniform_strategy(enumerate_st_paths(three_parallel), 3)
    with pytest.raises(SupportCapExceeded):
        oracle.exhaustive_expected_cost(s, (), 1.0, "sum", cap=10)


@settings(max_examples=80, deadline=None)
@given(dags(), st.integers(1, 3), st.integers(1, 2), st.floats(0.1, 6), st.integers(0, 2**32 - 1))
def test_sum_best_response_value_matches_closed_form(graph, n, k, alpha, seed):
    rng = np.random.default_rng(seed)
    paths = enumerate_st_paths(graph)
    s = ProductStrategy(paths, rng.dirichlet(np.ones(len(paths)), size=n))
    d = best_response(s, alpha, k, "sum", graph)
    assert oracle.exhaustive_expected_cost(s, d, alpha, "sum") == pytest.approx(f_sum(s, alpha, k, graph), abs=1e-12)


@settings(max_examples=60, deadline=None)
@given(dags(), st.integers(1, 3), st.floats(0.1, 6), st.integers(0, 2**32 - 1))
def test_max_response_matches_exhaustive(graph, n, alpha, seed):
    rng = np.random.default_rng(seed)
    paths = enumerate_st_paths(graph)
    s = ProductStrategy.iid(PathDistribution(paths, rng.dirichlet(np.ones(len(paths)))), n)
    d = tuple(rng.choice(graph.edge_ids, size=2))
    assert oracle.exhaustive_expected_cost(s, d, alpha, "max") == pytest.approx(
        f_max_response(s, d, alpha, graph), abs=1e-12)


def test_monte_carlo_point_mass(crossing):
    paths = enumerate_st_paths(crossing)
    s = point_mass(paths, paths[1], 3)
    est, se = oracle.monte_carlo_cost(s, ("e1",), 2.0, "sum", mc=oracle.McConfig(1000, seed=5))
    assert est == pure_cost([paths[1]] * 3, ("e1",), 2.0, "sum") and se == 0.0


def test_monte_carlo_is_reproducible(three_parallel):
    s = uniform_strategy(enumerate_st_paths(three_parallel), 2)
    cfg = oracle.McConfig(100_000, seed=42)
    a = oracle.monte_carlo_cost(s, (three_parallel.edge_ids[0],), 3.0, "sum", mc=cfg)
    b = oracle.monte_carlo_cost(s, (three_parallel.edge_ids[0],), 3.0, "sum", mc=cfg)
    assert a == b
    exact = oracle.exhaustive_expected_cost(s, (three_parallel.edge_ids[0],), 3.0, "sum")
    assert abs(a[0] - exact) <= 3 * a[1]


def test_monte_carlo_coverage():
    """Across 1,000 seeded trials the 4-standard-error band holds at least 99% of the time."""
    g = disjoint_paths_graph([1, 2, 2])
    paths = enumerate_st_paths(g)
    rng = np.random.default_rng(7)
    hits = 0
    for t in range(1000):
        s = ProductStrategy(paths, rng.dirichlet(np.ones(3), size=2))
        d = (g.edge_ids[t % len(g.edge_ids)],)
        kind = "sum" if t % 2 else "max"
        exact = oracle.exhaustive_expected_cost(s, d, 2.0, kind)
        est, se = oracle.monte_carlo_cost(s, d, 2.0, kind, mc=oracle.McConfig(400, seed=t))
        hits += abs(est - exact) <= 4 * se + 1e-12
    assert hits >= 990


def test_grid_two_routes_max(two_routes):
    res = oracle.grid_minimax(two_routes, 2, 1, 1.0, "max", resolution=1000)
    assert res.value == pytest.approx(2.0, abs=0.01)
    assert res.witness[0] == pytest.approx(0.707, abs=0.01)
    assert res.slack <= 0.01


def test_grid_three_parallel_sum(three_parallel):
    res = oracle.grid_minimax(three_parallel, 2, 1, 3.0, "sum", resolution=300)
    assert res.value == pytest.approx(10 / 3, abs=0.02)
    np.testing.assert_allclose(res.witness, 1 / 3, atol=0.01)


@settings(max_examples=10, deadline=None)
@given(dags(max_vertices=4, max_edges=6), st.floats(0.2, 8))
def test_grid_single_agent_matches_tmecor(graph, alpha):
    assume(len(enumerate_st_paths(graph)) <= 4)
    res = oracle.grid_minimax(graph, 1, 1, alpha, "sum", resolution=60)
    value = tmecor_value(graph, GameParams(1, 1, alpha)).value
    assert value - 1e-9 <= res.value <= value + res.slack


def test_grid_gap_shrinks_with_resolution():
    g = disjoint_paths_graph([1, 1, 2])
    closed = tme_sum_disjoint(g, GameParams(2, 1, 1.7))[0]
    gaps = []
    for r in (25, 50, 100, 200):
        res = oracle.grid_minimax(g, 2, 1, 1.7, "sum", resolution=r)
        assert closed - 1e-12 <= res.value <= closed + res.slack
        gaps.append(res.value - closed)
    assert gaps[-1] <= gaps[0]


def test_grid_cap(three_parallel):
    with pytest.raises(GridCapExceeded):
        oracle.grid_minimax(three_parallel, 2, 1, 1.0, "sum", resolution=1000, caps=type(oracle.DEFAULT_CAPS)(grid=100))


def test_grid_slack_formula():
    paths = enumerate_st_paths(disjoint_paths_graph([1, 3]))
    slack, lip = oracle.grid_slack(paths, 2, 1, 2.0, "sum", 100)
    assert lip == (2 * 3 + 2.0) * 2 * 2 / 2 and slack == lip / 100
    slack, lip = oracle.grid_slack(paths, 2, 1, 2.0, "max", 100)
    assert lip == (3 + 2.0) * 2 * 2 / 2


def test_reference_game_payoffs():
    u = oracle.reference_game(2, 2, 1)
    assert u.shape == (2, 2, 2)
    assert u[0, 0, 1] == 1.0 and u[0, 1, 0] == 0.0 and u[1, 1, 1] == 0.0
    assert oracle.reference_game(3, 2, 2).shape == (3, 3, 6)


def test_brute_force_team_game():
    t1, t2 = oracle.brute_force_team_game(oracle.reference_game(2, 2, 1), 2, 1000)
    assert t1 == pytest.approx(0.5, abs=1e-9)
    assert t2 == pytest.approx(0.25, abs=1e-12)
    # One action per agent: nothing to correlate.
    u = np.array([[[0.3, 0.8]]])
    assert oracle.brute_force_team_game(u, 2, 10) == (pytest.approx(0.3), pytest.approx(0.3))


def test_junit_report_lists_failures():
    ok = oracle.CheckResult("good", 1.0, 1.0, 0.0, 0.01)
    bad = oracle.CheckResult("bad", 1.0, 2.0, 0.5, 0.01)
    xml = oracle.junit_xml([ok, bad])
    assert 'tests="2"' in xml and 'failures="1"' in xml and "bad" in xml


def test_quick_suite_passes():
    from pou_lab.crosscheck import run_suite

    results = run_suite(quick=True)
    assert results and all(r.passed for r in results), [r.name for r in results if not r.passed]
