"""Closed forms and solvers checked against the brute-force oracles."""
import itertools

import numpy as np

from . import oracle
from .cost import CostKind, best_response, f_max_response, f_sum
from .equilibrium import (
    GameParams,
    convert_payoff_to_cost,
    phi,
    plateau_threshold,
    r_u,
    tme_max_equal_lengths,
    tme_numeric,
    tme_sum_disjoint,
    tmecor_value,
)
from .graph import Graph, disjoint_paths_graph, enumerate_st_paths, prefix_table
from .strategy import PathDistribution, ProductStrategy, expected_distinct, uniform_strategy


def random_dag(rng, n_vertices=5, n_edges=8) -> Graph:
    """Random s-t DAG whose every edge lies on an s-t path (parallel edges allowed)."""
    from .graph import Edge

    names = ["s"] + [f"v{i}" for i in range(1, n_vertices - 1)] + ["t"]
    edges = []
    # A spine guarantees every vertex sits on some s-t path.
    for i in range(len(names) - 1):
        edges.append((names[i], names[i + 1]))
    while len(edges) < n_edges:
        a, b = sorted(rng.choice(len(names), size=2, replace=False))
        edges.append((names[a], names[b]))
    return Graph.from_edges([Edge(f"e{i:02d}", a, b) for i, (a, b) in enumerate(edges)])


def random_product(rng, paths, n, iid=False):
    m = len(paths)
    support = rng.random(m) < 0.7
    support[rng.integers(m)] = True
    rows = []
    for _ in range(1 if iid else n):
        w = rng.random(m) * support
        rows.append(w / w.sum())
    if iid:
        rows = rows * n
    return ProductStrategy(paths, np.array(rows))


def _uniform_check(graph, n, k, alpha, kind, resolution):
    def run():
        grid = oracle.grid_minimax(graph, n, k, alpha, kind, resolution=resolution)
        if kind == "sum":
            closed = tme_sum_disjoint(graph, GameParams(n, k, alpha, kind))[0]
        else:
            closed = tme_max_equal_lengths(graph, GameParams(n, k, alpha, kind))[0]
        # The grid can only sit above the true minimum, and by at most the slack.
        half = grid.slack / 2
        return closed + half, grid.value, half + 1e-9, f"slack={grid.slack:.3g}"
    return run


def suite(seed=2024, quick=False):
    """Yield ``(name, callable)`` pairs; each callable returns (expected, observed, tol, detail)."""
    rng = np.random.default_rng(seed)
    cases = []

    # Pure and expected costs on random graphs.
    for t in range(4 if quick else 12):
        g = random_dag(rng, 4 + t % 3, 6 + t % 4)
        paths = enumerate_st_paths(g)
        n, k, alpha = 1 + t % 3, 1 + t % 2, float(rng.uniform(0.5, 6))
        strat = random_product(rng, paths, n)
        d = best_response(strat, alpha, k, "sum", g)
        cases.append((f"f_sum_vs_exhaustive_{t}", lambda s=strat, d=d, a=alpha, k=k, g=g: (
            f_sum(s, a, k, g), oracle.exhaustive_expected_cost(s, d, a, "sum", g), 1e-12, "")))
        # Every interceptor multiset is a valid response; none may beat the closed form.
        def worst_sum(s=strat, a=alpha, k=k, g=g):
            best = max(oracle.exhaustive_expected_cost(s, dd, a, "sum", g)
                       for dd in itertools.combinations_with_replacement(g.edge_ids, k))
            return f_sum(s, a, k, g), best, 1e-12, ""
        cases.append((f"f_sum_is_worst_case_{t}", worst_sum))
        iid = random_product(rng, paths, n, iid=True)
        dd = tuple(sorted(rng.choice(g.edge_ids, size=k)))
        cases.append((f"f_max_vs_exhaustive_{t}", lambda s=iid, d=dd, a=alpha, g=g: (
            f_max_response(s, d, a, g), oracle.exhaustive_expected_cost(s, d, a, "max", g), 1e-12, "")))

        def mc(s=strat, d=d, a=alpha, g=g, kind="sum" if t % 2 else "max", t=t):
            exact = oracle.exhaustive_expected_cost(s, d, a, kind, g)
            est, se = oracle.monte_carlo_cost(s, d, a, kind, g, oracle.McConfig(20_000, seed + t))
            return exact, est, 4 * se + 1e-12, f"stderr={se:.3g}"
        cases.append((f"monte_carlo_{t}", mc))

    # Uniform-strategy optimality on disjoint paths.
    sum_instances = [((1, 1, 2), 2, 1, 1.0), ((1, 1, 1), 2, 1, 3.0), ((1, 2), 3, 1, 2.5), ((2, 2, 3), 2, 2, 1.5)]
    for lengths, n, k, alpha in sum_instances[: 2 if quick else None]:
        g = disjoint_paths_graph(lengths)
        cases.append((f"sum_disjoint_vs_grid_{lengths}_{n}_{k}_{alpha}",
                      _uniform_check(g, n, k, alpha, "sum", 300)))
    for m, n, k, alpha in [(2, 2, 1, 1.0), (3, 2, 1, 5.0), (2, 3, 2, 2.0)]:
        g = disjoint_paths_graph([1] * m)
        cases.append((f"max_equal_lengths_vs_grid_{m}_{n}_{k}_{alpha}",
                      _uniform_check(g, n, k, alpha, "max", 300)))

    # Correlated value against a single-agent grid.
    for lengths, alpha in [((1, 1, 2), 10.0), ((1, 2), 1.0), ((2, 3, 3), 4.0)]:
        g = disjoint_paths_graph(lengths)

        def corr(g=g, a=alpha):
            grid = oracle.grid_minimax(g, 1, 1, a, "sum", resolution=300)
            val = tmecor_value(g, GameParams(1, 1, a)).value
            return val + grid.slack / 2, grid.value, grid.slack / 2 + 1e-9, ""
        cases.append((f"tmecor_vs_grid_{lengths}_{alpha}", corr))

    # phi values against direct worst-case evaluation of the prefix uniforms.
    for t in range(2 if quick else 5):
        g = random_dag(rng, 5, 7 + t)
        n, k, alpha = 2, 1, float(rng.uniform(0.5, 5))

        def phi_check(g=g, n=n, k=k, a=alpha):
            table = prefix_table(g)
            direct = []
            for ps in table.path_sets:
                s = uniform_strategy(ps, n)
                direct.append(max(oracle.exhaustive_expected_cost(s, dd, a, "sum", g)
                                  for dd in itertools.combinations_with_replacement(g.edge_ids, k)))
            return phi(table, a, k, n)[0], min(direct), 1e-12, ""
        cases.append((f"phi_vs_uniform_worst_case_{t}", phi_check))

    # Plateau threshold against r_U on both sides of it.
    for lengths, n in [((1, 1), 2), ((1, 1), 3), ((1, 1, 2), 2), ((1, 2, 2), 3)]:
        g = disjoint_paths_graph(lengths)

        def plateau(g=g, n=n):
            a = plateau_threshold(g, n, 1).threshold
            limit = expected_distinct(prefix_table(g).mincut, n)
            at = r_u(g, GameParams(n, 1, max(a, 1e-9)))
            before = r_u(g, GameParams(n, 1, a * 0.99)) if a > 0 else -np.inf
            ok = abs(at - limit) <= 1e-9 and before < limit - 1e-12
            return 1.0, float(ok), 0.0, f"threshold={a:.6g}"
        cases.append((f"plateau_threshold_{lengths}_{n}", plateau))

    # Numeric MAX search against the grid.
    fig = disjoint_paths_graph([1, 2])
    for n, alpha in [(2, 1.0), (2, 3.0), (3, 1.0)]:
        def max_numeric(n=n, a=alpha):
            grid = oracle.grid_minimax(fig, n, 1, a, "max", resolution=1000)
            val = tme_numeric(fig, GameParams(n, 1, a, CostKind.MAX)).value
            return val + grid.slack / 2, grid.value, grid.slack / 2 + 1e-9, ""
        cases.append((f"max_numeric_vs_grid_two_paths_{n}_{alpha}", max_numeric))

    # Team games: brute force against the conversion solver.
    for m, n, k in [(2, 2, 1)] + ([] if quick else [(3, 2, 2), (2, 3, 1)]):
        u = oracle.reference_game(m, n, k)

        def team(u=u, n=n):
            t1, t2 = oracle.brute_force_team_game(u, n, 600)
            conv = convert_payoff_to_cost(u, n, 600)
            return t1 / t2, conv.pou_cost, 0.02 * t1 / t2, f"T'={t1:.6g} T''={t2:.6g}"
        cases.append((f"team_game_ratio_{m}_{n}_{k}", team))
    return cases


def run_suite(seed=2024, quick=False):
    return [oracle.timed_check(name, fn) for name, fn in suite(seed, quick)]
