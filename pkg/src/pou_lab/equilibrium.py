"""Correlated and uncorrelated team values, uniform-strategy ratios and PoU bounds.

Naming: ``tmecor`` is the team's value when its members share randomness
(all agents follow one common path distribution), ``tme`` the value when
agents randomise independently, and the price of uncorrelation (PoU) is
``tme / tmecor``.  ``phi(alpha, n)`` is the best value over uniform
strategies on the cheapest ``i`` edge-disjoint paths, read off the prefix
table.
"""
import itertools
from dataclasses import dataclass, field

import numpy as np

from .config import DEFAULT_CAPS
from .cost import CostKind, F_max, IidObjective, max_boundary, worst_case_cost
from .errors import (
    InvalidParams,
    LPError,
    NonpositiveTeamValue,
    NotDisjointPaths,
)
from .graph import Graph, enumerate_st_paths, ensure_valid, is_disjoint_paths_graph, prefix_table
from .lp import solve_lp
from .search import SearchConfig, local_search, multistart_minimize, simplex_grid
from .strategy import (
    PathDistribution,
    ProductStrategy,
    decreasing_rearrange,
    expected_distinct,
    uniform_strategy,
)

CROSS_CHECK_TOL = 1e-9


@dataclass(frozen=True)
class GameParams:
    n: int
    k: int
    alpha: float
    kind: CostKind = CostKind.SUM

    def __post_init__(self):
        if int(self.n) != self.n or self.n < 1:
            raise InvalidParams(f"n must be a positive integer, got {self.n!r}")
        if int(self.k) != self.k or self.k < 1:
            raise InvalidParams(f"k must be a positive integer, got {self.k!r}")
        if not (np.isfinite(self.alpha) and self.alpha > 0):
            raise InvalidParams(f"alpha must be positive and finite, got {self.alpha!r}")
        object.__setattr__(self, "n", int(self.n))
        object.__setattr__(self, "k", int(self.k))
        object.__setattr__(self, "alpha", float(self.alpha))
        object.__setattr__(self, "kind", CostKind.parse(self.kind))

    def replace(self, **changes):
        values = dict(n=self.n, k=self.k, alpha=self.alpha, kind=self.kind)
        values.update(changes)
        return GameParams(**values)


# -- correlated team ----------------------------------------------------------


@dataclass
class TmecorResult:
    value: float
    witness: PathDistribution
    flow_value: float
    exact: bool


def _edge_flow_value(graph: Graph, weight: float) -> float:
    """min sum(x) + weight * max(x) over unit s-t flows, via scipy's HiGHS."""
    from scipy.optimize import linprog

    ids = graph.edge_ids
    ne = len(ids)
    c = np.concatenate([np.ones(ne), [weight]])
    A_ub = np.hstack([np.eye(ne), -np.ones((ne, 1))])
    rows, rhs = [], []
    for v in graph.vertices:
        if v == graph.sink:
            continue
        row = np.zeros(ne + 1)
        for e in graph.out_edges.get(v, ()):
            row[graph.edge_index[e.id]] += 1
        for e in graph.in_edges.get(v, ()):
            row[graph.edge_index[e.id]] -= 1
        rows.append(row)
        rhs.append(1.0 if v == graph.source else 0.0)
    res = linprog(c, A_ub=A_ub, b_ub=np.zeros(ne), A_eq=np.array(rows), b_eq=np.array(rhs),
                  bounds=[(0, None)] * (ne + 1), method="highs")
    if res.status != 0:
        raise LPError(f"edge-flow LP failed: {res.message}")
    return float(res.fun)


def tmecor_value(graph: Graph, params: GameParams, caps=DEFAULT_CAPS) -> TmecorResult:
    """Best common path distribution: min sum p|p| + k*alpha*t with every edge load <= t.

    The path LP is solved exactly when small; its value is cross-checked
    against the equivalent edge-flow LP.
    """
    ensure_valid(graph)
    paths = enumerate_st_paths(graph, caps.paths)
    m = len(paths)
    weight = params.k * params.alpha
    c = [p.length for p in paths] + [weight]
    index = graph.edge_index
    A_ub = [[0] * (m + 1) for _ in graph.edge_ids]
    for i, p in enumerate(paths):
        for e in p.edges:
            A_ub[index[e]][i] = 1
    for row in A_ub:
        row[m] = -1
    res = solve_lp(c, A_ub, [0] * len(A_ub), [[1] * m + [0]], [1])
    probs = np.clip(res.x[:m], 0.0, None)
    probs = probs / probs.sum()
    flow_val = _edge_flow_value(graph, weight)
    if abs(flow_val - res.value) > CROSS_CHECK_TOL * max(1.0, abs(res.value)):
        raise LPError(f"path LP {res.value!r} disagrees with edge-flow LP {flow_val!r}")
    return TmecorResult(res.value, PathDistribution(paths, probs), flow_val, res.exact)


# -- uniform strategies ------------------------------------------------------


def phi(table, alpha: float, k: int, n: int):
    """``(value, i)`` minimising ``E(i, n) / i * (k*alpha + S_i)``; smallest ``i`` on ties."""
    best = None
    for i, s in enumerate(table.sums, start=1):
        val = expected_distinct(i, n) / i * (k * alpha + s)
        if best is None or val < best[0]:
            best = (val, i)
    return best


def r_u(graph: Graph, params: GameParams) -> float:
    table = prefix_table(graph)
    return phi(table, params.alpha, params.k, params.n)[0] / phi(table, params.alpha, params.k, 1)[0]


@dataclass(frozen=True)
class PlateauThreshold:
    threshold: float
    display_bound: float


def plateau_threshold(graph: Graph, n: int, k: int) -> PlateauThreshold:
    """Smallest ``alpha`` from which ``r_U`` equals ``E(m_c, n)``.

    Both the ``n``-agent and the single-agent minimum must sit on the
    ``i = m_c`` term; each competing term ``i`` crosses it at a computable
    ``alpha``.  Terms whose slopes coincide never cross and are skipped.
    """
    table = prefix_table(graph)
    mc = table.mincut
    S = table.sums
    if mc == 1:
        return PlateauThreshold(0.0, 0.0)
    best = 0.0
    # A single agent has r_U = 1 = E(m_c, 1) for every alpha.
    for nn in sorted({1, n}) if n > 1 else ():
        e_mc = expected_distinct(mc, nn)
        for i in range(1, mc):
            e_i = expected_distinct(i, nn)
            den = mc * e_i - i * e_mc
            if den <= 0:
                continue
            best = max(best, (i * S[mc - 1] * e_mc - mc * S[i - 1] * e_i) / (k * den))
    q = (1.0 - 1.0 / mc) ** n
    display = (S[mc - 1] * (1.0 - q) - S[mc - 2]) / (k * q)
    return PlateauThreshold(best, display)


# -- uncorrelated team --------------------------------------------------------


def _require_disjoint(graph):
    ensure_valid(graph)
    if not is_disjoint_paths_graph(graph):
        raise NotDisjointPaths("graph is not a union of internally disjoint s-t paths")


def tme_sum_disjoint(graph: Graph, params: GameParams):
    """Exact uncorrelated SUM value on disjoint-path graphs, with its uniform witness."""
    _require_disjoint(graph)
    if params.kind is not CostKind.SUM:
        raise InvalidParams("tme_sum_disjoint is for the SUM cost")
    table = prefix_table(graph)
    value, i = phi(table, params.alpha, params.k, params.n)
    return value, uniform_strategy(table.path_sets[i - 1], params.n)


def tme_max_equal_lengths(graph: Graph, params: GameParams):
    """MAX value on disjoint paths of one common length: the full uniform."""
    _require_disjoint(graph)
    paths = enumerate_st_paths(graph)
    lengths = {p.length for p in paths}
    if len(lengths) != 1:
        raise InvalidParams("paths do not all have the same length")
    m = len(paths)
    value = paths[0].length + expected_distinct(m, params.n) / m * params.k * params.alpha
    return value, uniform_strategy(paths, params.n)


@dataclass
class TmeResult:
    value: float
    strategy: ProductStrategy
    lower: float
    trace: list = field(default_factory=list, repr=False)

    @property
    def width(self):
        return self.value - self.lower


def _seeds(paths, graph, params, tmecor):
    m = len(paths)
    index = {p: i for i, p in enumerate(paths)}
    seeds = []
    for ps in prefix_table(graph).path_sets:
        x = np.zeros(m)
        x[[index[p] for p in ps]] = 1.0 / len(ps)
        seeds.append(x)
    # Uniform over the first i paths by length also covers disjoint graphs' prefixes.
    for i in range(1, m + 1):
        x = np.zeros(m)
        x[:i] = 1.0 / i
        seeds.append(x)
    seeds.append(np.array([tmecor.witness[p] for p in paths]))
    seeds.extend(np.eye(m))
    return seeds


def lower_bound(graph: Graph, params: GameParams, tmecor: float) -> float:
    """Valid lower bound on every product strategy's worst-case cost."""
    paths = enumerate_st_paths(graph)
    mc = prefix_table(graph).mincut
    beta_min = expected_distinct(mc, params.n) / mc
    return max(tmecor, min(p.length for p in paths) + params.k * params.alpha * beta_min)


def tme_numeric(graph: Graph, params: GameParams, config: SearchConfig = SearchConfig(),
                caps=DEFAULT_CAPS, tmecor: TmecorResult = None) -> TmeResult:
    """Search the iid strategies; the value is an upper bound paired with a lower bound."""
    ensure_valid(graph)
    paths = enumerate_st_paths(graph, caps.paths)
    if tmecor is None:
        tmecor = tmecor_value(graph, params, caps)
    objective = IidObjective(paths, graph, params.alpha, params.k, params.n, params.kind, caps)
    result = multistart_minimize(objective, len(paths), _seeds(paths, graph, params, tmecor), config)
    x = np.clip(result.x, 0.0, None)
    x = x / x.sum()
    strategy = ProductStrategy.iid(PathDistribution(paths, x), params.n)
    return TmeResult(result.value, strategy, lower_bound(graph, params, tmecor.value), result.trace)


# -- MAX on disjoint paths ----------------------------------------------------


@dataclass
class MaxDisjointReport:
    m1: int
    uniform_values: list
    closed_forms: list
    alpha0: float
    best_uniform: tuple
    tme: TmeResult
    rearranged_value: float
    boundary: bool

    @property
    def improvement(self):
        return self.best_uniform[0] - self.tme.value

    def strictly_improves(self, margin=1e-9):
        return self.improvement > margin


def max_disjoint_analysis(graph: Graph, params: GameParams, config: SearchConfig = SearchConfig(),
                          caps=DEFAULT_CAPS) -> MaxDisjointReport:
    _require_disjoint(graph)
    params = params.replace(kind=CostKind.MAX)
    paths = enumerate_st_paths(graph, caps.paths)
    lengths = [p.length for p in paths]
    m, n, k, alpha = len(paths), params.n, params.k, params.alpha
    m1 = lengths.count(lengths[0])
    uniform_values = [
        F_max(uniform_strategy(paths[:i], n), alpha, k, graph, caps.responses)[0] for i in range(1, m + 1)
    ]
    closed = [lengths[0] + expected_distinct(i, n) / i * k * alpha for i in range(1, m1 + 1)]
    alpha0 = None
    if m1 < m:
        e1 = expected_distinct(m1, n) / m1
        e2 = expected_distinct(m1 + 1, n) / (m1 + 1)
        alpha0 = (lengths[m1] - lengths[0]) * e2 / (k * (e1 - e2))
    i_best = int(np.argmin(uniform_values))
    tme = tme_numeric(graph, params, config, caps)
    rearranged = decreasing_rearrange(tme.strategy.marginal())
    rearranged_value = F_max(ProductStrategy.iid(rearranged, n), alpha, k, graph, caps.responses)[0]
    return MaxDisjointReport(
        m1, uniform_values, closed, alpha0, (uniform_values[i_best], i_best + 1), tme,
        rearranged_value, max_boundary(lengths, alpha, k),
    )


# -- full report ---------------------------------------------------------------


def epsilon_upper(mc, n, k, alpha, pmin, pmax):
    """Smallest eps for which the upper-bound premise on ``alpha`` holds (0 if any eps works)."""
    e = expected_distinct(mc, n)
    return max(0.0, (n * pmax - e * pmin) / (e * (k * alpha / mc + pmin)))


def epsilon_lower(mc, n, k, alpha, pmin, pmax):
    e = expected_distinct(mc, n)
    return max(0.0, (e * n * pmax - pmin) / (e * (k * alpha / mc + n * pmax)))


def epsilon_band(mc, n, k, alpha, pmin, pmax):
    """Smallest eps whose premise places ``r / r_U`` within ``[1/(1+eps), 1+eps]``."""
    return max(0.0, (n * pmax - pmin) / (k * alpha / mc + pmin))


def alpha_for_epsilon(mc, n, k, eps, pmin, pmax):
    """Smallest ``alpha`` meeting both bound premises for a given ``eps``."""
    e = expected_distinct(mc, n)
    up = mc / (k * e * eps) * (n * pmax - (1 + eps) * e * pmin)
    lo = mc / (k * e * eps) * ((1 - eps) * e * n * pmax - pmin)
    return max(up, lo, 0.0)


@dataclass
class EquilibriumReport:
    params: GameParams
    tmecor_value: float
    tmecor_witness: PathDistribution
    tme_value: float
    tme_strategy: ProductStrategy
    tme_method: str
    tme_lower: float
    pou: float
    r_u: float
    bounds: dict
    diagnostics: dict

    @property
    def bracket_width(self):
        return self.tme_value - self.tme_lower


def tme_value(graph, params, config, caps, tmecor):
    """Exact value where a closed form applies, otherwise the numeric bracket."""
    paths = enumerate_st_paths(graph, caps.paths)
    disjoint = is_disjoint_paths_graph(graph)
    if params.n == 1:
        strat = ProductStrategy.iid(tmecor.witness, 1)
        return tmecor.value, strat, "tmecor", tmecor.value
    if disjoint and params.kind is CostKind.SUM:
        value, strat = tme_sum_disjoint(graph, params)
        return value, strat, "closed_form", value
    if disjoint and params.kind is CostKind.MAX and len({p.length for p in paths}) == 1:
        value, strat = tme_max_equal_lengths(graph, params)
        return value, strat, "closed_form", value
    res = tme_numeric(graph, params, config, caps, tmecor)
    return res.value, res.strategy, "numeric", res.lower


def pou_report(graph: Graph, params: GameParams, config: SearchConfig = SearchConfig(),
               caps=DEFAULT_CAPS) -> EquilibriumReport:
    ensure_valid(graph)
    paths = enumerate_st_paths(graph, caps.paths)
    table = prefix_table(graph)
    mc, n, k, alpha = table.mincut, params.n, params.k, params.alpha
    pmin, pmax = paths[0].length, max(p.length for p in paths)
    tmecor = tmecor_value(graph, params, caps)
    tme, strat, method, lower = tme_value(graph, params, config, caps, tmecor)
    pou = tme / tmecor.value
    ru = r_u(graph, params)
    limit = expected_distinct(mc, n)
    eps_up = epsilon_upper(mc, n, k, alpha, pmin, pmax)
    eps_lo = epsilon_lower(mc, n, k, alpha, pmin, pmax)
    eps_band = epsilon_band(mc, n, k, alpha, pmin, pmax)
    bounds = {
        "simple_upper": float(min(mc, n)),
        "eps_upper": eps_up,
        "upper": (1 + eps_up) * limit,
        "eps_lower": eps_lo,
        "lower": (1 - eps_lo) * limit,
        "limit": limit,
        "eps_band": eps_band,
        "band": (ru / (1 + eps_band), ru * (1 + eps_band)),
    }
    phi_n = phi(table, alpha, k, n)[0]
    diagnostics = {
        "mincut": mc,
        "paths": len(paths),
        "max_boundary": params.kind is CostKind.MAX and max_boundary([pmin, pmax], alpha, k),
        "pou_over_simple_upper": pou > bounds["simple_upper"] + 1e-6,
    }
    if params.kind is CostKind.SUM:
        # Equality here for every graph is an open question; report the gap only.
        diagnostics["uniform_gap"] = phi_n - tme
    return EquilibriumReport(params, tmecor.value, tmecor.witness, tme, strat, method,
                             lower, pou, ru, bounds, diagnostics)


# -- payoff games --------------------------------------------------------------


def _joint_weights(X, n):
    """Probabilities of every joint action (row-major) when agents play rows of ``X`` iid."""
    W = X
    for _ in range(n - 1):
        W = (W[:, :, None] * X[:, None, :]).reshape(X.shape[0], -1)
    return W


def correlated_maxmin(payoff: np.ndarray) -> float:
    """max over joint team distributions of min over adversary actions, by LP."""
    joint = payoff.reshape(-1, payoff.shape[-1])
    na, nd = joint.shape
    # Variables: q (na) and v shifted to v + shift >= 0.
    shift = max(0.0, -float(joint.min()))
    c = [0] * na + [-1]
    A_ub = [[-joint[a, d] for a in range(na)] + [1] for d in range(nd)]
    b_ub = [shift] * nd
    res = solve_lp(c, A_ub, b_ub, [[1] * na + [0]], [1])
    return -res.value - shift


def uncorrelated_maxmin(payoff: np.ndarray, n: int, resolution: int = 1000, caps=DEFAULT_CAPS):
    """max over iid agent mixes of min over adversary actions: grid, then local polish."""
    m, nd = payoff.shape[0], payoff.shape[-1]
    joint = payoff.reshape(-1, nd)

    def neg_value(X):
        return -(_joint_weights(np.atleast_2d(X), n) @ joint).min(axis=1)

    grid = simplex_grid(m, resolution, caps.grid)
    best_x, best_v = None, np.inf
    for start in range(0, len(grid), 50_000):
        chunk = grid[start:start + 50_000]
        vals = neg_value(chunk)
        i = int(np.argmin(vals))
        if vals[i] < best_v:
            best_x, best_v = chunk[i], float(vals[i])
    polished = local_search(neg_value, best_x, SearchConfig(step=1.0 / resolution))
    return -polished.value, polished.end


@dataclass
class PayoffConversion:
    t_correlated: float
    t_uncorrelated: float
    cost: np.ndarray
    pou_payoff: float
    cost_tmecor: float
    cost_tme: float

    @property
    def pou_cost(self):
        return self.cost_tme / self.cost_tmecor


def convert_payoff_to_cost(payoff, n: int, resolution: int = 1000, caps=DEFAULT_CAPS) -> PayoffConversion:
    """Cost table ``(T' + T'') - u`` whose price of uncorrelation equals ``T' / T''``.

    ``payoff`` has one axis per agent (the same action count each) followed
    by the adversary's action axis.  The cost game is solved again directly
    as a check of the ratio.
    """
    payoff = np.asarray(payoff, dtype=float)
    if payoff.ndim != n + 1 or len(set(payoff.shape[:-1])) != 1:
        raise InvalidParams("payoff must have n equal agent axes plus one adversary axis")
    t_corr = correlated_maxmin(payoff)
    t_unc, _ = uncorrelated_maxmin(payoff, n, resolution, caps)
    if t_unc <= 0:
        raise NonpositiveTeamValue(f"uncorrelated team value {t_unc!r} is not positive")
    cost = (t_corr + t_unc) - payoff
    # The team minimises cost: negate to reuse the maxmin solvers.
    cost_tmecor = -correlated_maxmin(-cost)
    cost_tme = -uncorrelated_maxmin(-cost, n, resolution, caps)[0]
    return PayoffConversion(t_corr, t_unc, cost, t_corr / t_unc, cost_tmecor, cost_tme)


def reference_payoff(m: int, n: int, k: int) -> np.ndarray:
    """Team wins (payoff 1) iff no agent's path holds an interceptor.

    Agents pick one of ``m`` parallel paths; the adversary picks a
    ``k``-multiset of paths, enumerated in lexicographic order.
    """
    responses = list(itertools.combinations_with_replacement(range(m), k))
    u = np.zeros((m,) * n + (len(responses),))
    for a in itertools.product(range(m), repeat=n):
        for r, d in enumerate(responses):
            u[a + (r,)] = float(not set(a) & set(d))
    return u


def worst_case(graph, strategy, params, caps=DEFAULT_CAPS):
    return worst_case_cost(strategy, params.alpha, params.k, params.kind, graph, caps)

