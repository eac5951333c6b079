"""Brute-force and Monte Carlo references for the closed forms.

Nothing here calls into ``cost`` or ``equilibrium``: pure costs, expected
costs and interceptor maximisation are recomputed from scratch so that a
bug in one route cannot hide in the other.
"""
import itertools
import math
import time
import xml.etree.ElementTree as ET
from dataclasses import dataclass

import numpy as np

from .config import DEFAULT_CAPS
from .errors import GridCapExceeded, InvalidParams, SupportCapExceeded
from .graph import Graph, enumerate_st_paths


@dataclass(frozen=True)
class GridSpec:
    resolution: int
    dimension: int

    def __post_init__(self):
        if self.resolution < 1 or self.dimension < 1:
            raise InvalidParams("grid resolution and dimension must be positive")

    @property
    def size(self):
        return math.comb(self.resolution + self.dimension - 1, self.dimension - 1)


@dataclass(frozen=True)
class McConfig:
    samples: int
    seed: int = 0
    shard_size: int = 1 << 16

    def __post_init__(self):
        if self.samples < 1 or self.shard_size < 1:
            raise InvalidParams("samples must be positive")


def _kind(kind):
    kind = str(getattr(kind, "value", kind)).lower()
    if kind not in ("sum", "max"):
        raise InvalidParams(f"unknown cost kind {kind!r}")
    return kind


def _hits(edges, d_counts):
    return sum(d_counts.get(e, 0) for e in edges)


def _outcome_cost(chosen, d_counts, alpha, kind):
    """Cost of one pure outcome; ``chosen`` is a list of edge tuples."""
    if kind == "sum":
        used = set()
        for edges in chosen:
            used.update(edges)
        return len(used) + alpha * _hits(used, d_counts)
    return max(len(edges) + alpha * _hits(edges, d_counts) for edges in chosen)


def _counts(d):
    out = {}
    for e in getattr(d, "edges", d):
        out[e] = out.get(e, 0) + 1
    return out


def exhaustive_expected_cost(strategy, d, alpha, kind, graph=None, cap=DEFAULT_CAPS.support) -> float:
    """Sum of probability times cost over every pure outcome of the supports."""
    kind = _kind(kind)
    d_counts = _counts(d)
    supports = []
    for row in np.asarray(strategy.marginals):
        supports.append([(i, float(x)) for i, x in enumerate(row) if x > 0])
    size = 1
    for s in supports:
        size *= len(s)
    if size > cap:
        raise SupportCapExceeded(f"{size} outcomes exceed the cap {cap}")
    path_edges = [tuple(p.edges) for p in strategy.paths]
    total = 0.0
    for combo in itertools.product(*supports):
        prob = 1.0
        for _, x in combo:
            prob *= x
        total += prob * _outcome_cost([path_edges[i] for i, _ in combo], d_counts, alpha, kind)
    return total


def monte_carlo_cost(strategy, d, alpha, kind, graph=None, mc: McConfig = McConfig(10_000)):
    """``(mean, standard error)`` of sampled pure costs; shard ``s`` uses seed ``[seed, s]``."""
    kind = _kind(kind)
    d_counts = _counts(d)
    marg = np.asarray(strategy.marginals, dtype=float)
    n, m = marg.shape
    lengths = np.array([len(p.edges) for p in strategy.paths], dtype=float)
    hits = np.array([_hits(p.edges, d_counts) for p in strategy.paths], dtype=float)
    edge_ids = sorted({e for p in strategy.paths for e in p.edges})
    col = {e: j for j, e in enumerate(edge_ids)}
    member = np.zeros((m, len(edge_ids)), dtype=bool)
    for i, p in enumerate(strategy.paths):
        member[i, [col[e] for e in p.edges]] = True
    edge_hits = np.array([d_counts.get(e, 0) for e in edge_ids], dtype=float)
    cdf = np.cumsum(marg, axis=1)
    cdf[:, -1] = 1.0
    chunks = []
    for shard, start in enumerate(range(0, mc.samples, mc.shard_size)):
        size = min(mc.shard_size, mc.samples - start)
        rng = np.random.default_rng([mc.seed, shard])
        u = rng.random((size, n))
        picks = np.stack([np.searchsorted(cdf[j], u[:, j], side="right") for j in range(n)], axis=1)
        picks = np.minimum(picks, m - 1)
        if kind == "sum":
            used = member[picks].any(axis=1)
            chunks.append(used.sum(axis=1) + alpha * (used * edge_hits).sum(axis=1))
        else:
            chunks.append((lengths[picks] + alpha * hits[picks]).max(axis=1))
    samples = np.concatenate(chunks)
    if len(samples) == 1 or np.all(samples == samples[0]):
        return float(samples.mean()), 0.0
    return float(samples.mean()), float(samples.std(ddof=1) / math.sqrt(len(samples)))


# -- iid grid minimax ---------------------------------------------------------


def _compositions(m, total):
    """All integer compositions of ``total`` into ``m`` parts, as one array."""
    if m == 1:
        return np.array([[total]])
    if m == 2:
        first = np.arange(total + 1)
        return np.column_stack([first, total - first])
    return np.vstack([np.column_stack([np.full(math.comb(total - first + m - 2, m - 2), first),
                                       _compositions(m - 1, total - first)])
                      for first in range(total + 1)])


def _simplex_blocks(m, total):
    """Compositions of ``total`` into ``m`` parts, one block per leading value."""
    if m == 1:
        yield np.array([[total]])
        return
    for first in range(total + 1):
        rest = _compositions(m - 1, total - first)
        yield np.column_stack([np.full(len(rest), first), rest])


def _chunks(m, total, size):
    buf, count = [], 0
    for block in _simplex_blocks(m, total):
        buf.append(block)
        count += len(block)
        if count >= size:
            yield np.vstack(buf)
            buf, count = [], 0
    if buf:
        yield np.vstack(buf)


def _outcome_table(paths, edge_ids, n, k, alpha, kind):
    """Multiset outcomes, their multinomial coefficients, and the cost of each versus every response."""
    m = len(paths)
    outcomes = list(itertools.combinations_with_replacement(range(m), n))
    counts = np.zeros((len(outcomes), m))
    coef = np.zeros(len(outcomes))
    for r, out in enumerate(outcomes):
        c = [out.count(i) for i in range(m)]
        counts[r] = c
        coef[r] = math.factorial(n) / math.prod(math.factorial(x) for x in c)
    responses = list(itertools.combinations_with_replacement(edge_ids, k))
    path_edges = [tuple(p.edges) for p in paths]
    table = np.zeros((len(outcomes), len(responses)))
    for j, d in enumerate(responses):
        dc = _counts(d)
        for r, out in enumerate(outcomes):
            table[r, j] = _outcome_cost([path_edges[i] for i in out], dc, alpha, kind)
    # Responses with identical cost columns are interchangeable.
    table = np.unique(table, axis=1)
    return counts, coef, table


@dataclass
class GridResult:
    value: float
    witness: np.ndarray
    slack: float
    lipschitz: float
    points: int


def grid_slack(paths, n, k, alpha, kind, resolution):
    """Certified gap between the grid minimum and the true iid minimum.

    Every simplex point has a grid point closer than ``1/resolution`` in each
    coordinate, so within total variation ``m / (2 * resolution)``; ``n`` iid
    copies at most multiply that by ``n``; and costs lie in ``[0, Cmax]``.
    """
    m = len(paths)
    pmax = max(len(p.edges) for p in paths)
    cmax = (n * pmax if _kind(kind) == "sum" else pmax) + k * alpha
    lipschitz = cmax * n * m / 2
    return lipschitz / resolution, lipschitz


def grid_minimax(graph: Graph, n, k, alpha, kind, grid: GridSpec = None, resolution=None,
                 caps=DEFAULT_CAPS, chunk=20_000) -> GridResult:
    """min over iid grid marginals of max over all interceptor multisets."""
    kind = _kind(kind)
    paths = enumerate_st_paths(graph, caps.paths)
    m = len(paths)
    if grid is None:
        grid = GridSpec(resolution or 200, m)
    if grid.dimension != m:
        raise InvalidParams(f"grid dimension {grid.dimension} does not match {m} paths")
    if grid.size > caps.grid:
        raise GridCapExceeded(f"{grid.size} grid points exceed the cap {caps.grid}")
    counts, coef, table = _outcome_table(paths, graph.edge_ids, n, k, alpha, kind)
    r = grid.resolution
    counts = counts.astype(int)
    best_val, best_x = np.inf, None
    for block in _chunks(m, r, chunk):
        X = block / r
        # powers[:, i, c] = x_i ** c, then one gather per path.
        powers = X[:, :, None] ** np.arange(n + 1)[None, None, :]
        probs = np.broadcast_to(coef, (len(X), len(coef))).copy()
        for i in range(m):
            probs *= powers[:, i, counts[:, i]]
        vals = (probs @ table).max(axis=1)
        i = int(np.argmin(vals))
        if vals[i] < best_val:
            best_val, best_x = float(vals[i]), X[i]
    slack, lip = grid_slack(paths, n, k, alpha, kind, r)
    return GridResult(best_val, best_x, slack, lip, grid.size)


# -- team games with payoffs ----------------------------------------------------


def reference_game(m: int, n: int, k: int) -> np.ndarray:
    """Payoff 1 when the adversary's ``k`` picks miss every agent's path."""
    responses = list(itertools.combinations_with_replacement(range(m), k))
    shape = (m,) * n + (len(responses),)
    u = np.empty(shape)
    for idx in np.ndindex(*shape):
        u[idx] = 0.0 if set(idx[:-1]).intersection(responses[idx[-1]]) else 1.0
    return u


def maxmin_lp(matrix):
    """Value of max_q min_d q^T matrix[:, d] via scipy's HiGHS."""
    from scipy.optimize import linprog

    matrix = np.asarray(matrix, dtype=float)
    na, nd = matrix.shape
    c = np.zeros(na + 1)
    c[-1] = -1.0
    A_ub = np.hstack([-matrix.T, np.ones((nd, 1))])
    A_eq = np.concatenate([np.ones(na), [0.0]])[None, :]
    res = linprog(c, A_ub=A_ub, b_ub=np.zeros(nd), A_eq=A_eq, b_eq=[1.0],
                  bounds=[(0, None)] * na + [(None, None)], method="highs")
    if res.status != 0:
        raise InvalidParams(f"maxmin LP failed: {res.message}")
    return -float(res.fun)


def brute_force_team_game(payoff, n, resolution=1000, caps=DEFAULT_CAPS):
    """``(T', T'')``: correlated maxmin by LP, uncorrelated maxmin over an iid grid."""
    payoff = np.asarray(payoff, dtype=float)
    m, nd = payoff.shape[0], payoff.shape[-1]
    if m > 6 or n > 3:
        raise InvalidParams("brute force is limited to 6 actions and 3 agents")
    if GridSpec(resolution, m).size > caps.grid:
        raise GridCapExceeded("team-game grid exceeds the cap")
    flat = payoff.reshape(-1, nd)
    t_corr = maxmin_lp(flat)
    joint = np.array(list(itertools.product(range(m), repeat=n)))
    best = -np.inf
    for block in _chunks(m, resolution, 50_000):
        X = block / resolution
        weights = np.prod(X[:, joint], axis=2)  # (points, joint actions)
        best = max(best, float((weights @ flat).min(axis=1).max()))
    return t_corr, best


# -- cross-validation suite -----------------------------------------------------


@dataclass
class CheckResult:
    name: str
    expected: float
    observed: float
    tolerance: float
    seconds: float
    detail: str = ""

    @property
    def passed(self):
        return bool(abs(self.expected - self.observed) <= self.tolerance)


def junit_xml(results, suite="oracle-check") -> str:
    failures = sum(not r.passed for r in results)
    total_time = sum(r.seconds for r in results)
    root = ET.Element("testsuite", name=suite, tests=str(len(results)), failures=str(failures),
                      errors="0", time=f"{total_time:.3f}")
    for r in results:
        case = ET.SubElement(root, "testcase", classname=suite, name=r.name, time=f"{r.seconds:.3f}")
        if not r.passed:
            fail = ET.SubElement(case, "failure", message="mismatch beyond tolerance")
            fail.text = (f"expected {r.expected!r} observed {r.observed!r} "
                         f"tolerance {r.tolerance!r} {r.detail}")
    return ET.tostring(root, encoding="unicode")


def timed_check(name, fn):
    start = time.perf_counter()
    expected, observed, tol, detail = fn()
    return CheckResult(name, float(expected), float(observed), float(tol), time.perf_counter() - start, detail)
