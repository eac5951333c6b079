"""Multi-start local search over the probability simplex.

Each start runs pairwise mass-transfer descent: move ``step`` of mass from
one coordinate to another whenever that lowers the objective, halving the
step once no transfer helps.  Objectives take a batch of points (rows) and
return one value per row, so every candidate move at a given step is
evaluated in a single call.
"""
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .errors import GridCapExceeded, InvalidParams

TIE_TOL = 1e-9


@dataclass(frozen=True)
class SearchConfig:
    n_starts: int = 64
    grid_resolution: int = 200
    step: float = 0.25
    min_step: float = 1e-7
    improve_tol: float = 1e-10
    max_moves: int = 100_000
    seed_grid_points: int = 20_000
    n_jobs: int = 1

    def __post_init__(self):
        if self.n_starts < 1 or self.grid_resolution < 1 or self.n_jobs < 1:
            raise InvalidParams("search sizes must be positive")
        if not 0 < self.min_step <= self.step <= 1:
            raise InvalidParams("need 0 < min_step <= step <= 1")


@dataclass
class StartTrace:
    start: np.ndarray
    end: np.ndarray
    value: float
    moves: int


@dataclass
class SearchResult:
    x: np.ndarray
    value: float
    trace: list = field(default_factory=list)


def simplex_grid(m: int, resolution: int, cap: int = 5_000_000) -> np.ndarray:
    """All points of the simplex with coordinates in multiples of ``1/resolution``."""
    count = math.comb(resolution + m - 1, m - 1)
    if count > cap:
        raise GridCapExceeded(f"{count} grid points exceed the cap {cap}")
    return compositions(m, resolution) / resolution


def compositions(m: int, total: int) -> np.ndarray:
    """Non-negative integer vectors of length ``m`` summing to ``total``, lexicographic."""
    if m == 1:
        return np.array([[total]])
    rows = []
    for first in range(total, -1, -1):
        rest = compositions(m - 1, total - first)
        rows.append(np.column_stack([np.full(len(rest), first), rest]))
    return np.vstack(rows)


def _neighbours(x, step):
    m = len(x)
    moves = []
    for i in range(m):
        amount = min(step, x[i])
        if amount <= 0:
            continue
        for j in range(m):
            if j != i:
                y = x.copy()
                y[i] -= amount
                y[j] += amount
                moves.append(y)
    return np.array(moves).reshape(-1, m)


def local_search(objective, x0, config: SearchConfig = SearchConfig()) -> StartTrace:
    x = np.array(x0, dtype=float)
    value = float(objective(x[None, :])[0])
    step, moves = config.step, 0
    while step >= config.min_step and moves < config.max_moves:
        cand = _neighbours(x, step)
        if len(cand) == 0:
            break
        vals = objective(cand)
        best = int(np.argmin(vals))
        if vals[best] < value - config.improve_tol:
            x, value = cand[best], float(vals[best])
            moves += 1
        else:
            step /= 2
    return StartTrace(np.array(x0, dtype=float), x, value, moves)


def lexicographic_polish(objective, x, value, config: SearchConfig = SearchConfig()):
    """Walk to the lexicographically smallest point whose value stays within ``TIE_TOL``.

    Mass only moves from a coordinate to a later one, so every accepted move
    makes the point lexicographically smaller.
    """
    x = np.array(x, dtype=float)
    bound = value + TIE_TOL
    step, moves = config.step, 0
    m = len(x)
    while step >= config.min_step and moves < config.max_moves:
        cand = []
        for i in range(m):
            amount = min(step, x[i])
            if amount <= 0:
                continue
            for j in range(i + 1, m):
                y = x.copy()
                y[i] -= amount
                y[j] += amount
                cand.append(y)
        if not cand:
            break
        cand = np.array(cand)
        ok = cand[objective(cand) <= bound]
        if len(ok):
            x = min(ok, key=tuple)
            moves += 1
        else:
            step /= 2
    return x, float(objective(x[None, :])[0])


def _better(a: StartTrace, b: StartTrace) -> bool:
    """Deterministic order: lower value, ties broken by the smaller witness vector."""
    if a.value < b.value - TIE_TOL:
        return True
    if b.value < a.value - TIE_TOL:
        return False
    return tuple(a.end) < tuple(b.end)


def choose_starts(objective, m: int, seeds, config: SearchConfig) -> np.ndarray:
    """Structural ``seeds`` followed by the best grid points, deduplicated."""
    res = config.grid_resolution
    while res > 1 and math.comb(res + m - 1, m - 1) > config.seed_grid_points:
        res //= 2
    grid = simplex_grid(m, res)
    vals = objective(grid)
    order = np.lexsort((np.arange(len(grid)), vals))
    starts, seen = [], set()
    for x in list(seeds) + [grid[i] for i in order]:
        key = tuple(np.round(np.asarray(x, dtype=float), 12))
        if key in seen:
            continue
        seen.add(key)
        starts.append(np.asarray(x, dtype=float))
        if len(starts) >= max(config.n_starts, len(seeds)):
            break
    return np.array(starts)


def multistart_minimize(objective, m: int, seeds=(), config: SearchConfig = SearchConfig()) -> SearchResult:
    """Minimize ``objective`` over the ``m``-simplex from many starts.

    The returned point is the lowest end value; values within ``TIE_TOL``
    count as equal and then the lexicographically smallest point wins (the
    winner is finally polished towards the smallest point of its tie set),
    so the answer does not depend on ``n_jobs``.
    """
    starts = choose_starts(objective, m, seeds, config)
    if config.n_jobs > 1:
        with ThreadPoolExecutor(config.n_jobs) as pool:
            traces = list(pool.map(lambda s: local_search(objective, s, config), starts))
    else:
        traces = [local_search(objective, s, config) for s in starts]
    best = traces[0]
    for t in traces[1:]:
        if _better(t, best):
            best = t
    x, value = lexicographic_polish(objective, best.end, best.value, config)
    return SearchResult(x, value, traces)
