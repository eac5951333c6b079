"""Mixed strategies of uncorrelated agents and the edge loads they induce."""
from dataclasses import dataclass

import numpy as np

from .errors import (
    InvalidDistribution,
    NotDecreasing,
    PathNotInGraph,
    PathsNotDisjoint,
)
from .graph import Graph, Path, check_path, paths_disjoint

SUM_TOL = 1e-12


def expected_distinct(ell, n):
    """Expected number of distinct items hit by ``n`` uniform draws from ``ell``.

    Equals ``ell * (1 - (1 - 1/ell) ** n)``; it is also ``ell`` times the
    probability that a fixed item is hit.
    """
    ell = np.asarray(ell, dtype=float)
    n = np.asarray(n, dtype=float)
    if (ell < 1).any() or (n < 1).any():
        raise ValueError("expected_distinct needs ell >= 1 and n >= 1")
    out = ell * (1.0 - (1.0 - 1.0 / ell) ** n)
    return float(out) if out.ndim == 0 else out


def _check_probs(probs, where):
    probs = np.array(probs, dtype=float)
    if probs.ndim != 1 or probs.size == 0:
        raise InvalidDistribution(f"{where}: need a non-empty probability vector")
    if not np.isfinite(probs).all() or (probs < 0).any():
        raise InvalidDistribution(f"{where}: probabilities must be finite and >= 0")
    if abs(probs.sum() - 1.0) > SUM_TOL:
        raise InvalidDistribution(f"{where}: probabilities sum to {probs.sum()!r}, not 1")
    probs.setflags(write=False)
    return probs


@dataclass(frozen=True, eq=False)
class PathDistribution:
    """One agent's mixed strategy over an explicit path list."""

    paths: tuple
    probs: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "paths", tuple(self.paths))
        probs = _check_probs(self.probs, "PathDistribution")
        if len(probs) != len(self.paths):
            raise InvalidDistribution("one probability per path is required")
        object.__setattr__(self, "probs", probs)

    def __getitem__(self, path):
        return float(self.probs[self.paths.index(path)])

    @property
    def support(self):
        return tuple(p for p, x in zip(self.paths, self.probs) if x > 0)

    def as_dict(self):
        return dict(zip(self.paths, self.probs.tolist()))


@dataclass(frozen=True, eq=False)
class ProductStrategy:
    """``n`` independent agents; row ``j`` of ``marginals`` is agent ``j``'s mix."""

    paths: tuple
    marginals: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "paths", tuple(self.paths))
        m = np.array(self.marginals, dtype=float)
        if m.ndim != 2 or m.shape[0] < 1 or m.shape[1] != len(self.paths):
            raise InvalidDistribution("marginals must be an (n, number of paths) array with n >= 1")
        for j, row in enumerate(m):
            _check_probs(row, f"agent {j}")
        m.setflags(write=False)
        object.__setattr__(self, "marginals", m)

    @classmethod
    def iid(cls, dist: PathDistribution, n: int):
        if n < 1:
            raise InvalidDistribution("need at least one agent")
        return cls(dist.paths, np.tile(dist.probs, (n, 1)))

    @property
    def n(self):
        return self.marginals.shape[0]

    @property
    def is_iid(self):
        return bool((self.marginals == self.marginals[0]).all())

    def marginal(self, j=0) -> PathDistribution:
        return PathDistribution(self.paths, self.marginals[j])

    def mean_marginal(self) -> PathDistribution:
        mean = self.marginals.mean(axis=0)
        return PathDistribution(self.paths, mean / mean.sum())

    def path_probabilities(self):
        """Probability that at least one agent picks each path."""
        return 1.0 - np.prod(1.0 - self.marginals, axis=0)


@dataclass(frozen=True)
class EdgeLoad:
    """Probability that some agent crosses each edge, and its maximum."""

    loads: dict
    beta: float

    def argmax(self, tol=SUM_TOL):
        """Lexicographically first edge whose load is within ``tol`` of ``beta``."""
        return min(e for e, x in self.loads.items() if x >= self.beta - tol)


def incidence(paths, edge_ids):
    """0/1 matrix with one row per path and one column per edge."""
    index = {e: i for i, e in enumerate(edge_ids)}
    inc = np.zeros((len(paths), len(edge_ids)))
    for r, p in enumerate(paths):
        for e in p.edges:
            inc[r, index[e]] = 1.0
    return inc


def _check_paths_in(graph, paths):
    for p in paths:
        if not check_path(graph, p):
            raise PathNotInGraph(f"{p.edges!r} is not an s-t path of the graph")


def edge_load(strategy: ProductStrategy, graph: Graph) -> EdgeLoad:
    _check_paths_in(graph, strategy.paths)
    inc = incidence(strategy.paths, graph.edge_ids)
    per_agent = strategy.marginals @ inc  # P(agent j crosses e)
    loads = 1.0 - np.prod(1.0 - np.clip(per_agent, 0.0, 1.0), axis=0)
    return EdgeLoad(dict(zip(graph.edge_ids, loads.tolist())), float(loads.max(initial=0.0)))


def uniform_strategy(paths, n: int) -> ProductStrategy:
    """``n`` iid agents, each uniform over the edge-disjoint ``paths``."""
    paths = tuple(paths)
    if not paths:
        raise PathsNotDisjoint("need at least one path")
    if not paths_disjoint(paths):
        raise PathsNotDisjoint("uniform strategies need pairwise edge-disjoint paths")
    m = len(paths)
    return ProductStrategy.iid(PathDistribution(paths, np.full(m, 1.0 / m)), n)


def _check_sorted_disjoint(paths):
    if not paths_disjoint(paths):
        raise PathsNotDisjoint("paths must be pairwise edge-disjoint")
    lengths = [p.length for p in paths]
    if lengths != sorted(lengths):
        raise ValueError("paths must be sorted by length")


def decreasing_rearrange(dist: PathDistribution) -> PathDistribution:
    """Reassign the same probabilities so shorter paths carry no less mass.

    ``dist.paths`` must be edge-disjoint and sorted by length.  Equal
    probabilities keep their input order.
    """
    _check_sorted_disjoint(dist.paths)
    order = np.argsort(-dist.probs, kind="stable")
    return PathDistribution(dist.paths, dist.probs[order])


def convhull_decompose(dist: PathDistribution) -> np.ndarray:
    """Weights ``y`` with ``sum_i y_i * uniform(first i paths) == dist``."""
    x = dist.probs
    if (np.diff(x) > SUM_TOL).any():
        raise NotDecreasing("probabilities must be non-increasing along the path order")
    m = len(x)
    idx = np.arange(1, m + 1)
    y = idx * (x - np.append(x[1:], 0.0))
    return np.clip(y, 0.0, None)


def convhull_recompose(y) -> np.ndarray:
    """Inverse of :func:`convhull_decompose`."""
    y = np.asarray(y, dtype=float)
    m = len(y)
    # x_j = sum_{i >= j} y_i / i
    return np.cumsum((y / np.arange(1, m + 1))[::-1])[::-1]


# -- JSON -------------------------------------------------------------------


def strategy_from_json(obj, paths) -> ProductStrategy:
    """Parse ``{"marginals": [{"p1": 0.5, ...}, ...]}``; ``pK`` is the K-th path (1-based)."""
    if not isinstance(obj, dict) or set(obj) != {"marginals"}:
        raise InvalidDistribution('strategy JSON must be {"marginals": [...]}')
    rows = obj["marginals"]
    if not isinstance(rows, list) or not rows:
        raise InvalidDistribution("marginals must be a non-empty list")
    paths = tuple(paths)
    used = set()
    for row in rows:
        if not isinstance(row, dict):
            raise InvalidDistribution("each marginal must be an object")
        for key in row:
            if not (isinstance(key, str) and key.startswith("p") and key[1:].isdigit()):
                raise InvalidDistribution(f"bad path reference {key!r}")
            i = int(key[1:])
            if not 1 <= i <= len(paths):
                raise PathNotInGraph(f"path reference {key!r} out of range 1..{len(paths)}")
            used.add(i - 1)
    keep = sorted(used)
    mat = np.zeros((len(rows), len(keep)))
    for j, row in enumerate(rows):
        for key, val in row.items():
            mat[j, keep.index(int(key[1:]) - 1)] = float(val)
    return ProductStrategy(tuple(paths[i] for i in keep), mat)


def strategy_to_json(strategy: ProductStrategy, paths) -> dict:
    index = {p: i for i, p in enumerate(paths)}
    out = []
    for row in strategy.marginals:
        out.append({f"p{index[p] + 1}": float(x) for p, x in zip(strategy.paths, row) if x > 0})
    return {"marginals": out}


def point_mass(paths, path: Path, n: int = 1) -> ProductStrategy:
    paths = tuple(paths)
    probs = np.zeros(len(paths))
    probs[paths.index(path)] = 1.0
    return ProductStrategy.iid(PathDistribution(paths, probs), n)
