"""SUM and MAX costs: pure outcomes, expectations, and interceptor best responses.

Interceptors only ever need pure responses here.  Two edges crossed by
exactly the same paths are interchangeable for every cost in this module, so
responses are enumerated over such edge classes (represented by their
lexicographically first edge) instead of over raw edges.
"""
import itertools
import math
from collections import Counter
from dataclasses import dataclass
from enum import Enum

import numpy as np

from .config import DEFAULT_CAPS
from .errors import InvalidParams, NonIidStrategy, ResponseCapExceeded, SupportCapExceeded
from .graph import Graph
from .strategy import ProductStrategy, edge_load, incidence

TIE_TOL = 1e-12


class CostKind(str, Enum):
    SUM = "sum"
    MAX = "max"

    @classmethod
    def parse(cls, value):
        if isinstance(value, cls):
            return value
        try:
            return cls(str(value).lower())
        except ValueError:
            raise InvalidParams(f"cost kind must be 'sum' or 'max', got {value!r}") from None


@dataclass(frozen=True)
class InterceptorProfile:
    """A multiset of ``k`` interceptor edges, stored sorted."""

    edges: tuple

    def __post_init__(self):
        object.__setattr__(self, "edges", tuple(sorted(self.edges)))

    @classmethod
    def from_counts(cls, counts):
        return cls(tuple(itertools.chain.from_iterable([e] * int(c) for e, c in counts.items())))

    @property
    def k(self):
        return len(self.edges)

    @property
    def counts(self):
        return Counter(self.edges)

    def check(self, graph):
        missing = set(self.edges) - set(graph.edge_ids)
        if missing:
            raise InvalidParams(f"interceptor edges not in graph: {sorted(missing)}")


@dataclass(frozen=True)
class ResponseProfile:
    """Per-path interceptor counts and the path order by surcharged length."""

    counts: tuple
    order: tuple
    costs: tuple


def _as_profile(d):
    return d if isinstance(d, InterceptorProfile) else InterceptorProfile(tuple(d))


def _check_alpha(alpha):
    if not alpha > 0:
        raise InvalidParams(f"alpha must be positive, got {alpha!r}")


def edge_costs(d, alpha: float, graph: Graph) -> dict:
    """Cost of crossing each edge: 1 plus ``alpha`` per interceptor on it."""
    counts = _as_profile(d).counts
    return {e: 1.0 + alpha * counts.get(e, 0) for e in graph.edge_ids}


def pure_cost(a, d, alpha: float, kind) -> float:
    kind = CostKind.parse(kind)
    counts = _as_profile(d).counts
    if kind is CostKind.SUM:
        used = set().union(*(p.edge_set for p in a))
        return len(used) + alpha * sum(c for e, c in counts.items() if e in used)
    return max(p.length + alpha * sum(counts.get(e, 0) for e in p.edges) for p in a)


def path_costs(paths, d, alpha):
    counts = _as_profile(d).counts
    return np.array([p.length + alpha * sum(counts.get(e, 0) for e in p.edges) for p in paths])


def response_profile(paths, d, alpha) -> ResponseProfile:
    counts = _as_profile(d).counts
    hits = tuple(sum(counts.get(e, 0) for e in p.edges) for p in paths)
    costs = path_costs(paths, d, alpha)
    order = tuple(sorted(range(len(paths)), key=lambda i: (costs[i], i)))
    return ResponseProfile(hits, order, tuple(costs[list(order)].tolist()))


# -- SUM --------------------------------------------------------------------


def f_sum(strategy: ProductStrategy, alpha: float, k: int, graph: Graph) -> float:
    """Worst-case expected SUM cost: ``k*alpha*beta + sum of edge loads``."""
    _check_alpha(alpha)
    load = edge_load(strategy, graph)
    return k * alpha * load.beta + sum(load.loads.values())


# -- MAX --------------------------------------------------------------------


def _max_expectation(X, costs, n):
    """E[max of n iid path costs] for rows of ``X`` (batch) and one cost vector."""
    order = np.argsort(costs, kind="stable")
    c = costs[order]
    steps = np.diff(np.concatenate([[0.0], c]))
    below = np.cumsum(X[:, order], axis=1) - X[:, order]  # P(path index < i)
    below = np.clip(below, 0.0, 1.0)
    return (steps * (1.0 - below ** n)).sum(axis=1)


def f_max_response(strategy: ProductStrategy, d, alpha: float, graph: Graph) -> float:
    """Expected MAX cost of iid agents against the fixed interceptor multiset ``d``."""
    _check_alpha(alpha)
    if not strategy.is_iid:
        raise NonIidStrategy("f_max_response needs identical marginals; use expected_cost")
    d = _as_profile(d)
    d.check(graph)
    costs = path_costs(strategy.paths, d, alpha)
    return float(_max_expectation(strategy.marginals[:1], costs, strategy.n)[0])


@dataclass(frozen=True)
class ResponseSpace:
    """Interceptor pure responses up to edge equivalence.

    ``hits[r, i]`` counts interceptors of response ``r`` on path ``i`` and
    ``profiles[r]`` is the lexicographically first edge multiset realising it.
    """

    profiles: tuple
    hits: np.ndarray

    def path_costs(self, lengths, alpha):
        return lengths[None, :] + alpha * self.hits


def _edge_classes(paths, graph):
    inc = incidence(paths, graph.edge_ids)
    classes = {}
    for j, eid in enumerate(graph.edge_ids):
        classes.setdefault(inc[:, j].tobytes(), (eid, inc[:, j]))
    reps = sorted(classes.values(), key=lambda t: t[0])
    return [r[0] for r in reps], np.array([r[1] for r in reps]).reshape(len(reps), len(paths))


def response_space(paths, graph: Graph, k: int, cap: int = DEFAULT_CAPS.responses) -> ResponseSpace:
    if k < 1:
        raise InvalidParams("need at least one interceptor")
    reps, cls_inc = _edge_classes(paths, graph)
    total = math.comb(len(reps) + k - 1, k)
    if total > cap:
        raise ResponseCapExceeded(f"{total} interceptor responses exceed the cap {cap}")
    profiles, hits = [], []
    for combo in itertools.combinations_with_replacement(range(len(reps)), k):
        profiles.append(InterceptorProfile(tuple(reps[c] for c in combo)))
        hits.append(cls_inc[list(combo)].sum(axis=0))
    hits = np.array(hits).reshape(len(profiles), len(paths))
    return ResponseSpace(tuple(profiles), hits)


def _argmax_profile(values, profiles):
    best = values.max()
    tol = TIE_TOL * max(1.0, abs(best))
    cands = [profiles[r] for r in np.flatnonzero(values >= best - tol)]
    return float(best), min(cands, key=lambda p: p.edges)


def F_max(strategy: ProductStrategy, alpha: float, k: int, graph: Graph, cap: int = DEFAULT_CAPS.responses):
    """Exact worst case over all interceptor multisets of the iid MAX cost.

    Returns ``(value, argmax profile)``; ties go to the lexicographically
    first profile.
    """
    _check_alpha(alpha)
    if not strategy.is_iid:
        raise NonIidStrategy("F_max needs identical marginals; use worst_case_cost")
    space = response_space(strategy.paths, graph, k, cap)
    lengths = np.array([p.length for p in strategy.paths], dtype=float)
    X = strategy.marginals[:1]
    values = np.array([
        _max_expectation(X, row, strategy.n)[0] for row in space.path_costs(lengths, alpha)
    ])
    return _argmax_profile(values, space.profiles)


# -- general product strategies -----------------------------------------------


def expected_cost(strategy: ProductStrategy, d, alpha: float, kind, graph: Graph,
                  support_cap: int = DEFAULT_CAPS.support) -> float:
    """Exact expectation over every pure outcome of the agents' supports."""
    kind = CostKind.parse(kind)
    d = _as_profile(d)
    supports = [np.flatnonzero(row > 0) for row in strategy.marginals]
    size = math.prod(len(s) for s in supports)
    if size > support_cap:
        raise SupportCapExceeded(f"{size} pure outcomes exceed the cap {support_cap}")
    total = 0.0
    for combo in itertools.product(*supports):
        prob = math.prod(strategy.marginals[j, i] for j, i in enumerate(combo))
        total += prob * pure_cost([strategy.paths[i] for i in combo], d, alpha, kind)
    return total


def worst_case_cost(strategy: ProductStrategy, alpha: float, k: int, kind, graph: Graph, caps=DEFAULT_CAPS):
    """``(F value, best response)`` for any product strategy and either cost."""
    _check_alpha(alpha)
    kind = CostKind.parse(kind)
    if kind is CostKind.SUM:
        load = edge_load(strategy, graph)
        value = k * alpha * load.beta + sum(load.loads.values())
        return value, InterceptorProfile((load.argmax(),) * k)
    if strategy.is_iid:
        return F_max(strategy, alpha, k, graph, caps.responses)
    space = response_space(strategy.paths, graph, k, caps.responses)
    values = np.array([expected_cost(strategy, d, alpha, kind, graph, caps.support) for d in space.profiles])
    return _argmax_profile(values, space.profiles)


def best_response(strategy: ProductStrategy, alpha: float, k: int, kind, graph: Graph,
                  caps=DEFAULT_CAPS) -> InterceptorProfile:
    return worst_case_cost(strategy, alpha, k, kind, graph, caps)[1]


def max_boundary(lengths, alpha, k, tol=1e-12):
    """True when ``alpha`` sits on the MAX regime boundary (longest - shortest) / k."""
    return abs(alpha - (max(lengths) - min(lengths)) / k) <= tol * max(1.0, alpha)


# -- batched iid objectives for simplex search ------------------------------


class IidObjective:
    """``X -> F(X^n)`` evaluated on a batch of marginals (rows of ``X``)."""

    def __init__(self, paths, graph: Graph, alpha: float, k: int, n: int, kind, caps=DEFAULT_CAPS):
        _check_alpha(alpha)
        self.paths = tuple(paths)
        self.alpha, self.k, self.n = float(alpha), int(k), int(n)
        self.kind = CostKind.parse(kind)
        self.lengths = np.array([p.length for p in self.paths], dtype=float)
        if self.kind is CostKind.SUM:
            self.inc = incidence(self.paths, graph.edge_ids)
        else:
            self.space = response_space(self.paths, graph, self.k, caps.responses)
            self.costs = self.space.path_costs(self.lengths, self.alpha)
            self._orders = np.argsort(self.costs, axis=1, kind="stable")

    def responses(self, X):
        """Value of every interceptor response (MAX only), shape (batch, responses)."""
        X = np.atleast_2d(np.asarray(X, dtype=float))
        out = np.empty((X.shape[0], len(self.costs)))
        for r, (row, order) in enumerate(zip(self.costs, self._orders)):
            c = row[order]
            steps = np.diff(np.concatenate([[0.0], c]))
            xs = X[:, order]
            below = np.clip(np.cumsum(xs, axis=1) - xs, 0.0, 1.0)
            out[:, r] = (steps * (1.0 - below ** self.n)).sum(axis=1)
        return out

    def __call__(self, X):
        X = np.atleast_2d(np.asarray(X, dtype=float))
        if self.kind is CostKind.SUM:
            loads = 1.0 - (1.0 - np.clip(X @ self.inc, 0.0, 1.0)) ** self.n
            return self.k * self.alpha * loads.max(axis=1) + loads.sum(axis=1)
        return self.responses(X).max(axis=1)
