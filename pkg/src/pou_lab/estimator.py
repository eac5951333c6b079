"""scikit-learn style wrappers: configure with parameters, ``fit`` on a graph."""
import numpy as np
from sklearn.base import BaseEstimator
from sklearn.exceptions import NotFittedError

from .config import DEFAULT_CAPS
from .cost import CostKind
from .equilibrium import GameParams, phi, plateau_threshold, pou_report
from .errors import InvalidParams
from .graph import Graph, ensure_valid, graph_from_json, prefix_table
from .search import SearchConfig
from .strategy import expected_distinct


def check_graph(graph) -> Graph:
    """Accept a :class:`Graph` or its JSON object form; return a validated graph."""
    if isinstance(graph, dict):
        graph = graph_from_json(graph)
    if not isinstance(graph, Graph):
        raise InvalidParams(f"expected a Graph or graph JSON object, got {type(graph).__name__}")
    ensure_valid(graph)
    return graph


def check_game_params(n_agents, n_interceptors, alpha=1.0, cost="sum") -> GameParams:
    return GameParams(n_agents, n_interceptors, alpha, CostKind.parse(cost))


def check_alphas(alphas) -> np.ndarray:
    a = np.atleast_1d(np.asarray(alphas, dtype=float)).ravel()
    if a.size == 0 or not np.isfinite(a).all() or (a <= 0).any():
        raise InvalidParams("alphas must be a non-empty array of positive finite values")
    return a


def _check_fitted(est, attr):
    if not hasattr(est, attr):
        raise NotFittedError(f"{type(est).__name__} is not fitted; call fit(graph) first")


class UniformPriceOfUncorrelation(BaseEstimator):
    """``r_U`` as a function of ``alpha`` for one graph.

    ``fit`` computes the prefix table once; ``predict`` maps an array of
    alphas to ``r_U`` and ``transform`` returns the columns
    ``(phi_n, phi_1, r_u)``.
    """

    def __init__(self, n_agents=2, n_interceptors=1):
        self.n_agents = n_agents
        self.n_interceptors = n_interceptors

    def fit(self, graph, y=None):
        check_game_params(self.n_agents, self.n_interceptors)
        self.graph_ = check_graph(graph)
        self.prefix_table_ = prefix_table(self.graph_)
        self.mincut_ = self.prefix_table_.mincut
        self.limit_ = expected_distinct(self.mincut_, self.n_agents)
        self.plateau_threshold_ = plateau_threshold(self.graph_, self.n_agents, self.n_interceptors).threshold
        return self

    def transform(self, alphas):
        _check_fitted(self, "prefix_table_")
        out = []
        for a in check_alphas(alphas):
            pn = phi(self.prefix_table_, a, self.n_interceptors, self.n_agents)[0]
            p1 = phi(self.prefix_table_, a, self.n_interceptors, 1)[0]
            out.append((pn, p1, pn / p1))
        return np.array(out)

    def predict(self, alphas):
        return self.transform(alphas)[:, 2]


class TeamMaxminSolver(BaseEstimator):
    """Correlated and uncorrelated team values and their ratio for one game."""

    def __init__(self, n_agents=2, n_interceptors=1, alpha=1.0, cost="sum",
                 n_starts=64, grid_resolution=200, n_jobs=1):
        self.n_agents = n_agents
        self.n_interceptors = n_interceptors
        self.alpha = alpha
        self.cost = cost
        self.n_starts = n_starts
        self.grid_resolution = grid_resolution
        self.n_jobs = n_jobs

    def fit(self, graph, y=None, caps=DEFAULT_CAPS):
        params = check_game_params(self.n_agents, self.n_interceptors, self.alpha, self.cost)
        config = SearchConfig(n_starts=self.n_starts, grid_resolution=self.grid_resolution, n_jobs=self.n_jobs)
        self.graph_ = check_graph(graph)
        self.report_ = pou_report(self.graph_, params, config, caps)
        self.tmecor_value_ = self.report_.tmecor_value
        self.tme_value_ = self.report_.tme_value
        self.pou_ = self.report_.pou
        self.r_u_ = self.report_.r_u
        self.strategy_ = self.report_.tme_strategy
        return self

    def predict(self, X=None):
        """The fitted ``(tmecor, tme, pou)`` triple."""
        _check_fitted(self, "report_")
        return np.array([self.tmecor_value_, self.tme_value_, self.pou_])
