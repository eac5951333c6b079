import numpy as np
import pytest
from sklearn.base import clone
from sklearn.exceptions import NotFittedError

from pou_lab.errors import CycleDetected, InvalidParams
from pou_lab.estimator import (
    TeamMaxminSolver,
    UniformPriceOfUncorrelation,
    check_alphas,
    check_game_params,
    check_graph,
)
from pou_lab.graph import Edge, Graph, graph_to_json


def test_uniform_ratio_estimator(two_parallel):
    est = UniformPriceOfUncorrelation(n_agents=2, n_interceptors=1).fit(two_parallel)
    assert est.mincut_ == 2 and est.plateau_threshold_ == pytest.approx(2.0)
    np.testing.assert_allclose(est.predict([1.0, 2.0, 5.0]), [4 / 3, 1.5, 1.5])
    cols = est.transform([2.0])
    np.testing.assert_allclose(cols, [[3.0, 2.0, 1.5]])


def test_params_round_trip(two_parallel):
    est = TeamMaxminSolver(n_agents=3, alpha=2.5, cost="max", n_starts=8)
    assert est.get_params()["alpha"] == 2.5
    other = clone(est).set_params(alpha=1.0)
    assert other.alpha == 1.0 and est.alpha == 2.5


def test_solver_fit(three_parallel):
    est = TeamMaxminSolver(n_agents=2, n_interceptors=1, alpha=3.0).fit(graph_to_json(three_parallel))
    np.testing.assert_allclose(est.predict(), [2.0, 10 / 3, 5 / 3])
    assert est.strategy_.n == 2


def test_not_fitted():
    with pytest.raises(NotFittedError):
        UniformPriceOfUncorrelation().predict([1.0])
    with pytest.raises(NotFittedError):
        TeamMaxminSolver().predict()


def test_validation_helpers(two_parallel):
    assert check_graph(graph_to_json(two_parallel)) == two_parallel
    with pytest.raises(InvalidParams):
        check_graph("not a graph")
    with pytest.raises(CycleDetected):
        check_graph(Graph.from_edges([Edge("a", "s", "t"), Edge("b", "t", "s")]))
    with pytest.raises(InvalidParams):
        check_alphas([1.0, -2.0])
    with pytest.raises(InvalidParams):
        check_game_params(0, 1)
    np.testing.assert_array_equal(check_alphas(3), [3.0])
