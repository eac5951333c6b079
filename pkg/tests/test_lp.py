import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy.optimize import linprog

from pou_lab.lp import Infeasible, Unbounded, solve_lp


def test_small_exact_lp():
    # min -x - y  s.t. x + 2y <= 4, 3x + y <= 6
    res = solve_lp([-1, -1], [[1, 2], [3, 1]], [4, 6])
    assert res.exact
    assert res.value == pytest.approx(-2.8, abs=1e-15)
    np.testing.assert_allclose(res.x, [1.6, 1.2])


def test_equality_and_redundant_rows():
    res = solve_lp([1, 2, 3], A_eq=[[1, 1, 1], [2, 2, 2]], b_eq=[1, 2])
    assert res.value == pytest.approx(1.0)


def test_infeasible():
    with pytest.raises(Infeasible):
        solve_lp([1, 1], A_eq=[[1, 1]], b_eq=[-1])


def test_unbounded():
    with pytest.raises(Unbounded):
        solve_lp([-1, 0], [[0, 1]], [1])


def test_degenerate_cycling_example():
    # Beale's example cycles under the textbook pivot rule.
    c = [-0.75, 150, -0.02, 6]
    A = [[0.25, -60, -0.04, 9], [0.5, -90, -0.02, 3], [0, 0, 1, 0]]
    res = solve_lp(c, A, [0, 0, 1])
    assert res.value == pytest.approx(-0.05)


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 2**32 - 1), st.sampled_from([True, False]))
def test_matches_highs_on_random_feasible_lps(seed, exact):
    rng = np.random.default_rng(seed)
    nv, nc = rng.integers(2, 6), rng.integers(1, 5)
    A = rng.integers(-3, 5, size=(nc, nv)).astype(float)
    b = rng.integers(1, 10, size=nc).astype(float)
    c = rng.integers(-2, 6, size=nv).astype(float)
    # A simplex row keeps the problem bounded.
    A_eq, b_eq = [np.ones(nv)], [1.0]
    ref = linprog(c, A_ub=A, b_ub=b, A_eq=A_eq, b_eq=b_eq, method="highs")
    if ref.status == 2:
        with pytest.raises(Infeasible):
            solve_lp(c, A, b, A_eq, b_eq, exact=exact)
        return
    res = solve_lp(c, A, b, A_eq, b_eq, exact=exact)
    assert res.value == pytest.approx(ref.fun, abs=1e-9)
    assert (A @ res.x <= b + 1e-9).all()
