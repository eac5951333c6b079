"""Dense two-phase simplex for the small LPs of this package.

Solves ``min c.x  s.t.  A_ub x <= b_ub,  A_eq x = b_eq,  x >= 0``.

Pivoting uses Bland's rule, so the method terminates on degenerate problems.
Small problems run on :class:`fractions.Fraction` and are exact; larger ones
run in double precision and are accepted only after an explicit primal/dual
feasibility and duality-gap check at ``VERIFY_TOL``.
"""
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .errors import LPError

EXACT_CELL_LIMIT = 40_000
FLOAT_EPS = 1e-11
VERIFY_TOL = 1e-9


@dataclass
class LPResult:
    x: np.ndarray
    value: float
    exact: bool
    iterations: int


class Infeasible(LPError):
    code = "LP_INFEASIBLE"


class Unbounded(LPError):
    code = "LP_UNBOUNDED"


def _as_rows(A, b, ncols):
    if A is None:
        return [], []
    A = [list(row) for row in A]
    b = list(b)
    if len(A) != len(b) or any(len(row) != ncols for row in A):
        raise ValueError("constraint shapes do not match")
    return A, b


def _pivot(T, r, c):
    T[r] = T[r] / T[r, c]
    for i in range(T.shape[0]):
        if i != r and T[i, c] != 0:
            T[i] = T[i] - T[i, c] * T[r]


def _run(T, basis, allowed, eps):
    """Simplex iterations on tableau ``T`` whose last row is the objective."""
    obj = T.shape[0] - 1
    rows = range(obj)
    iterations = 0
    while True:
        entering = None
        for j in allowed:
            if T[obj, j] < -eps:
                entering = j
                break
        if entering is None:
            return iterations
        best = None
        for i in rows:
            a = T[i, entering]
            if a > eps:
                ratio = T[i, -1] / a
                if best is None or ratio < best[0] - eps or (abs(ratio - best[0]) <= eps and basis[i] < basis[best[1]]):
                    best = (ratio, i)
        if best is None:
            raise Unbounded("linear program is unbounded")
        _pivot(T, best[1], entering)
        basis[best[1]] = entering
        iterations += 1


def solve_lp(c, A_ub=None, b_ub=None, A_eq=None, b_eq=None, *, exact=None) -> LPResult:
    """Minimize ``c.x`` over ``x >= 0`` subject to the given constraints."""
    c = list(c)
    nvar = len(c)
    A_ub, b_ub = _as_rows(A_ub, b_ub, nvar)
    A_eq, b_eq = _as_rows(A_eq, b_eq, nvar)
    n_ub, n_eq = len(A_ub), len(A_eq)
    nrow = n_ub + n_eq
    if exact is None:
        exact = (nrow + 1) * (nvar + n_ub + nrow + 1) <= EXACT_CELL_LIMIT
    if exact:
        conv = lambda v: Fraction(v) if not isinstance(v, Fraction) else v  # noqa: E731
        dtype, eps = object, 0
    else:
        conv, dtype, eps = float, float, FLOAT_EPS

    # Columns: originals, one slack per <= row, one artificial per row.
    n_slack = n_ub
    ncols = nvar + n_slack + nrow
    T = np.empty((nrow + 1, ncols + 1), dtype=dtype)
    T[...] = conv(0)
    basis = [0] * nrow
    art_start = nvar + n_slack
    for i, (row, rhs) in enumerate(zip(A_ub + A_eq, b_ub + b_eq)):
        sign = -1 if conv(rhs) < 0 else 1
        for j, a in enumerate(row):
            T[i, j] = conv(a) * sign
        if i < n_ub:
            T[i, nvar + i] = conv(sign)
        T[i, art_start + i] = conv(1)
        T[i, -1] = conv(rhs) * sign
        basis[i] = art_start + i

    # Phase 1: minimize the sum of artificials.
    for i in range(nrow):
        T[nrow] = T[nrow] - T[i]
    for i in range(nrow):
        T[nrow, art_start + i] = conv(0)
    iters = _run(T, basis, range(art_start), eps)
    if -T[nrow, -1] > (eps if exact else 1e-9):
        raise Infeasible("linear program is infeasible")

    # Drive zero-level artificials out of the basis; drop redundant rows.
    keep = []
    for i in range(nrow):
        if basis[i] >= art_start:
            col = next((j for j in range(art_start) if abs(T[i, j]) > eps), None)
            if col is None:
                continue
            _pivot(T, i, col)
            basis[i] = col
        keep.append(i)
    T = np.vstack([T[keep], T[nrow:nrow + 1]])
    basis = [basis[i] for i in keep]
    nrow = len(keep)

    # Phase 2 objective row in terms of the current basis.
    T[nrow] = conv(0)
    for j, cj in enumerate(c):
        T[nrow, j] = conv(cj)
    for i, bj in enumerate(basis):
        if T[nrow, bj] != 0:
            T[nrow] = T[nrow] - T[nrow, bj] * T[i]
    iters += _run(T, basis, range(art_start), eps)

    x = [conv(0)] * (nvar + n_slack)
    for i, bj in enumerate(basis):
        x[bj] = T[i, -1]
    x_orig = np.array([float(v) for v in x[:nvar]])
    value = -T[nrow, -1]
    result = LPResult(x_orig, float(value), exact, iters)
    if not exact:
        _verify(c, A_ub, b_ub, A_eq, b_eq, result)
    return result


def _verify(c, A_ub, b_ub, A_eq, b_eq, result):
    """Primal feasibility plus a dual certificate for float solves."""
    from scipy.optimize import linprog

    x = result.x
    tol = VERIFY_TOL * max(1.0, float(np.abs(c).max(initial=0.0)))
    if (x < -tol).any():
        raise LPError("float simplex returned a negative variable")
    if A_ub:
        if (np.asarray(A_ub, float) @ x - np.asarray(b_ub, float) > tol).any():
            raise LPError("float simplex violated an inequality")
    if A_eq:
        if (np.abs(np.asarray(A_eq, float) @ x - np.asarray(b_eq, float)) > tol).any():
            raise LPError("float simplex violated an equality")
    # Independent dual bound: the dual optimum must match the primal value.
    n_ub, n_eq = len(A_ub), len(A_eq)
    A = np.vstack([np.asarray(A_ub, float).reshape(n_ub, len(c)), np.asarray(A_eq, float).reshape(n_eq, len(c))])
    b = np.concatenate([np.asarray(b_ub, float), np.asarray(b_eq, float)])
    bounds = [(None, 0)] * n_ub + [(None, None)] * n_eq
    dual = linprog(-b, A_ub=A.T, b_ub=np.asarray(c, float), bounds=bounds, method="highs")
    if dual.status != 0 or abs(-dual.fun - result.value) > tol * max(1.0, abs(result.value)):
        raise LPError("float simplex failed the duality-gap check")
