"""Simplex solver against hand examples and a vertex-enumeration oracle."""

import itertools

import numpy as np
import pytest

from polyclt import lp_solve
from polyclt.errors import DimensionMismatch


def test_sum_constraint_max():
    res = lp_solve([1.0, 1.0], [[1.0, 1.0]], [1.0], sense="max")
    assert res.status == "optimal"
    assert res.objective == pytest.approx(1.0, abs=1e-12)
    assert np.allclose(np.sum(res.x), 1.0)


def test_unbounded_direction():
    res = lp_solve([1.0, 1.0], [[1.0, -1.0]], [0.0], sense="max")
    assert res.status == "unbounded"


def test_infeasible_negative_rhs():
    res = lp_solve([1.0, 0.0], [[1.0, 1.0]], [-1.0])
    assert res.status == "infeasible"


def test_dimension_mismatch():
    with pytest.raises(DimensionMismatch):
        lp_solve([1.0], [[1.0, 1.0]], [1.0])
    with pytest.raises(DimensionMismatch):
        lp_solve([1.0, 1.0], [[1.0, 1.0]], [1.0, 2.0])


def test_bad_sense():
    with pytest.raises(ValueError):
        lp_solve([1.0, 1.0], [[1.0, 1.0]], [1.0], sense="argmax")


def test_dual_feasibility_min():
    rng = np.random.default_rng(0)
    A = rng.uniform(0.5, 2.0, size=(2, 5))
    x0 = rng.uniform(0.1, 1.0, size=5)
    b = A @ x0
    c = rng.normal(size=5)
    res = lp_solve(c, A, b)
    assert res.status == "optimal"
    assert np.all(res.y @ A <= c + 1e-9)
    assert res.y @ b == pytest.approx(res.objective, abs=1e-9)


def _vertex_optimum(c, A, b, sense):
    """Enumerate basic feasible solutions; the optimum sits at a vertex."""
    m, n = A.shape
    best = None
    for cols in itertools.combinations(range(n), m):
        B = A[:, list(cols)]
        if abs(np.linalg.det(B)) < 1e-10:
            continue
        xB = np.linalg.solve(B, b)
        if np.min(xB) < -1e-9:
            continue
        x = np.zeros(n)
        x[list(cols)] = xB
        val = float(c @ x)
        if best is None or (val > best if sense == "max" else val < best):
            best = val
    return best


@pytest.mark.parametrize("seed", range(20))
def test_against_vertex_enumeration(seed):
    rng = np.random.default_rng(seed)
    m = rng.integers(1, 4)
    n = rng.integers(m + 1, 7)
    A = rng.uniform(0.2, 2.0, size=(m, n))  # positive columns keep K compact
    x0 = rng.uniform(0.1, 1.0, size=n)
    b = A @ x0
    c = rng.normal(size=n)
    for sense in ("min", "max"):
        res = lp_solve(c, A, b, sense=sense)
        oracle = _vertex_optimum(c, A, b, sense)
        assert res.status == "optimal"
        assert res.objective == pytest.approx(oracle, abs=1e-9)
        assert np.max(np.abs(A @ res.x - b)) < 1e-9
        assert np.min(res.x) > -1e-9


def test_degenerate_point_polytope():
    # K is the single point (1, 1); heavy degeneracy must not cycle
    A = np.array([[1.0, 0.0], [0.0, 1.0], [1.0, 1.0]])[:2]
    res = lp_solve([3.0, -1.0], A, [1.0, 1.0], sense="max")
    assert res.status == "optimal"
    assert res.objective == pytest.approx(2.0, abs=1e-12)
