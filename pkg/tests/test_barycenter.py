"""Dual objective, Newton solve, and the entropy optimality certificate."""

import math

import numpy as np
import pytest

from polyclt import (
    ConstraintSystem,
    dual_gradient,
    dual_hessian,
    dual_value,
    entropy_certificate,
    positivize,
    solve_barycenter,
)
from polyclt.barycenter import Barycenter
from polyclt.errors import DomainViolation, InfeasiblePoint, NotPositivized
from polyclt.samplers import hit_and_run

SEG = ConstraintSystem([[1.0, 1.0]], [1.0])


def test_dual_value_examples():
    assert dual_value(SEG, [1.0]) == pytest.approx(1.0, abs=1e-12)
    assert dual_value(SEG, [2.0]) == pytest.approx(-2 * math.log(2) + 2, abs=1e-9)
    assert dual_value(SEG, [-1.0]) == math.inf
    assert dual_value(SEG, [0.0]) == math.inf


def test_dual_gradient_hessian_examples():
    assert dual_gradient(SEG, [1.0]) == pytest.approx([-1.0], abs=1e-12)
    assert dual_gradient(SEG, [2.0]) == pytest.approx([0.0], abs=1e-12)
    assert np.allclose(dual_hessian(SEG, [1.0]), [[2.0]], atol=1e-12)
    with pytest.raises(DomainViolation):
        dual_gradient(SEG, [-1.0])
    with pytest.raises(DomainViolation):
        dual_hessian(SEG, [0.0])


@pytest.mark.parametrize("seed", range(5))
def test_gradient_hessian_finite_differences(seed):
    rng = np.random.default_rng(seed)
    m, n = 2, 8
    A = rng.uniform(0.3, 2.0, size=(m, n))
    cs = ConstraintSystem(A, A @ rng.uniform(0.2, 1.0, size=n))
    lam = rng.uniform(0.5, 2.0, size=m)
    g = dual_gradient(cs, lam)
    H = dual_hessian(cs, lam)
    h = 1e-6
    for i in range(m):
        e = np.zeros(m)
        e[i] = h
        fd_g = (dual_value(cs, lam + e) - dual_value(cs, lam - e)) / (2 * h)
        assert fd_g == pytest.approx(g[i], rel=1e-5, abs=1e-7)
        fd_h = (dual_gradient(cs, lam + e) - dual_gradient(cs, lam - e)) / (2 * h)
        assert np.allclose(fd_h, H[i], rtol=1e-5, atol=1e-5)


def test_simplex_solutions():
    bc = solve_barycenter(ConstraintSystem([[1.0] * 4], [1.0]))
    assert np.allclose(bc.w, 4.0, atol=1e-10)
    assert bc.lambda0 == pytest.approx([4.0], abs=1e-10)
    assert bc.centering_residual < 1e-12
    assert bc.converged

    bc2 = solve_barycenter(ConstraintSystem([[2.0, 2.0, 2.0]], [3.0]))
    assert np.allclose(bc2.w, 2.0, atol=1e-10)
    assert bc2.lambda0 == pytest.approx([1.0], abs=1e-10)


def test_w_is_at_lambda0():
    rng = np.random.default_rng(1)
    A = rng.uniform(0.3, 2.0, size=(2, 9))
    cs = ConstraintSystem(A, A @ rng.uniform(0.2, 1.0, size=9))
    bc = solve_barycenter(cs)
    assert np.allclose(bc.w, cs.A.T @ bc.lambda0, rtol=0, atol=0)
    assert np.all(bc.w > 0)
    # solution improves on the all-ones start
    assert bc.dual_value <= dual_value(cs, np.ones(2))


def test_three_left_columns_example():
    n = 7
    A = np.vstack([np.ones(n), np.concatenate([[1, 1, 1], np.zeros(n - 3)])])
    bc = solve_barycenter(positivize(ConstraintSystem(A, [2, 1])))
    assert np.allclose(bc.w, [3, 3, 3, 4, 4, 4, 4], atol=1e-9)


def test_uniqueness_from_different_starts():
    rng = np.random.default_rng(7)
    A = rng.uniform(0.3, 2.0, size=(3, 40))
    cs = ConstraintSystem(A, A @ rng.uniform(0.2, 1.0, size=40))
    w1 = solve_barycenter(cs).w
    w2 = solve_barycenter(cs, start=2 * np.ones(3)).w
    assert np.max(np.abs(w1 - w2) / w1) < 1e-8


def test_requires_positive_entries():
    with pytest.raises(NotPositivized):
        solve_barycenter(ConstraintSystem([[1.0, -1.0], [0.0, 1.0]], [0.0, 1.0]))


def test_max_iter_returns_flagged_best():
    cs = ConstraintSystem([[1.0] * 4], [1.0])
    bc = solve_barycenter(cs, max_iter=1)
    assert not bc.converged


def test_row_scaling_spread():
    A = np.array([[1e-7, 2e-7, 1.5e-7], [3.0, 1.0, 2.0]])
    cs = ConstraintSystem(A, A @ np.array([0.5, 0.5, 0.5]))
    bc = solve_barycenter(cs)
    assert bc.converged
    assert bc.centering_residual <= 1e-9 * (1 + np.abs(cs.b).max())


def test_entropy_certificate_examples():
    bc = solve_barycenter(ConstraintSystem([[1.0] * 3], [1.0]))
    assert entropy_certificate(bc, [[1 / 3, 1 / 3, 1 / 3]])[0] == pytest.approx(0.0, abs=1e-12)
    margin = entropy_certificate(bc, [[0.5, 0.3, 0.2]])[0]
    assert margin == pytest.approx(
        -(math.log(0.5) + math.log(0.3) + math.log(0.2)) - 3 * math.log(3), abs=1e-12
    )
    assert margin == pytest.approx(0.2107, abs=1e-4)


def test_entropy_certificate_sampled_points():
    rng = np.random.default_rng(2)
    A = rng.uniform(0.3, 2.0, size=(2, 12))
    cs = ConstraintSystem(A, A @ rng.uniform(0.2, 1.0, size=12))
    bc = solve_barycenter(cs)
    pts = hit_and_run(cs, x0=bc.center, count=100, seed=5).points
    margins = entropy_certificate(bc, pts, feas_cs=cs)
    assert np.min(margins) >= -1e-9


def test_entropy_certificate_rejects_bad_points():
    bc = solve_barycenter(ConstraintSystem([[1.0] * 3], [1.0]))
    with pytest.raises(InfeasiblePoint):
        entropy_certificate(bc, [[0.5, 0.5, -0.1]])
    with pytest.raises(InfeasiblePoint):
        entropy_certificate(
            bc, [[0.5, 0.5, 0.5]], feas_cs=ConstraintSystem([[1.0] * 3], [1.0])
        )


def test_center_property():
    bc = Barycenter(np.array([2.0, 4.0]), np.array([2.0]), 0.0, 0.0, 1)
    assert np.allclose(bc.center, [0.5, 0.25])
