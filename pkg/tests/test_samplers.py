"""Samplers: kernel frames, chord geometry, uniformity, determinism."""

import numpy as np
import pytest
from scipy import stats as sps

from polyclt import (
    ConstraintSystem,
    dirichlet_exact,
    exp_product,
    hit_and_run,
    kernel_basis,
    ks_test,
    solve_barycenter,
)
from polyclt.errors import RankDeficient, StartNotInterior
from polyclt.samplers import chord_bounds


def test_kernel_basis_examples():
    B = kernel_basis(np.array([[1.0, 1.0]]))
    assert B.shape == (2, 1)
    assert np.allclose(np.abs(B[:, 0]), 1 / np.sqrt(2))
    assert B[0, 0] * B[1, 0] < 0

    B2 = kernel_basis(np.array([[1.0, 0.0, 0.0], [0.0, 1.0, 0.0]]))
    assert np.allclose(np.abs(B2.ravel()), [0, 0, 1], atol=1e-12)

    rng = np.random.default_rng(0)
    A = rng.normal(size=(2, 6))
    B3 = kernel_basis(A)
    assert np.max(np.abs(A @ B3)) < 1e-10
    assert np.allclose(B3.T @ B3, np.eye(4), atol=1e-10)

    with pytest.raises(RankDeficient):
        kernel_basis(np.array([[1.0, 1.0], [2.0, 2.0]]))


def test_chord_bounds_example():
    lo, hi = chord_bounds(np.array([0.5, 0.5]), np.array([1.0, -1.0]) / np.sqrt(2))
    assert lo == pytest.approx(-np.sqrt(2) / 2, abs=1e-12)
    assert hi == pytest.approx(np.sqrt(2) / 2, abs=1e-12)


def test_segment_marginal_uniform():
    cs = ConstraintSystem([[1.0, 1.0]], [1.0])
    pts = hit_and_run(cs, x0=np.array([0.5, 0.5]), count=10_000, seed=2).points
    assert np.max(np.abs(pts.sum(axis=1) - 1)) < 1e-9
    assert ks_test(pts[:, 0], "uniform01").statistic <= 0.02


def test_simplex_marginal_beta():
    cs = ConstraintSystem([[1.0] * 3], [1.0])
    bc = solve_barycenter(cs)
    pts = hit_and_run(cs, x0=bc.center, count=10_000, seed=3).points
    assert ks_test(pts[:, 0], "beta(1,2)").statistic <= 0.02


def test_hit_and_run_agrees_with_exact_sampler():
    cs = ConstraintSystem([[1.0] * 5], [1.0])
    bc = solve_barycenter(cs)
    a = hit_and_run(cs, x0=bc.center, count=10_000, seed=4).points
    b = dirichlet_exact(5, 1.0, 1.0, count=10_000, seed=5).points
    assert sps.ks_2samp(a[:, 1], b[:, 1]).statistic <= 0.03


def test_feasibility_invariants():
    rng = np.random.default_rng(1)
    A = rng.uniform(0.3, 2.0, size=(2, 10))
    cs = ConstraintSystem(A, A @ rng.uniform(0.2, 1.0, size=10))
    bc = solve_barycenter(cs)
    ch = hit_and_run(cs, x0=bc.center, count=500, seed=6)
    assert np.min(ch.points) >= -1e-12
    assert np.max(np.abs(ch.points @ cs.A.T - cs.b)) <= 1e-9
    assert ch.sampler_kind == "hit_and_run"


def test_determinism_and_jobs_independence():
    cs = ConstraintSystem([[1.0] * 6], [1.0])
    bc = solve_barycenter(cs)
    a = hit_and_run(cs, x0=bc.center, count=200, seed=9).points
    b = hit_and_run(cs, x0=bc.center, count=200, seed=9).points
    c = hit_and_run(cs, x0=bc.center, count=200, seed=9, jobs=4).points
    d = hit_and_run(cs, x0=bc.center, count=200, seed=10).points
    assert np.array_equal(a, b)
    assert np.array_equal(a, c)
    assert not np.array_equal(a, d)


def test_start_must_be_interior():
    cs = ConstraintSystem([[1.0, 1.0]], [1.0])
    with pytest.raises(StartNotInterior):
        hit_and_run(cs, x0=np.array([1.0, 0.0]), count=10, seed=0)
    with pytest.raises(StartNotInterior):
        hit_and_run(cs, x0=np.array([0.7, 0.7]), count=10, seed=0)


def test_dirichlet_exact_moments_and_box():
    ch = dirichlet_exact(3, 1.0, 1.0, count=40_000, seed=7)
    assert np.allclose(ch.points.mean(axis=0), 1 / 3, atol=3 * 0.3 / np.sqrt(40_000))
    inside = np.all(ch.points <= 0.5, axis=1).mean()
    assert inside == pytest.approx(0.25, abs=0.01)
    # scaled version: A = (c,...,c), b
    ch2 = dirichlet_exact(4, 2.0, 3.0, count=5_000, seed=8)
    assert np.allclose(ch2.points.sum(axis=1), 1.5, atol=1e-12)

    with pytest.raises(ValueError):
        dirichlet_exact(3, -1.0, 1.0)


def test_dirichlet_exchangeability():
    ch = dirichlet_exact(3, 1.0, 1.0, count=10_000, seed=9)
    res = sps.ks_2samp(ch.points[:, 0], ch.points[:, 1])
    assert res.pvalue > 0.01


def test_exp_product_moments():
    w = np.array([1.0, 2.0, 4.0])
    ch = exp_product(w, count=50_000, seed=10)
    se = (1 / w) / np.sqrt(50_000)
    assert np.allclose(ch.points.mean(axis=0), 1 / w, atol=3 * np.max(se) + 1e-3)
    assert np.allclose(ch.points.var(axis=0), 1 / w ** 2, rtol=0.05)
    A = np.array([[1.0, 1.0, 1.0]])
    b = A @ (1 / w)
    assert np.abs(A @ ch.points.mean(axis=0) - b) < 3 * np.sqrt(np.sum(1 / w ** 2) / 50_000)
    with pytest.raises(ValueError):
        exp_product([1.0, 0.0])


def test_chain_metadata():
    ch = exp_product([1.0], count=5, seed=3)
    assert len(ch) == 5
    assert (ch.seed, ch.burn_in, ch.thin) == (3, 0, 1)
