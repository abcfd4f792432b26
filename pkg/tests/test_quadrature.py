"""Adaptive tensor cubature on boxes."""

import numpy as np
import pytest

from polyclt.errors import QuadratureBudgetExceeded
from polyclt.quadrature import adaptive_cubature


def test_polynomial_exact():
    val, err, _ = adaptive_cubature(lambda x: x[:, 0] ** 4, [0.0], [1.0], tol=1e-10)
    assert val == pytest.approx(0.2, abs=1e-12)
    assert err < 1e-10


def test_gaussian_1d():
    f = lambda x: np.exp(-x[:, 0] ** 2)
    val, err, n = adaptive_cubature(f, [-8.0], [8.0], tol=1e-10, initial=4)
    assert val == pytest.approx(np.sqrt(np.pi), abs=1e-9)


def test_gaussian_2d():
    f = lambda x: np.exp(-np.sum(x * x, axis=1))
    val, err, _ = adaptive_cubature(f, [-6.0, -6.0], [6.0, 6.0], tol=1e-8, initial=3)
    assert val == pytest.approx(np.pi, abs=1e-7)


def test_complex_integrand():
    f = lambda x: np.exp(1j * x[:, 0])
    val, err, _ = adaptive_cubature(f, [0.0], [np.pi], tol=1e-10, initial=2)
    # int_0^pi e^{ix} dx = (e^{i pi} - 1)/i = 2i
    assert val.real == pytest.approx(0.0, abs=1e-9)
    assert val.imag == pytest.approx(2.0, abs=1e-9)


def test_oscillatory_needs_presplit():
    # high-frequency cosine integrates to ~0; a single coarse panel would
    # report a tiny error by accident, pre-splitting resolves the phase
    f = lambda x: np.cos(40.0 * x[:, 0])
    val, err, _ = adaptive_cubature(f, [0.0], [2 * np.pi], tol=1e-9, initial=32)
    assert abs(val) < 1e-8


def test_budget_exceeded():
    rng = np.random.default_rng(0)
    f = lambda x: np.abs(x[:, 0]) ** 0.1  # kink at 0 resists refinement
    with pytest.raises(QuadratureBudgetExceeded):
        adaptive_cubature(f, [-1.0], [1.0], tol=1e-14, max_panels=40)


def test_deterministic_result():
    f = lambda x: np.exp(-np.sum(x * x, axis=1)) * np.cos(x[:, 0])
    a = adaptive_cubature(f, [-5.0, -5.0], [5.0, 5.0], tol=1e-7, initial=2)
    b = adaptive_cubature(f, [-5.0, -5.0], [5.0, 5.0], tol=1e-7, initial=2)
    assert a[0] == b[0] and a[1] == b[1] and a[2] == b[2]
