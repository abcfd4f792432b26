"""Characteristic-function machinery: Bartlett ratio, complex mixture
box probabilities, cumulants, and the Gaussian-penalty approximation.

All ratios of oscillatory integrals over the constraint-frequency
variable are computed by adaptive cubature on a truncated box whose
radius is chosen from the certified modulus bound of the integrand;
imaginary residue of nominally real quantities is folded into the error
estimate rather than discarded.
"""

import math
from dataclasses import dataclass

import numpy as np

from .constraints import column_removal_safe
from .errors import (
    BoxUnboundedWithoutDecay,
    DenominatorTooSmall,
    DimensionTooLarge,
    RankDeficient,
)
from .lp import lp_solve
from .quadrature import adaptive_cubature


@dataclass
class CfEvaluation:
    value: complex
    abs_error_estimate: float
    quad_points: int
    truncation_radius: float


@dataclass
class QuadConfig:
    tol: float = 1e-6
    max_panels: int = 60_000
    order: int = 7
    radius: float | None = None  # None: choose from the modulus-decay bound


def product_cf(c):
    """prod_j e^{-i c_j} / (1 - i c_j): cf of sum c_j (X_j - 1), X_j iid Exp(1).

    Accumulated as a sum of complex logs so products over thousands of
    factors neither overflow nor underflow.
    """
    c = np.asarray(c, dtype=float)
    return complex(np.exp(np.sum(-1j * c - np.log(1.0 - 1j * c), axis=-1)))


def _log_product_cf_rows(C):
    """Row-wise log of product_cf for an (N, n) coefficient matrix."""
    return np.sum(-1j * C - np.log(1.0 - 1j * C), axis=1)


def cumulant_sum(c, k):
    """k-th cumulant (k-1)! sum_j c_j^k of sum_j c_j (X_j - 1); zero for k = 1."""
    if k < 1:
        raise ValueError("cumulant order must be >= 1")
    if k == 1:
        return 0.0
    c = np.asarray(c, dtype=float)
    return float(math.factorial(k - 1) * np.sum(c ** k))


def _tail_estimate(modulus, R, m):
    """Crude certified-in-spirit tail bound from a power fit of the modulus.

    Fits |f| ~ C r^{-alpha} along the coordinate rays at radii R and 2R and
    integrates the fit over the exterior of the box [-R, R]^m.
    """
    probes = np.vstack([np.eye(m), -np.eye(m)])
    f1 = modulus(R * probes)
    f2 = modulus(2 * R * probes)
    f1m, f2m = float(np.max(f1)), float(np.max(f2))
    if f1m == 0.0:
        return 0.0
    if f2m == 0.0:
        f2m = 1e-320
    alpha = math.log(f1m / max(f2m, 1e-320)) / math.log(2.0)
    if alpha <= m + 0.5:
        return math.inf
    # surface of the box times the radial integral of the fitted decay
    surface = 2 * m * (2 * R) ** (m - 1)
    return f1m * surface * R / (alpha - m)


def _auto_radius(modulus, m, tol, r0=2.0, rmax=2 ** 40):
    R = r0
    while R < rmax:
        tail = _tail_estimate(modulus, R, m)
        if tail <= tol:
            return R, tail
        R *= 2.0
    return R, _tail_estimate(modulus, R, m)


def _oscillation_splits(freq, R, cap=4096):
    """Initial panel count per axis: a few panels per oscillation period."""
    return int(min(cap, max(4, math.ceil(2 * R * (freq + 0.25) / math.pi))))


def _integral_ratio(log_num, log_den, modulus, m, quad, freq):
    """Common engine: ratio of two m-dim integrals given log-integrands.

    `modulus` must dominate the absolute value of both integrands; it
    drives the truncation radius and the tail error bound.
    """
    tol = quad.tol
    if quad.radius is not None:
        R = quad.radius
        tail = _tail_estimate(modulus, R, m)
    else:
        R, tail = _auto_radius(modulus, m, 0.05 * tol)
    splits = _oscillation_splits(freq, R)
    if m >= 2:
        splits = min(splits, 64 if m == 2 else 16)
    lo, hi = -R * np.ones(m), R * np.ones(m)

    den, den_err, ev1 = adaptive_cubature(
        lambda e: np.exp(log_den(e)), lo, hi, tol=tol,
        max_panels=quad.max_panels, order=quad.order, initial=splits,
    )
    num, num_err, ev2 = adaptive_cubature(
        lambda e: np.exp(log_num(e)), lo, hi, tol=tol,
        max_panels=quad.max_panels, order=quad.order, initial=splits,
    )
    den_err += tail
    num_err += tail
    if abs(den) < 10 * den_err:
        raise DenominatorTooSmall(
            f"|denominator| {abs(den):.3e} below 10x its error {den_err:.3e}"
        )
    ratio = num / den
    err = (num_err + abs(ratio) * den_err) / abs(den)
    return ratio, err, ev1 + ev2, R


def bartlett_cf(ss, wspec, t, quad=None):
    """E_{P_n} e^{i t S_n*} via the standardized two-integral Bartlett ratio.

    Numerator coefficients are c_j(eta) = t lh_j + <eta, Ah_j>, denominator
    drops the t-term; both reduce to centered iid Exp(1) expectations.
    """
    quad = quad or QuadConfig()
    a_hat, lh = ss.a_hat, wspec.lambda_hat
    m = ss.m
    t = float(t)

    def log_num(etas):
        return _log_product_cf_rows(t * lh + etas @ a_hat)

    def log_den(etas):
        return _log_product_cf_rows(etas @ a_hat)

    def modulus(etas):
        C0 = etas @ a_hat
        Ct = t * lh + C0
        mod_den = np.exp(-0.5 * np.sum(np.log1p(C0 * C0), axis=1))
        mod_num = np.exp(-0.5 * np.sum(np.log1p(Ct * Ct), axis=1))
        return np.maximum(mod_den, mod_num)

    freq = float(np.abs(a_hat).sum(axis=1).max())  # phase speed of e^{-i c_j} terms
    ratio, err, evals, R = _integral_ratio(log_num, log_den, modulus, m, quad, freq)
    return CfEvaluation(ratio, err, evals, R)


def mixture_box_probability(cs, bc, box, quad=None):
    """P_n(box) as a ratio of complex mixture integrals over R^m.

    Per-coordinate factors integrate e^{-z_j x} over box_j intersected with
    the nonnegative half-line, z_j = w_j - i <eta, A_j>.  Requires the
    column-removal rank condition; returns the real part with the imaginary
    residue folded into the error estimate.
    """
    quad = quad or QuadConfig()
    safe, bad = column_removal_safe(cs.A)
    if not safe:
        raise RankDeficient(f"rank drops when removing columns {bad}")
    A, b, w = cs.A, cs.b, bc.w
    m, n = cs.m, cs.n
    lo = np.maximum(np.asarray([iv[0] for iv in box], dtype=float), 0.0)
    hi = np.asarray([iv[1] for iv in box], dtype=float)
    if len(lo) != n:
        raise ValueError(f"box needs {n} intervals")
    if np.any(hi <= lo):
        return CfEvaluation(0.0, 0.0, 0, 0.0)
    unbounded = np.isinf(hi)
    if np.any(unbounded & (w <= 0)):
        raise BoxUnboundedWithoutDecay("unbounded interval with nonpositive rate")

    def _log1mexp(x):
        """log(1 - e^{-x}) for complex x with Re x > 0, cancellation-safe."""
        out = np.empty_like(x)
        small = np.abs(x) < 1e-4
        xs = x[small]
        out[small] = np.log(xs * (1 - xs / 2 + xs * xs / 6 - xs ** 3 / 24))
        out[~small] = np.log(1.0 - np.exp(-x[~small]))
        return out

    def log_den(etas):
        Z = w - 1j * (etas @ A)  # (N, n)
        return np.sum(-np.log(Z), axis=1) - 1j * (etas @ b)

    def log_num(etas):
        Z = w - 1j * (etas @ A)
        logs = -lo * Z - np.log(Z)
        if np.any(~unbounded):
            d = (hi - lo)[~unbounded]
            logs[:, ~unbounded] += _log1mexp(d * Z[:, ~unbounded])
        return np.sum(logs, axis=1) - 1j * (etas @ b)

    def modulus(etas):
        mod_den = np.exp(-0.5 * np.sum(np.log(w ** 2 + (etas @ A) ** 2), axis=1))
        return np.abs(np.exp(log_num(etas))) + mod_den

    freq = float(np.abs(b).max() + (np.abs(A) * np.where(unbounded, lo, hi)).sum(axis=1).max())
    ratio, err, evals, R = _integral_ratio(log_num, log_den, modulus, m, quad, freq)
    err += abs(ratio.imag)
    return CfEvaluation(float(ratio.real), err, evals, R)


def gamma_box_probability(cs, bc, gamma, box, quad=None):
    """Gaussian-penalty approximation P^gamma(box) by direct orthant cubature.

    Only feasible at toy dimension (n <= 4): the density
    e^{-sum w_j x_j - gamma |Ax - b|^2} concentrates on a 1/sqrt(gamma)
    neighborhood of K, which adaptive refinement has to resolve.
    """
    quad = quad or QuadConfig(tol=1e-5, max_panels=120_000)
    n = cs.n
    if n > 4:
        raise DimensionTooLarge(f"direct cubature limited to n <= 4, got n={n}")
    A, b, w = cs.A, cs.b, bc.w
    margin = 12.0 / (math.sqrt(gamma) * np.linalg.norm(A, axis=0))
    upper = np.empty(n)
    for j in range(n):
        c = np.zeros(n)
        c[j] = 1.0
        res = lp_solve(c, A, b, sense="max")
        upper[j] = res.objective + margin[j] if res.status == "optimal" else np.inf

    def dens(x):
        resid = x @ A.T - b
        return np.exp(-x @ w - gamma * np.sum(resid * resid, axis=1))

    lo = np.maximum(np.asarray([iv[0] for iv in box], dtype=float), 0.0)
    hi = np.minimum(np.asarray([iv[1] for iv in box], dtype=float), upper)
    den, den_err, _ = adaptive_cubature(
        dens, np.zeros(n), upper, tol=quad.tol, max_panels=quad.max_panels,
        order=quad.order, initial=4,
    )
    if np.any(hi <= lo):
        return 0.0
    num, num_err, _ = adaptive_cubature(
        dens, lo, hi, tol=quad.tol, max_panels=quad.max_panels,
        order=quad.order, initial=4,
    )
    if abs(den) < 10 * den_err:
        raise DenominatorTooSmall("orthant normalizer below its own error bar")
    return float(num / den)
