"""Entropy-maximizing weights w for the polytope K = {x >= 0 : Ax = b}.

The reciprocal vector 1/w is the point of K minimizing -sum log x_j; w
itself collects the rates of the entropy-maximizing product exponential
law whose mean lies in K.  w = A' L0 where L0 minimizes the convex dual
objective -sum_j log((A'L)_j) + <L, b>, a log-barrier-type function that
damped Newton handles robustly.
"""

import math
from dataclasses import dataclass

import numpy as np
from scipy.linalg import cho_factor, cho_solve

from .errors import DomainViolation, InfeasiblePoint, NotPositivized

ARMIJO_C1 = 1e-4
BOUNDARY_FRAC = 0.99


@dataclass
class Barycenter:
    w: np.ndarray            # positive rates, w = A' lambda0
    lambda0: np.ndarray      # dual optimum
    dual_value: float
    centering_residual: float  # max-norm of A(1/w) - b
    iterations: int
    converged: bool = True

    @property
    def center(self):
        """The barycenter point 1/w, an interior point of K."""
        return 1.0 / self.w

    def to_dict(self):
        return {
            "w": self.w.tolist(),
            "lambda0": self.lambda0.tolist(),
            "dual_value": self.dual_value,
            "residual": self.centering_residual,
            "iterations": self.iterations,
            "converged": self.converged,
        }


def dual_value(cs, lam):
    """-sum log((A'L)_j) + <L, b>, with +inf outside the positive domain."""
    tau = cs.A.T @ np.asarray(lam, dtype=float)
    if np.any(tau <= 0):
        return math.inf
    return float(-np.sum(np.log(tau)) + lam @ cs.b)


def dual_gradient(cs, lam):
    tau = cs.A.T @ np.asarray(lam, dtype=float)
    if np.any(tau <= 0):
        raise DomainViolation("A'L has a nonpositive entry")
    return -cs.A @ (1.0 / tau) + cs.b


def dual_hessian(cs, lam):
    tau = cs.A.T @ np.asarray(lam, dtype=float)
    if np.any(tau <= 0):
        raise DomainViolation("A'L has a nonpositive entry")
    S = cs.A / tau
    return S @ S.T


def solve_barycenter(cs, tol=1e-10, max_iter=200, start=None):
    """Damped Newton minimization of the dual, started at L = 1.

    Requires a positivized system (all entries of A and b positive) so the
    all-ones start is strictly feasible.  Steps are clipped away from the
    domain boundary and backtracked under the Armijo rule; once the
    gradient test passes, one last full Newton step polishes the iterate.
    """
    if np.any(cs.A <= 0) or np.any(cs.b <= 0):
        raise NotPositivized("solve_barycenter expects entrywise positive (A, b)")
    A, b = cs.A, cs.b

    # rescale wildly varying rows to unit max; undone on lambda at the end
    scale = np.ones(cs.m)
    spread = A.max() / A[A > 0].min()
    if spread > 1e6:
        scale = 1.0 / A.max(axis=1)
        A = A * scale[:, None]
        b = b * scale

    lam = np.ones(cs.m) if start is None else np.asarray(start, dtype=float) / scale
    tau = A.T @ lam
    if np.any(tau <= 0):
        raise DomainViolation("start is outside the dual domain")
    it = 0
    converged = False
    for it in range(1, max_iter + 1):
        g = -A @ (1.0 / tau) + b
        if np.max(np.abs(g)) <= tol:
            converged = True
            break
        S = A / tau
        H = S @ S.T
        try:
            step = -cho_solve(cho_factor(H), g)
        except np.linalg.LinAlgError:
            step = -np.linalg.lstsq(H, g, rcond=None)[0]
        dtau = A.T @ step
        neg = dtau < 0
        alpha = 1.0
        if np.any(neg):
            alpha = min(1.0, BOUNDARY_FRAC * np.min(-tau[neg] / dtau[neg]))
        f0 = float(-np.sum(np.log(tau)) + lam @ b)
        slope = float(g @ step)
        while alpha > 1e-14:
            tau_new = tau + alpha * dtau
            if np.all(tau_new > 0):
                f_new = float(-np.sum(np.log(tau_new)) + (lam + alpha * step) @ b)
                if f_new <= f0 + ARMIJO_C1 * alpha * slope:
                    break
            alpha *= 0.5
        lam = lam + alpha * step
        tau = A.T @ lam

    if converged:
        # gradient is tiny; an undamped polish step reaches roundoff level
        g = -A @ (1.0 / tau) + b
        S = A / tau
        try:
            step = -cho_solve(cho_factor(S @ S.T), g)
            tau_new = tau + A.T @ step
            if np.all(tau_new > 0):
                lam, tau = lam + step, tau_new
        except np.linalg.LinAlgError:
            pass

    lam_orig = lam * scale
    w = cs.A.T @ lam_orig
    residual = float(np.max(np.abs(cs.A @ (1.0 / w) - cs.b)))
    return Barycenter(
        w=w,
        lambda0=lam_orig,
        dual_value=dual_value(cs, lam_orig),
        centering_residual=residual,
        iterations=it,
        converged=converged,
    )


def entropy_certificate(bc, points, feas_cs=None, tol=1e-7):
    """Margins -sum log x_j + sum log(1/w_j) for feasible points; all >= -1e-9.

    When feas_cs is given, each point is first checked to satisfy Ax = b
    and x > 0 within tolerance.
    """
    ref = float(np.sum(np.log(bc.w)))  # = -sum log(1/w_j)
    margins = []
    for x in np.atleast_2d(np.asarray(points, dtype=float)):
        if np.any(x <= 0):
            raise InfeasiblePoint("point has a nonpositive coordinate")
        if feas_cs is not None and feas_cs.residual(x) > tol * (1 + np.abs(feas_cs.b).max()):
            raise InfeasiblePoint("point violates Ax = b")
        margins.append(float(-np.sum(np.log(x)) - ref))
    return np.asarray(margins)
