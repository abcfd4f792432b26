"""Dense two-phase revised simplex for LPs in equality standard form.

Problems have the shape  opt c'x  subject to  Ax = b, x >= 0  with a full
row rank A.  Bland's rule is used throughout: the instances we care about
are small and often degenerate (polytopes that collapse to a point), so
anti-cycling matters more than pivot speed.
"""

from dataclasses import dataclass

import numpy as np

from .errors import DimensionMismatch, SingularBasis

_PIVOT_TOL = 1e-10
_FEAS_TOL = 1e-9
_MAX_ITER = 50_000


@dataclass
class LpResult:
    status: str  # "optimal" | "unbounded" | "infeasible"
    x: np.ndarray | None
    objective: float | None
    y: np.ndarray | None  # dual vector for the row constraints
    basis: list | None = None


def _bland_simplex(A, b, c, basis):
    """Phase kernel: minimize c'x from a feasible basis. Returns (status, basis, x)."""
    m, n = A.shape
    for _ in range(_MAX_ITER):
        B = A[:, basis]
        try:
            xB = np.linalg.solve(B, b)
            y = np.linalg.solve(B.T, c[basis])
        except np.linalg.LinAlgError as exc:
            raise SingularBasis(f"singular basis {basis}") from exc
        reduced = c - y @ A
        entering = -1
        for j in range(n):
            if j not in basis and reduced[j] < -_PIVOT_TOL:
                entering = j
                break
        if entering < 0:
            x = np.zeros(n)
            x[basis] = xB
            return "optimal", basis, x
        d = np.linalg.solve(B, A[:, entering])
        ratios = [
            (xB[i] / d[i], basis[i], i) for i in range(m) if d[i] > _PIVOT_TOL
        ]
        if not ratios:
            return "unbounded", basis, None
        # min ratio, ties broken by smallest leaving variable index (Bland)
        _, _, leave_pos = min(ratios, key=lambda t: (t[0], t[1]))
        basis[leave_pos] = entering
    raise SingularBasis("simplex iteration limit hit; basis cycling suspected")


def lp_solve(c, A, b, sense="min"):
    """Solve opt c'x s.t. Ax = b, x >= 0.

    Returns an LpResult whose dual vector y satisfies y'A <= c (min) or
    y'A >= c (max) at optimality, with y'b equal to the optimal value.
    """
    A = np.atleast_2d(np.asarray(A, dtype=float))
    b = np.asarray(b, dtype=float).ravel()
    c = np.asarray(c, dtype=float).ravel()
    m, n = A.shape
    if b.shape[0] != m or c.shape[0] != n:
        raise DimensionMismatch(f"A is {m}x{n}, b has {b.shape[0]}, c has {c.shape[0]}")
    if sense not in ("min", "max"):
        raise ValueError(f"sense must be 'min' or 'max', got {sense!r}")
    cmin = -c if sense == "max" else c.copy()

    # Phase 1: flip rows so b >= 0, append artificials with identity basis.
    flip = np.where(b < 0, -1.0, 1.0)
    A1 = np.hstack([A * flip[:, None], np.eye(m)])
    b1 = b * flip
    c1 = np.concatenate([np.zeros(n), np.ones(m)])
    basis = list(range(n, n + m))
    status, basis, x1 = _bland_simplex(A1, b1, c1, basis)
    if status != "optimal" or x1[n:].sum() > _FEAS_TOL:
        return LpResult("infeasible", None, None, None)

    # Drive leftover artificials out of the basis (possible since rank(A) = m).
    for pos, j in enumerate(basis):
        if j >= n:
            B = A1[:, basis]
            row = np.linalg.solve(B, A1[:, :n])[pos]
            cand = [k for k in range(n) if k not in basis and abs(row[k]) > _PIVOT_TOL]
            if not cand:
                raise SingularBasis("cannot remove artificial from basis; A rank deficient?")
            basis[pos] = cand[0]

    A2 = A * flip[:, None]
    status, basis, x = _bland_simplex(A2, b1, cmin, basis)
    if status == "unbounded":
        return LpResult("unbounded", None, None, None)
    y = np.linalg.solve(A2[:, basis].T, cmin[basis]) * flip
    obj = float(cmin @ x)
    if sense == "max":
        obj, y = -obj, -y
    return LpResult("optimal", x, obj, y, basis=list(basis))
