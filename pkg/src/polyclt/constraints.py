"""Constraint systems (A, b) and the polytope K = {x >= 0 : Ax = b}.

Covers validation (compactness, strict interior, column-removal rank
safety) and the positivization step that rewrites (A, b) with strictly
positive entries without changing K.
"""

import json
from dataclasses import dataclass, field

import numpy as np

from .errors import EmptyInterior, NotCompact, RankDeficient
from .lp import lp_solve

INTERIOR_MARGIN = 1e-12  # strict-interior threshold; an implementation choice


@dataclass(frozen=True)
class ConstraintSystem:
    """The pair (A, b): m equality constraints on n nonnegative variables, n > m."""

    A: np.ndarray
    b: np.ndarray

    def __post_init__(self):
        A = np.atleast_2d(np.asarray(self.A, dtype=float))
        b = np.asarray(self.b, dtype=float).ravel()
        object.__setattr__(self, "A", A)
        object.__setattr__(self, "b", b)
        m, n = A.shape
        if b.shape[0] != m:
            raise ValueError(f"b has length {b.shape[0]}, expected {m}")
        if m > n:
            raise ValueError(f"more constraints than variables, got m={m}, n={n}")
        if np.linalg.matrix_rank(A) < m:
            raise RankDeficient(f"A must have full row rank {m}")

    @property
    def m(self):
        return self.A.shape[0]

    @property
    def n(self):
        return self.A.shape[1]

    def residual(self, x):
        """Max-norm of Ax - b."""
        return float(np.max(np.abs(self.A @ np.asarray(x, dtype=float) - self.b)))

    def to_dict(self):
        return {"A": self.A.tolist(), "b": self.b.tolist()}

    @classmethod
    def from_dict(cls, d):
        cols = []
        if "A" in d and d["A"]:
            cols.append(np.atleast_2d(np.asarray(d["A"], dtype=float)))
        for block in d.get("blocks", []):
            col = np.asarray(block["column"], dtype=float).reshape(-1, 1)
            cols.append(np.repeat(col, int(block["repeat"]), axis=1))
        if not cols:
            raise ValueError("instance needs 'A' and/or 'blocks'")
        return cls(np.hstack(cols), np.asarray(d["b"], dtype=float))

    @classmethod
    def from_json(cls, path):
        with open(path) as fh:
            return cls.from_dict(json.load(fh))

    @classmethod
    def from_csv(cls, a_path, b_path):
        """Headerless CSV matrix for A plus a one-line CSV file for b."""
        A = np.loadtxt(a_path, delimiter=",", ndmin=2)
        b = np.loadtxt(b_path, delimiter=",", ndmin=1)
        return cls(A, b)


@dataclass
class ValidationReport:
    rank_ok: bool
    compact: bool
    interior_nonempty: bool
    column_removal_safe: bool
    column_notes: list = field(default_factory=list)
    interior_margin: float = float("nan")

    @property
    def ok(self):
        return self.rank_ok and self.compact and self.interior_nonempty

    def to_dict(self):
        return {
            "rank_ok": self.rank_ok,
            "compact": self.compact,
            "interior_nonempty": self.interior_nonempty,
            "column_removal_safe": self.column_removal_safe,
            "column_notes": self.column_notes,
            "interior_margin": self.interior_margin,
        }


def column_removal_safe(A):
    """True iff deleting any single column keeps the row rank at m."""
    A = np.atleast_2d(np.asarray(A, dtype=float))
    m, n = A.shape
    notes = []
    for j in range(n):
        Aj = np.delete(A, j, axis=1)
        if np.linalg.matrix_rank(Aj) < m:
            notes.append(j)
    return not notes, notes


def interior_point(cs, margin=INTERIOR_MARGIN):
    """Strictly interior point of K via max t s.t. Ax = b, x_j >= t.

    Returns (x, t).  t <= margin means there is no usable interior point.
    Substituting x = z + t*1 with z >= 0 and free t (split into t+ - t-)
    keeps the problem in equality standard form.
    """
    A, b = cs.A, cs.b
    m, n = A.shape
    s = A.sum(axis=1)
    Aext = np.hstack([A, s[:, None], -s[:, None]])
    c = np.zeros(n + 2)
    c[n], c[n + 1] = 1.0, -1.0
    res = lp_solve(c, Aext, b, sense="max")
    if res.status == "infeasible":
        return None, -np.inf
    if res.status == "unbounded":
        # noncompact K with a strictly positive recession direction
        res = lp_solve(np.zeros(n + 2), Aext, b, sense="max")
        t = np.inf
    else:
        t = res.objective
    x = res.x[:n] + (res.x[n] - res.x[n + 1])
    return x, float(t)


def validate(cs):
    """Run all structural checks on a constraint system; findings, not errors."""
    sum_lp = lp_solve(np.ones(cs.n), cs.A, cs.b, sense="max")
    compact = sum_lp.status != "unbounded"
    _, t = interior_point(cs)
    safe, bad_cols = column_removal_safe(cs.A)
    notes = [f"column {j} removal drops rank: variable {j} is constant on K" for j in bad_cols]
    return ValidationReport(
        rank_ok=True,  # enforced at construction
        compact=compact,
        interior_nonempty=t > INTERIOR_MARGIN,
        column_removal_safe=safe,
        column_notes=notes,
        interior_margin=t,
    )


def positivize(cs, margin=INTERIOR_MARGIN):
    """Equivalent representation (A, b) with all entries strictly positive.

    Strong LP duality gives y with y'A >= 1 and y'b > 0; one row is replaced
    by (y'A, y'b) and positive integer multiples of it are added to the rest.
    The solution set is unchanged (the row transform is invertible).
    """
    A, b = cs.A.copy(), cs.b.copy()
    if np.all(A > 0) and np.all(b > 0):
        return cs
    rep = validate(cs)
    if not rep.compact:
        raise NotCompact("K is unbounded; positivization needs a compact polytope")
    if not rep.interior_nonempty:
        raise EmptyInterior("K has no strictly positive point")
    res = lp_solve(np.ones(cs.n), A, b, sense="max")
    y = res.y
    row, rhs = y @ A, float(y @ b)
    if np.min(row) < 1.0 - 1e-7 or rhs <= 0:
        raise RankDeficient("dual certificate failed; numerically singular basis")

    # replace a row with y_l != 0 (keeps the transform invertible), preferring
    # one that is not already positive
    candidates = [
        l for l in range(cs.m)
        if abs(y[l]) > 1e-12 and not (np.all(A[l] > 0) and b[l] > 0)
    ] or [l for l in range(cs.m) if abs(y[l]) > 1e-12]
    l0 = candidates[0]
    A[l0], b[l0] = row, rhs
    for l in range(cs.m):
        if l == l0:
            continue
        need = max(np.where(row > 0, (margin - A[l]) / row, 0.0).max(),
                   (margin - b[l]) / rhs)
        k = max(0, int(np.ceil(need)))
        A[l] += k * row
        b[l] += k * rhs
    out = ConstraintSystem(A, b)
    x, _ = interior_point(cs)
    if x is not None and out.residual(x) > 1e-8 * (1 + np.abs(b).max()):
        raise RankDeficient("positivized system disagrees with K on a feasible point")
    return out
