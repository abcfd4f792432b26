"""Adaptive tensor Gauss-Legendre cubature over boxes, dimensions 1-4.

Each panel is evaluated at order p and again on its 2^d dyadic children;
the difference is the panel's error estimate and the refined sum its
value.  A worst-first heap drives refinement.  Deterministic: the result
is a fixed-order sum over the final panel set.
"""

import heapq
import itertools

import numpy as np

from .errors import QuadratureBudgetExceeded

_gl_cache = {}


def _gl_nodes(order):
    if order not in _gl_cache:
        x, w = np.polynomial.legendre.leggauss(order)
        _gl_cache[order] = (x, w)
    return _gl_cache[order]


def _tensor_rule(d, order):
    key = (d, order)
    if key not in _gl_cache:
        x, w = _gl_nodes(order)
        pts = np.array(list(itertools.product(x, repeat=d)))
        wts = np.array([np.prod(c) for c in itertools.product(w, repeat=d)])
        _gl_cache[key] = (pts, wts)
    return _gl_cache[key]


def _panel_points(lo, hi, pts):
    mid = 0.5 * (lo + hi)
    half = 0.5 * (hi - lo)
    return mid + pts * half, np.prod(half)


def _children(lo, hi):
    d = len(lo)
    mid = 0.5 * (lo + hi)
    for corner in itertools.product((0, 1), repeat=d):
        clo = np.where(corner, mid, lo)
        chi = np.where(corner, hi, mid)
        yield clo, chi


def adaptive_cubature(f, lo, hi, tol=1e-8, max_panels=20_000, order=7, initial=1):
    """Integrate a vectorized f: (N, d) -> complex over the box [lo, hi].

    Returns (value, error_estimate, n_evals).  `initial` pre-splits each
    axis so oscillatory integrands are resolved before the error estimate
    is trusted.  Raises QuadratureBudgetExceeded when the panel budget
    runs out before the error estimate drops under tol.
    """
    lo = np.atleast_1d(np.asarray(lo, dtype=float))
    hi = np.atleast_1d(np.asarray(hi, dtype=float))
    d = lo.shape[0]
    pts, wts = _tensor_rule(d, order)
    n_evals = 0

    def eval_panel(plo, phi):
        """(refined value, error estimate) from a coarse-vs-children split."""
        nonlocal n_evals
        boxes = [(plo, phi)] + list(_children(plo, phi))
        allpts, jacs = [], []
        for blo, bhi in boxes:
            p, j = _panel_points(blo, bhi, pts)
            allpts.append(p)
            jacs.append(j)
        vals = f(np.vstack(allpts))
        n_evals += len(vals)
        per_box = vals.reshape(len(boxes), -1) @ wts
        coarse = per_box[0] * jacs[0]
        fine = np.sum(per_box[1:] * jacs[1:])
        return fine, abs(fine - coarse)

    heap = []
    counter = itertools.count()
    total_val, total_err = 0.0 + 0.0j, 0.0
    edges = [np.linspace(lo[k], hi[k], initial + 1) for k in range(d)]
    panels = 0
    for cell in itertools.product(range(initial), repeat=d):
        plo = np.array([edges[k][cell[k]] for k in range(d)])
        phi = np.array([edges[k][cell[k] + 1] for k in range(d)])
        v, e = eval_panel(plo, phi)
        heapq.heappush(heap, (-e, next(counter), plo, phi, v, e))
        total_val += v
        total_err += e
        panels += 1
    while total_err > tol:
        if panels >= max_panels:
            raise QuadratureBudgetExceeded(
                f"error estimate {total_err:.3e} > {tol:.3e} after {panels} panels"
            )
        neg_e, _, plo, phi, pval, perr = heapq.heappop(heap)
        if perr <= 0 or -neg_e <= 1e-18 * abs(total_val):
            heapq.heappush(heap, (neg_e, next(counter), plo, phi, pval, perr))
            break  # refinement stalled at roundoff level
        total_val -= pval
        total_err -= perr
        for clo, chi in _children(plo, phi):
            v, e = eval_panel(clo, chi)
            heapq.heappush(heap, (-e, next(counter), clo, chi, v, e))
            total_val += v
            total_err += e
            panels += 1
    # deterministic re-summation in fixed panel order
    entries = sorted(heap, key=lambda t: t[1])
    total_val = np.sum([t[4] for t in entries])
    total_err = float(np.sum([t[5] for t in entries]))
    return total_val, total_err, n_evals
