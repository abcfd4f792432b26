"""Point generators: uniform points of K and the product exponential law.

Hit-and-run walks along uniform chords inside the affine slice
{Ax = b}; the symmetric simplex admits an exact Dirichlet sampler used
as its correctness oracle.
"""

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np
from numba import njit
from scipy.linalg import null_space

from .errors import RankDeficient, StartNotInterior

DRIFT_GUARD_EVERY = 1000  # steps between re-projections onto {Ax = b}
_CHORD_EPS = 1e-14


@dataclass
class SampleChain:
    points: np.ndarray  # (count, n)
    seed: int
    burn_in: int
    thin: int
    sampler_kind: str  # "hit_and_run" | "dirichlet_exact" | "exp_product"

    def __len__(self):
        return self.points.shape[0]


def kernel_basis(A, tol=None):
    """Orthonormal columns spanning ker A (an (n-m)-frame)."""
    A = np.atleast_2d(np.asarray(A, dtype=float))
    m, n = A.shape
    if np.linalg.matrix_rank(A) < m:
        raise RankDeficient("A must have full row rank")
    B = null_space(A, rcond=tol)
    if B.shape[1] != n - m:
        raise RankDeficient(f"kernel dimension {B.shape[1]}, expected {n - m}")
    return B


def chord_bounds(x, d):
    """Feasible t-interval of {x + t d >= 0} along direction d."""
    lo, hi = -np.inf, np.inf
    pos, neg = d > _CHORD_EPS, d < -_CHORD_EPS
    if pos.any():
        lo = np.max(-x[pos] / d[pos])
    if neg.any():
        hi = np.min(-x[neg] / d[neg])
    return lo, hi


@njit(nogil=True, cache=True)
def _walk(A, P, proj, b, x, burn_in, count, thin, guard_every, out, rng):
    """Compiled single-chain walk.  P = (A A')^{-1} A maps a Gaussian draw
    to its row-space component; proj = A' (A A')^{-1} re-centers drift."""
    m, n = A.shape
    emitted = 0
    total = burn_in + count * thin
    for s in range(1, total + 1):
        g = rng.standard_normal(n)
        coef = P @ g
        for j in range(n):
            for l in range(m):
                g[j] -= A[l, j] * coef[l]
        # chord {x + t g >= 0}; the direction norm cancels out
        lo, hi = -np.inf, np.inf
        for j in range(n):
            if g[j] > _CHORD_EPS:
                r = -x[j] / g[j]
                if r > lo:
                    lo = r
            elif g[j] < -_CHORD_EPS:
                r = -x[j] / g[j]
                if r < hi:
                    hi = r
        if hi - lo > _CHORD_EPS and np.isfinite(hi - lo):
            t = lo + rng.random() * (hi - lo)
            for j in range(n):
                x[j] += t * g[j]
        if s % guard_every == 0:
            resid = A @ x - b
            corr = proj @ resid
            for j in range(n):
                x[j] -= corr[j]
                if x[j] < 0.0:
                    x[j] = 0.0
        if s > burn_in and (s - burn_in) % thin == 0:
            for j in range(n):
                out[emitted, j] = x[j]
            emitted += 1


def hit_and_run(cs, x0=None, count=1000, seed=0, burn_in=None, thin=None,
                chains=None, jobs=1):
    """Uniform sampling of K by hit-and-run inside the affine slice.

    Each step draws a direction uniformly on the unit sphere of ker A
    (Gaussian projected onto the kernel) and moves to a uniform point of
    the chord {x + t d >= 0}.  Work splits over independent chains with
    generators spawned from the seed; outputs interleave in chain order,
    so the result depends only on the arguments, never on `jobs`.
    Defaults: burn-in 10(n-m), thinning n-m, chains min(count, 16).
    """
    n, m = cs.n, cs.m
    dim = n - m
    if burn_in is None:
        burn_in = 10 * dim
    if thin is None:
        thin = dim
    thin = max(1, thin)
    if chains is None:
        chains = min(count, 16)
    chains = max(1, min(chains, count))
    x0 = np.asarray(x0, dtype=float)
    if np.any(x0 <= 0) or cs.residual(x0) > 1e-8 * (1 + np.abs(cs.b).max()):
        raise StartNotInterior("x0 must be strictly interior with Ax0 = b")

    A = np.ascontiguousarray(cs.A)
    AAinv = np.linalg.inv(A @ A.T)
    P = np.ascontiguousarray(AAinv @ A)
    proj = np.ascontiguousarray(A.T @ AAinv)
    per = -(-count // chains)  # samples per chain, rounded up
    seeds = np.random.SeedSequence(seed).spawn(chains)
    outs = [np.empty((per, n)) for _ in range(chains)]

    def run(c):
        _walk(A, P, proj, cs.b, x0.copy(), burn_in, per, thin,
              DRIFT_GUARD_EVERY, outs[c], np.random.default_rng(seeds[c]))

    if jobs > 1 and chains > 1:
        with ThreadPoolExecutor(max_workers=jobs) as ex:
            list(ex.map(run, range(chains)))
    else:
        for c in range(chains):
            run(c)
    pts = np.stack(outs, axis=1).reshape(per * chains, n)[:count]
    return SampleChain(pts, seed, burn_in, thin, "hit_and_run")


def dirichlet_exact(n, c, b, count=1000, seed=0):
    """Exact uniform sampler for the symmetric simplex {x >= 0 : c sum x = b}."""
    if c <= 0 or b <= 0:
        raise ValueError("c and b must be positive")
    rng = np.random.default_rng(np.random.SeedSequence(seed))
    e = rng.exponential(size=(count, n))
    pts = (b / c) * e / e.sum(axis=1, keepdims=True)
    return SampleChain(pts, seed, 0, 1, "dirichlet_exact")


def exp_product(w, count=1000, seed=0):
    """Independent exponentials, coordinate j with rate w_j."""
    w = np.asarray(w, dtype=float)
    if np.any(w <= 0):
        raise ValueError("rates must be positive")
    rng = np.random.default_rng(np.random.SeedSequence(seed))
    pts = rng.exponential(size=(count, w.shape[0])) / w
    return SampleChain(pts, seed, 0, 1, "exp_product")
