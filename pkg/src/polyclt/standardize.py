"""Standardized constraint system and degeneration diagnostics.

The column scaling At_ij = A_ij / w_j moves the entropy center to the
all-ones vector; Ah = (At At')^{-1/2} At then makes the constraint rows
orthonormal, which is the representation in which asymptotic
degeneration (a handful of dominant variables) becomes visible.
"""

from dataclasses import dataclass, field

import numpy as np

from .errors import GramSingular, PartitionNotFound
from .samplers import kernel_basis


@dataclass
class StandardizedSystem:
    a_tilde: np.ndarray  # m x n, columns divided by w
    a_hat: np.ndarray    # m x n, orthonormal rows (symmetric inverse square root)
    b_hat: np.ndarray
    gram: np.ndarray     # a_tilde @ a_tilde'
    max_entry: float     # max |a_hat| entry

    @property
    def m(self):
        return self.a_hat.shape[0]

    @property
    def n(self):
        return self.a_hat.shape[1]


@dataclass
class WeightSpec:
    lam: np.ndarray         # raw weights
    lambda_hat: np.ndarray  # lam / w
    sigma: float            # CLT standard deviation
    max_lambda_hat: float


@dataclass
class PropertyAPartition:
    K: int
    subsets: list                 # K disjoint sorted index lists
    det_lower_bounds: np.ndarray  # certified Gershgorin-based bounds
    epsilon_achieved: float       # largest off-diagonal Gram entry


def standardize(cs, bc, residual_tol=1e-8):
    """Build (At, Ah, bh) from a solved barycenter."""
    if bc.centering_residual > residual_tol:
        raise ValueError(
            f"barycenter residual {bc.centering_residual:.2e} exceeds {residual_tol:.0e}"
        )
    a_tilde = cs.A / bc.w
    gram = a_tilde @ a_tilde.T
    evals, evecs = np.linalg.eigh(gram)
    if evals[0] <= 1e-14 * evals[-1]:
        raise GramSingular(f"gram eigenvalue ratio {evals[0] / evals[-1]:.2e}")
    inv_sqrt = (evecs / np.sqrt(evals)) @ evecs.T
    a_hat = inv_sqrt @ a_tilde
    b_hat = inv_sqrt @ cs.b
    return StandardizedSystem(a_tilde, a_hat, b_hat, gram, float(np.abs(a_hat).max()))


def sigma_formula(ss, lambda_hat):
    """sqrt(|lh|^2 - |Ah lh|^2), clamped at 0 against roundoff."""
    s2 = float(lambda_hat @ lambda_hat - np.sum((ss.a_hat @ lambda_hat) ** 2))
    return np.sqrt(max(s2, 0.0))


def sigma_kernel(ss, lambda_hat):
    """Norm of the projection of lh onto ker Ah, via an orthonormal kernel frame."""
    B = kernel_basis(ss.a_hat)
    return float(np.linalg.norm(B.T @ lambda_hat))


def weight_spec(ss, bc, lam, check_tol=1e-10):
    lam = np.asarray(lam, dtype=float)
    lambda_hat = lam / bc.w
    s = sigma_formula(ss, lambda_hat)
    s_proj = sigma_kernel(ss, lambda_hat)
    # compare variances: near sigma = 0 the roots only agree to sqrt(roundoff)
    if abs(s * s - s_proj * s_proj) > check_tol * (1 + lambda_hat @ lambda_hat):
        raise GramSingular(
            f"sigma disagreement: formula {s:.15g} vs kernel projection {s_proj:.15g}"
        )
    return WeightSpec(lam, lambda_hat, s, float(np.abs(lambda_hat).max()))


@dataclass
class AssumptionReport:
    a_hat_max: float
    column_scores: np.ndarray  # per-column norms of Ah
    flagged_columns: list      # scores above threshold: potential degeneration
    threshold: float
    lambda_hat_max: float = float("nan")
    lambda_hat_norm: float = float("nan")
    sigma: float = float("nan")

    def to_dict(self):
        return {
            "a_hat_max": self.a_hat_max,
            "column_scores": self.column_scores.tolist(),
            "flagged_columns": self.flagged_columns,
            "threshold": self.threshold,
            "lambda_hat_max": self.lambda_hat_max,
            "lambda_hat_norm": self.lambda_hat_norm,
            "sigma": self.sigma,
        }


def assumption_report(ss, wspec=None, threshold=0.2):
    scores = np.linalg.norm(ss.a_hat, axis=0)
    flagged = np.flatnonzero(scores > threshold).tolist()
    rep = AssumptionReport(ss.max_entry, scores, flagged, threshold)
    if wspec is not None:
        rep.lambda_hat_max = wspec.max_lambda_hat
        rep.lambda_hat_norm = float(np.linalg.norm(wspec.lambda_hat))
        rep.sigma = wspec.sigma
    return rep


def _gershgorin_bound(G):
    """Lower eigenvalue bound max(0, min_i (G_ii - sum_k |G_ik|))."""
    off = np.abs(G).sum(axis=1) - np.abs(np.diag(G))
    return max(0.0, float(np.min(np.diag(G) - off)))


def _greedy_partition(a_hat, K, rng):
    """One greedy pass: steer each subset's outer-product sum toward t*I."""
    m, n = a_hat.shape
    t = 1.0 / (K + 1)
    target = (t * np.eye(m)).ravel()
    tnorm = np.linalg.norm(target)
    that = target / tnorm
    vecs = np.einsum("ij,kj->jik", a_hat, a_hat).reshape(n, m * m)
    unused = list(range(n))
    subsets = []
    for _ in range(K):
        S = np.zeros(m * m)
        chosen = []
        while np.min(S.reshape(m, m).diagonal()) < t:
            if not unused:
                return None
            cand = np.asarray(unused)
            V = S + vecs[cand]
            s_along = np.clip(V @ that, 0.0, tnorm)
            dists = np.linalg.norm(V - s_along[:, None] * that, axis=1)
            best = dists.min()
            near = np.flatnonzero(dists <= best * 1.05 + 1e-15)
            pick = near[0] if rng is None else rng.choice(near)
            j = int(cand[pick])
            unused.remove(j)
            chosen.append(j)
            S = S + vecs[j]
        subsets.append(chosen)
    # leftovers only improve diagonals; hand each to the weakest subset
    grams = [sum(vecs[j] for j in s).reshape(m, m) for s in subsets]
    bounds = [_gershgorin_bound(G) for G in grams]
    order = unused if rng is None else list(rng.permutation(unused))
    for j in order:
        gains = [
            _gershgorin_bound(grams[l] + vecs[j].reshape(m, m)) for l in range(K)
        ]
        # best gain first, weakest subset on ties, so equal gains balance sizes
        l = max(range(K), key=lambda i: (gains[i] - bounds[i], -bounds[i]))
        if gains[l] >= bounds[l]:
            subsets[l].append(j)
            grams[l] = grams[l] + vecs[j].reshape(m, m)
            bounds[l] = gains[l]
    return [sorted(s) for s in subsets], grams, bounds


def property_a_partition(ss, K, epsilon=0.05, restarts=32, seed=0):
    """Disjoint column subsets with certified det(Ah_I Ah_I') lower bounds.

    Greedy rearrangement in the spirit of the Levy-Steinitz lemma: columns
    are outer products vec(Ah_j Ah_j') summing to vec(I); each subset grows
    toward the ray of t*I with t = 1/(K+1).  The Gershgorin bound certifies
    the result, so a heuristic miss is safe; randomized restarts follow the
    deterministic first pass.
    """
    if K < 1:
        raise ValueError("K must be >= 1")
    m, n = ss.a_hat.shape
    if n < K * m:
        raise PartitionNotFound(f"n={n} cannot host {K} subsets of rank {m}")
    best = None
    for attempt in range(restarts + 1):
        rng = None if attempt == 0 else np.random.default_rng(
            np.random.SeedSequence(seed, spawn_key=(attempt,))
        )
        got = _greedy_partition(ss.a_hat, K, rng)
        if got is None:
            continue
        subsets, grams, bounds = got
        gmin = min(bounds)
        eps_ach = max(
            (np.abs(G - np.diag(np.diag(G))).max() for G in grams), default=0.0
        )
        if gmin > 0 and (best is None or gmin > best[0]):
            best = (gmin, subsets, grams, bounds, eps_ach)
        if best is not None and best[0] > 0 and best[4] <= epsilon:
            break
    if best is None or best[0] <= 0:
        raise PartitionNotFound(
            f"no certified partition after {restarts + 1} attempts (K={K})"
        )
    _, subsets, grams, bounds, eps_ach = best
    det_bounds = np.asarray([b ** m for b in bounds])
    return PropertyAPartition(K, subsets, det_bounds, float(eps_ach))
