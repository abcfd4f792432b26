"""Statistical verification harness: KS tests against reference laws,
CLT and marginal experiments, moment summaries, and the random-instance
generator whose dual optimum is known in closed form.
"""

import math
from dataclasses import dataclass, field

import numpy as np
from scipy import stats as sps

from .barycenter import solve_barycenter
from .constraints import ConstraintSystem, positivize
from .errors import RankDeficient, SigmaZero, SupportViolation, TooFewSamples
from .samplers import dirichlet_exact, hit_and_run
from .standardize import standardize, weight_spec


@dataclass
class KsResult:
    statistic: float
    p_value: float
    sample_size: int


_REFERENCE_CDFS = {
    "std_normal": sps.norm.cdf,
    "exp1": lambda x: sps.expon.cdf(x),
    "uniform01": lambda x: np.clip(x, 0.0, 1.0),
}


def _resolve_cdf(cdf):
    if callable(cdf):
        return cdf
    if cdf in _REFERENCE_CDFS:
        return _REFERENCE_CDFS[cdf]
    if cdf.startswith("beta(1,") and cdf.endswith(")"):
        k = float(cdf[len("beta(1,"):-1])
        return lambda x, k=k: sps.beta.cdf(x, 1.0, k)
    raise ValueError(f"unknown reference distribution {cdf!r}")


def ks_test(samples, cdf):
    """Exact one-sample KS statistic with the asymptotic Kolmogorov p-value."""
    x = np.sort(np.asarray(samples, dtype=float).ravel())
    n = x.shape[0]
    if n < 3:
        raise TooFewSamples(f"need >= 3 samples, got {n}")
    F = _resolve_cdf(cdf)(x)
    grid = np.arange(1, n + 1) / n
    d = float(max(np.max(grid - F), np.max(F - (grid - 1 / n))))
    lam = math.sqrt(n) * d
    # Kolmogorov survival series, 20 terms
    ks = np.arange(1, 21)
    p = 2.0 * np.sum((-1.0) ** (ks - 1) * np.exp(-2.0 * ks ** 2 * lam ** 2))
    return KsResult(d, float(min(max(p, 0.0), 1.0)), n)


@dataclass
class SamplerConfig:
    kind: str = "hit_and_run"  # or "dirichlet_exact"
    count: int = 10_000
    seed: int = 0
    burn_in: int | None = None
    thin: int | None = None
    chains: int | None = None
    jobs: int = 1


def _is_symmetric_simplex(cs):
    return cs.m == 1 and np.ptp(cs.A[0]) < 1e-14 * abs(cs.A[0, 0])


def draw_uniform_points(cs, bc, cfg):
    """Dispatch to the exact Dirichlet sampler or hit-and-run."""
    if cfg.kind == "dirichlet_exact":
        if not _is_symmetric_simplex(cs):
            raise ValueError("dirichlet_exact needs one constraint with equal entries")
        return dirichlet_exact(cs.n, float(cs.A[0, 0]), float(cs.b[0]),
                               count=cfg.count, seed=cfg.seed)
    return hit_and_run(cs, x0=bc.center, count=cfg.count, seed=cfg.seed,
                       burn_in=cfg.burn_in, thin=cfg.thin,
                       chains=cfg.chains, jobs=cfg.jobs)


@dataclass
class CltReport:
    ks: KsResult
    sigma: float
    mean_shift: float  # empirical mean of S*/sigma; should be o(1)
    values: np.ndarray = field(repr=False, default=None)

    def to_dict(self):
        return {
            "ks_statistic": self.ks.statistic,
            "ks_p_value": self.ks.p_value,
            "sample_size": self.ks.sample_size,
            "sigma": self.sigma,
            "mean_shift": self.mean_shift,
        }


def clt_experiment(cs, lam, sampler_cfg=None, points=None):
    """Draw uniform points of K and test S*/sigma against a standard normal.

    S* centers the linear statistic at the entropy barycenter 1/w.  A
    precomputed point array may be passed to bypass the sampler.
    """
    cfg = sampler_cfg or SamplerConfig()
    lam = np.asarray(lam, dtype=float)
    pcs = positivize(cs)
    bc = solve_barycenter(pcs)
    ss = standardize(pcs, bc)
    wspec = weight_spec(ss, bc, lam)
    if wspec.sigma <= 1e-12:
        raise SigmaZero("projected weight vector has zero norm")
    pts = points if points is not None else draw_uniform_points(pcs, bc, cfg).points
    s_star = (pts - bc.center) @ lam / wspec.sigma
    ks = ks_test(s_star, "std_normal")
    return CltReport(ks, wspec.sigma, float(s_star.mean()), s_star)


@dataclass
class MarginalReport:
    per_coordinate: dict  # coord -> KsResult for w_j X_j vs Exp(1)
    correlations: dict    # (i, j) -> empirical corr of (w_i X_i, w_j X_j)

    def to_dict(self):
        return {
            "per_coordinate": {
                str(j): {"statistic": r.statistic, "p_value": r.p_value}
                for j, r in self.per_coordinate.items()
            },
            "correlations": {f"{i},{j}": c for (i, j), c in self.correlations.items()},
        }


def marginal_experiment(cs, bc, coords, sampler_cfg=None, points=None):
    """Per-coordinate KS of w_j X_j against Exp(1) plus pairwise correlations."""
    if not coords:
        raise ValueError("coords must be nonempty")
    cfg = sampler_cfg or SamplerConfig()
    pts = points if points is not None else draw_uniform_points(cs, bc, cfg).points
    rescaled = pts[:, coords] * bc.w[coords]
    per = {j: ks_test(rescaled[:, i], "exp1") for i, j in enumerate(coords)}
    corr = {}
    for a in range(len(coords)):
        for b_ in range(a + 1, len(coords)):
            c = np.corrcoef(rescaled[:, a], rescaled[:, b_])[0, 1]
            corr[(coords[a], coords[b_])] = float(c)
    return MarginalReport(per, corr)


@dataclass
class BoxLaw:
    """Uniform column law on the box [lo, hi]^m, lo > 0."""
    lo: float
    hi: float

    def check(self, m, v):
        if not 0 < self.lo < self.hi:
            raise SupportViolation("box law needs 0 < lo < hi")
        # demand positivity of <v, u> at every box corner
        corners = self.lo + (self.hi - self.lo) * (
            np.arange(2 ** m)[:, None] >> np.arange(m) & 1
        )
        if np.min(corners @ np.asarray(v, dtype=float)) <= 0:
            raise SupportViolation("<v, u> is not positive on the box support")

    def sample(self, rng, m, n):
        return rng.uniform(self.lo, self.hi, size=(m, n))


@dataclass
class TableLaw:
    """Finite-support column law: points (m x k) with probabilities."""
    points: np.ndarray
    probs: np.ndarray | None = None

    def check(self, m, v):
        P = np.atleast_2d(np.asarray(self.points, dtype=float))
        if P.shape[0] != m:
            raise SupportViolation(f"support points must live in R^{m}")
        if np.linalg.matrix_rank(P) < m:
            raise RankDeficient("support does not span R^m")
        if np.min(np.asarray(v, dtype=float) @ P) <= 0:
            raise SupportViolation("<v, u> is not positive on the support")
        if np.any(np.all(np.abs(P) < 1e-15, axis=0)):
            raise SupportViolation("support contains the origin")

    def sample(self, rng, m, n):
        P = np.atleast_2d(np.asarray(self.points, dtype=float))
        idx = rng.choice(P.shape[1], size=n, p=self.probs)
        return P[:, idx]


@dataclass
class InstanceRecipe:
    m: int
    n: int
    column_law: object  # BoxLaw | TableLaw
    v: np.ndarray
    seed: int = 0


def random_instance(recipe):
    """I.i.d.-column instance with b set to the empirical gradient of the
    log-moment functional, so L0 = n v is the exact dual optimum.

    Returns (cs, exact_lambda0).
    """
    v = np.asarray(recipe.v, dtype=float)
    recipe.column_law.check(recipe.m, v)
    rng = np.random.default_rng(np.random.SeedSequence(recipe.seed))
    A = recipe.column_law.sample(rng, recipe.m, recipe.n)
    dots = v @ A
    if np.min(dots) <= 0:
        raise SupportViolation("drew a column with <v, u> <= 0")
    b = (A / dots).mean(axis=1)
    return ConstraintSystem(A, b), recipe.n * v


@dataclass
class MomentReport:
    mean: float
    variance: float
    skewness: float
    excess_kurtosis: float
    stderr: dict

    def to_dict(self):
        return {
            "mean": self.mean,
            "variance": self.variance,
            "skewness": self.skewness,
            "excess_kurtosis": self.excess_kurtosis,
            "stderr": self.stderr,
        }


def moment_report(values):
    """First four empirical cumulant-style summaries with rough standard errors."""
    x = np.asarray(values, dtype=float).ravel()
    n = x.shape[0]
    if n == 0:
        raise TooFewSamples("empty sample")
    mu = float(x.mean())
    var = float(x.var(ddof=1)) if n > 1 else 0.0
    sd = math.sqrt(var) if var > 0 else 1.0
    z = (x - mu) / sd
    skew = float(np.mean(z ** 3))
    kurt = float(np.mean(z ** 4) - 3.0)
    stderr = {
        "mean": sd / math.sqrt(n),
        "variance": var * math.sqrt(2.0 / max(n - 1, 1)),
        "skewness": math.sqrt(6.0 / n),
        "excess_kurtosis": math.sqrt(24.0 / n),
    }
    return MomentReport(mu, var, skew, kurt, stderr)
