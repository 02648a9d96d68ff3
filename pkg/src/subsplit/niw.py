"""Conjugate Normal-Inverse-Wishart computations for Gaussian clusters.

The NIW prior over a Gaussian's (mean, covariance) admits closed-form
posterior updates and a closed-form marginal data likelihood, which is what
makes split/merge acceptance ratios cheap to evaluate.  Everything here is
expressed through one-pass sufficient statistics (count, sum, sum of outer
products) so that cluster bookkeeping stays O(D^2) per update.

All likelihood math is carried out in log space; determinants come from
Cholesky factors and the multivariate Gamma function from summed log-Gamma
terms, so values stay finite for clusters of any size.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.linalg import cho_solve, solve_triangular
from scipy.special import multigammaln

from .errors import InvalidData, InvalidParams, NumericalFailure

_LOG_2PI = np.log(2.0 * np.pi)

# Relative symmetry slack accepted on user-supplied scale matrices.
_SYMMETRY_RTOL = 1e-10


def _check_symmetric(mat: np.ndarray, name: str) -> None:
    scale = max(float(np.max(np.abs(mat))), 1.0)
    if np.max(np.abs(mat - mat.T)) > _SYMMETRY_RTOL * scale:
        raise InvalidParams(f"{name} must be symmetric")


def _cholesky(mat: np.ndarray, *, jitter: bool = False) -> np.ndarray:
    """Lower Cholesky factor, optionally retrying once with a trace-scaled jitter."""
    try:
        return np.linalg.cholesky(mat)
    except np.linalg.LinAlgError:
        if jitter:
            d = mat.shape[0]
            bump = 1e-10 * np.trace(mat) / d
            try:
                return np.linalg.cholesky(mat + bump * np.eye(d))
            except np.linalg.LinAlgError:
                pass
        raise NumericalFailure("matrix is not positive definite") from None


@dataclass(frozen=True)
class NiwParams:
    """Hyperparameters (mu0, kappa, psi, nu) of a Normal-Inverse-Wishart prior.

    mu0    location of the mean
    kappa  mean-precision scale, > 0
    psi    D x D symmetric positive-definite scale matrix
    nu     degrees of freedom, > D - 1
    """

    mu0: np.ndarray
    kappa: float
    psi: np.ndarray
    nu: float

    def __post_init__(self):
        mu0 = np.asarray(self.mu0, dtype=float).reshape(-1)
        psi = np.asarray(self.psi, dtype=float)
        object.__setattr__(self, "mu0", mu0)
        object.__setattr__(self, "psi", psi)
        d = mu0.shape[0]
        if psi.shape != (d, d):
            raise InvalidParams(f"psi must be {d}x{d}, got {psi.shape}")
        if not self.kappa > 0:
            raise InvalidParams("kappa must be positive")
        if not self.nu > d - 1:
            raise InvalidParams(f"nu must exceed D-1 = {d - 1}")
        _check_symmetric(psi, "psi")
        _cholesky(psi)  # must admit a factorization

    @property
    def dim(self) -> int:
        return self.mu0.shape[0]


@dataclass(frozen=True)
class SuffStats:
    """Sufficient statistics of a point set: count, sum, and sum of outer products.

    Additive over disjoint sets, which is the property every cluster update
    in the sampler relies on.
    """

    m: int
    sum_x: np.ndarray
    sum_xxT: np.ndarray

    def __add__(self, other: "SuffStats") -> "SuffStats":
        return SuffStats(self.m + other.m, self.sum_x + other.sum_x,
                         self.sum_xxT + other.sum_xxT)

    @property
    def dim(self) -> int:
        return self.sum_x.shape[0]

    @property
    def mean(self) -> np.ndarray:
        if self.m == 0:
            raise InvalidData("mean of empty statistics is undefined")
        return self.sum_x / self.m

    def scatter(self) -> np.ndarray:
        """Centered scatter matrix S = sum_xxT - m * xbar xbar^T, symmetrized."""
        if self.m == 0:
            return np.zeros_like(self.sum_xxT)
        xbar = self.sum_x / self.m
        s = self.sum_xxT - self.m * np.outer(xbar, xbar)
        return 0.5 * (s + s.T)

    @classmethod
    def empty(cls, dim: int) -> "SuffStats":
        return cls(0, np.zeros(dim), np.zeros((dim, dim)))


@dataclass
class GaussianParams:
    """A Gaussian component: mean vector and SPD covariance.

    The lower Cholesky factor of the covariance is computed on construction
    (it is needed by every density evaluation and is also the PD check).
    """

    mu: np.ndarray
    sigma: np.ndarray
    chol: np.ndarray = field(default=None, repr=False)

    def __post_init__(self):
        self.mu = np.asarray(self.mu, dtype=float).reshape(-1)
        self.sigma = np.asarray(self.sigma, dtype=float)
        if self.chol is None:
            self.chol = _cholesky(self.sigma)

    @property
    def dim(self) -> int:
        return self.mu.shape[0]

    @property
    def log_det(self) -> float:
        return 2.0 * float(np.sum(np.log(np.diag(self.chol))))


def suffstats_from_points(points: np.ndarray) -> SuffStats:
    """Accumulate SuffStats over the rows of an N x D matrix (N may be 0)."""
    pts = np.asarray(points, dtype=float)
    if pts.ndim != 2:
        raise InvalidData(f"expected an N x D matrix, got shape {pts.shape}")
    if not np.all(np.isfinite(pts)):
        raise InvalidData("points contain non-finite values")
    n, d = pts.shape
    if n == 0:
        return SuffStats.empty(d)
    return SuffStats(n, pts.sum(axis=0), pts.T @ pts)


def niw_posterior(prior: NiwParams, stats: SuffStats) -> NiwParams:
    """Closed-form NIW posterior given observed sufficient statistics.

    mu_m  = (kappa mu0 + m xbar) / (kappa + m)
    kappa_m = kappa + m,  nu_m = nu + m
    psi_m = psi + S + kappa m / (kappa + m) (xbar - mu0)(xbar - mu0)^T
    """
    m = stats.m
    if m == 0:
        return prior
    xbar = stats.sum_x / m
    kappa_m = prior.kappa + m
    mu_m = (prior.kappa * prior.mu0 + m * xbar) / kappa_m
    diff = xbar - prior.mu0
    psi_m = prior.psi + stats.scatter() + (prior.kappa * m / kappa_m) * np.outer(diff, diff)
    psi_m = 0.5 * (psi_m + psi_m.T)
    return NiwParams(mu_m, kappa_m, psi_m, prior.nu + m)


def _log_det_chol(mat: np.ndarray) -> float:
    return 2.0 * float(np.sum(np.log(np.diag(_cholesky(mat, jitter=True)))))


def log_marginal_likelihood(prior: NiwParams, stats: SuffStats) -> float:
    """Log marginal likelihood of a point set with the Gaussian integrated out.

    log f(x) = -(mD/2) log pi + log Gamma_D(nu_m/2) - log Gamma_D(nu/2)
               + (nu/2) log|psi| - (nu_m/2) log|psi_m|
               + (D/2)(log kappa - log kappa_m)

    Verified against direct numerical integration of the likelihood times the
    NIW density (see tests).  Empty statistics give exactly 0 (empty product).
    """
    m = stats.m
    if m == 0:
        return 0.0
    d = prior.dim
    if stats.dim != d:
        raise InvalidData(f"stats dimension {stats.dim} != prior dimension {d}")
    post = niw_posterior(prior, stats)
    log_det_prior = _log_det_chol(prior.psi)
    log_det_post = _log_det_chol(post.psi)
    return (
        -0.5 * m * d * np.log(np.pi)
        + multigammaln(0.5 * post.nu, d)
        - multigammaln(0.5 * prior.nu, d)
        + 0.5 * prior.nu * log_det_prior
        - 0.5 * post.nu * log_det_post
        + 0.5 * d * (np.log(prior.kappa) - np.log(post.kappa))
    )


def _bartlett_lower(rng: np.random.Generator, d: int, nu: float) -> np.ndarray:
    """Lower-triangular Bartlett factor A with A A^T ~ Wishart(I, nu)."""
    a = np.zeros((d, d))
    a[np.diag_indices(d)] = np.sqrt(rng.chisquare(nu - np.arange(d)))
    if d > 1:
        a[np.tril_indices(d, -1)] = rng.standard_normal(d * (d - 1) // 2)
    return a


def sample_niw(params: NiwParams, rng: np.random.Generator) -> GaussianParams:
    """Draw (mu, sigma) ~ NIW(params).

    sigma is drawn as the inverse of a Wishart(psi^-1, nu) variate built from
    its Bartlett decomposition; mu ~ N(mu0, sigma / kappa).  Deterministic
    given the generator state.
    """
    d = params.dim
    if not params.nu > d - 1:
        raise InvalidParams("nu must exceed D-1")
    c = _cholesky(params.psi)
    psi_inv = cho_solve((c, True), np.eye(d))
    psi_inv = 0.5 * (psi_inv + psi_inv.T)
    l_inv = _cholesky(psi_inv)
    # M M^T ~ Wishart(psi^-1, nu) with M lower triangular, so sigma = (M M^T)^-1.
    m_fac = l_inv @ _bartlett_lower(rng, d, params.nu)
    sigma = cho_solve((m_fac, True), np.eye(d))
    sigma = 0.5 * (sigma + sigma.T)
    chol_sigma = _cholesky(sigma, jitter=True)
    mu = params.mu0 + chol_sigma @ rng.standard_normal(d) / np.sqrt(params.kappa)
    return GaussianParams(mu, sigma, chol=chol_sigma)


def log_gaussian_pdf(x: np.ndarray, params: GaussianParams) -> float:
    """Exact Gaussian log density at a single point, via Cholesky solve."""
    x = np.asarray(x, dtype=float).reshape(-1)
    if x.shape[0] != params.dim:
        raise InvalidData(f"point dimension {x.shape[0]} != {params.dim}")
    y = solve_triangular(params.chol, x - params.mu, lower=True)
    return -0.5 * (params.dim * _LOG_2PI + params.log_det + float(y @ y))


def log_gaussian_pdf_rows(points: np.ndarray, params: GaussianParams) -> np.ndarray:
    """Gaussian log density of every row of an N x D matrix (vectorized)."""
    pts = np.asarray(points, dtype=float)
    if pts.shape[1] != params.dim:
        raise InvalidData(f"point dimension {pts.shape[1]} != {params.dim}")
    y = solve_triangular(params.chol, (pts - params.mu).T, lower=True)
    quad = np.einsum("ij,ij->j", y, y)
    return -0.5 * (params.dim * _LOG_2PI + params.log_det + quad)


def data_driven_prior(points: np.ndarray, kappa: float = 1.0,
                      nu: float | None = None, psi_scale: float = 1.0) -> NiwParams:
    """Weak default prior centered on the data.

    mu0 is the data mean; nu defaults to D+3; psi = cov * (nu - D - 1) *
    psi_scale, so the prior mean of the covariance is the (scaled) data
    covariance.  A tiny ridge keeps psi positive definite when the data is
    degenerate (collinear or constant columns).
    """
    pts = np.asarray(points, dtype=np.float64)
    if pts.ndim != 2 or pts.shape[0] < 2:
        raise InvalidData("need an N x D matrix with N >= 2")
    if not np.all(np.isfinite(pts)):
        raise InvalidData("points contain non-finite values")
    d = pts.shape[1]
    if nu is None:
        nu = d + 3.0
    if not nu > d + 1:
        raise InvalidParams(f"nu must exceed D+1 = {d + 1} so the prior "
                            "covariance mean exists")
    if psi_scale <= 0:
        raise InvalidParams("psi_scale must be positive")
    centered = pts - pts.mean(axis=0)
    cov = centered.T @ centered / (pts.shape[0] - 1)
    psi = cov * ((nu - d - 1.0) * psi_scale)
    psi = 0.5 * (psi + psi.T)
    try:
        return NiwParams(pts.mean(axis=0), kappa, psi, nu)
    except NumericalFailure:
        ridge = max(np.trace(psi) / d, 1.0) * 1e-9
        return NiwParams(pts.mean(axis=0), kappa, psi + ridge * np.eye(d), nu)
