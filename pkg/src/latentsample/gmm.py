"""Gaussian mixture baseline fitted by expectation-maximization.

This is the comparison sampler: it models the latent set as a weighted sum
of multivariate normals, so fitting costs O(n * d * components * iterations)
against the histogram sampler's two fixed passes.  Numerics follow the
standard robust recipe: k-means++ seeding, log-sum-exp responsibilities,
Cholesky-based densities, and a ridge added to every covariance update.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.linalg import solve_triangular

from .grid import as_latent_set
from .rng import CounterRng

_LOG_2PI = math.log(2.0 * math.pi)


@dataclass(frozen=True)
class EmConfig:
    max_iterations: int = 100
    rel_tolerance: float = 1e-6
    cov_regularization: float = 1e-6
    seed: int = 0
    covariance_mode: str = "full"

    def __post_init__(self):
        if self.max_iterations < 1:
            raise ValueError("max_iterations must be >= 1")
        if self.rel_tolerance <= 0:
            raise ValueError("rel_tolerance must be positive")
        if self.cov_regularization <= 0:
            raise ValueError("cov_regularization must be positive")
        if self.covariance_mode not in ("full", "diagonal"):
            raise ValueError("covariance_mode must be 'full' or 'diagonal'")


@dataclass
class EmFitReport:
    """Observables of one EM run: the iteration count is the complexity factor."""

    iterations_used: int
    log_likelihoods: list = field(default_factory=list)
    converged: bool = False


class GmmModel:
    """Fitted mixture: component weights, means, and covariance matrices."""

    def __init__(self, weights, means, covariances, fit_report: EmFitReport | None = None):
        weights = np.asarray(weights, dtype=np.float64)
        means = np.asarray(means, dtype=np.float64)
        covariances = np.asarray(covariances, dtype=np.float64)
        m = weights.shape[0]
        if means.shape[0] != m or covariances.shape[0] != m:
            raise ValueError("component count mismatch")
        if covariances.shape[1] != means.shape[1] or covariances.shape[1] != covariances.shape[2]:
            raise ValueError("covariance shape mismatch")
        if (weights < 0).any() or abs(float(weights.sum()) - 1.0) > 1e-10:
            raise ValueError("weights must be non-negative and sum to 1")
        sym_err = np.abs(covariances - np.transpose(covariances, (0, 2, 1))).max()
        if sym_err > 1e-10 * max(1.0, float(np.abs(covariances).max())):
            raise ValueError("covariances must be symmetric")
        self.weights = weights
        self.means = means
        self.covariances = covariances
        self.fit_report = fit_report

    @property
    def num_components(self) -> int:
        return self.weights.shape[0]

    @property
    def dim(self) -> int:
        return self.means.shape[1]


def _cholesky_factors(covariances: np.ndarray) -> list[np.ndarray]:
    try:
        return [np.linalg.cholesky(c) for c in covariances]
    except np.linalg.LinAlgError as exc:
        raise RuntimeError("covariance not positive-definite") from exc


def _log_densities(data: np.ndarray, means: np.ndarray, chols: list[np.ndarray]) -> np.ndarray:
    """log N(x | mu_i, Sigma_i) for every row and component, via Cholesky."""
    n, d = data.shape
    out = np.empty((n, len(chols)))
    for i, chol in enumerate(chols):
        dev = data - means[i]
        sol = solve_triangular(chol, dev.T, lower=True)
        maha = np.sum(sol * sol, axis=0)
        logdet = np.sum(np.log(np.diag(chol)))
        out[:, i] = -0.5 * (d * _LOG_2PI + maha) - logdet
    return out


def _e_step(data, weights, means, chols):
    """Returns (log responsibilities, total log-likelihood)."""
    with np.errstate(divide="ignore"):
        weighted = _log_densities(data, means, chols) + np.log(weights)[None, :]
    peak = np.max(weighted, axis=1, keepdims=True)
    row_ll = np.log(np.sum(np.exp(weighted - peak), axis=1)) + peak[:, 0]
    return weighted - row_ll[:, None], float(row_ll.sum())


def init_kmeanspp(latents, num_components: int, seed: int) -> np.ndarray:
    """k-means++ seeding: first center uniform, later ones far from the rest.

    Each subsequent center is drawn with probability proportional to the
    squared distance to its nearest already-chosen center.  Deterministic per
    seed through the counter-based RNG.
    """
    data = as_latent_set(latents)
    n = data.shape[0]
    if num_components < 1:
        raise ValueError("num_components must be >= 1")
    if n < num_components:
        raise ValueError("more components than data points")
    rng = CounterRng(seed)
    centers = np.empty((num_components, data.shape[1]))
    first = min(int(rng.uniforms(1)[0] * n), n - 1)
    centers[0] = data[first]
    dist_sq = np.sum((data - centers[0]) ** 2, axis=1)
    for t in range(1, num_components):
        total = float(dist_sq.sum())
        if total > 0.0:
            idx = rng.choice(np.cumsum(dist_sq) / total)
        else:
            # Remaining points coincide with chosen centers; pick uniformly.
            idx = min(int(rng.uniforms(1)[0] * n), n - 1)
        centers[t] = data[idx]
        dist_sq = np.minimum(dist_sq, np.sum((data - centers[t]) ** 2, axis=1))
    return centers


def fit_gmm(latents, num_components: int, config: EmConfig | None = None) -> GmmModel:
    """Fit a mixture by EM until the relative log-likelihood gain stalls.

    Initialization: k-means++ means, uniform weights, pooled data covariance.
    Every M-step adds cov_regularization * I to each covariance, which keeps
    the Cholesky factorization feasible unconditionally.  The fitted model
    carries an EmFitReport with the per-iteration log-likelihood sequence.
    """
    cfg = config if config is not None else EmConfig()
    data = as_latent_set(latents)
    n, d = data.shape
    reg = cfg.cov_regularization * np.eye(d)

    means = init_kmeanspp(data, num_components, cfg.seed)
    weights = np.full(num_components, 1.0 / num_components)
    pooled = data - data.mean(axis=0)
    pooled_cov = pooled.T @ pooled / n
    covariances = np.repeat(((pooled_cov + pooled_cov.T) / 2.0 + reg)[None], num_components, axis=0)

    report = EmFitReport(iterations_used=0)
    converged = False
    for _ in range(cfg.max_iterations):
        log_resp, ll = _e_step(data, weights, means, _cholesky_factors(covariances))
        if not math.isfinite(ll):
            raise RuntimeError("EM diverged (check regularization)")
        if report.log_likelihoods:
            prev = report.log_likelihoods[-1]
            if (ll - prev) < cfg.rel_tolerance * max(abs(prev), 1e-300):
                report.log_likelihoods.append(ll)
                converged = True
                break
        report.log_likelihoods.append(ll)

        resp = np.exp(log_resp)
        nk = resp.sum(axis=0)
        weights = nk / n
        safe_nk = np.maximum(nk, 1e-32)
        means = resp.T @ data / safe_nk[:, None]
        covariances = np.empty((num_components, d, d))
        for i in range(num_components):
            dev = data - means[i]
            if cfg.covariance_mode == "full":
                cov = (resp[:, i : i + 1] * dev).T @ dev / safe_nk[i]
                covariances[i] = (cov + cov.T) / 2.0 + reg
            else:
                var = np.sum(resp[:, i : i + 1] * dev * dev, axis=0) / safe_nk[i]
                covariances[i] = np.diag(var) + reg
        report.iterations_used += 1

    report.converged = converged
    return GmmModel(weights, means, covariances, fit_report=report)


def log_likelihood(model: GmmModel, latents) -> float:
    """Total log p(x) over rows under the mixture, computed in log space."""
    data = as_latent_set(latents, allow_empty=True)
    if data.shape[1] != model.dim:
        raise ValueError("dimension mismatch")
    _, ll = _e_step(data, model.weights, model.means, _cholesky_factors(model.covariances))
    return ll


def sample_gmm(model: GmmModel, count: int, seed: int, return_components: bool = False):
    """Draw from the mixture: pick a component by weight, then mu + L z.

    RNG layout: ``count`` uniforms for component choices, then 2*count*dim
    for the standard normals (Box-Muller), so output is reproducible from
    (model, count, seed).  With return_components=True also returns the
    chosen component index per sample.
    """
    if count < 0:
        raise ValueError("count must be >= 0")
    rng = CounterRng(seed)
    m, d = model.num_components, model.dim
    u = rng.uniforms(count)
    cum = np.cumsum(model.weights)
    chosen = np.minimum(np.searchsorted(cum, u, side="right"), m - 1)
    z = rng.normals(count * d).reshape(count, d)
    out = np.empty((count, d))
    chols = _cholesky_factors(model.covariances)
    for i in range(m):
        mask = chosen == i
        if mask.any():
            out[mask] = model.means[i] + z[mask] @ chols[i].T
    if return_components:
        return out, chosen
    return out
