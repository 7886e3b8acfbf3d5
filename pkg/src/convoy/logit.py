"""Bayesian logistic regression on the regional dataset (Stage I).

Provides the stable logistic map, the unnormalized log posterior under
independent Gaussian coefficient priors, a Newton-Raphson maximum-likelihood
fit for comparison, and a reproducible per-coordinate random-walk Metropolis
sampler whose retained draws carry their log posterior values, which is what
the induced-likelihood stage consumes.
"""
from __future__ import annotations

import io
from dataclasses import dataclass

import numpy as np

from .data import RegionalDataset
from .errors import PipelineError, SeparationError

LOG_2PI = float(np.log(2.0 * np.pi))
SEPARATION_BOUND = 50.0


def logistic(eta):
    """Numerically stable 1 / (1 + exp(-eta)) for scalars or arrays."""
    arr = np.asarray(eta, dtype=float)
    out = np.empty_like(arr)
    pos = arr >= 0
    out[pos] = 1.0 / (1.0 + np.exp(-arr[pos]))
    ex = np.exp(arr[~pos])
    out[~pos] = ex / (1.0 + ex)
    return out if arr.shape else float(out)


@dataclass(frozen=True)
class GaussianPrior:
    """Independent Gaussian priors, one mean and sd per coefficient.

    Scalars broadcast over the coefficient dimension.
    """

    mean: float = 0.0
    sd: float = 10.0

    def __post_init__(self):
        if np.any(np.asarray(self.sd, dtype=float) <= 0):
            raise ValueError("prior sd must be positive")

    def arrays(self, dim: int):
        mean = np.broadcast_to(np.asarray(self.mean, dtype=float), (dim,))
        sd = np.broadcast_to(np.asarray(self.sd, dtype=float), (dim,))
        return mean, sd

    def log_density(self, beta: np.ndarray) -> float:
        mean, sd = self.arrays(len(beta))
        z = (beta - mean) / sd
        return float(np.sum(-0.5 * LOG_2PI - np.log(sd) - 0.5 * z * z))


@dataclass(frozen=True)
class PosteriorDraws:
    """Retained MCMC draws plus per-draw unnormalized log posterior values."""

    betas: np.ndarray
    log_posts: np.ndarray
    iterations: int
    burn_in: int
    seed: int
    acceptance_rate: float
    acceptance_by_coordinate: tuple
    proposal_scales: tuple

    @property
    def draw_count(self) -> int:
        return self.betas.shape[0]

    @property
    def dimension(self) -> int:
        return self.betas.shape[1]

    def means(self) -> np.ndarray:
        return self.betas.mean(axis=0)


def _design(data: RegionalDataset, beta=None):
    X = np.asarray(data.covariates, dtype=float)
    y = np.asarray(data.responses, dtype=float)
    if beta is not None:
        b = np.asarray(beta, dtype=float).ravel()
        if b.shape[0] != X.shape[1]:
            raise ValueError(
                f"coefficient vector has length {b.shape[0]}, design has {X.shape[1]} columns"
            )
        return X, y, b
    return X, y


def log_likelihood(beta, data: RegionalDataset) -> float:
    """Bernoulli log likelihood of the logistic model on the dataset."""
    X, y, b = _design(data, beta)
    if X.shape[0] == 0:
        return 0.0
    eta = X @ b
    # log sigma(eta) = -log(1 + exp(-eta)), computed via logaddexp.
    return float(np.sum(y * -np.logaddexp(0.0, -eta) + (1.0 - y) * -np.logaddexp(0.0, eta)))


def log_unnormalized_posterior(beta, data: RegionalDataset, prior: GaussianPrior) -> float:
    """Log likelihood plus log prior density, constants kept consistently."""
    X, y, b = _design(data, beta)
    return log_likelihood(b, data) + prior.log_density(b)


def fit_mle(data: RegionalDataset, max_iter: int = 100, tol: float = 1e-10):
    """Newton-Raphson maximum-likelihood fit of the logistic model.

    Returns (coefficients, diagnostics). Diagnostics report the gradient
    max-norm at the solution, the iteration count, and an estimate of the
    Hessian condition number.

    Raises ValueError on a rank-deficient design and SeparationError when
    the iterates diverge past magnitude 50 (separated or quasi-separated
    data push the maximizer to infinity).
    """
    X, y = _design(data)
    s, k = X.shape
    if s <= k:
        raise ValueError(f"need more than {k} rows to fit {k} coefficients, got {s}")
    if np.linalg.matrix_rank(X) < k:
        raise ValueError("rank-deficient design: some covariate columns are linearly dependent")

    beta = np.zeros(k)
    last_step = np.inf
    for iteration in range(1, max_iter + 1):
        mu = logistic(X @ beta)
        grad = X.T @ (y - mu)
        # under separation the gradient underflows while the iterates still
        # march toward infinity, so a small step is required as well
        if np.max(np.abs(grad)) <= tol and last_step <= 1e-8:
            hess = X.T @ (X * (mu * (1.0 - mu))[:, None])
            diagnostics = {
                "gradient_norm": float(np.max(np.abs(grad))),
                "iterations": iteration - 1,
                "hessian_condition": float(np.linalg.cond(hess)),
            }
            return beta, diagnostics
        w = mu * (1.0 - mu)
        hess = X.T @ (X * w[:, None])
        try:
            step = np.linalg.solve(hess, grad)
        except np.linalg.LinAlgError:
            raise SeparationError(
                "possible separation: information matrix became singular"
            ) from None
        beta = beta + step
        last_step = float(np.max(np.abs(step)))
        if np.max(np.abs(beta)) > SEPARATION_BOUND:
            raise SeparationError(
                "possible separation: coefficients diverged past "
                f"magnitude {SEPARATION_BOUND:g}"
            )
    raise PipelineError(f"maximum-likelihood fit did not converge in {max_iter} iterations")


def sample_posterior(
    data: RegionalDataset,
    prior: GaussianPrior,
    iterations: int = 11000,
    burn_in: int = 1000,
    seed: int = 0,
) -> PosteriorDraws:
    """Per-coordinate random-walk Metropolis targeting the coefficient posterior.

    Proposal scales adapt every 50 sweeps during burn-in (scale up at
    coordinate acceptance above 0.45, down below 0.30) and are frozen
    afterwards, keeping the retained chain a valid Metropolis sample.
    The same seed always reproduces the same draws.
    """
    if burn_in < 0 or iterations <= burn_in:
        raise ValueError("iterations must exceed burn_in and burn_in must be nonnegative")
    X, y = _design(data)
    k = X.shape[1]
    if k == 0:
        raise ValueError("dataset has no covariate columns")

    rng = np.random.default_rng(seed)
    beta = np.zeros(k)
    lp = log_unnormalized_posterior(beta, data, prior)
    if not np.isfinite(lp):
        raise PipelineError("log posterior is not finite at the zero starting point")

    scales = np.ones(k)
    adapt_hits = np.zeros(k)
    kept_hits = np.zeros(k)
    kept = iterations - burn_in
    betas = np.zeros((kept, k))
    log_posts = np.zeros(kept)

    for sweep in range(iterations):
        for u in range(k):
            proposal = beta.copy()
            proposal[u] += scales[u] * rng.standard_normal()
            lp_prop = log_unnormalized_posterior(proposal, data, prior)
            if np.log(rng.random()) < lp_prop - lp:
                beta, lp = proposal, lp_prop
                if sweep < burn_in:
                    adapt_hits[u] += 1
                else:
                    kept_hits[u] += 1
        if sweep < burn_in and (sweep + 1) % 50 == 0:
            rate = adapt_hits / 50.0
            scales[rate > 0.45] *= 1.4
            scales[rate < 0.30] *= 0.7
            adapt_hits[:] = 0
        if sweep >= burn_in:
            betas[sweep - burn_in] = beta
            log_posts[sweep - burn_in] = lp

    by_coord = kept_hits / max(kept, 1)
    return PosteriorDraws(
        betas=betas,
        log_posts=log_posts,
        iterations=iterations,
        burn_in=burn_in,
        seed=seed,
        acceptance_rate=float(by_coord.mean()),
        acceptance_by_coordinate=tuple(float(r) for r in by_coord),
        proposal_scales=tuple(float(s) for s in scales),
    )


def sample_skewness(values) -> float:
    """Population sample skewness m3 / m2^(3/2)."""
    arr = np.asarray(values, dtype=float)
    centered = arr - arr.mean()
    m2 = np.mean(centered**2)
    if m2 == 0:
        return 0.0
    return float(np.mean(centered**3) / m2**1.5)


def draws_to_csv(draws: PosteriorDraws) -> str:
    """Audit export: one row per retained draw, coefficients then log posterior."""
    out = io.StringIO()
    names = [f"b{u}" for u in range(draws.dimension)]
    out.write(",".join(names + ["log_post"]) + "\n")
    for row, lp in zip(draws.betas, draws.log_posts):
        out.write(",".join(repr(float(v)) for v in row) + f",{float(lp)!r}\n")
    return out.getvalue()
