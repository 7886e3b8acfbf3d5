"""Monte-Carlo-induced likelihood of the propensity (Stage II).

Each posterior coefficient draw maps to a propensity through the logistic
model; pairing that propensity with the draw's unnormalized posterior
density and smoothing over neighboring points yields a tabulated likelihood
curve for p, which the fusion stage integrates.
"""
from __future__ import annotations

import io
from dataclasses import dataclass

import numpy as np

from .errors import DegenerateCurveError
from .logit import PosteriorDraws, logistic


@dataclass(frozen=True)
class CurveConfig:
    """Subsample size, smoothing window (odd), and subsampling seed."""

    sample_count: int = 60
    window: int = 5
    seed: int = 0

    def __post_init__(self):
        if self.window < 1 or self.window % 2 == 0:
            raise ValueError("smoothing window must be odd and at least 1")
        if self.sample_count < self.window:
            raise ValueError("sample_count must be at least the smoothing window")


@dataclass(frozen=True)
class InducedCurve:
    """Tabulated likelihood over p: knots sorted by p, max weight scaled to 1."""

    ps: np.ndarray
    weights: np.ndarray
    sample_count: int
    window: int
    normalization: str = "max-is-one"

    def __post_init__(self):
        ps = np.asarray(self.ps, dtype=float)
        ws = np.asarray(self.weights, dtype=float)
        if ps.size == 0:
            raise ValueError("curve needs at least one point")
        if ps.shape != ws.shape:
            raise ValueError("ps and weights must have equal length")
        if np.any(np.diff(ps) < 0):
            raise ValueError("curve knots must be sorted ascending in p")
        if np.any(ws < 0):
            raise ValueError("curve weights must be nonnegative")
        for name, arr in (("ps", ps), ("weights", ws)):
            arr = arr.copy()
            arr.setflags(write=False)
            object.__setattr__(self, name, arr)

    @property
    def point_count(self) -> int:
        return int(self.ps.size)

    def meta(self) -> dict:
        return {
            "points": self.point_count,
            "sampleCount": self.sample_count,
            "window": self.window,
            "normalization": self.normalization,
        }


def propensity_at(beta, z):
    """Logistic of the covariate inner product for one coefficient vector."""
    b = np.asarray(beta, dtype=float).ravel()
    zv = np.asarray(z, dtype=float).ravel()
    if b.shape != zv.shape:
        raise ValueError(
            f"coefficient vector has length {b.size}, covariates have length {zv.size}"
        )
    return float(logistic(float(b @ zv)))


def moving_average(values, window: int) -> np.ndarray:
    """Centered moving average with windows truncated at both ends."""
    arr = np.asarray(values, dtype=float)
    half = window // 2
    n = arr.size
    csum = np.concatenate([[0.0], np.cumsum(arr)])
    lo = np.maximum(np.arange(n) - half, 0)
    hi = np.minimum(np.arange(n) + half + 1, n)
    return (csum[hi] - csum[lo]) / (hi - lo)


def induce_curve(draws: PosteriorDraws, z, cfg: CurveConfig = CurveConfig()) -> InducedCurve:
    """Build the induced likelihood curve from posterior draws and covariates z.

    Subsamples cfg.sample_count draws without replacement, maps each to
    (propensity, density relative to the subsample's densest draw), sorts by
    propensity (ties broken by original draw index), smooths the densities
    with a truncated centered moving average, and rescales to max 1.
    """
    if draws.draw_count == 0:
        raise ValueError("no posterior draws to build a curve from")
    if cfg.sample_count > draws.draw_count:
        raise ValueError(
            f"sample_count {cfg.sample_count} exceeds available draws {draws.draw_count}"
        )
    zv = np.asarray(z, dtype=float).ravel()
    if zv.size != draws.dimension:
        raise ValueError(
            f"covariates have length {zv.size}, draws have dimension {draws.dimension}"
        )

    rng = np.random.default_rng(cfg.seed)
    idx = rng.choice(draws.draw_count, size=cfg.sample_count, replace=False)
    ps = logistic(draws.betas[idx] @ zv)
    ps = np.atleast_1d(ps)
    lps = draws.log_posts[idx]
    raw = np.exp(lps - lps.max())

    order = np.lexsort((idx, ps))
    ps, raw = ps[order], raw[order]
    smooth = moving_average(raw, cfg.window)
    top = smooth.max()
    if not top > 0:
        raise DegenerateCurveError("degenerate density values: all curve weights are zero")
    return InducedCurve(
        ps=ps,
        weights=smooth / top,
        sample_count=cfg.sample_count,
        window=cfg.window,
    )


def flat_curve(weight: float = 1.0) -> InducedCurve:
    """Constant curve over [0, 1]; the no-regional-information stand-in.

    Weights other than 1 are legal and useful for checking that constant
    factors cancel out of the fused probabilities.
    """
    if not weight > 0:
        raise ValueError("flat curve weight must be positive")
    return InducedCurve(
        ps=np.array([0.0, 1.0]),
        weights=np.array([weight, weight]),
        sample_count=2,
        window=1,
        normalization="max-is-one" if weight == 1.0 else "unscaled",
    )


def evaluate_curve(curve: InducedCurve, p):
    """Piecewise-linear curve value at p, flat beyond the sampled span.

    Knots sharing an identical p are collapsed to their mean weight so the
    evaluation stays single-valued and continuous.
    """
    q = np.asarray(p, dtype=float)
    if np.any((q < 0.0) | (q > 1.0)):
        raise ValueError("curve evaluated outside [0, 1]")
    ps, ws = curve.ps, curve.weights
    uniq, inverse, counts = np.unique(ps, return_inverse=True, return_counts=True)
    if uniq.size != ps.size:
        sums = np.zeros(uniq.size)
        np.add.at(sums, inverse, ws)
        ws = sums / counts
        ps = uniq
    out = np.interp(q, ps, ws)
    return out if q.shape else float(out)


def curve_to_csv(curve: InducedCurve) -> str:
    """Plotting export: p and weight per knot."""
    out = io.StringIO()
    out.write("p,weight\n")
    for p, w in zip(curve.ps, curve.weights):
        out.write(f"{float(p)!r},{float(w)!r}\n")
    return out.getvalue()
