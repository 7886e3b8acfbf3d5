"""Crossing-history likelihoods for the per-link attack propensity.

Two likelihood shapes for the propensity p given a binary crossing history:
the conventional Bernoulli product, and an adversary-aware variant whose
clear-streak exponent grows like the n-th root of the clear count, so long
incident-free streaks discount far more slowly than the Bernoulli form.
"""
from __future__ import annotations

import numpy as np

from .data import as_history


def _check_p(p):
    arr = np.asarray(p, dtype=float)
    if np.any((arr < 0.0) | (arr > 1.0)) or not np.isfinite(arr).all():
        raise ValueError("propensity must lie in [0, 1]")
    return arr


def streak_exponent(n: int, zeros: int) -> float:
    """Exponent (n - sum x)^(1/n) applied to the clear factor (1 - p).

    For an all-zero history this is n^(1/n), which is bounded above by
    3^(1/3) and tends to 1, so complacency never grows without bound.
    """
    if n == 0:
        return 0.0
    return float(zeros) ** (1.0 / n)


def adversarial_likelihood(p, history):
    """Adversary-aware likelihood (1-p)^((n - sum x)^(1/n)) * p^(sum x).

    Parameters
    ----------
    p : float or ndarray
        Propensity value(s) in [0, 1].
    history : sequence of {0, 1}
        Crossing outcomes, 1 meaning an incident. Empty history returns 1.

    Returns
    -------
    float or ndarray
        Likelihood value(s), finite and nonnegative on [0, 1].
    """
    arr = _check_p(p)
    x = as_history(history)
    n = x.size
    if n == 0:
        return np.ones_like(arr) if arr.shape else 1.0
    hits = int(x.sum())
    exponent = streak_exponent(n, n - hits)
    # 0**0 evaluates to 1, which is the intended limit at both endpoints.
    out = (1.0 - arr) ** exponent * arr ** hits
    return out if arr.shape else float(out)


def conventional_likelihood(p, history):
    """Bernoulli likelihood p^(sum x) * (1-p)^(n - sum x); empty history gives 1."""
    arr = _check_p(p)
    x = as_history(history)
    n = x.size
    if n == 0:
        return np.ones_like(arr) if arr.shape else 1.0
    hits = int(x.sum())
    out = arr ** hits * (1.0 - arr) ** (n - hits)
    return out if arr.shape else float(out)


LIKELIHOOD_KINDS = {
    "adversarial": adversarial_likelihood,
    "conventional": conventional_likelihood,
}


def history_likelihood(kind: str):
    """Look up a likelihood function by kind name."""
    try:
        return LIKELIHOOD_KINDS[kind]
    except KeyError:
        raise ValueError(
            f"unknown likelihood kind {kind!r}; expected one of {sorted(LIKELIHOOD_KINDS)}"
        ) from None
