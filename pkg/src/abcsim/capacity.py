"""Monte-Carlo estimate of the maximum achievable backscatter rate.

For one observation vector (spreading factor 1) the rate at prior
``theta0 = P(e = 0)`` is ``I(e; y) = H_b(theta0) - E_y[H_b(w0(y))]`` where
``w0`` is the posterior of state 0.  Everything is evaluated in log space.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.special import expit

from .ml_detector import CovariancePair, log_pdf_batch


class DegenerateObservationError(ValueError):
    pass


@dataclass(frozen=True)
class RateEstimate:
    theta0_star: float
    rate_bits: float
    mc_samples: int
    std_error: float


def binary_entropy(theta):
    """Binary entropy in bits with ``0 log 0 = 0``; accepts scalars or arrays."""
    t = np.asarray(theta, dtype=float)
    if np.any((t < 0) | (t > 1)) or np.any(np.isnan(t)):
        raise ValueError("binary entropy is defined on [0, 1] only")
    with np.errstate(divide="ignore", invalid="ignore"):
        h = -(t * np.log2(t) + (1 - t) * np.log2(1 - t))
    h = np.where((t == 0) | (t == 1), 0.0, h)
    return float(h) if h.ndim == 0 else h


def _posterior0_from_logs(theta0, lp0, lp1):
    # w0 = sigmoid(ln(theta0 p0) - ln(theta1 p1))
    lp0 = np.asarray(lp0, dtype=float)
    lp1 = np.asarray(lp1, dtype=float)
    if theta0 == 1.0:
        return np.ones_like(lp0)
    if theta0 == 0.0:
        return np.zeros_like(lp0)
    w0 = expit(np.log(theta0) - np.log1p(-theta0) + lp0 - lp1)
    # identical likelihoods leave the prior untouched, bit for bit
    return np.where(lp0 == lp1, theta0, w0)


def posterior_bit0(y, theta0: float, pair: CovariancePair) -> float:
    if not 0.0 <= theta0 <= 1.0:
        raise ValueError("theta0 must lie in [0, 1]")
    y = np.asarray(y, dtype=complex).reshape(1, -1)
    lp0 = log_pdf_batch(y, pair.K0_inv, pair.logdet0)[0]
    lp1 = log_pdf_batch(y, pair.K1_inv, pair.logdet1)[0]
    if not (np.isfinite(lp0) or np.isfinite(lp1)):
        raise DegenerateObservationError("both conditional densities vanish")
    return float(_posterior0_from_logs(theta0, lp0, lp1))


class _Draws:
    """Common random numbers: one batch of white draws reused for every prior.

    ``y_e = L_e z`` with ``K_e = L_e L_e^H``; the four log-densities of
    ``y_0``/``y_1`` under both hypotheses are computed once.
    """

    def __init__(self, pair: CovariancePair, samples: int, rng: np.random.Generator):
        M = pair.M
        z = rng.standard_normal((samples, M, 2))
        z = (z[..., 0] + 1j * z[..., 1]) * np.sqrt(0.5)
        self.u = rng.random(samples)
        L0 = np.linalg.cholesky(pair.K0)
        L1 = np.linalg.cholesky(pair.K1)
        y0 = z @ L0.T
        y1 = z @ L1.T
        self.lp = {}
        for e, y in ((0, y0), (1, y1)):
            self.lp[e] = (log_pdf_batch(y, pair.K0_inv, pair.logdet0),
                          log_pdf_batch(y, pair.K1_inv, pair.logdet1))
        self.samples = samples

    def terms(self, theta0: float, stratified: bool) -> np.ndarray:
        """Per-sample values ``H_b(theta0) - H_b(w0)`` whose mean is the estimate."""
        hb = binary_entropy(theta0)
        d = {e: hb - binary_entropy(_posterior0_from_logs(theta0, *self.lp[e])) for e in (0, 1)}
        if stratified:
            return theta0 * d[0] + (1.0 - theta0) * d[1]
        # e = 0 with probability theta0
        return np.where(self.u < theta0, d[0], d[1])


def _mi_from_terms(theta0, terms):
    n = len(terms)
    est = float(np.mean(terms))
    se = float(np.std(terms, ddof=1) / np.sqrt(n)) if n > 1 else 0.0
    return est, se


def mutual_information(theta0: float, pair: CovariancePair, samples: int,
                       rng: np.random.Generator, stratified: bool = True) -> tuple[float, float]:
    """Monte-Carlo ``I(e; y)`` in bits and its standard error.

    ``stratified=False`` draws the tag state per sample; the default averages
    both conditional expectations over the same draws (same mean, lower
    variance).
    """
    if samples < 1:
        raise ValueError("samples must be >= 1")
    if not 0.0 <= theta0 <= 1.0:
        raise ValueError("theta0 must lie in [0, 1]")
    draws = _Draws(pair, samples, rng)
    return _mi_from_terms(theta0, draws.terms(theta0, stratified))


def theta_grid(grid_step: float) -> np.ndarray:
    if not 0.0 < grid_step <= 0.5:
        raise ValueError("grid_step must lie in (0, 0.5]")
    k = int(np.floor(1.0 / grid_step + 1e-9))
    g = np.arange(1, k + 1) * grid_step
    return np.round(g[g < 1.0 - 1e-12], 12)


def rate_curve(pair: CovariancePair, thetas, samples: int, rng: np.random.Generator,
               stratified: bool = True) -> tuple[np.ndarray, np.ndarray]:
    """Mutual information and standard error at each prior, common draws."""
    draws = _Draws(pair, samples, rng)
    out = np.array([_mi_from_terms(t, draws.terms(t, stratified)) for t in thetas])
    return out[:, 0], out[:, 1]


def max_backscatter_rate(pair: CovariancePair, samples: int, grid_step: float,
                         rng: np.random.Generator, stratified: bool = True) -> RateEstimate:
    thetas = theta_grid(grid_step)
    mi, se = rate_curve(pair, thetas, samples, rng, stratified)
    k = int(np.argmax(mi))
    return RateEstimate(float(thetas[k]), float(mi[k]), samples, float(se[k]))
