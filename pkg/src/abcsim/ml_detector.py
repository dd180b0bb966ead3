"""Maximum-likelihood detection of the tag state with known channel statistics."""
from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property

import numpy as np

from . import linalg
from .channel import ChannelRealization, ReceivedBlock
from .coding import diff_decode
from .config import SystemConfig

LN_PI = float(np.log(np.pi))


@dataclass(frozen=True)
class EffectiveChannels:
    h1: np.ndarray  # transmitter direct
    h2: np.ndarray  # transmitter -> tag -> receiver
    h3: np.ndarray  # jammer direct
    h4: np.ndarray  # jammer -> tag -> receiver


def effective_channels(ch: ChannelRealization, cfg: SystemConfig) -> EffectiveChannels:
    return EffectiveChannels(
        h1=ch.f_t * np.sqrt(cfg.alpha_tr),
        h2=ch.g_t * ch.f_b * np.sqrt(cfg.alpha_tb),
        h3=ch.f_j * np.sqrt(cfg.alpha_jr),
        h4=ch.g_j * ch.f_b * np.sqrt(cfg.alpha_jb),
    )


@dataclass(frozen=True)
class CovariancePair:
    """Received-vector covariances for tag state 0 (``K0``) and 1 (``K1``).

    Inverses and log-determinants are computed once and cached.
    """

    K0: np.ndarray
    K1: np.ndarray

    def __post_init__(self):
        if self.K0.shape != self.K1.shape or self.K0.ndim != 2 or self.K0.shape[0] != self.K0.shape[1]:
            raise ValueError(f"K0 {self.K0.shape} and K1 {self.K1.shape} must be equal square shapes")

    @property
    def M(self) -> int:
        return self.K0.shape[0]

    @cached_property
    def K0_inv(self) -> np.ndarray:
        return linalg.inverse(self.K0)

    @cached_property
    def K1_inv(self) -> np.ndarray:
        return linalg.inverse(self.K1)

    @cached_property
    def logdet0(self) -> float:
        return linalg.log_abs_det(self.K0)

    @cached_property
    def logdet1(self) -> float:
        return linalg.log_abs_det(self.K1)

    @cached_property
    def contrast(self) -> np.ndarray:
        """``K0^-1 - K1^-1``, the matrix of the quadratic decision statistic."""
        return self.K0_inv - self.K1_inv

    def swapped(self) -> "CovariancePair":
        return CovariancePair(self.K1, self.K0)


def _outer(h):
    return np.outer(h, h.conj())


def covariance_matrices(ch: ChannelRealization, cfg: SystemConfig) -> CovariancePair:
    h = effective_channels(ch, cfg)
    eye = np.eye(len(h.h1), dtype=complex)
    K0 = _outer(h.h1) + _outer(h.h3) + eye
    K1 = _outer(h.h1 + h.h2) + _outer(h.h3 + h.h4) + eye
    return CovariancePair(K0, K1)


def log_pdf(y, K, K_inv=None, logdet=None) -> float:
    """Log-density of ``CN(0, K)`` at ``y``."""
    K = np.asarray(K, dtype=complex)
    y = np.asarray(y, dtype=complex).reshape(-1)
    if K_inv is None:
        K_inv = linalg.inverse(K)
    if logdet is None:
        logdet = linalg.log_abs_det(K)
    return -K.shape[0] * LN_PI - logdet - linalg.quad_form(y, K_inv).real


def log_pdf_batch(Y, K_inv, logdet) -> np.ndarray:
    """Row-wise log-density for samples ``Y`` of shape ``(..., M)``."""
    M = K_inv.shape[0]
    q = np.einsum("...m,mk,...k->...", Y.conj(), K_inv, Y).real
    return -M * LN_PI - logdet - q


def decision_statistic(Y_i, pair: CovariancePair) -> tuple[float, float]:
    """Return ``(sum_n y_n^H (K0^-1 - K1^-1) y_n, N ln(|K1|/|K0|))``."""
    Y_i = np.asarray(Y_i, dtype=complex)
    if Y_i.ndim != 2 or Y_i.shape[1] != pair.M:
        raise ValueError(f"expected N x {pair.M} samples, got {Y_i.shape}")
    stat = np.einsum("nm,mk,nk->", Y_i.conj(), pair.contrast, Y_i).real
    return float(stat), Y_i.shape[0] * (pair.logdet1 - pair.logdet0)


def detect_symbol(Y_i, pair: CovariancePair) -> int:
    stat, thr = decision_statistic(Y_i, pair)
    # equality resolves to 0
    return int(stat > thr)


def detect_symbols(Y, pair: CovariancePair) -> np.ndarray:
    """Vectorised :func:`detect_symbol` over ``Y`` of shape ``(I, N, M)``."""
    Y = np.asarray(Y)
    if Y.ndim != 3 or Y.shape[2] != pair.M:
        raise ValueError(f"expected I x N x {pair.M} samples, got {Y.shape}")
    YD = Y.reshape(-1, pair.M) @ pair.contrast.T
    stat = np.einsum("inm,inm->i", Y.conj(), YD.reshape(Y.shape)).real
    thr = Y.shape[1] * (pair.logdet1 - pair.logdet0)
    return (stat > thr).astype(np.int8)


def detect_frame(block: ReceivedBlock, pair: CovariancePair) -> np.ndarray:
    """Decoded bits for every position in the frame (pilots included)."""
    return diff_decode(detect_symbols(block.samples, pair), e0=1)
