"""Rayleigh-faded received-signal synthesis for one backscatter frame.

Per RF-source symbol ``n`` the M-antenna receiver sees::

    y_n = f_t sqrt(a_tr) s_t + f_j sqrt(a_jr) s_j
          + f_b e (g_t sqrt(a_tb) s_t + g_j sqrt(a_jb) s_j) + noise

with transmitter/jammer symbols, fading and noise all standard CSCG.  The
channel is held fixed for the whole frame and link delays are ignored.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .config import SystemConfig

_HALF = np.sqrt(0.5)


def cscg(shape, rng: np.random.Generator) -> np.ndarray:
    """Standard circularly-symmetric complex Gaussian samples of ``shape``."""
    if isinstance(shape, int):
        shape = (shape,)
    z = rng.standard_normal(tuple(shape) + (2,))
    return (z[..., 0] + 1j * z[..., 1]) * _HALF


def sample_cscg(count: int, rng: np.random.Generator) -> np.ndarray:
    if count < 0:
        raise ValueError("count must be >= 0")
    return cscg((count,), rng)


def link_budget(p_tx, g_tx, g_rx, distance, exponent, wavelength) -> float:
    """Average received power ``(lambda/4pi)^2 p g_tx g_rx / L^exponent``."""
    args = dict(p_tx=p_tx, g_tx=g_tx, g_rx=g_rx, distance=distance,
                exponent=exponent, wavelength=wavelength)
    for k, v in args.items():
        if not v > 0:
            raise ValueError(f"{k} must be positive, got {v}")
    kappa = (wavelength / (4.0 * np.pi)) ** 2
    return float(kappa * p_tx * g_tx * g_rx / distance**exponent)


@dataclass(frozen=True)
class ChannelRealization:
    f_t: np.ndarray
    f_j: np.ndarray
    f_b: np.ndarray
    g_t: complex
    g_j: complex

    @property
    def M(self) -> int:
        return len(self.f_t)


@dataclass(frozen=True)
class ReceivedBlock:
    samples: np.ndarray  # (I, N, M)
    config: SystemConfig
    channel: ChannelRealization
    encoded: np.ndarray

    @property
    def shape(self):
        return self.samples.shape


def draw_channel(cfg: SystemConfig, rng: np.random.Generator) -> ChannelRealization:
    M = cfg.M
    f_t = cscg(M, rng)
    f_j = cscg(M, rng)
    f_b = cscg(M, rng)
    g = cscg(2, rng)
    return ChannelRealization(f_t, f_j, f_b, complex(g[0]), complex(g[1]))


def _mix(cfg: SystemConfig, ch: ChannelRealization, e, s_t, s_j, noise):
    # s_t, s_j: (..., N); e broadcastable to them; noise: (..., N, M)
    direct = (np.sqrt(cfg.alpha_tr) * s_t)[..., None] * ch.f_t \
        + (np.sqrt(cfg.alpha_jr) * s_j)[..., None] * ch.f_j
    c = ch.g_t * np.sqrt(cfg.alpha_tb) * s_t + ch.g_j * np.sqrt(cfg.alpha_jb) * s_j
    return direct + (e * c)[..., None] * ch.f_b + noise


def received_symbol(cfg: SystemConfig, ch: ChannelRealization, e_bit: int,
                    rng: np.random.Generator) -> np.ndarray:
    """``N x M`` samples for one backscatter symbol in tag state ``e_bit``."""
    if e_bit not in (0, 1):
        raise ValueError(f"tag state must be 0 or 1, got {e_bit}")
    s_t = cscg(cfg.N, rng)
    s_j = cscg(cfg.N, rng)
    noise = cscg((cfg.N, cfg.M), rng)
    return _mix(cfg, ch, e_bit, s_t, s_j, noise)


def synthesize_frame(cfg: SystemConfig, ch: ChannelRealization, encoded_symbols,
                     rng: np.random.Generator) -> ReceivedBlock:
    """Received ``I x N x M`` tensor for a whole frame under one channel draw.

    Draws are taken block-wise (all transmitter symbols, then jammer symbols,
    then noise); for ``I == 1`` this consumes the generator exactly like a
    single :func:`received_symbol` call.
    """
    e = np.asarray(encoded_symbols)
    if e.shape != (cfg.I,):
        raise ValueError(f"expected {cfg.I} encoded symbols, got shape {e.shape}")
    if not np.isin(e, (0, 1)).all():
        raise ValueError("encoded symbols must be binary")
    s_t = cscg((cfg.I, cfg.N), rng)
    s_j = cscg((cfg.I, cfg.N), rng)
    noise = cscg((cfg.I, cfg.N, cfg.M), rng)
    y = _mix(cfg, ch, e.astype(float)[:, None], s_t, s_j, noise)
    return ReceivedBlock(y, cfg, ch, e.astype(np.int8))
