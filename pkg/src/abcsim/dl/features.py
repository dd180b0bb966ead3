"""Pilot-based preprocessing that turns one symbol's samples into an LSTM input."""
from __future__ import annotations

import numpy as np

from .. import linalg
from ..channel import ReceivedBlock
from ..coding import BackscatterFrame


class PilotDegeneracyError(ValueError):
    """A tag state never occurs among the encoded pilot symbols."""


def sample_covariance(Y_i) -> np.ndarray:
    """``(1/N) sum_n y_n y_n^H`` for ``Y_i`` of shape ``(N, M)``."""
    Y_i = np.asarray(Y_i, dtype=complex)
    if Y_i.ndim != 2 or Y_i.shape[0] < 1:
        raise ValueError(f"expected N x M samples with N >= 1, got {Y_i.shape}")
    return Y_i.T @ Y_i.conj() / Y_i.shape[0]


def sample_covariances(Y) -> np.ndarray:
    """Batched :func:`sample_covariance` over ``Y`` of shape ``(I, N, M)``."""
    Y = np.asarray(Y, dtype=complex)
    return np.einsum("inm,ink->imk", Y, Y.conj()) / Y.shape[1]


def pilot_covariances(block: ReceivedBlock, frame: BackscatterFrame) -> tuple[np.ndarray, np.ndarray]:
    """Average pilot covariance per encoded tag state, plus the identity.

    Each class is normalised by its own symbol count; for a balanced pilot
    block that equals the ``2 / (P N)`` prefactor.
    """
    P = frame.pilot_count
    if P < 2:
        raise PilotDegeneracyError("at least two pilot symbols are needed")
    e = frame.pilot_encoded
    Y = block.samples[:P]
    N, M = Y.shape[1], Y.shape[2]
    out = []
    for state in (0, 1):
        sel = Y[e == state]
        if len(sel) == 0:
            raise PilotDegeneracyError(f"no pilot symbol has encoded state {state}")
        flat = sel.reshape(-1, M)
        out.append(flat.T @ flat.conj() / (len(sel) * N) + np.eye(M))
    return out[0], out[1]


def whiten(C, K0_t, K1_t) -> tuple[np.ndarray, np.ndarray]:
    """``(C K0_t^-1, C K1_t^-1)``."""
    return np.asarray(C) @ linalg.inverse(K0_t), np.asarray(C) @ linalg.inverse(K1_t)


def featurize(C0_t, C1_t) -> np.ndarray:
    """``(2 M^2, 3)`` sequence of (real, imag, abs), C0 entries first, row-major."""
    C0_t = np.asarray(C0_t)
    C1_t = np.asarray(C1_t)
    if C0_t.shape != C1_t.shape or C0_t.ndim != 2 or C0_t.shape[0] != C0_t.shape[1]:
        raise ValueError(f"shape mismatch: {C0_t.shape} vs {C1_t.shape}")
    flat = np.concatenate((C0_t.reshape(-1), C1_t.reshape(-1)))
    return np.stack((flat.real, flat.imag, np.abs(flat)), axis=-1)


def frame_features(block: ReceivedBlock, frame: BackscatterFrame, symbols=None) -> np.ndarray:
    """Feature sequences for the given symbol indices (default: all data symbols).

    Returns an array of shape ``(len(symbols), 2 M^2, 3)``.
    """
    if symbols is None:
        symbols = np.arange(frame.pilot_count, frame.I)
    K0_t, K1_t = pilot_covariances(block, frame)
    A0 = linalg.inverse(K0_t)
    A1 = linalg.inverse(K1_t)
    C = sample_covariances(block.samples[symbols])
    flat = np.concatenate(((C @ A0).reshape(len(C), -1), (C @ A1).reshape(len(C), -1)), axis=1)
    return np.stack((flat.real, flat.imag, np.abs(flat)), axis=-1)
