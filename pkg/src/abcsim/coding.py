"""Backscatter frame layout and modulo-2 differential coding."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np


def _binary(x, what: str) -> np.ndarray:
    a = np.asarray(x)
    if a.ndim != 1:
        raise ValueError(f"{what} must be one-dimensional")
    if a.size and not np.isin(a, (0, 1)).all():
        raise ValueError(f"{what} must contain only 0/1 values")
    return a.astype(np.int8)


def diff_encode(bits, e0: int = 1) -> np.ndarray:
    """``e[i] = e[i-1] xor b[i]`` starting from the reference symbol ``e0``."""
    b = _binary(bits, "bits")
    if e0 not in (0, 1):
        raise ValueError("e0 must be 0 or 1")
    if b.size == 0:
        return b
    return (np.cumsum(b, dtype=np.int64) + e0).astype(np.int8) % 2


def diff_decode(encoded, e0: int = 1) -> np.ndarray:
    e = _binary(encoded, "encoded symbols")
    if e0 not in (0, 1):
        raise ValueError("e0 must be 0 or 1")
    prev = np.concatenate(([e0], e[:-1])).astype(np.int8)
    return e ^ prev


def pilot_pattern(P: int) -> np.ndarray:
    """P/2 zeros followed by P/2 ones."""
    if P < 0 or P % 2:
        raise ValueError(f"pilot count must be even and non-negative, got {P}")
    return np.repeat(np.array([0, 1], dtype=np.int8), P // 2)


@dataclass(frozen=True)
class BackscatterFrame:
    bits: np.ndarray
    pilot_count: int
    encoded: np.ndarray
    e0: int = 1

    @property
    def I(self) -> int:
        return len(self.bits)

    @property
    def data_bits(self) -> np.ndarray:
        return self.bits[self.pilot_count:]

    @property
    def pilot_encoded(self) -> np.ndarray:
        return self.encoded[:self.pilot_count]

    @property
    def data_reference(self) -> int:
        """Encoded symbol preceding the first data bit, known to the receiver."""
        return int(self.encoded[self.pilot_count - 1]) if self.pilot_count else self.e0


def make_frame(data_bits, P: int, I: int | None = None) -> BackscatterFrame:
    """Pilot block followed by ``data_bits``; ``I`` if given must equal P + len(data)."""
    data = _binary(data_bits, "data bits")
    if I is not None and len(data) != I - P:
        raise ValueError(f"expected {I - P} data bits, got {len(data)}")
    bits = np.concatenate((pilot_pattern(P), data))
    return BackscatterFrame(bits=bits, pilot_count=P, encoded=diff_encode(bits))


def random_frame(I: int, P: int, rng: np.random.Generator, theta0: float = 0.5) -> BackscatterFrame:
    """Frame with i.i.d. data bits, ``P(bit = 0) = theta0``."""
    if not 0 <= P < I:
        raise ValueError(f"need 0 <= P < I, got P={P}, I={I}")
    data = (rng.random(I - P) >= theta0).astype(np.int8)
    return make_frame(data, P, I)
