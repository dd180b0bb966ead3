"""Scenario parameters.

All SNRs and relative backscatter gains are held on a linear scale.  dB
values only appear at the command-line / config-file boundary and pass
through :func:`db_to_linear` once.
"""
from __future__ import annotations

from dataclasses import asdict, dataclass, fields, replace


def db_to_linear(x_db: float) -> float:
    return 10.0 ** (float(x_db) / 10.0)


def linear_to_db(x: float) -> float:
    import math

    return 10.0 * math.log10(x)


@dataclass(frozen=True)
class SystemConfig:
    """One simulated scenario.

    ``alpha_tr`` / ``alpha_jr`` are the average receive SNRs of the
    transmitter and jammer direct links; ``alpha_t_rel`` / ``alpha_j_rel``
    are the relative gains of the two backscatter paths, so the backscatter
    link SNRs are ``alpha_t_rel * alpha_tr`` and ``alpha_j_rel * alpha_jr``.
    """

    M: int = 10
    N: int = 50
    I: int = 100
    P: int = 20
    alpha_tr: float = db_to_linear(5.0)
    alpha_jr: float = db_to_linear(7.0)
    alpha_t_rel: float = db_to_linear(-15.0)
    alpha_j_rel: float = db_to_linear(-15.0)
    theta0: float = 0.5
    seed: int = 2021

    def __post_init__(self):
        for name in ("M", "N", "I"):
            if int(getattr(self, name)) < 1:
                raise ValueError(f"{name} must be >= 1, got {getattr(self, name)}")
        if self.P < 0 or self.P % 2 or self.P >= self.I:
            raise ValueError(f"P must be even with 0 <= P < I, got P={self.P}, I={self.I}")
        for name in ("alpha_tr", "alpha_jr", "alpha_t_rel", "alpha_j_rel"):
            if getattr(self, name) < 0:
                raise ValueError(f"{name} must be >= 0 (linear scale)")
        if not 0.0 <= self.theta0 <= 1.0:
            raise ValueError(f"theta0 must lie in [0, 1], got {self.theta0}")
        if not 0 <= int(self.seed) < 2**64:
            raise ValueError("seed must be a 64-bit unsigned integer")

    @property
    def alpha_tb(self) -> float:
        return self.alpha_t_rel * self.alpha_tr

    @property
    def alpha_jb(self) -> float:
        return self.alpha_j_rel * self.alpha_jr

    def with_(self, **changes) -> "SystemConfig":
        return replace(self, **changes)

    def to_dict(self) -> dict:
        return asdict(self)

    @classmethod
    def field_names(cls) -> list[str]:
        return [f.name for f in fields(cls)]
