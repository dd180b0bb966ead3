"""Experiment specifications, sweep parameters and the flat config-file format.

Config files are ``key = value`` lines (``#`` comments allowed).  SNR-type
keys carry a ``_db`` suffix and are converted to linear scale here, once.
Recognised keys: the system keys in :data:`SYSTEM_KEYS` plus ``kind``,
``sweep`` (``name=v1,v2,...``), ``trials``, ``realizations``, ``grid_step``,
``out``, ``detector``, ``checkpoint``, ``train_log``, ``workers``,
``hidden``, ``epochs``, ``batch_size``, ``lr``, ``clip_norm``, ``lr_decay``,
``val_fraction`` and ``symbols_per_frame``.
"""
from __future__ import annotations

import configparser
from dataclasses import dataclass, field, replace

from ..capacity import theta_grid
from ..config import SystemConfig, db_to_linear
from ..dl.detector import TrainConfig

KINDS = ("rate-vs-theta0", "rate-vs-snr", "ber-vs-snr", "ber-vs-backscatter-snr",
         "ber-vs-N", "train-dl", "eval-dl")
RATE_KINDS = ("rate-vs-theta0", "rate-vs-snr")
BER_KINDS = ("ber-vs-snr", "ber-vs-backscatter-snr", "ber-vs-N", "eval-dl")

# boundary name -> (SystemConfig field, converter)
SYSTEM_KEYS = {
    "M": ("M", int),
    "N": ("N", int),
    "I": ("I", int),
    "P": ("P", int),
    "theta0": ("theta0", float),
    "alpha_tr_db": ("alpha_tr", db_to_linear),
    "alpha_jr_db": ("alpha_jr", db_to_linear),
    "alpha_t_rel_db": ("alpha_t_rel", db_to_linear),
    "alpha_j_rel_db": ("alpha_j_rel", db_to_linear),
    "seed": ("seed", int),
}
SWEEPABLE = tuple(k for k in SYSTEM_KEYS if k != "seed")

DEFAULT_TRIALS = {
    "rate-vs-theta0": 10_000,  # Monte-Carlo samples per channel realisation
    "rate-vs-snr": 10_000,
    "ber-vs-snr": 10_000,  # frames per point
    "ber-vs-backscatter-snr": 10_000,
    "ber-vs-N": 10_000,
    "train-dl": 10_000,  # training frames
    "eval-dl": 10_000,
}


class SpecError(ValueError):
    pass


def _convert(key: str, value):
    if key not in SYSTEM_KEYS:
        raise SpecError(f"unknown parameter {key!r}; valid names: {', '.join(SYSTEM_KEYS)}")
    name, conv = SYSTEM_KEYS[key]
    try:
        return name, conv(value)
    except ValueError as exc:
        raise SpecError(f"bad value for {key}: {value!r}") from exc


def apply_system_key(cfg: SystemConfig, key: str, value) -> SystemConfig:
    name, val = _convert(key, value)
    try:
        return cfg.with_(**{name: val})
    except ValueError as exc:
        raise SpecError(str(exc)) from exc


def parse_sweep(text: str) -> tuple[str, tuple[float, ...]]:
    """``"alpha_jr_db=1,2,3"`` -> ``("alpha_jr_db", (1.0, 2.0, 3.0))``."""
    if "=" not in text:
        raise SpecError(f"sweep must look like name=v1,v2,...; got {text!r}")
    name, vals = text.split("=", 1)
    name = name.strip()
    if name not in SWEEPABLE:
        raise SpecError(f"unknown swept parameter {name!r}; valid names: {', '.join(SWEEPABLE)}")
    try:
        values = tuple(float(v) for v in vals.split(",") if v.strip())
    except ValueError as exc:
        raise SpecError(f"bad sweep values in {text!r}") from exc
    if not values:
        raise SpecError("sweep needs at least one value")
    return name, values


def default_sweep(kind: str) -> tuple[str, tuple[float, ...]]:
    if kind == "rate-vs-theta0":
        return "theta0", tuple(float(t) for t in theta_grid(0.01))
    if kind in ("rate-vs-snr", "ber-vs-snr"):
        return "alpha_jr_db", tuple(float(v) for v in range(1, 11))
    if kind == "ber-vs-backscatter-snr":
        return "alpha_j_rel_db", tuple(float(v) for v in range(-20, -9, 2))
    if kind == "ber-vs-N":
        return "N", (1.0, 10.0, 25.0, 50.0, 100.0)
    return "", ()


@dataclass(frozen=True)
class ExperimentSpec:
    kind: str
    system: SystemConfig = field(default_factory=SystemConfig)
    sweep_name: str = ""
    sweep_values: tuple = ()
    trials: int | None = None
    realizations: int = 100
    grid_step: float = 0.01
    out: str | None = None
    detector: str = "ml"
    checkpoint: str | None = None
    train_log: str | None = None
    train: TrainConfig = field(default_factory=TrainConfig)
    symbols_per_frame: int | None = 10
    workers: int = 1

    def __post_init__(self):
        if self.kind not in KINDS:
            raise SpecError(f"unknown experiment kind {self.kind!r}; valid kinds: {', '.join(KINDS)}")
        if self.sweep_name and self.sweep_name not in SWEEPABLE:
            raise SpecError(f"unknown swept parameter {self.sweep_name!r}; valid names: {', '.join(SWEEPABLE)}")
        if self.trials is not None and self.trials < 1:
            raise SpecError("trials must be >= 1")
        if self.realizations < 1:
            raise SpecError("realizations must be >= 1")
        if self.kind in RATE_KINDS and self.sweep_name in ("N", "I", "P"):
            raise SpecError("rates are only defined for a spreading factor of 1; "
                            f"sweeping {self.sweep_name} is unsupported")
        if self.kind == "rate-vs-theta0" and self.sweep_name not in ("", "theta0"):
            raise SpecError("rate-vs-theta0 sweeps theta0 only")
        if self.kind != "rate-vs-theta0" and self.sweep_name == "theta0" and self.kind in RATE_KINDS:
            raise SpecError("use rate-vs-theta0 to sweep the prior")
        if self.detector not in ("ml", "dl"):
            raise SpecError("detector must be 'ml' or 'dl'")
        if (self.detector == "dl" or self.kind == "eval-dl") and self.kind in BER_KINDS and not self.checkpoint:
            raise SpecError("the dl detector needs --checkpoint")
        if self.kind == "train-dl" and not self.checkpoint:
            raise SpecError("training needs a checkpoint output path")
        if self.workers < 1:
            raise SpecError("workers must be >= 1")

    @property
    def seed(self) -> int:
        return self.system.seed

    @property
    def n_trials(self) -> int:
        return self.trials if self.trials is not None else DEFAULT_TRIALS[self.kind]

    @property
    def points(self) -> list[tuple[float, SystemConfig]]:
        """``(swept value, config)`` per sweep point; one unswept point if empty."""
        if not self.sweep_name:
            return [(float("nan"), self.system)]
        if self.sweep_name == "theta0" and self.kind == "rate-vs-theta0":
            return [(v, self.system) for v in self.sweep_values]
        return [(v, apply_system_key(self.system, self.sweep_name, v)) for v in self.sweep_values]

    def with_defaults(self) -> "ExperimentSpec":
        if self.sweep_name or self.kind in ("train-dl", "eval-dl"):
            return self
        name, values = default_sweep(self.kind)
        return replace(self, sweep_name=name, sweep_values=values)


def read_config_file(path) -> dict[str, str]:
    cp = configparser.ConfigParser(interpolation=None, inline_comment_prefixes=("#",))
    cp.optionxform = str  # keys are case-sensitive (M vs m)
    with open(path) as fh:
        cp.read_string("[run]\n" + fh.read(), source=str(path))
    return dict(cp["run"])


_TRAIN_KEYS = {"hidden": int, "epochs": int, "batch_size": int, "lr": float, "clip_norm": float,
               "lr_decay": float, "val_fraction": float}


def build_spec(kind: str | None, values: dict) -> ExperimentSpec:
    """Assemble a spec from flat string values (config file merged with CLI flags)."""
    values = {k: v for k, v in values.items() if v is not None}
    kind = values.pop("kind", None) or kind
    if kind is None:
        raise SpecError("no experiment kind given")
    system_kw = {}
    train_kw = {}
    spec_kw: dict = {}
    for key, val in values.items():
        if key in SYSTEM_KEYS:
            name, v = _convert(key, val)
            system_kw[name] = v
        elif key in _TRAIN_KEYS:
            train_kw[key] = _TRAIN_KEYS[key](val)
        elif key == "sweep":
            spec_kw["sweep_name"], spec_kw["sweep_values"] = parse_sweep(str(val))
        elif key in ("trials", "realizations", "workers", "symbols_per_frame"):
            spec_kw[key] = int(val)
        elif key == "grid_step":
            spec_kw[key] = float(val)
        elif key in ("out", "detector", "checkpoint", "train_log"):
            spec_kw[key] = str(val)
        else:
            raise SpecError(f"unknown configuration key {key!r}")
    try:
        system = SystemConfig(**system_kw)
        train_kw.setdefault("seed", system.seed)
        train_cfg = TrainConfig(**train_kw)
    except (TypeError, ValueError) as exc:
        raise SpecError(str(exc)) from exc
    return ExperimentSpec(kind=kind, system=system, train=train_cfg, **spec_kw).with_defaults()

