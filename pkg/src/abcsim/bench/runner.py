"""Experiment runners producing tidy result rows.

Random streams, all under the spec's master seed:

* rate experiments: channel realisation ``r`` uses ``(RATE_CHANNEL, r)`` and
  its Monte-Carlo draws ``(RATE_MC, r)``;
* BER experiments: frame ``k`` uses ``(EVAL, k)`` for channel, data and noise;
* training: frame ``k`` uses ``(TRAIN, k)``.

Stream ids do not depend on the sweep value, so every sweep point and every
detector sees common random numbers.
"""
from __future__ import annotations

import csv
import logging
import math
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

import numpy as np

from ..capacity import max_backscatter_rate, rate_curve
from ..channel import draw_channel
from ..config import SystemConfig
from ..dl.detector import (generate_dataset, load_checkpoint, predict_frame, save_checkpoint,
                           simulate_frame, train)
from ..ml_detector import covariance_matrices, detect_frame
from ..rng import substream
from .spec import BER_KINDS, RATE_KINDS, ExperimentSpec, SpecError

log = logging.getLogger(__name__)

RATE_CHANNEL, RATE_MC, EVAL, TRAIN = 1, 2, 3, 4
CSV_FIELDS = ("swept_name", "swept_value", "metric", "value", "stderr", "trials", "seed", "wall_time_s")


@dataclass(frozen=True)
class ResultRow:
    swept_name: str
    swept_value: float
    metric: str
    value: float
    stderr: float
    trials: int
    seed: int
    wall_time_s: float = 0.0

    def as_tuple(self) -> tuple:
        return tuple(getattr(self, f) for f in CSV_FIELDS)


def write_csv(rows, dest) -> None:
    """Write rows to a path or an open text stream."""
    if hasattr(dest, "write"):
        _write_rows(rows, dest)
        return
    with open(dest, "w", newline="") as fh:
        _write_rows(rows, fh)


def _write_rows(rows, fh) -> None:
    w = csv.writer(fh, lineterminator="\n")
    w.writerow(CSV_FIELDS)
    for r in rows:
        w.writerow([repr(v) if isinstance(v, float) else v for v in r.as_tuple()])


def read_csv(path) -> list[ResultRow]:
    with open(path, newline="") as fh:
        rd = csv.DictReader(fh)
        if tuple(rd.fieldnames or ()) != CSV_FIELDS:
            raise ValueError(f"{path}: unexpected columns {rd.fieldnames}")
        return [ResultRow(d["swept_name"], float(d["swept_value"]), d["metric"], float(d["value"]),
                          float(d["stderr"]), int(d["trials"]), int(d["seed"]), float(d["wall_time_s"]))
                for d in rd]


def _mean_se(x) -> tuple[float, float]:
    x = np.asarray(x, dtype=float)
    se = float(x.std(ddof=1) / math.sqrt(len(x))) if len(x) > 1 else float("nan")
    return float(x.mean()), se


def _map(fn, args, workers: int) -> list:
    """Ordered map; results are reduced by the caller in input order."""
    if workers <= 1:
        return [fn(*a) for a in args]
    with ProcessPoolExecutor(max_workers=workers) as ex:
        return list(ex.map(fn, *zip(*args), chunksize=max(1, len(args) // (4 * workers))))


# rate

def _rate_pair(cfg: SystemConfig, seed: int, r: int):
    return covariance_matrices(draw_channel(cfg, substream(seed, RATE_CHANNEL, r)), cfg)


def _rate_curve_job(cfg, seed, r, thetas, samples):
    return rate_curve(_rate_pair(cfg, seed, r), thetas, samples, substream(seed, RATE_MC, r))[0]


def _max_rate_job(cfg, seed, r, samples, grid_step):
    est = max_backscatter_rate(_rate_pair(cfg, seed, r), samples, grid_step, substream(seed, RATE_MC, r))
    return est.rate_bits, est.theta0_star


def run_rate_experiment(spec: ExperimentSpec) -> list[ResultRow]:
    """Channel-averaged mutual information (bits per RF symbol, N = 1).

    ``rate-vs-theta0`` reports the averaged curve; ``rate-vs-snr`` reports the
    mean over realisations of each realisation's maximum rate and the mean
    maximising prior.  Standard errors are across realisations.
    """
    if spec.kind not in RATE_KINDS:
        raise SpecError(f"{spec.kind} is not a rate experiment")
    R, S, seed = spec.realizations, spec.n_trials, spec.seed
    rows = []
    if spec.kind == "rate-vs-theta0":
        t0 = time.perf_counter()
        cfg = spec.system.with_(N=1)
        thetas = np.asarray(spec.sweep_values, dtype=float)
        curves = np.array(_map(_rate_curve_job, [(cfg, seed, r, thetas, S) for r in range(R)], spec.workers))
        wall = time.perf_counter() - t0
        for j, t in enumerate(thetas):
            m, se = _mean_se(curves[:, j])
            rows.append(ResultRow("theta0", float(t), "mutual_information_bits", m, se, S, seed, wall))
        return rows
    for value, cfg in spec.points:
        t0 = time.perf_counter()
        cfg = cfg.with_(N=1)
        res = np.array(_map(_max_rate_job, [(cfg, seed, r, S, spec.grid_step) for r in range(R)], spec.workers))
        wall = time.perf_counter() - t0
        m, se = _mean_se(res[:, 0])
        rows.append(ResultRow(spec.sweep_name, value, "max_rate_bits", m, se, S, seed, wall))
        m, se = _mean_se(res[:, 1])
        rows.append(ResultRow(spec.sweep_name, value, "theta0_star", m, se, S, seed, wall))
        log.info("%s=%g rate %.4f", spec.sweep_name, value, rows[-2].value)
    return rows


# BER

def _frame_errors(cfg: SystemConfig, seed: int, k: int, model) -> int:
    frame, block = simulate_frame(cfg, substream(seed, EVAL, k))
    if model is None:
        bits = detect_frame(block, covariance_matrices(block.channel, cfg))[cfg.P:]
    else:
        bits = predict_frame(model, block, frame)
    return int(np.count_nonzero(bits != frame.data_bits))


def frame_error_counts(cfg: SystemConfig, seed: int, frames: int, model=None, workers: int = 1) -> np.ndarray:
    """Data-bit errors per held-out frame; ``model=None`` selects the ML detector."""
    return np.array(_map(_frame_errors, [(cfg, seed, k, model) for k in range(frames)], workers))


def run_ber_experiment(spec: ExperimentSpec, model=None) -> list[ResultRow]:
    """BER of the data bits and the resulting bits per RF symbol per sweep point."""
    if spec.kind not in BER_KINDS:
        raise SpecError(f"{spec.kind} is not a BER experiment")
    use_dl = spec.detector == "dl" or spec.kind == "eval-dl"
    if use_dl and model is None:
        model, _ = load_checkpoint(spec.checkpoint)
    F, seed = spec.n_trials, spec.seed
    name = spec.sweep_name or "none"
    rows = []
    for value, cfg in spec.points:
        t0 = time.perf_counter()
        per_frame = frame_error_counts(cfg, seed, F, model if use_dl else None, spec.workers) / (cfg.I - cfg.P)
        wall = time.perf_counter() - t0
        ber, se = _mean_se(per_frame)
        scale = (cfg.I - cfg.P) / (cfg.I * cfg.N)
        rows.append(ResultRow(name, value, "ber", ber, se, F, seed, wall))
        rows.append(ResultRow(name, value, "bits_per_rf_symbol", (1.0 - ber) * scale, se * scale, F, seed, wall))
        log.info("%s=%g ber %.5f", name, value, ber)
    return rows


# training

def run_training(spec: ExperimentSpec):
    """Train the recurrent detector; writes the checkpoint and an epoch log CSV.

    Returns ``(model, history)``.
    """
    if spec.kind != "train-dl":
        raise SpecError(f"{spec.kind} is not a training run")
    cfg = spec.system
    t0 = time.perf_counter()
    X, y = generate_dataset(cfg, spec.n_trials, spec.seed, spec.symbols_per_frame, stream=(TRAIN,))
    log.info("dataset %s in %.1fs, class-1 share %.4f", X.shape, time.perf_counter() - t0, y.mean())
    model, history = train(X, y, spec.train)
    save_checkpoint(spec.checkpoint, model, spec.train, cfg, frames=spec.n_trials,
                    symbols_per_frame=spec.symbols_per_frame)
    if spec.train_log:
        with open(spec.train_log, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(("epoch", "loss", "accuracy", "val_loss", "val_accuracy"))
            for h in history:
                w.writerow((h.epoch, repr(h.loss), repr(h.accuracy), repr(h.val_loss), repr(h.val_accuracy)))
    return model, history


def run(spec: ExperimentSpec, model=None):
    """Dispatch on ``spec.kind``; returns result rows (empty for training)."""
    if spec.kind in RATE_KINDS:
        return run_rate_experiment(spec)
    if spec.kind in BER_KINDS:
        return run_ber_experiment(spec, model)
    run_training(spec)
    return []


def describe(spec: ExperimentSpec) -> str:
    """Human-readable resolved configuration, trial counts and seed schedule."""
    cfg = spec.system
    lines = [f"kind: {spec.kind}", "system:"]
    for key in cfg.field_names():
        v = getattr(cfg, key)
        if key.startswith("alpha"):
            lines.append(f"  {key} = {v:.4f} ({10 * math.log10(v):.2f} dB)")
        else:
            lines.append(f"  {key} = {v}")
    lines.append(f"  alpha_tb = {cfg.alpha_tb:.6g}")
    lines.append(f"  alpha_jb = {cfg.alpha_jb:.6g}")
    if spec.sweep_name:
        lines.append(f"sweep: {spec.sweep_name} = {', '.join(f'{v:g}' for v in spec.sweep_values)}")
    if spec.kind in RATE_KINDS:
        lines.append(f"trials: {spec.n_trials} Monte-Carlo samples x {spec.realizations} realisations per point "
                     f"(grid step {spec.grid_step}, N forced to 1)")
        lines.append(f"streams: channel ({spec.seed}, {RATE_CHANNEL}, r), draws ({spec.seed}, {RATE_MC}, r)")
    elif spec.kind == "train-dl":
        lines.append(f"trials: {spec.n_trials} training frames, {spec.symbols_per_frame or cfg.I - cfg.P} "
                     f"data symbols each")
        lines.append(f"train: {spec.train}")
        lines.append(f"streams: frame ({spec.seed}, {TRAIN}, k)")
    else:
        det = "dl" if spec.detector == "dl" or spec.kind == "eval-dl" else "ml"
        lines.append(f"trials: {spec.n_trials} frames per point, detector {det}")
        lines.append(f"streams: frame ({spec.seed}, {EVAL}, k)")
    if spec.checkpoint:
        lines.append(f"checkpoint: {spec.checkpoint}")
    if spec.out:
        lines.append(f"out: {spec.out}")
    return "\n".join(lines)

