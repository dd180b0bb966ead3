"""Training, inference and checkpointing for the LSTM tag-state detector."""
from __future__ import annotations

import json
import logging
from dataclasses import asdict, dataclass, replace

import numpy as np

from ..channel import draw_channel, synthesize_frame
from ..coding import BackscatterFrame, diff_decode, random_frame
from ..config import SystemConfig
from ..rng import substream
from .features import frame_features
from .lstm import PARAM_NAMES, LstmModel, backward, cross_entropy, forward, init_model, predict_proba
from .optim import AdamState, adam_step

log = logging.getLogger(__name__)

CHECKPOINT_VERSION = 1


@dataclass(frozen=True)
class TrainConfig:
    hidden: int = 64  # desk-scale; any width works
    lr: float = 1e-3
    beta1: float = 0.9
    beta2: float = 0.999
    eps: float = 1e-8
    epochs: int = 4
    batch_size: int = 64
    clip_norm: float | None = 1.0  # global gradient-norm ceiling; None disables
    lr_decay: float = 0.5  # epoch e trains at lr * lr_decay**(e - 1)
    val_fraction: float = 0.05  # held out to pick the best epoch; 0 keeps the last
    seed: int = 0

    def __post_init__(self):
        if not self.lr > 0:
            raise ValueError("learning rate must be positive")
        if not (0 < self.beta1 < 1 and 0 < self.beta2 < 1):
            raise ValueError("Adam betas must lie in (0, 1)")
        if self.hidden < 1 or self.epochs < 0 or self.batch_size < 1:
            raise ValueError("hidden, epochs and batch_size must be positive")
        if not 0 < self.lr_decay <= 1:
            raise ValueError("lr_decay must lie in (0, 1]")
        if not 0 <= self.val_fraction < 1:
            raise ValueError("val_fraction must lie in [0, 1)")


@dataclass(frozen=True)
class EpochLog:
    epoch: int
    loss: float
    accuracy: float
    val_loss: float = float("nan")
    val_accuracy: float = float("nan")


def clip_gradients(grads: dict, max_norm: float) -> float:
    """Scale ``grads`` in place so their joint L2 norm is at most ``max_norm``."""
    norm = float(np.sqrt(sum(np.sum(g * g) for g in grads.values())))
    if norm > max_norm:
        for g in grads.values():
            g *= max_norm / norm
    return norm


def split_validation(n: int, fraction: float, seed: int) -> tuple[np.ndarray, np.ndarray]:
    """Disjoint ``(train, validation)`` index arrays; validation may be empty."""
    k = int(n * fraction)
    order = substream(seed, 2).permutation(n)
    return np.sort(order[k:]), np.sort(order[:k])


def train(X, y, cfg: TrainConfig = TrainConfig(), model: LstmModel | None = None):
    """Fit an LSTM classifier by minibatch Adam on the mean cross-entropy.

    Returns ``(model, history)``.  ``history[0]`` holds the loss of the
    untrained model on the first batch.  With a validation split the returned
    parameters are those of the epoch with the lowest validation loss.
    """
    X = np.asarray(X, dtype=float)
    y = np.asarray(y, dtype=int).reshape(-1)
    if len(X) == 0 or len(X) != len(y):
        raise ValueError("dataset is empty or features and labels differ in length")
    tr, va = split_validation(len(X), cfg.val_fraction, cfg.seed)
    if len(np.unique(y[tr])) < 2:
        raise ValueError("training data contains a single class")
    if model is None:
        model = init_model(cfg.hidden, substream(cfg.seed, 0), D=X.shape[2])
    params = model.params()
    state = AdamState()
    order_rng = substream(cfg.seed, 1)
    history = []
    best = (np.inf, None)
    t = 0
    for epoch in range(1, cfg.epochs + 1):
        lr = cfg.lr * cfg.lr_decay ** (epoch - 1)
        order = tr[order_rng.permutation(len(tr))]
        losses, correct = [], 0
        for lo in range(0, len(order), cfg.batch_size):
            idx = order[lo:lo + cfg.batch_size]
            probs, cache = forward(model, X[idx])
            loss = cross_entropy(probs, y[idx])
            if t == 0:
                # scored before any update
                history.append(EpochLog(0, loss, float("nan")))
            grads = backward(model, y[idx], cache)
            if cfg.clip_norm is not None:
                clip_gradients(grads, cfg.clip_norm)
            t += 1
            adam_step(params, grads, state, t, lr, cfg.beta1, cfg.beta2, cfg.eps)
            losses.append(loss)
            correct += int(np.sum(np.argmax(probs, axis=1) == y[idx]))
        entry = EpochLog(epoch, float(np.mean(losses)), correct / len(tr))
        if len(va):
            pv = predict_proba(model, X[va])
            entry = replace(entry, val_loss=cross_entropy(pv, y[va]),
                            val_accuracy=float(np.mean(np.argmax(pv, axis=1) == y[va])))
            if entry.val_loss < best[0]:
                best = (entry.val_loss, model.copy())
        history.append(entry)
        log.info("epoch %d lr %.2e loss %.5f acc %.4f val loss %.5f val acc %.4f", epoch, lr, entry.loss,
                 entry.accuracy, entry.val_loss, entry.val_accuracy)
    if best[1] is not None:
        model = best[1]
    return model, history


def generate_dataset(cfg: SystemConfig, frames: int, seed: int, symbols_per_frame: int | None = None,
                     stream: tuple = ()):
    """Labelled features drawn over ``frames`` independent channel realisations.

    Labels are the encoded tag states of data symbols.  ``symbols_per_frame``
    subsamples the data symbols of each frame (all of them by default).
    Frame ``k`` uses ``substream(seed, *stream, k)``.
    """
    X, y = [], []
    for k in range(frames):
        rng = substream(seed, *stream, k)
        frame, block = simulate_frame(cfg, rng)
        idx = np.arange(cfg.P, cfg.I)
        if symbols_per_frame is not None and symbols_per_frame < len(idx):
            idx = np.sort(rng.choice(idx, size=symbols_per_frame, replace=False))
        X.append(frame_features(block, frame, idx))
        y.append(frame.encoded[idx])
    return np.concatenate(X), np.concatenate(y).astype(np.int8)


def simulate_frame(cfg: SystemConfig, rng: np.random.Generator):
    """Fresh channel, random data, received block; draw order is fixed."""
    ch = draw_channel(cfg, rng)
    frame = random_frame(cfg.I, cfg.P, rng, cfg.theta0)
    block = synthesize_frame(cfg, ch, frame.encoded, rng)
    return frame, block


def predict_frame(model, block, frame: BackscatterFrame) -> np.ndarray:
    """Decoded data bits; ``model`` needs ``predict(features) -> states``.

    Differential decoding of the data block starts from the known encoded
    value of the last pilot.
    """
    feats = frame_features(block, frame)
    e_hat = np.asarray(model.predict(feats), dtype=np.int8)
    return diff_decode(e_hat, e0=frame.data_reference)


def save_checkpoint(path, model: LstmModel, train_cfg: TrainConfig | None = None,
                    system_cfg: SystemConfig | None = None, **extra) -> None:
    meta = {
        "version": CHECKPOINT_VERSION,
        "train_config": asdict(train_cfg) if train_cfg else None,
        "system_config": asdict(system_cfg) if system_cfg else None,
        **extra,
    }
    arrays = {k: getattr(model, k) for k in PARAM_NAMES}
    with open(path, "wb") as fh:
        np.savez(fh, H=np.int64(model.H), D=np.int64(model.D), meta=np.array(json.dumps(meta)), **arrays)


def load_checkpoint(path) -> tuple[LstmModel, dict]:
    with np.load(path, allow_pickle=False) as z:
        missing = [k for k in PARAM_NAMES + ("H", "D", "meta") if k not in z.files]
        if missing:
            raise ValueError(f"checkpoint {path} is missing {missing}")
        model = LstmModel(**{k: z[k].astype(float) for k in PARAM_NAMES})
        if model.H != int(z["H"]) or model.D != int(z["D"]):
            raise ValueError(f"checkpoint {path} declares H={int(z['H'])}, D={int(z['D'])} "
                             f"but tensors imply H={model.H}, D={model.D}")
        meta = json.loads(str(z["meta"]))
    return model, meta
