"""Single-layer LSTM classifier with a dense + softmax head, written against numpy.

Gate rows of ``W`` (4H x D), ``R`` (4H x H) and ``b`` (4H) are stacked in the
order input, forget, cell candidate, output.  Sequences are batched as
``(B, T, D)``; the final hidden state feeds a 2-way dense layer.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.special import expit

PARAM_NAMES = ("W", "R", "b", "V", "c")


@dataclass
class LstmModel:
    W: np.ndarray
    R: np.ndarray
    b: np.ndarray
    V: np.ndarray  # dense weights, (2, H)
    c: np.ndarray  # dense bias, (2,)

    def __post_init__(self):
        H4, D = self.W.shape
        H = H4 // 4
        expected = {"W": (4 * H, D), "R": (4 * H, H), "b": (4 * H,), "V": (2, H), "c": (2,)}
        for k, shape in expected.items():
            arr = getattr(self, k)
            if arr.shape != shape or H4 % 4:
                raise ValueError(f"{k} has shape {arr.shape}, expected {shape}")
            if not np.all(np.isfinite(arr)):
                raise ValueError(f"{k} contains non-finite values")

    @property
    def H(self) -> int:
        return self.R.shape[1]

    @property
    def D(self) -> int:
        return self.W.shape[1]

    def params(self) -> dict:
        return {k: getattr(self, k) for k in PARAM_NAMES}

    def copy(self) -> "LstmModel":
        return LstmModel(**{k: v.copy() for k, v in self.params().items()})

    def predict(self, X) -> np.ndarray:
        return np.argmax(predict_proba(self, X), axis=1).astype(np.int8)

    @classmethod
    def zeros(cls, H: int, D: int = 3) -> "LstmModel":
        return cls(np.zeros((4 * H, D)), np.zeros((4 * H, H)), np.zeros(4 * H),
                   np.zeros((2, H)), np.zeros(2))


def glorot_uniform(shape, rng: np.random.Generator) -> np.ndarray:
    fan_out, fan_in = shape
    lim = np.sqrt(6.0 / (fan_in + fan_out))
    return rng.uniform(-lim, lim, size=shape)


def init_model(H: int, rng: np.random.Generator, D: int = 3) -> LstmModel:
    """Glorot-uniform weights, zero biases."""
    return LstmModel(
        W=glorot_uniform((4 * H, D), rng),
        R=glorot_uniform((4 * H, H), rng),
        b=np.zeros(4 * H),
        V=glorot_uniform((2, H), rng),
        c=np.zeros(2),
    )


def softmax(z: np.ndarray) -> np.ndarray:
    z = z - z.max(axis=-1, keepdims=True)
    ez = np.exp(z)
    return ez / ez.sum(axis=-1, keepdims=True)


def _as_batch(X) -> np.ndarray:
    X = np.asarray(X, dtype=float)
    return X[None] if X.ndim == 2 else X


def _check_finite(a, where):
    if not np.all(np.isfinite(a)):
        raise FloatingPointError(f"non-finite activation in {where}")


def forward(model: LstmModel, X):
    """Batched forward pass. Returns ``(probs (B, 2), cache)``."""
    X = _as_batch(X)
    B, T, D = X.shape
    if D != model.D:
        raise ValueError(f"feature dimension {D} does not match model input size {model.D}")
    H = model.H
    Zx = X @ model.W.T + model.b
    acts = np.empty((T, B, 4 * H))
    s = np.zeros((T + 1, B, H))
    w = np.zeros((T + 1, B, H))
    ts = np.empty((T, B, H))
    RT = model.R.T
    for t in range(T):
        z = Zx[:, t] + w[t] @ RT
        a = acts[t]
        a[:, :2 * H] = expit(z[:, :2 * H])
        a[:, 2 * H:3 * H] = np.tanh(z[:, 2 * H:3 * H])
        a[:, 3 * H:] = expit(z[:, 3 * H:])
        s[t + 1] = a[:, H:2 * H] * s[t] + a[:, :H] * a[:, 2 * H:3 * H]
        ts[t] = np.tanh(s[t + 1])
        w[t + 1] = a[:, 3 * H:] * ts[t]
    logits = w[T] @ model.V.T + model.c
    _check_finite(logits, "LSTM forward")
    probs = softmax(logits)
    cache = {"X": X, "acts": acts, "s": s, "w": w, "ts": ts, "logits": logits, "probs": probs}
    return probs, cache


def predict_proba(model: LstmModel, X, chunk: int = 4096) -> np.ndarray:
    """Forward pass without keeping activations, processed in chunks."""
    X = _as_batch(X)
    H = model.H
    out = np.empty((len(X), 2))
    RT = model.R.T
    WT = model.W.T
    for lo in range(0, len(X), chunk):
        Xc = X[lo:lo + chunk]
        B, T, _ = Xc.shape
        s = np.zeros((B, H))
        w = np.zeros((B, H))
        for t in range(T):
            z = Xc[:, t] @ WT
            z += model.b
            z += w @ RT
            sig = expit(z[:, :2 * H])
            g = np.tanh(z[:, 2 * H:3 * H])
            o = expit(z[:, 3 * H:])
            s *= sig[:, H:]
            s += sig[:, :H] * g
            w = o * np.tanh(s)
        logits = w @ model.V.T + model.c
        _check_finite(logits, "LSTM forward")
        out[lo:lo + chunk] = softmax(logits)
    return out


def cross_entropy(probs: np.ndarray, labels) -> float:
    labels = np.asarray(labels, dtype=int).reshape(-1)
    p = probs[np.arange(len(labels)), labels]
    return float(-np.mean(np.log(np.maximum(p, 1e-300))))


def backward(model: LstmModel, labels, cache) -> dict:
    """Gradients of the mean cross-entropy w.r.t. every parameter (BPTT)."""
    X, acts, s, w, ts, probs = (cache[k] for k in ("X", "acts", "s", "w", "ts", "probs"))
    T, B, H4 = acts.shape
    H = H4 // 4
    labels = np.asarray(labels, dtype=int).reshape(-1)
    if len(labels) != B or X.shape[:2] != (B, T) or H != model.H:
        raise ValueError("cache does not match model or labels")

    dlogits = probs.copy()
    dlogits[np.arange(B), labels] -= 1.0
    dlogits /= B
    grads = {"V": dlogits.T @ w[T], "c": dlogits.sum(axis=0)}

    dZ = np.empty((T, B, 4 * H))
    dw = dlogits @ model.V
    ds = np.zeros((B, H))
    R = model.R
    for t in range(T - 1, -1, -1):
        a = acts[t]
        i, f, g, o = a[:, :H], a[:, H:2 * H], a[:, 2 * H:3 * H], a[:, 3 * H:]
        ds += dw * o * (1.0 - ts[t] ** 2)
        dz = dZ[t]
        dz[:, :H] = ds * g * i * (1.0 - i)
        dz[:, H:2 * H] = ds * s[t] * f * (1.0 - f)
        dz[:, 2 * H:3 * H] = ds * i * (1.0 - g * g)
        dz[:, 3 * H:] = dw * ts[t] * o * (1.0 - o)
        ds = ds * f
        dw = dz @ R
    flatZ = dZ.reshape(T * B, 4 * H)
    grads["W"] = flatZ.T @ X.transpose(1, 0, 2).reshape(T * B, -1)
    grads["R"] = flatZ.T @ w[:T].reshape(T * B, H)
    grads["b"] = flatZ.sum(axis=0)
    return grads


def lstm_forward(model: LstmModel, seq):
    """Class probabilities for one ``(T, D)`` sequence, plus the activation cache."""
    probs, cache = forward(model, np.asarray(seq)[None])
    return probs[0], cache


def lstm_backward(model: LstmModel, seq, label: int, cache) -> dict:
    if cache["X"].shape[0] != 1 or not np.array_equal(cache["X"][0], np.asarray(seq, dtype=float)):
        raise ValueError("cache was produced for a different sequence")
    return backward(model, [label], cache)
