"""The 2-h-2 perceptron: forward pass, residuals, analytic Jacobian and
parameter-vector plumbing, plus a text snapshot format for trained models."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.special import expit

from .data import Scaler


class SnapshotError(Exception):
    """Unreadable or incompatible model snapshot."""


def param_count(h: int) -> int:
    """Total parameters of a 2-h-2 net: h*2 + h + 2*h + 2."""
    return 5 * h + 2


def hidden_size_from_len(n: int) -> int:
    h, rem = divmod(n - 2, 5)
    if rem != 0 or h < 1:
        raise ValueError(f"parameter vector length {n} does not match any 2-h-2 net")
    return h


@dataclass(frozen=True)
class MlpParams:
    """Weights of a 2-inputs, h-hidden, 2-outputs perceptron."""

    w1: np.ndarray  # (h, 2)
    b1: np.ndarray  # (h,)
    w2: np.ndarray  # (2, h)
    b2: np.ndarray  # (2,)

    def __post_init__(self):
        h = self.w1.shape[0]
        if self.w1.shape != (h, 2) or self.b1.shape != (h,):
            raise ValueError("inconsistent hidden layer shapes")
        if self.w2.shape != (2, h) or self.b2.shape != (2,):
            raise ValueError("inconsistent output layer shapes")
        for block in (self.w1, self.b1, self.w2, self.b2):
            if not np.all(np.isfinite(block)):
                raise ValueError("non-finite parameter entries")

    @property
    def hidden_size(self) -> int:
        return self.w1.shape[0]

    @property
    def n_params(self) -> int:
        return param_count(self.hidden_size)


def flatten(p: MlpParams) -> np.ndarray:
    """Parameter vector: w1 row-major, b1, w2 row-major, b2."""
    return np.concatenate([p.w1.ravel(), p.b1, p.w2.ravel(), p.b2])


def unflatten(theta: np.ndarray, h: int) -> MlpParams:
    theta = np.asarray(theta, dtype=float)
    if theta.shape != (param_count(h),):
        raise ValueError(f"expected length {param_count(h)} for h={h}, got {theta.shape}")
    w1 = theta[: 2 * h].reshape(h, 2)
    b1 = theta[2 * h : 3 * h]
    w2 = theta[3 * h : 5 * h].reshape(2, h)
    b2 = theta[5 * h :]
    return MlpParams(w1.copy(), b1.copy(), w2.copy(), b2.copy())


def sigmoid(x):
    """Logistic function 1/(1+exp(-x)), numerically stable at both tails."""
    return expit(x)


def forward(p: MlpParams, x: np.ndarray) -> np.ndarray:
    """Network output in scaled space; x is a 2-vector or an (N, 2) batch."""
    x = np.asarray(x, dtype=float)
    single = x.ndim == 1
    xb = x.reshape(-1, 2)
    a = sigmoid(xb @ p.w1.T + p.b1)
    y = a @ p.w2.T + p.b2
    return y[0] if single else y


def residuals(p: MlpParams, x: np.ndarray, y: np.ndarray) -> np.ndarray:
    """target - prediction, interleaved (sigma, eps) per sample; length 2N."""
    pred = forward(p, np.asarray(x, dtype=float).reshape(-1, 2))
    return (np.asarray(y, dtype=float).reshape(-1, 2) - pred).ravel()


def jacobian(p: MlpParams, x: np.ndarray) -> np.ndarray:
    """d residual / d theta, shape (2N, 5h+2).

    Residual rows follow the interleaved ordering of residuals(); the sign is
    -d prediction / d theta since residuals are target - prediction.
    """
    x = np.asarray(x, dtype=float).reshape(-1, 2)
    n = x.shape[0]
    h = p.hidden_size
    a = sigmoid(x @ p.w1.T + p.b1)  # (n, h)
    sp = a * (1.0 - a)  # sigmoid'(z), (n, h)

    # dpred[c]/dz[j] = w2[c,j] * sp[j]
    t = p.w2[None, :, :] * sp[:, None, :]  # (n, 2, h)

    d_w1 = (t[:, :, :, None] * x[:, None, None, :]).reshape(n, 2, 2 * h)
    d_b1 = t
    d_w2 = np.zeros((n, 2, 2, h))
    d_w2[:, 0, 0, :] = a
    d_w2[:, 1, 1, :] = a
    d_b2 = np.broadcast_to(np.eye(2), (n, 2, 2))

    d_pred = np.concatenate(
        [d_w1, d_b1, d_w2.reshape(n, 2, 2 * h), d_b2], axis=2
    )  # (n, 2, P)
    return -d_pred.reshape(2 * n, param_count(h))


SNAPSHOT_VERSION = "tensilenet-snapshot-1"


def _fmt(values) -> str:
    return " ".join(format(float(v), ".17g") for v in np.asarray(values).ravel())


def save_snapshot(path, p: MlpParams, scaler: Scaler) -> None:
    """Write a versioned text snapshot sufficient to reproduce predictions."""
    h = p.hidden_size
    lines = [
        SNAPSHOT_VERSION,
        f"h {h}",
        "w1 " + _fmt(p.w1),
        "b1 " + _fmt(p.b1),
        "w2 " + _fmt(p.w2),
        "b2 " + _fmt(p.b2),
        "x_min " + _fmt(scaler.x_min),
        "x_max " + _fmt(scaler.x_max),
        "y_min " + _fmt(scaler.y_min),
        "y_max " + _fmt(scaler.y_max),
    ]
    with open(path, "w", encoding="utf-8", newline="\n") as f:
        f.write("\n".join(lines) + "\n")


def load_snapshot(path) -> tuple[MlpParams, Scaler]:
    with open(path, "r", encoding="utf-8") as f:
        lines = [ln.strip() for ln in f if ln.strip()]
    if not lines or lines[0] != SNAPSHOT_VERSION:
        head = lines[0] if lines else "<empty>"
        raise SnapshotError(f"unsupported snapshot version: {head!r}")
    fields: dict[str, str] = {}
    for ln in lines[1:]:
        key, _, rest = ln.partition(" ")
        fields[key] = rest
    try:
        h = int(fields["h"])
        blocks = {
            k: np.array([float(v) for v in fields[k].split()])
            for k in ("w1", "b1", "w2", "b2", "x_min", "x_max", "y_min", "y_max")
        }
        params = MlpParams(
            blocks["w1"].reshape(h, 2),
            blocks["b1"],
            blocks["w2"].reshape(2, h),
            blocks["b2"],
        )
        scaler = Scaler(
            x_min=blocks["x_min"],
            x_max=blocks["x_max"],
            y_min=blocks["y_min"],
            y_max=blocks["y_max"],
        )
    except (KeyError, ValueError) as e:
        raise SnapshotError(f"corrupt snapshot: {e}") from None
    return params, scaler
