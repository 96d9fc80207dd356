"""Classical comparison models: linear/RBF Gram matrices for the SMO solver and a small MLP."""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .exceptions import ContractError

GAMMA_GRID = (0.01, 0.1, 1.0, 10.0)
HIDDEN_PRESETS = (0, 50, 100)
SAMPLE_PRESETS = (5_000, 50_000)


def _pair(X, Y):
    X = np.atleast_2d(np.asarray(X, dtype=float))
    Y = X if Y is None else np.atleast_2d(np.asarray(Y, dtype=float))
    if X.shape[1] != Y.shape[1]:
        raise ContractError(f"feature lengths differ: {X.shape[1]} vs {Y.shape[1]}")
    return X, Y


def linear_kernel(X, Y=None) -> np.ndarray:
    """Dot-product Gram; with ``Y`` given, rows are ``Y`` and columns ``X``."""
    X, Y = _pair(X, Y)
    return Y @ X.T


def rbf_kernel(X, Y=None, gamma: float = 1.0) -> np.ndarray:
    """``exp(-gamma |x - y|^2)``; the self-Gram has an exact unit diagonal."""
    if not gamma > 0:
        raise ContractError(f"gamma must be positive, got {gamma}")
    self_gram = Y is None
    X, Y = _pair(X, Y)
    sq = np.sum((Y[:, None, :] - X[None, :, :]) ** 2, axis=-1)
    k = np.exp(-gamma * sq)
    if self_gram:
        k = 0.5 * (k + k.T)
        np.fill_diagonal(k, 1.0)
    return k


def default_gamma(X) -> float:
    """``1 / (d * var(X))``, falling back to ``1 / d`` for constant features."""
    X = np.asarray(X, dtype=float)
    var = X.var()
    return 1.0 / (X.shape[1] * var) if var > 0 else 1.0 / X.shape[1]


# -- feedforward network ------------------------------------------------------


@dataclass(frozen=True)
class MlpConfig:
    n_hidden: int = 50
    epochs: int = 200
    learning_rate: float = 0.01
    seed: int = 0
    batch_size: int = 32

    def __post_init__(self):
        if self.n_hidden < 0 or self.epochs < 1 or self.batch_size < 1:
            raise ContractError("n_hidden >= 0, epochs >= 1 and batch_size >= 1 are required")
        if not self.learning_rate > 0:
            raise ContractError(f"learning rate must be positive, got {self.learning_rate}")


@dataclass
class MlpModel:
    """Weights as ``[(W, b), ...]`` from input to the single sigmoid output."""

    layers: list
    loss_trace: list = field(default_factory=list)

    def to_dict(self) -> dict:
        return {
            "layers": [{"W": w.tolist(), "b": b.tolist()} for w, b in self.layers],
            "loss_trace": [float(v) for v in self.loss_trace],
        }


def _sigmoid(z):
    return 0.5 * (1.0 + np.tanh(0.5 * z))


def init_layers(n_in: int, n_hidden: int, rng: np.random.Generator) -> list:
    sizes = [n_in, n_hidden, 1] if n_hidden else [n_in, 1]
    layers = []
    for fan_in, fan_out in zip(sizes[:-1], sizes[1:]):
        bound = 1.0 / np.sqrt(fan_in)
        layers.append((rng.uniform(-bound, bound, (fan_in, fan_out)), rng.uniform(-bound, bound, fan_out)))
    return layers


def forward_logits(layers, X) -> np.ndarray:
    h = np.asarray(X, dtype=float)
    for w, b in layers[:-1]:
        h = _sigmoid(h @ w + b)
    w, b = layers[-1]
    return (h @ w + b)[:, 0]


def loss_and_grad(layers, X, y01):
    """Mean binary cross-entropy and its gradient with respect to every weight."""
    X = np.asarray(X, dtype=float)
    y01 = np.asarray(y01, dtype=float)
    acts = [X]
    for w, b in layers[:-1]:
        acts.append(_sigmoid(acts[-1] @ w + b))
    w_out, b_out = layers[-1]
    z = (acts[-1] @ w_out + b_out)[:, 0]
    n = len(X)
    loss = float(np.mean(np.logaddexp(0.0, z) - y01 * z))

    delta = ((_sigmoid(z) - y01) / n)[:, None]
    grads = [None] * len(layers)
    for k in range(len(layers) - 1, -1, -1):
        w, _ = layers[k]
        grads[k] = (acts[k].T @ delta, delta.sum(axis=0))
        if k:
            a = acts[k]
            delta = (delta @ w.T) * a * (1 - a)
    return loss, grads


def mlp_train(X, y01, cfg: MlpConfig) -> MlpModel:
    """Mini-batch gradient descent on binary cross-entropy, reshuffled every epoch."""
    X = np.asarray(X, dtype=float)
    y01 = np.asarray(y01, dtype=float)
    if len(X) != len(y01) or len(X) < 1:
        raise ContractError("need matching, non-empty X and labels")
    if not np.all(np.isin(y01, (0, 1))):
        raise ContractError("MLP labels must be 0/1")
    rng = np.random.default_rng(cfg.seed)
    layers = init_layers(X.shape[1], cfg.n_hidden, rng)
    trace = []
    for epoch in range(cfg.epochs):
        order = rng.permutation(len(X))
        for start in range(0, len(X), cfg.batch_size):
            idx = order[start:start + cfg.batch_size]
            _, grads = loss_and_grad(layers, X[idx], y01[idx])
            layers = [(w - cfg.learning_rate * gw, b - cfg.learning_rate * gb)
                      for (w, b), (gw, gb) in zip(layers, grads)]
        loss, _ = loss_and_grad(layers, X, y01)
        if not np.isfinite(loss) or not all(np.all(np.isfinite(w)) for w, _ in layers):
            raise FloatingPointError(
                f"training loss became {loss} at epoch {epoch}; learning rate {cfg.learning_rate} is too high"
            )
        trace.append(loss)
    return MlpModel(layers, trace)


def mlp_predict(model: MlpModel, X):
    """Return ``(probabilities, labels)``; label is +1 only when probability exceeds 0.5."""
    proba = _sigmoid(forward_logits(model.layers, X))
    return proba, np.where(proba > 0.5, 1, -1)
