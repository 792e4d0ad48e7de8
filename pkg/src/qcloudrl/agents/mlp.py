"""Classical multilayer-perceptron baseline with hand-rolled backprop.

Default shape 8 -> 64 -> 64 -> 64 -> 5 with tanh hidden activations: 9,221
trainable parameters. Gradients are plain reverse-mode matmuls, checked
against finite differences in the tests.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..errors import DimensionError

DEFAULT_SIZES = (8, 64, 64, 64, 5)


@dataclass
class MlpModel:
    """Feed-forward network; weights[i] has shape (fan_in, fan_out)."""

    weights: list[np.ndarray]
    biases: list[np.ndarray]

    @property
    def sizes(self) -> tuple[int, ...]:
        return tuple([self.weights[0].shape[0]] + [w.shape[1] for w in self.weights])

    def count_parameters(self) -> int:
        return sum(w.size for w in self.weights) + sum(b.size for b in self.biases)

    def as_dict(self) -> dict[str, np.ndarray]:
        out = {}
        for i, (w, b) in enumerate(zip(self.weights, self.biases)):
            out[f"W{i}"] = w.copy()
            out[f"b{i}"] = b.copy()
        return out

    @staticmethod
    def from_dict(d: dict[str, np.ndarray]) -> "MlpModel":
        n_layers = len(d) // 2
        return MlpModel(
            weights=[np.asarray(d[f"W{i}"], dtype=float) for i in range(n_layers)],
            biases=[np.asarray(d[f"b{i}"], dtype=float) for i in range(n_layers)],
        )


def init_mlp(rng: np.random.Generator, sizes: tuple[int, ...] = DEFAULT_SIZES) -> MlpModel:
    """Uniform Xavier/Glorot initialization; biases start at zero."""
    weights, biases = [], []
    for fan_in, fan_out in zip(sizes[:-1], sizes[1:]):
        bound = np.sqrt(6.0 / (fan_in + fan_out))
        weights.append(rng.uniform(-bound, bound, size=(fan_in, fan_out)))
        biases.append(np.zeros(fan_out))
    return MlpModel(weights, biases)


def mlp_forward(model: MlpModel, x: np.ndarray) -> np.ndarray:
    """Logits for a single observation."""
    return mlp_forward_batch(model, np.asarray(x, dtype=float)[None, :])[0][0]


def mlp_forward_batch(model: MlpModel, xs: np.ndarray):
    """Batched forward pass; returns (logits, activation cache for backprop)."""
    xs = np.asarray(xs, dtype=float)
    if xs.ndim != 2 or xs.shape[1] != model.weights[0].shape[0]:
        raise DimensionError(
            f"input batch has shape {xs.shape}, expected (*, {model.weights[0].shape[0]})"
        )
    activations = [xs]
    h = xs
    last = len(model.weights) - 1
    for i, (w, b) in enumerate(zip(model.weights, model.biases)):
        z = h @ w + b
        h = z if i == last else np.tanh(z)
        activations.append(h)
    return h, activations


def mlp_backward(model: MlpModel, activations: list[np.ndarray], d_logits: np.ndarray) -> dict[str, np.ndarray]:
    """Gradients of sum(loss over batch) given d loss/d logits."""
    grads: dict[str, np.ndarray] = {}
    delta = np.asarray(d_logits, dtype=float)
    for i in range(len(model.weights) - 1, -1, -1):
        grads[f"W{i}"] = activations[i].T @ delta
        grads[f"b{i}"] = delta.sum(axis=0)
        if i > 0:
            # tanh'(z) = 1 - tanh(z)^2 and activations[i] stores tanh(z)
            delta = (delta @ model.weights[i].T) * (1.0 - activations[i] ** 2)
    return grads
