"""Seeded SGD training for the two model kinds.

Plain SGD with momentum 0.9.  Classifiers minimize cross-entropy and the
backward pass is seeded at the softmax input with (p - onehot), the
fused form; regressors minimize mean squared error through the tanh
head.  Given the same TrainConfig (including rng seed) two runs produce
bit-identical parameters.
"""

from dataclasses import dataclass, field

import numpy as np

from .layers import Softmax
from .tensor import FLOAT


class TrainingFailure(RuntimeError):
    """Loss became non-finite during training."""


@dataclass
class TrainConfig:
    epochs: int = 4
    batch_size: int = 64
    learning_rate: float = 0.05
    momentum: float = 0.9
    rng_seed: int = 0
    target_accuracy: float = 0.97

    def __post_init__(self):
        if self.epochs < 1:
            raise ValueError("epochs must be >= 1")
        if self.learning_rate <= 0:
            raise ValueError("learning rate must be > 0")


@dataclass
class Dataset:
    """Inputs as float32 in [0, 1]; targets are class ids or scalars."""

    x: np.ndarray
    y: np.ndarray

    def __post_init__(self):
        if len(self.x) != len(self.y):
            raise ValueError("inputs and targets differ in length")
        if len(self.x) == 0:
            raise ValueError("dataset is empty")
        self.x = np.asarray(self.x, dtype=FLOAT)

    def __len__(self):
        return len(self.x)


@dataclass
class TrainReport:
    epoch_losses: list = field(default_factory=list)
    train_accuracy: float = float("nan")
    test_accuracy: float = float("nan")
    train_mae: float = float("nan")
    test_mae: float = float("nan")


def _classifier_batch_grad(net, xb, yb):
    out, caches = net.forward_tape(xb)
    b = xb.shape[0]
    probs = np.clip(out, 1e-12, None)
    loss = -np.log(probs[np.arange(b), yb]).mean()
    onehot = np.zeros_like(out)
    onehot[np.arange(b), yb] = 1.0
    seed = (out - onehot) / b
    # skip the softmax layer itself: seed is already d loss / d logits
    assert isinstance(net.layers[-1], Softmax)
    g = seed
    grads = [None] * len(net.layers)
    for i in range(len(net.layers) - 2, -1, -1):
        g, layer_grads = net.layers[i].backward(caches[i], g)
        grads[i] = layer_grads
    return loss, grads


def _regressor_batch_grad(net, xb, yb):
    out, caches = net.forward_tape(xb)
    diff = out[:, 0] - yb
    loss = float(np.mean(diff * diff))
    seed = np.zeros_like(out)
    seed[:, 0] = 2.0 * diff / xb.shape[0]
    g = seed
    grads = [None] * len(net.layers)
    for i in range(len(net.layers) - 1, -1, -1):
        g, layer_grads = net.layers[i].backward(caches[i], g)
        grads[i] = layer_grads
    return loss, grads


def classifier_accuracy(net, data, batch=256):
    hits = 0
    for lo in range(0, len(data), batch):
        out = net.forward(data.x[lo : lo + batch])
        hits += int((out.argmax(axis=1) == data.y[lo : lo + batch]).sum())
    return hits / len(data)


def regressor_mae(net, data, batch=256):
    err = 0.0
    for lo in range(0, len(data), batch):
        out = net.forward(data.x[lo : lo + batch])
        err += float(np.abs(out[:, 0] - data.y[lo : lo + batch]).sum())
    return err / len(data)


def train(net, train_data, cfg, test_data=None):
    """Fit ``net`` in place; returns a TrainReport.

    Final train/test quality is also recorded in ``net.metadata``.
    """
    rng = np.random.default_rng(cfg.rng_seed)
    velocity = [np.zeros_like(p) for p in net.parameters()]
    batch_grad = (
        _classifier_batch_grad if net.kind == "classifier" else _regressor_batch_grad
    )
    yb_dtype = np.int64 if net.kind == "classifier" else FLOAT
    y = np.asarray(train_data.y, dtype=yb_dtype)
    report = TrainReport()

    for _ in range(cfg.epochs):
        order = rng.permutation(len(train_data))
        epoch_loss = 0.0
        nb = 0
        for lo in range(0, len(train_data), cfg.batch_size):
            sel = order[lo : lo + cfg.batch_size]
            loss, grads = batch_grad(net, train_data.x[sel], y[sel])
            if not np.isfinite(loss):
                raise TrainingFailure(f"loss diverged to {loss}")
            epoch_loss += loss
            nb += 1
            k = 0
            for layer, layer_grads in zip(net.layers, grads):
                if not layer.params:
                    continue
                for p, g in zip(layer.params, layer_grads):
                    velocity[k] = cfg.momentum * velocity[k] - cfg.learning_rate * g
                    p += velocity[k]
                    k += 1
        report.epoch_losses.append(epoch_loss / max(nb, 1))

    if net.kind == "classifier":
        report.train_accuracy = classifier_accuracy(net, train_data)
        net.metadata["train_accuracy"] = f"{report.train_accuracy:.6f}"
        if test_data is not None:
            report.test_accuracy = classifier_accuracy(net, test_data)
            net.metadata["test_accuracy"] = f"{report.test_accuracy:.6f}"
    else:
        report.train_mae = regressor_mae(net, train_data)
        net.metadata["train_mae"] = f"{report.train_mae:.6f}"
        if test_data is not None:
            report.test_mae = regressor_mae(net, test_data)
            net.metadata["test_mae"] = f"{report.test_mae:.6f}"
    return report
