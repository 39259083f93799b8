"""Minibatch SGD with momentum over consistent-rank batches."""

import math
import time
from dataclasses import dataclass

import numpy as np

from ..array_sim import manifold_matrix
from ..errors import ConfigError, TrainingDiverged
from ..grassmann import DISTANCE_KINDS
from . import losses
from .inference import mean_distance
from .network import scm_features
from .sampling import consistent_rank_batches, uniform_batches

LOSS_MODES = {
    "subspace": "gram",
    "fro_gram": "gram",
    "aff_gram": "gram",
    "squ_toeplitz": "toeplitz",
    "e2e": "angles",
}


@dataclass
class TrainingConfig:
    batch_size: int = 256
    epochs: int = 20
    lr: float = 0.01
    momentum: float = 0.5
    nesterov: bool = True
    schedule: str = "constant"
    seed: int = 0
    loss: str = "subspace"
    distance: str = "geodesic"
    delta: float = 1e-4
    consistent_rank: bool = True

    def __post_init__(self):
        if self.batch_size < 1:
            raise ConfigError("batch_size must be >= 1")
        if not 0.0 <= self.momentum < 1.0:
            raise ConfigError("momentum must lie in [0, 1)")
        if self.loss not in LOSS_MODES:
            raise ConfigError(f"unknown loss {self.loss!r}; expected one of {sorted(LOSS_MODES)}")
        if self.distance not in DISTANCE_KINDS:
            raise ConfigError(f"unknown distance {self.distance!r}")
        if self.loss == "aff_gram" and not self.delta > 0:
            raise ConfigError("delta must be positive for the affine-invariant loss")
        if self.schedule not in ("constant", "onecycle"):
            raise ConfigError("schedule must be 'constant' or 'onecycle'")
        if self.lr < 0 or self.epochs < 0:
            raise ConfigError("lr and epochs must be non-negative")


def lr_at(config, step, total_steps):
    """Learning rate for ``step`` (0-based) of ``total_steps``."""
    if config.schedule == "constant" or total_steps <= 1:
        return config.lr
    # one-cycle: cosine warm-up over 30% of steps, cosine anneal afterwards
    start, end = config.lr / 25.0, config.lr / 25.0 / 1e4
    warm = max(1, int(0.3 * total_steps))
    if step < warm:
        t = step / warm
        return start + (config.lr - start) * (1 - math.cos(math.pi * t)) / 2
    t = (step - warm) / max(1, total_steps - 1 - warm)
    return end + (config.lr - end) * (1 + math.cos(math.pi * t)) / 2


class Objective:
    """Per-batch loss and gradient w.r.t. the raw network output."""

    def __init__(self, config, geom):
        self.config = config
        self.geom = geom

    def __call__(self, model, raw, batch):
        cfg = self.config
        out = model.decode(raw)
        if cfg.loss == "subspace":
            T = np.stack([r.target for r in batch])
            loss, grad, _ = losses.subspace_loss_and_grad(out, T, cfg.distance)
        elif cfg.loss in ("fro_gram", "aff_gram"):
            A = [manifold_matrix(self.geom, r.theta) for r in batch]
            R0 = np.stack([a @ a.conj().T for a in A])
            if cfg.loss == "fro_gram":
                loss, grad = losses.fro_gram_loss_and_grad(out, R0)
            else:
                loss, grad = losses.aff_gram_loss_and_grad(out, R0, cfg.delta)
        elif cfg.loss == "squ_toeplitz":
            v = np.stack([losses.toeplitz_target(self.geom, r.theta) for r in batch])
            loss, grad = losses.squ_toeplitz_loss_and_grad(out, v)
        else:
            k = batch[0].k
            theta_hat = losses.head_projection(out, k)
            loss, g = losses.end_to_end_loss_and_grad(theta_hat, np.stack([r.theta for r in batch]))
            grad = np.zeros_like(out)
            start = k * (k - 1) // 2
            grad[:, start : start + k] = g
        return loss, model.encode_grad(grad)


class SGD:
    """SGD with (optionally Nesterov) momentum, PyTorch update convention."""

    def __init__(self, params, momentum=0.5, nesterov=True):
        self.momentum = momentum
        self.nesterov = nesterov
        self.velocity = [np.zeros_like(p) for p in params]

    def step(self, params, grads, lr):
        mu = self.momentum
        for p, g, v in zip(params, grads, self.velocity):
            v *= mu
            v += g
            p -= lr * (g + mu * v if self.nesterov else v)


def train(model, dataset, config, geom, validation=None, log=None):
    """Fit ``model`` to ``dataset`` records in place.

    Args:
        model: ``Network`` whose mode matches the loss.
        dataset: list of ``DatasetRecord``.
        config: ``TrainingConfig``.
        geom: array geometry (for angle-based targets and validation).
        validation: optional records for the per-epoch subspace distance.
        log: optional callable receiving each epoch's metrics dict.

    Returns:
        (model, history) with one dict per epoch holding ``epoch``,
        ``loss`` (mean training loss), ``val_distance`` and ``wall_time``.

    Raises:
        TrainingDiverged: a batch produced a non-finite loss.
    """
    if LOSS_MODES[config.loss] != model.spec.mode:
        raise ConfigError(f"loss {config.loss!r} needs a {LOSS_MODES[config.loss]!r} model, got {model.spec.mode!r}")
    feats = scm_features(np.stack([r.scm for r in dataset]))
    ks = np.array([r.k for r in dataset])
    objective = Objective(config, geom)
    opt = SGD(model.params, config.momentum, config.nesterov)
    seeds = np.random.SeedSequence(config.seed).spawn(max(config.epochs, 1))

    def batches_for(epoch):
        rng = np.random.default_rng(seeds[epoch])
        if config.consistent_rank:
            return consistent_rank_batches(ks, config.batch_size, rng)
        return uniform_batches(len(dataset), config.batch_size, rng)

    steps_per_epoch = len(batches_for(0)) if config.epochs else 0
    total_steps = steps_per_epoch * config.epochs
    step = 0
    history = []
    for epoch in range(config.epochs):
        t0 = time.perf_counter()
        loss_sum = 0.0
        for b, idx in enumerate(batches_for(epoch)):
            raw, cache = model.forward_batch(feats[idx])
            batch = [dataset[i] for i in idx]
            if config.consistent_rank:
                loss, g = objective(model, raw, batch)
            else:
                loss, g = _mixed_rank(objective, model, raw, batch)
            if not np.all(np.isfinite(loss)) or not np.all(np.isfinite(g)):
                norms = [float(np.linalg.norm(p)) for p in model.params]
                raise TrainingDiverged(f"non-finite loss at epoch {epoch + 1}, batch {b}", b, norms)
            grads = model.backward(cache, g / len(idx))
            opt.step(model.params, grads, lr_at(config, step, total_steps))
            loss_sum += float(np.sum(loss))
            step += 1
        record = {
            "epoch": epoch + 1,
            "loss": loss_sum / len(dataset),
            "val_distance": mean_distance(model, validation, geom) if validation else None,
            "wall_time": time.perf_counter() - t0,
        }
        history.append(record)
        if log is not None:
            log(record)
    return model, history


def _mixed_rank(objective, model, raw, batch):
    """Evaluate a batch of mixed k one stratum at a time."""
    loss = np.empty(len(batch))
    grad = None
    ks = np.array([r.k for r in batch])
    for k in np.unique(ks):
        sel = np.flatnonzero(ks == k)
        l, g = objective(model, raw[sel], [batch[i] for i in sel])
        if grad is None:
            grad = np.zeros((len(batch), g.shape[1]))
        loss[sel], grad[sel] = l, g
    return loss, grad
