"""Minibatch Adam training loop.

One epoch walks the training segments in a seeded shuffled order, slicing
batches of batch_size rows (the final short batch is kept, not dropped),
and applies an Adam update after each batch.  After every epoch the loss
and accuracy of both the full training and the held-out test set are
recorded; a metrics CSV and a checkpoint are written at the end.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass

import numpy as np

from .checkpoint import save_checkpoint
from .errors import HarLstmError
from .lstm import LstmParams, NetConfig, dataset_metrics, init_params, loss_and_grads

log = logging.getLogger("har_lstm.training")


class TrainingError(HarLstmError):
    pass


@dataclass(frozen=True)
class TrainConfig:
    epochs: int = 500
    batch_size: int = 1024
    learning_rate: float = 0.0025
    l2_coeff: float = 0.0015
    beta1: float = 0.9
    beta2: float = 0.999
    epsilon: float = 1e-8
    seed: int = 42
    shuffle: bool = True
    log_every: int = 10
    checkpoint_path: str | None = None
    metrics_path: str | None = None
    checkpoint_every_log: bool = False

    def __post_init__(self):
        if self.epochs < 1:
            raise ValueError(f"epochs must be >= 1, got {self.epochs}")
        if self.batch_size < 1:
            raise ValueError(f"batch_size must be >= 1, got {self.batch_size}")
        if not (math.isfinite(self.learning_rate) and self.learning_rate > 0):
            raise ValueError(f"learning_rate must be finite and > 0, got {self.learning_rate}")
        if not (math.isfinite(self.l2_coeff) and self.l2_coeff >= 0):
            raise ValueError(f"l2_coeff must be finite and >= 0, got {self.l2_coeff}")
        for name in ("beta1", "beta2"):
            b = getattr(self, name)
            if not (0.0 <= b < 1.0):
                raise ValueError(f"{name} must be in [0, 1), got {b}")
        if not self.epsilon > 0:
            raise ValueError(f"epsilon must be > 0, got {self.epsilon}")
        if self.log_every < 1:
            raise ValueError(f"log_every must be >= 1, got {self.log_every}")


@dataclass
class AdamState:
    """First and second moment estimates plus the shared step counter."""

    m: LstmParams
    v: LstmParams
    t: int = 0

    @classmethod
    def init(cls, cfg: NetConfig) -> "AdamState":
        return cls(m=LstmParams.zeros(cfg), v=LstmParams.zeros(cfg))


def adam_step(state: AdamState, params: LstmParams, grads: LstmParams,
              cfg: TrainConfig) -> None:
    """One in-place Adam update across every parameter array.

    m <- b1*m + (1-b1)*g;  v <- b2*v + (1-b2)*g^2;  t <- t+1;
    w <- w - lr * (m / (1-b1^t)) / (sqrt(v / (1-b2^t)) + eps).
    With b1 = b2 = 0 this collapses to w -= lr * g / (|g| + eps).
    """
    state.t += 1
    b1, b2 = cfg.beta1, cfg.beta2
    bias1 = 1.0 - b1 ** state.t
    bias2 = 1.0 - b2 ** state.t
    for (name, g), (_, w), (_, m), (_, v) in zip(
            grads.arrays(), params.arrays(), state.m.arrays(), state.v.arrays()):
        if not np.isfinite(g).all():
            raise TrainingError(f"non-finite gradient in {name} at optimizer step {state.t}")
        m *= b1
        m += (1.0 - b1) * g
        v *= b2
        v += (1.0 - b2) * (g * g)
        w -= cfg.learning_rate * (m / bias1) / (np.sqrt(v / bias2) + cfg.epsilon)


@dataclass(frozen=True)
class EpochMetrics:
    epoch: int
    train_loss: float
    train_accuracy: float
    test_loss: float
    test_accuracy: float


def write_metrics_csv(path, history: list[EpochMetrics]) -> None:
    with open(path, "w") as fh:
        fh.write("epoch,train_loss,train_acc,test_loss,test_acc\n")
        for em in history:
            fh.write(f"{em.epoch},{em.train_loss:.6g},{em.train_accuracy:.6g},"
                     f"{em.test_loss:.6g},{em.test_accuracy:.6g}\n")


def _check_set(name: str, data: np.ndarray, onehot: np.ndarray, cfg: NetConfig) -> None:
    if data.shape[0] < 1:
        raise TrainingError(f"{name} set is empty")
    if data.shape[1:] != (cfg.time_steps, cfg.features):
        raise TrainingError(
            f"{name} set shape {data.shape} does not match network "
            f"({cfg.time_steps} steps x {cfg.features} features)")
    if onehot.shape != (data.shape[0], cfg.classes):
        raise TrainingError(f"{name} labels shape {onehot.shape} does not match")


def train(net_cfg: NetConfig, train_cfg: TrainConfig,
          train_data: np.ndarray, train_onehot: np.ndarray,
          test_data: np.ndarray, test_onehot: np.ndarray,
          params: LstmParams | None = None):
    """Train from scratch (or from given params); returns (params, history).

    The same train_cfg.seed pins the weight init and every shuffle, so two
    runs with identical inputs produce bit-identical parameters.
    """
    _check_set("train", train_data, train_onehot, net_cfg)
    _check_set("test", test_data, test_onehot, net_cfg)

    root = np.random.SeedSequence(train_cfg.seed)
    init_seq, shuffle_seq = root.spawn(2)
    if params is None:
        params = init_params(net_cfg, init_seq)
    shuffle_rng = np.random.default_rng(shuffle_seq)

    state = AdamState.init(net_cfg)
    n = train_data.shape[0]
    history: list[EpochMetrics] = []
    recent: list[float] = []

    for epoch in range(train_cfg.epochs):
        order = shuffle_rng.permutation(n) if train_cfg.shuffle else np.arange(n)
        for start in range(0, n, train_cfg.batch_size):
            idx = order[start:start + train_cfg.batch_size]
            loss, _, grads = loss_and_grads(
                params, train_data[idx], train_onehot[idx], train_cfg.l2_coeff)
            if not math.isfinite(loss):
                tail = ", ".join(f"{v:.6g}" for v in recent[-8:])
                raise TrainingError(
                    f"non-finite training loss at epoch {epoch}, batch row {start}; "
                    f"recent batch losses: [{tail}]")
            recent.append(loss)
            adam_step(state, params, grads, train_cfg)

        tr_loss, tr_acc = dataset_metrics(params, train_data, train_onehot, train_cfg.l2_coeff)
        te_loss, te_acc = dataset_metrics(params, test_data, test_onehot, train_cfg.l2_coeff)
        history.append(EpochMetrics(epoch, tr_loss, tr_acc, te_loss, te_acc))

        if epoch % train_cfg.log_every == 0 or epoch == train_cfg.epochs - 1:
            log.info("epoch: %d: loss: %.6g, train accuracy: %.6g, test accuracy: %.6g",
                     epoch, tr_loss, tr_acc, te_acc)
            if train_cfg.checkpoint_every_log and train_cfg.checkpoint_path:
                save_checkpoint(train_cfg.checkpoint_path, params, init_seed=train_cfg.seed)

    if train_cfg.checkpoint_path:
        save_checkpoint(train_cfg.checkpoint_path, params, init_seed=train_cfg.seed)
    if train_cfg.metrics_path:
        write_metrics_csv(train_cfg.metrics_path, history)
    return params, history
