"""
Training loop: seeded shuffling, Adam updates, eval-mode validation,
reduce-on-plateau learning rate, early stopping and best-checkpoint tracking.
"""
from __future__ import annotations

import json
import logging
import math
import time
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Callable, List, Optional, Sequence, Set, Tuple, Union

import numpy as np

from .dataset.split import stratified_split
from .models import Dataset
from .nn import Autoencoder, ModelConfig, ModelParams, adam_step, composite_loss
from .quantum.rng import derive_seed, make_rng

logger = logging.getLogger(__name__)

IMPROVEMENT_EPS = 1e-6
DROPOUT_STREAM = 2


class NonFiniteLossError(FloatingPointError):
    """Raised when a batch loss is NaN or Inf."""

    def __init__(self, batch_index: int, epoch: int):
        self.batch_index = batch_index
        self.epoch = epoch
        super().__init__(f"Non-finite loss in epoch {epoch}, batch {batch_index}.")


@dataclass(frozen=True)
class TrainConfig:
    epochs: int = 100
    batch_size: int = 16
    initial_lr: float = 1e-3
    lr_decay_factor: float = 0.5
    plateau_patience_epochs: int = 5
    validation_fraction: float = 0.2
    early_stop_patience: int = 15
    shuffle_seed: int = 0

    def __post_init__(self):
        if self.epochs < 0:
            raise ValueError(f"epochs must be non-negative, got {self.epochs}.")
        for name in ("batch_size", "plateau_patience_epochs", "early_stop_patience"):
            if getattr(self, name) <= 0:
                raise ValueError(f"{name} must be positive, got {getattr(self, name)}.")
        if self.initial_lr <= 0:
            raise ValueError(f"initial_lr must be positive, got {self.initial_lr}.")
        for name in ("lr_decay_factor", "validation_fraction"):
            if not 0.0 < getattr(self, name) < 1.0:
                raise ValueError(f"{name} must lie in (0, 1), got {getattr(self, name)}.")


@dataclass
class EpochLog:
    epoch: int
    train_loss: float
    train_mae: float
    val_loss: float
    val_mae: float
    lr: float
    seconds: float


@dataclass
class TrainResult:
    params: ModelParams
    logs: List[EpochLog] = field(default_factory=list)
    best_params: Optional[ModelParams] = None
    best_epoch: Optional[int] = None
    best_val_loss: float = math.inf
    stopped_early: bool = False


class PlateauScheduler:
    """
    Reduce-on-plateau bookkeeping.

    ``patience`` consecutive non-improving epochs trigger one decay and reset
    the plateau counter; a separate counter, never reset by decays, drives
    early stopping.
    """

    def __init__(self, lr: float, factor: float, patience: int, stop_patience: Optional[int] = None):
        self.lr = lr
        self.factor = factor
        self.patience = patience
        self.stop_patience = stop_patience
        self.best = math.inf
        self.bad_epochs = 0
        self.stagnant_epochs = 0

    def step(self, val_loss: float) -> bool:
        """Records one epoch's validation loss; returns True when it is a new best."""
        if val_loss < self.best - IMPROVEMENT_EPS:
            self.best = val_loss
            self.bad_epochs = 0
            self.stagnant_epochs = 0
            return True
        self.bad_epochs += 1
        self.stagnant_epochs += 1
        if self.bad_epochs >= self.patience:
            self.lr *= self.factor
            self.bad_epochs = 0
            logger.info("Validation loss stalled for %d epochs; learning rate now %.4e.", self.patience, self.lr)
        return False

    @property
    def should_stop(self) -> bool:
        return self.stop_patience is not None and self.stagnant_epochs >= self.stop_patience


def evaluate_loss(
    model: Autoencoder, x: np.ndarray, y: np.ndarray, batch_size: int = 64
) -> Tuple[float, float]:
    """Eval-mode composite loss and MAE over a whole subset."""
    if len(x) == 0:
        raise ValueError("Cannot evaluate on an empty subset.")
    lam = model.config.lam
    sq_sum = abs_sum = fid_loss_sum = 0.0
    for i in range(0, len(x), batch_size):
        pred = model.forward(x[i:i + batch_size])
        target = y[i:i + batch_size]
        diff = pred - target
        sq_sum += float(np.sum(diff * diff))
        abs_sum += float(np.sum(np.abs(diff)))
        if lam:
            batch_loss, _ = composite_loss(pred, target, lam)
            fid_loss_sum += (batch_loss - float(np.mean(diff * diff))) * len(pred)
    total = y.size
    return sq_sum / total + fid_loss_sum / len(x), abs_sum / total


class Trainer:
    """Runs one training sequence; params are mutated in place by Adam."""

    def __init__(
        self,
        model_config: ModelConfig,
        config: TrainConfig,
        log_path: Optional[Union[str, Path]] = None,
        on_epoch_end: Optional[Callable[[EpochLog], None]] = None,
    ):
        self.model_config = model_config
        self.config = config
        self.log_path = Path(log_path) if log_path else None
        self.on_epoch_end = on_epoch_end
        self.gradient_indices: Set[int] = set()
        self.validation_indices: Set[int] = set()

    def fit(
        self,
        params: ModelParams,
        x_train: np.ndarray,
        y_train: np.ndarray,
        x_val: np.ndarray,
        y_val: np.ndarray,
        train_ids: Optional[Sequence[int]] = None,
    ) -> TrainResult:
        """
        Trains on ``(x_train, y_train)`` and validates on ``(x_val, y_val)``.

        ``train_ids`` maps rows of ``x_train`` to dataset indices for the
        gradient bookkeeping; it defaults to the row numbers.
        """
        cfg = self.config
        result = TrainResult(params=params)
        if cfg.epochs == 0:
            return result
        if len(x_train) == 0 or len(x_val) == 0:
            raise ValueError("Training and validation sets must be non-empty.")
        ids = list(train_ids) if train_ids is not None else list(range(len(x_train)))

        model = Autoencoder(self.model_config, params)
        shuffle_rng = make_rng(cfg.shuffle_seed)
        dropout_rng = make_rng(derive_seed(cfg.shuffle_seed, DROPOUT_STREAM))
        stop_patience = cfg.early_stop_patience if cfg.epochs > cfg.early_stop_patience else None
        scheduler = PlateauScheduler(cfg.initial_lr, cfg.lr_decay_factor, cfg.plateau_patience_epochs, stop_patience)
        log_file = self.log_path.open("w", encoding="utf-8") if self.log_path else None
        try:
            for epoch in range(cfg.epochs):
                started = time.perf_counter()
                lr = scheduler.lr
                order = shuffle_rng.permutation(len(x_train))
                loss_sum = abs_sum = 0.0
                for batch_index, start in enumerate(range(0, len(order), cfg.batch_size)):
                    rows = order[start:start + cfg.batch_size]
                    self.gradient_indices.update(ids[r] for r in rows)
                    params.zero_grad()
                    pred = model.forward(x_train[rows], train_mode=True, rng=dropout_rng)
                    loss, dy = composite_loss(pred, y_train[rows], self.model_config.lam)
                    if not math.isfinite(loss):
                        raise NonFiniteLossError(batch_index, epoch)
                    adam_step(params, model.backward(dy), lr)
                    loss_sum += loss * len(rows)
                    abs_sum += float(np.sum(np.abs(pred - y_train[rows])))
                    logger.debug("Epoch %d batch %d loss %.6f", epoch, batch_index, loss)

                val_loss, val_mae = evaluate_loss(model, x_val, y_val, cfg.batch_size)
                entry = EpochLog(
                    epoch=epoch,
                    train_loss=loss_sum / len(x_train),
                    train_mae=abs_sum / y_train.size,
                    val_loss=val_loss,
                    val_mae=val_mae,
                    lr=lr,
                    seconds=time.perf_counter() - started,
                )
                result.logs.append(entry)
                if log_file:
                    log_file.write(json.dumps(asdict(entry)) + "\n")
                    log_file.flush()
                if self.on_epoch_end:
                    self.on_epoch_end(entry)
                logger.info(
                    "Epoch %d/%d - loss: %.4f - mae: %.4f - val_loss: %.4f - val_mae: %.4f - lr: %.4e",
                    epoch + 1, cfg.epochs, entry.train_loss, entry.train_mae, val_loss, val_mae, lr,
                )

                if scheduler.step(val_loss):
                    result.best_params = params.copy()
                    result.best_epoch = epoch
                    result.best_val_loss = val_loss
                if scheduler.should_stop:
                    logger.info("Early stopping after %d stagnant epochs.", scheduler.stagnant_epochs)
                    result.stopped_early = True
                    break
        finally:
            if log_file:
                log_file.close()
        return result


def train(
    params: ModelParams,
    model_config: ModelConfig,
    dataset: Dataset,
    train_indices: Sequence[int],
    config: TrainConfig,
    log_path: Optional[Union[str, Path]] = None,
) -> Tuple[Trainer, TrainResult]:
    """
    Carves a stratified validation split out of ``train_indices`` only, then
    trains on the remainder (noisy inputs, clean targets).
    """
    if not train_indices:
        raise ValueError("Training set is empty.")
    train_indices = list(train_indices)
    cells = [dataset.records[i].cell for i in train_indices]
    fit_pos, val_pos = stratified_split(cells, config.validation_fraction, config.shuffle_seed)
    fit_ids = [train_indices[p] for p in fit_pos]
    val_ids = [train_indices[p] for p in val_pos]
    logger.info("Training on %d samples, validating on %d.", len(fit_ids), len(val_ids))

    trainer = Trainer(model_config, config, log_path)
    trainer.validation_indices = set(val_ids)
    result = trainer.fit(
        params,
        dataset.channels(fit_ids, "noisy"),
        dataset.channels(fit_ids, "clean"),
        dataset.channels(val_ids, "noisy"),
        dataset.channels(val_ids, "clean"),
        train_ids=fit_ids,
    )
    if trainer.gradient_indices & trainer.validation_indices:
        raise AssertionError("Validation samples leaked into gradient batches.")
    return trainer, result
