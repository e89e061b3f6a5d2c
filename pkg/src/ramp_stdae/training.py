"""Training loops for both stages.

Stage one fits the reconstruction model: mainline windows in, ramp patches
out, MAE summed over both branches. Stage two freezes the encoders and fits
the forecaster on normalized MAE. Both loops keep the best weights by
validation loss, write a per-epoch CSV log, and raise TrainingError the
moment a loss goes non-finite so a diverged run never overwrites the last
good checkpoint.
"""

from __future__ import annotations

import csv
import math
import time
from dataclasses import dataclass
from pathlib import Path

import numpy as np
import torch

from ramp_stdae.dataset import Normalizer, SampleSet
from ramp_stdae.embedding import patchify
from ramp_stdae.predictor import RampForecaster, save_forecaster
from ramp_stdae.stdae import STDAE, reconstruction_loss, save_stdae

LOG_COLUMNS = ("epoch", "train_loss", "val_loss", "wall_sec")


@dataclass
class TrainConfig:
    """Optimizer and schedule settings shared by both stages."""

    lr: float = 0.002
    batch_size: int = 16
    epochs: int = 50
    patience: int = 10
    grad_clip: float = 5.0
    seed: int = 0
    lr_schedule: str = "none"  # "cosine" anneals to zero over the epoch budget

    def __post_init__(self):
        if self.lr_schedule not in ("none", "cosine"):
            raise ValueError(f"unknown lr_schedule {self.lr_schedule!r}")


def _scheduler(opt: torch.optim.Optimizer, cfg: "TrainConfig"):
    if cfg.lr_schedule == "cosine":
        return torch.optim.lr_scheduler.CosineAnnealingLR(opt, T_max=cfg.epochs)
    return None


class TrainingError(RuntimeError):
    """A loss went non-finite; the last good checkpoint was retained."""


def seed_everything(seed: int) -> np.random.Generator:
    """Seed torch and return a numpy generator for batch shuffling."""
    torch.manual_seed(seed)
    return np.random.default_rng(seed)


class _EpochLog:
    """Accumulates epoch rows and mirrors them to a CSV file if given."""

    def __init__(self, path: str | Path | None):
        self.rows: list[dict] = []
        self._path = Path(path) if path is not None else None
        if self._path is not None:
            self._path.parent.mkdir(parents=True, exist_ok=True)
            with self._path.open("w", newline="", encoding="utf-8") as f:
                csv.writer(f).writerow(LOG_COLUMNS)

    def add(self, epoch: int, train_loss: float, val_loss: float, wall_sec: float) -> None:
        row = {
            "epoch": epoch,
            "train_loss": train_loss,
            "val_loss": val_loss,
            "wall_sec": wall_sec,
        }
        self.rows.append(row)
        if self._path is not None:
            with self._path.open("a", newline="", encoding="utf-8") as f:
                csv.writer(f).writerow([row[c] for c in LOG_COLUMNS])


def _check_finite(value: float, stage: str, epoch: int) -> None:
    if not math.isfinite(value):
        raise TrainingError(
            f"{stage} loss became non-finite at epoch {epoch}; "
            "best checkpoint so far was kept"
        )


def _batches(n: int, batch_size: int, rng: np.random.Generator):
    order = rng.permutation(n)
    for lo in range(0, n, batch_size):
        yield order[lo:lo + batch_size]


def pretrain(
    model: STDAE,
    train_samples: SampleSet,
    val_samples: SampleSet,
    cfg: TrainConfig,
    out_dir: str | Path | None = None,
    log_path: str | Path | None = None,
) -> dict:
    """Fit the reconstruction model; keep the best-validation checkpoint.

    Sample sets must hold normalized values; long_targets supply the ramp
    series the decoders reconstruct.
    """
    rng = seed_everything(cfg.seed)
    opt = torch.optim.Adam(model.parameters(), lr=cfg.lr)
    sched = _scheduler(opt, cfg)
    patch_len = model.cfg.patch_len

    y_train = torch.as_tensor(
        patchify(train_samples.long_targets, patch_len), dtype=torch.float32
    )
    x_train = torch.as_tensor(train_samples.long_inputs, dtype=torch.float32)
    y_val = torch.as_tensor(
        patchify(val_samples.long_targets, patch_len), dtype=torch.float32
    )
    x_val = torch.as_tensor(val_samples.long_inputs, dtype=torch.float32)

    log = _EpochLog(log_path)
    best_val = math.inf
    best_epoch = 0
    best_state = None
    stale = 0
    start = time.perf_counter()
    for epoch in range(1, cfg.epochs + 1):
        model.train()
        train_losses = []
        for idx in _batches(len(train_samples), cfg.batch_size, rng):
            opt.zero_grad()
            ys, yt = model(x_train[idx])
            loss = reconstruction_loss(ys, yt, y_train[idx])
            _check_finite(loss.item(), "pretraining", epoch)
            loss.backward()
            torch.nn.utils.clip_grad_norm_(model.parameters(), cfg.grad_clip)
            opt.step()
            train_losses.append(loss.item())

        model.eval()
        with torch.no_grad():
            val_losses = []
            for lo in range(0, len(val_samples), cfg.batch_size):
                sl = slice(lo, lo + cfg.batch_size)
                ys, yt = model(x_val[sl])
                val_losses.append(reconstruction_loss(ys, yt, y_val[sl]).item())
        val_loss = float(np.mean(val_losses))
        _check_finite(val_loss, "pretraining validation", epoch)
        log.add(epoch, float(np.mean(train_losses)), val_loss, time.perf_counter() - start)
        if sched is not None:
            sched.step()

        if val_loss < best_val:
            best_val = val_loss
            best_epoch = epoch
            best_state = {k: v.detach().clone() for k, v in model.state_dict().items()}
            stale = 0
            if out_dir is not None:
                save_stdae(model, out_dir)
        else:
            stale += 1
            if stale >= cfg.patience:
                break

    if best_state is not None:
        model.load_state_dict(best_state)
    return {"history": log.rows, "best_epoch": best_epoch, "best_val": best_val}


def _frozen_latents(stdae: STDAE | None, x_long: torch.Tensor):
    if stdae is None:
        return None, None
    with torch.no_grad():
        return stdae.encode(x_long)


def train_downstream(
    model: RampForecaster,
    stdae: STDAE | None,
    train_samples: SampleSet,
    val_samples: SampleSet,
    cfg: TrainConfig,
    normalizer: Normalizer,
    out_dir: str | Path | None = None,
    log_path: str | Path | None = None,
    pretrain_dir: str | Path | None = None,
) -> dict:
    """Fit the forecaster on normalized MAE with encoders frozen.

    Passing stdae=None trains the bare predictor (the no-fusion arm);
    otherwise the encoders run in eval mode with gradients detached.
    """
    rng = seed_everything(cfg.seed)
    if stdae is not None:
        stdae.eval()
        for p in stdae.parameters():
            p.requires_grad_(False)
    opt = torch.optim.Adam(model.parameters(), lr=cfg.lr)
    sched = _scheduler(opt, cfg)

    x_train = torch.as_tensor(train_samples.inputs, dtype=torch.float32)
    xl_train = torch.as_tensor(train_samples.long_inputs, dtype=torch.float32)
    y_train = torch.as_tensor(train_samples.targets, dtype=torch.float32)
    x_val = torch.as_tensor(val_samples.inputs, dtype=torch.float32)
    xl_val = torch.as_tensor(val_samples.long_inputs, dtype=torch.float32)
    y_val = torch.as_tensor(val_samples.targets, dtype=torch.float32)

    log = _EpochLog(log_path)
    best_val = math.inf
    best_epoch = 0
    best_state = None
    stale = 0
    start = time.perf_counter()
    for epoch in range(1, cfg.epochs + 1):
        model.train()
        train_losses = []
        for idx in _batches(len(train_samples), cfg.batch_size, rng):
            opt.zero_grad()
            hs, ht = _frozen_latents(stdae, xl_train[idx])
            pred = model(x_train[idx], hs, ht)
            loss = (pred - y_train[idx]).abs().mean()
            _check_finite(loss.item(), "downstream", epoch)
            loss.backward()
            torch.nn.utils.clip_grad_norm_(model.parameters(), cfg.grad_clip)
            opt.step()
            train_losses.append(loss.item())

        model.eval()
        with torch.no_grad():
            val_losses = []
            for lo in range(0, len(val_samples), cfg.batch_size):
                sl = slice(lo, lo + cfg.batch_size)
                hs, ht = _frozen_latents(stdae, xl_val[sl])
                pred = model(x_val[sl], hs, ht)
                val_losses.append((pred - y_val[sl]).abs().mean().item())
        val_loss = float(np.mean(val_losses))
        _check_finite(val_loss, "downstream validation", epoch)
        log.add(epoch, float(np.mean(train_losses)), val_loss, time.perf_counter() - start)
        if sched is not None:
            sched.step()

        if val_loss < best_val:
            best_val = val_loss
            best_epoch = epoch
            best_state = {k: v.detach().clone() for k, v in model.state_dict().items()}
            stale = 0
            if out_dir is not None:
                save_forecaster(model, out_dir, normalizer, pretrain_dir)
        else:
            stale += 1
            if stale >= cfg.patience:
                break

    if best_state is not None:
        model.load_state_dict(best_state)
    return {"history": log.rows, "best_epoch": best_epoch, "best_val": best_val}
