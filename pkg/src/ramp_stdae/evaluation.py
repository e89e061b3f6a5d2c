"""Forecast metrics and seed-aggregated reports.

All metrics are computed on de-normalized values (vehicles per interval).
MAPE is reported as a fraction and only over entries whose true value is
strictly positive; a slice with no positive truth has no defined MAPE.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np
import torch

from ramp_stdae.dataset import MaskSpec, Normalizer, SampleSet, mask_samples
from ramp_stdae.topology import InterchangeSpec

DEFAULT_HORIZONS = (3, 6, 12)


def mae(pred: np.ndarray, true: np.ndarray) -> float:
    pred, true = _aligned(pred, true)
    return float(np.mean(np.abs(pred - true)))


def rmse(pred: np.ndarray, true: np.ndarray) -> float:
    pred, true = _aligned(pred, true)
    return float(math.sqrt(np.mean((pred - true) ** 2)))


def mape(pred: np.ndarray, true: np.ndarray) -> float:
    """Mean absolute percentage error as a fraction, over entries with true > 0."""
    pred, true = _aligned(pred, true)
    valid = true > 0
    if not valid.any():
        raise ValueError("MAPE is undefined: no entries with true value > 0")
    return float(np.mean(np.abs(pred[valid] - true[valid]) / true[valid]))


def _aligned(pred: np.ndarray, true: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    pred = np.asarray(pred, dtype=np.float64)
    true = np.asarray(true, dtype=np.float64)
    if pred.shape != true.shape:
        raise ValueError(f"shape mismatch: pred {pred.shape} vs true {true.shape}")
    return pred, true


def _metric_row(pred: np.ndarray, true: np.ndarray) -> dict[str, float]:
    row = {"mae": mae(pred, true), "mape": mape(pred, true), "rmse": rmse(pred, true)}
    assert row["rmse"] >= row["mae"] - 1e-12, "RMSE fell below MAE"
    return row


@dataclass
class MetricsReport:
    """Overall and sliced forecast metrics, with the seeds that produced them."""

    overall: dict[str, float]
    by_horizon: dict[str, dict[str, float]]
    by_movement: dict[str, dict[str, float]]
    seeds: list[int] = field(default_factory=list)
    std: dict[str, float] | None = None

    def to_dict(self) -> dict:
        return {
            "overall": self.overall,
            "by_horizon": self.by_horizon,
            "by_movement": self.by_movement,
            "seeds": self.seeds,
            "std": self.std,
        }

    @classmethod
    def from_dict(cls, doc: dict) -> "MetricsReport":
        return cls(
            overall=dict(doc["overall"]),
            by_horizon={k: dict(v) for k, v in doc["by_horizon"].items()},
            by_movement={k: dict(v) for k, v in doc["by_movement"].items()},
            seeds=list(doc.get("seeds", [])),
            std=dict(doc["std"]) if doc.get("std") is not None else None,
        )

    def save(self, path: str | Path) -> None:
        Path(path).write_text(json.dumps(self.to_dict(), indent=2) + "\n", encoding="utf-8")

    @classmethod
    def load(cls, path: str | Path) -> "MetricsReport":
        return cls.from_dict(json.loads(Path(path).read_text(encoding="utf-8")))


def compute_report(
    pred: np.ndarray,
    true: np.ndarray,
    movement_ids: Sequence[str],
    horizons: Sequence[int] = DEFAULT_HORIZONS,
    seed: int | None = None,
) -> MetricsReport:
    """Build a report from stacked forecasts (n, S, M, 1) and matching truth."""
    pred, true = _aligned(pred, true)
    if pred.ndim != 4 or pred.shape[3] != 1:
        raise ValueError(f"expected forecasts shaped (n, S, M, 1), got {pred.shape}")
    n, s, m, _ = pred.shape
    if len(movement_ids) != m:
        raise ValueError(f"{len(movement_ids)} movement ids for {m} movement columns")

    by_horizon = {
        str(h): _metric_row(pred[:, h - 1], true[:, h - 1])
        for h in horizons
        if 1 <= h <= s
    }
    by_movement = {
        mid: _metric_row(pred[:, :, j], true[:, :, j])
        for j, mid in enumerate(movement_ids)
    }
    return MetricsReport(
        overall=_metric_row(pred, true),
        by_horizon=by_horizon,
        by_movement=by_movement,
        seeds=[seed] if seed is not None else [],
    )


def evaluate(
    model,
    samples: SampleSet,
    normalizer: Normalizer,
    movement_ids: Sequence[str],
    stdae=None,
    mask: MaskSpec | None = None,
    spec: InterchangeSpec | None = None,
    horizons: Sequence[int] = DEFAULT_HORIZONS,
    batch_size: int = 64,
    seed: int | None = None,
) -> MetricsReport:
    """Run a forecaster over a sample set and report de-normalized metrics.

    When a pretrained reconstruction model is given, its frozen encoders run
    on the long windows and the latents feed the forecaster's fusion. A mask
    (with its interchange spec) hides input positions before inference;
    targets stay untouched.
    """
    if len(samples) == 0:
        raise ValueError("cannot evaluate on an empty split")
    if mask is not None and mask.kind != "none":
        if spec is None:
            raise ValueError("masked evaluation needs the interchange spec")
        samples = mask_samples(samples, mask, spec)
    pred, true = predict_samples(model, samples, normalizer, stdae, batch_size)
    return compute_report(pred, true, movement_ids, horizons=horizons, seed=seed)


def predict_samples(
    model,
    samples: SampleSet,
    normalizer: Normalizer,
    stdae=None,
    batch_size: int = 64,
) -> tuple[np.ndarray, np.ndarray]:
    """De-normalized (forecast, truth) arrays, each (n, S, M, 1)."""
    preds = []
    n = samples.inputs.shape[0]
    was_training = model.training
    model.eval()
    if stdae is not None:
        stdae.eval()
    with torch.no_grad():
        for lo in range(0, n, batch_size):
            hi = min(lo + batch_size, n)
            x = torch.as_tensor(samples.inputs[lo:hi], dtype=torch.float32)
            hs = ht = None
            if stdae is not None:
                x_long = torch.as_tensor(samples.long_inputs[lo:hi], dtype=torch.float32)
                hs, ht = stdae.encode(x_long)
            preds.append(model.predict(x, normalizer, hs, ht).numpy())
    if was_training:
        model.train()
    pred = np.concatenate(preds, axis=0)
    true = normalizer.inverse_ramp(samples.targets)
    return pred, true


def aggregate_reports(reports: Iterable[MetricsReport]) -> MetricsReport:
    """Mean metrics across per-seed reports, with across-seed std of overall."""
    reports = list(reports)
    if not reports:
        raise ValueError("no reports to aggregate")

    def mean_rows(rows: list[dict[str, float]]) -> dict[str, float]:
        keys = rows[0].keys()
        return {k: float(np.mean([r[k] for r in rows])) for k in keys}

    overall = mean_rows([r.overall for r in reports])
    horizons = reports[0].by_horizon.keys()
    movements = reports[0].by_movement.keys()
    for r in reports[1:]:
        if r.by_horizon.keys() != horizons or r.by_movement.keys() != movements:
            raise ValueError("reports slice over different horizons or movements")
    by_horizon = {h: mean_rows([r.by_horizon[h] for r in reports]) for h in horizons}
    by_movement = {m: mean_rows([r.by_movement[m] for r in reports]) for m in movements}
    seeds = [s for r in reports for s in r.seeds]
    std = {
        k: float(np.std([r.overall[k] for r in reports]))
        for k in reports[0].overall
    }
    return MetricsReport(
        overall=overall,
        by_horizon=by_horizon,
        by_movement=by_movement,
        seeds=seeds,
        std=std,
    )
