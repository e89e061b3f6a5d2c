"""Synthetic interchange data with a known mainline-to-ramp mapping.

Mainline flows follow a diurnal sinusoid with per-direction phase offsets;
each movement's ramp flow is a fixed fraction of its upstream gantry flow,
delayed by a per-movement lag, plus optional Gaussian noise. With zero noise
the mapping is exact, which makes these datasets the ground-truth oracle for
model-quality tests: ramp(t) = split * upstream(t - lag).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ramp_stdae.dataset import (
    SECONDS_PER_DAY,
    MainlineSeries,
    RampSeries,
    calendar_channels,
)
from ramp_stdae.topology import InterchangeSpec


@dataclass
class SynthConfig:
    """Knobs for the generator; split/lag lists must match the movement count."""

    days: int = 23
    base_flow: float = 100.0  # vehicles/interval per direction
    diurnal_amplitude: float = 0.8  # fraction of base
    split_fractions: tuple[float, ...] | None = None  # per movement; default shares 0.75/upstream
    lags: tuple[int, ...] | None = None  # intervals of delay; default cycles 1,2,3
    noise_std: float = 0.0  # vehicles/interval
    seed: int = 0
    start: str = "2024-01-01"  # midnight-aligned first timestamp
    free_flow_kmh: float = 110.0
    min_speed_kmh: float = 5.0
    peak_speed_kmh: float = 60.0  # speed at peak flow, sets the flow-speed slope


def default_split_fractions(spec: InterchangeSpec, total: float = 0.75) -> tuple[float, ...]:
    """Share ``total`` of each upstream gantry's flow evenly over its movements."""
    out_count = {d: 0 for d in spec.directions}
    for m in spec.movements:
        out_count[m.upstream] += 1
    return tuple(total / out_count[m.upstream] for m in spec.movements)


def default_lags(spec: InterchangeSpec) -> tuple[int, ...]:
    """Per-movement transit delays cycling through 1, 2, 3 intervals."""
    return tuple(1 + (i % 3) for i in range(spec.n_movements))


def _validate(spec: InterchangeSpec, cfg: SynthConfig, splits, lags, steps_per_day: int) -> None:
    m = spec.n_movements
    if len(splits) != m:
        raise ValueError(f"split_fractions must have length M={m}, got {len(splits)}")
    if len(lags) != m:
        raise ValueError(f"lags must have length M={m}, got {len(lags)}")
    if not all(0 < s < 1 for s in splits):
        raise ValueError("split fractions must lie in (0, 1)")
    if not all(0 <= lag < steps_per_day for lag in lags):
        raise ValueError(f"lags must be in [0, {steps_per_day}) intervals")
    per_upstream: dict[str, float] = {}
    for mv, s in zip(spec.movements, splits):
        per_upstream[mv.upstream] = per_upstream.get(mv.upstream, 0.0) + s
    bad = {d: tot for d, tot in per_upstream.items() if tot > 1.0 + 1e-12}
    if bad:
        raise ValueError(f"split fractions exceed 1 for upstream directions {bad}")
    if cfg.days <= 0:
        raise ValueError("days must be positive")
    if cfg.base_flow <= 0:
        raise ValueError("base_flow must be positive")


def generate(spec: InterchangeSpec, cfg: SynthConfig) -> tuple[MainlineSeries, RampSeries]:
    """Generate aligned (MainlineSeries, RampSeries) for a spec.

    Deterministic: identical (spec, cfg) including seed reproduces the output
    bit for bit.
    """
    interval = spec.interval_sec
    if SECONDS_PER_DAY % interval != 0:
        raise ValueError(f"interval {interval} s does not divide one day")
    steps_per_day = SECONDS_PER_DAY // interval
    splits = cfg.split_fractions if cfg.split_fractions is not None else default_split_fractions(spec)
    lags = cfg.lags if cfg.lags is not None else default_lags(spec)
    _validate(spec, cfg, splits, lags, steps_per_day)

    total = cfg.days * steps_per_day
    n, m = spec.n_directions, spec.n_movements
    start = np.datetime64(cfg.start, "s")
    timestamps = start + np.arange(total) * np.timedelta64(interval, "s")

    rng = np.random.default_rng(cfg.seed)
    t = np.arange(total)
    phases = 2.0 * np.pi * np.arange(n) / n
    diurnal = 1.0 + cfg.diurnal_amplitude * np.sin(
        2.0 * np.pi * t[:, None] / steps_per_day + phases[None, :]
    )
    flow = cfg.base_flow * diurnal  # (T, N)
    if cfg.noise_std > 0:
        flow = flow + rng.normal(0.0, cfg.noise_std, size=flow.shape)
    flow = np.clip(flow, 0.0, None)

    peak = cfg.base_flow * (1.0 + cfg.diurnal_amplitude)
    slope = (cfg.free_flow_kmh - cfg.peak_speed_kmh) / peak
    speed = np.clip(cfg.free_flow_kmh - slope * flow, cfg.min_speed_kmh, cfg.free_flow_kmh)

    cal = calendar_channels(timestamps)  # (T, 2)
    main_values = np.concatenate(
        [flow[:, :, None], speed[:, :, None], np.broadcast_to(cal[:, None, :], (total, n, 2))],
        axis=2,
    )

    col = {d: i for i, d in enumerate(spec.directions)}
    ramp = np.empty((total, m))
    for j, (mv, s, lag) in enumerate(zip(spec.movements, splits, lags)):
        upstream = flow[:, col[mv.upstream]]
        shifted = upstream[np.maximum(t - lag, 0)]  # clamp the pre-history
        ramp[:, j] = s * shifted
    if cfg.noise_std > 0:
        ramp = ramp + rng.normal(0.0, cfg.noise_std, size=ramp.shape)
    ramp = np.clip(ramp, 0.0, None)

    mainline = MainlineSeries(
        timestamps=timestamps, directions=spec.directions, values=main_values, interval_sec=interval
    )
    ramps = RampSeries(
        timestamps=timestamps,
        movement_ids=spec.movement_ids,
        values=ramp[:, :, None],
        interval_sec=interval,
    )
    return mainline, ramps
