"""Time-series handling: fusion, normalization, splits, windowing, masking.

Mainline gantry series (volume, speed, calendar channels) are fused into
per-movement input rows by concatenating the upstream and downstream gantry
features, z-scored with train-split statistics, windowed into (short input,
long input, target) samples, and optionally degraded with declarative
missing-data masks. Also owns the on-disk dataset directory format.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
import pandas as pd

from ramp_stdae.topology import InterchangeSpec, MovementDef, load_interchange

CHANNELS = ("volume", "speed", "time_of_day", "day_of_week")
F = len(CHANNELS)
# z-scored channels; calendar fractions are already bounded in [0, 1)
SCALED_CHANNELS = ("volume", "speed")

SECONDS_PER_DAY = 86400


def calendar_channels(timestamps: np.ndarray) -> np.ndarray:
    """Return (T, 2) array of [time_of_day, day_of_week] fractions."""
    ts = timestamps.astype("datetime64[s]")
    days = ts.astype("datetime64[D]")
    tod = (ts - days).astype("int64") / SECONDS_PER_DAY
    # epoch day 0 (1970-01-01) is a Thursday; weekday 0 = Monday
    dow = ((days.astype("int64") + 3) % 7) / 7.0
    return np.stack([tod, dow], axis=1)


def _check_uniform(timestamps: np.ndarray, interval_sec: int) -> None:
    ts = timestamps.astype("datetime64[s]").astype("int64")
    if len(ts) > 1:
        deltas = np.diff(ts)
        if not (deltas == interval_sec).all():
            raise ValueError(
                f"timestamps must be uniformly spaced at {interval_sec} s; "
                f"found gaps {sorted(set(deltas) - {interval_sec})}"
            )


@dataclass
class MainlineSeries:
    """Gantry feature series, shape (T, N, F) with F=4 channels."""

    timestamps: np.ndarray  # datetime64[s], (T,)
    directions: tuple[str, ...]
    values: np.ndarray  # (T, N, F)
    interval_sec: int

    def __post_init__(self):
        self.timestamps = np.asarray(self.timestamps, dtype="datetime64[s]")
        self.values = np.asarray(self.values, dtype=np.float64)
        if self.values.shape != (len(self.timestamps), len(self.directions), F):
            raise ValueError(
                f"mainline values must have shape (T, N, {F}), got {self.values.shape} "
                f"for T={len(self.timestamps)}, N={len(self.directions)}"
            )
        _check_uniform(self.timestamps, self.interval_sec)
        if (self.values[:, :, 0] < 0).any():
            raise ValueError("mainline volumes must be non-negative")

    def __len__(self) -> int:
        return len(self.timestamps)


@dataclass
class RampSeries:
    """Per-movement volume series, shape (T, M, 1)."""

    timestamps: np.ndarray
    movement_ids: tuple[str, ...]
    values: np.ndarray  # (T, M, 1)
    interval_sec: int

    def __post_init__(self):
        self.timestamps = np.asarray(self.timestamps, dtype="datetime64[s]")
        self.values = np.asarray(self.values, dtype=np.float64)
        if self.values.shape != (len(self.timestamps), len(self.movement_ids), 1):
            raise ValueError(
                f"ramp values must have shape (T, M, 1), got {self.values.shape}"
            )
        _check_uniform(self.timestamps, self.interval_sec)
        if (self.values < 0).any():
            raise ValueError("ramp volumes must be non-negative")

    def __len__(self) -> int:
        return len(self.timestamps)


@dataclass
class FusedSeries:
    """Per-movement fused inputs, shape (T, M, C) with C = 2F.

    Row m is [upstream features || downstream features] of movement m.
    """

    timestamps: np.ndarray
    movement_ids: tuple[str, ...]
    values: np.ndarray  # (T, M, 2F)
    interval_sec: int

    def __post_init__(self):
        self.timestamps = np.asarray(self.timestamps, dtype="datetime64[s]")
        self.values = np.asarray(self.values, dtype=np.float64)
        if self.values.shape != (len(self.timestamps), len(self.movement_ids), 2 * F):
            raise ValueError(
                f"fused values must have shape (T, M, {2 * F}), got {self.values.shape}"
            )

    def __len__(self) -> int:
        return len(self.timestamps)

    @property
    def n_channels(self) -> int:
        return self.values.shape[2]


FUSED_CHANNEL_NAMES = tuple(f"up:{c}" for c in CHANNELS) + tuple(f"down:{c}" for c in CHANNELS)
# fused channel indices that get z-scored (volume and speed, both halves)
FUSED_SCALED_IDX = tuple(
    i for i, name in enumerate(FUSED_CHANNEL_NAMES) if name.split(":")[1] in SCALED_CHANNELS
)


def fuse_features(mainline: MainlineSeries, spec: InterchangeSpec) -> FusedSeries:
    """Build the model input: X[t, m] = concat(mainline[t, up(m)], mainline[t, down(m)])."""
    col = {d: i for i, d in enumerate(mainline.directions)}
    missing = [
        end
        for m in spec.movements
        for end in (m.upstream, m.downstream)
        if end not in col
    ]
    if missing:
        raise ValueError(
            f"mainline series lacks direction columns {sorted(set(missing))} "
            "required by the interchange spec"
        )
    up = np.stack([mainline.values[:, col[m.upstream], :] for m in spec.movements], axis=1)
    down = np.stack([mainline.values[:, col[m.downstream], :] for m in spec.movements], axis=1)
    values = np.concatenate([up, down], axis=2)  # (T, M, 2F)
    return FusedSeries(
        timestamps=mainline.timestamps,
        movement_ids=spec.movement_ids,
        values=values,
        interval_sec=mainline.interval_sec,
    )


@dataclass
class Normalizer:
    """Per-channel z-score statistics fit on the training split only.

    Holds one (mean, std) per fused volume/speed channel plus one pair for
    ramp volume; calendar channels pass through untouched.
    """

    fused_mean: np.ndarray  # (C,), zeros at calendar positions
    fused_std: np.ndarray  # (C,), ones at calendar positions
    ramp_mean: float
    ramp_std: float

    def transform_fused(self, values: np.ndarray) -> np.ndarray:
        return (values - self.fused_mean) / self.fused_std

    def inverse_fused(self, values: np.ndarray) -> np.ndarray:
        return values * self.fused_std + self.fused_mean

    def transform_ramp(self, values: np.ndarray) -> np.ndarray:
        return (values - self.ramp_mean) / self.ramp_std

    def inverse_ramp(self, values: np.ndarray) -> np.ndarray:
        return values * self.ramp_std + self.ramp_mean

    def to_dict(self) -> dict:
        return {
            "fused_mean": self.fused_mean.tolist(),
            "fused_std": self.fused_std.tolist(),
            "ramp_mean": self.ramp_mean,
            "ramp_std": self.ramp_std,
        }

    @classmethod
    def from_dict(cls, doc: dict) -> "Normalizer":
        return cls(
            fused_mean=np.asarray(doc["fused_mean"], dtype=np.float64),
            fused_std=np.asarray(doc["fused_std"], dtype=np.float64),
            ramp_mean=float(doc["ramp_mean"]),
            ramp_std=float(doc["ramp_std"]),
        )


def fit_normalizer(fused: FusedSeries, ramps: RampSeries) -> Normalizer:
    """Compute z-score statistics from a training split."""
    if len(fused) == 0 or len(ramps) == 0:
        raise ValueError("cannot fit normalizer on an empty training split")
    c = fused.n_channels
    mean = np.zeros(c)
    std = np.ones(c)
    for i in FUSED_SCALED_IDX:
        chan = fused.values[:, :, i]
        mu, sigma = chan.mean(), chan.std()
        if sigma == 0:
            raise ValueError(
                f"channel {FUSED_CHANNEL_NAMES[i]!r} has zero variance on the training split"
            )
        mean[i], std[i] = mu, sigma
    ramp_mu, ramp_sigma = ramps.values.mean(), ramps.values.std()
    if ramp_sigma == 0:
        raise ValueError("channel 'ramp:volume' has zero variance on the training split")
    return Normalizer(fused_mean=mean, fused_std=std, ramp_mean=ramp_mu, ramp_std=ramp_sigma)


def _slice_series(series, start: int, stop: int):
    kwargs = {
        "timestamps": series.timestamps[start:stop],
        "values": series.values[start:stop],
        "interval_sec": series.interval_sec,
    }
    if isinstance(series, MainlineSeries):
        return MainlineSeries(directions=series.directions, **kwargs)
    if isinstance(series, RampSeries):
        return RampSeries(movement_ids=series.movement_ids, **kwargs)
    if isinstance(series, FusedSeries):
        return FusedSeries(movement_ids=series.movement_ids, **kwargs)
    raise TypeError(f"cannot split object of type {type(series).__name__}")


def split_by_days(series, ratio: tuple[int, int, int] = (17, 3, 3)):
    """Chronological day-aligned (train, val, test) partition of a series."""
    interval = series.interval_sec
    if SECONDS_PER_DAY % interval != 0:
        raise ValueError(f"interval {interval} s does not divide one day")
    steps_per_day = SECONDS_PER_DAY // interval
    total = len(series)
    if total % steps_per_day != 0:
        raise ValueError(
            f"series length {total} is not a whole number of days "
            f"({steps_per_day} steps/day); cannot split day-aligned"
        )
    days = total // steps_per_day
    weight = sum(ratio)
    # floor of cumulative shares partitions the day count exactly
    bounds = [0] + [days * sum(ratio[: k + 1]) // weight for k in range(len(ratio))]
    pieces = []
    for k in range(len(ratio)):
        start = bounds[k] * steps_per_day
        stop = bounds[k + 1] * steps_per_day
        pieces.append(_slice_series(series, start, stop))
    return tuple(pieces)


@dataclass(frozen=True)
class MaskSpec:
    """Declarative missing-data pattern, applied identically in both stages.

    kind "directional" hides whole gantry directions (all their fused
    channels); kind "temporal" hides the last ``hide_last`` steps of every
    ``cycle``-step block of a window; kind "none" is the identity.
    """

    kind: str = "none"
    directions: tuple[str, ...] = ()
    hide_last: int = 0
    cycle: int = 0

    def __post_init__(self):
        if self.kind not in ("none", "directional", "temporal"):
            raise ValueError(f"unknown mask kind {self.kind!r}")
        object.__setattr__(self, "directions", tuple(self.directions))
        if self.kind == "directional" and not self.directions:
            raise ValueError("directional mask needs at least one direction")
        if self.kind == "temporal" and not (0 < self.hide_last <= self.cycle):
            raise ValueError(
                f"temporal mask needs 0 < hide_last <= cycle, got "
                f"hide_last={self.hide_last}, cycle={self.cycle}"
            )

    def validate_for(self, spec: InterchangeSpec) -> None:
        unknown = set(self.directions) - set(spec.directions)
        if unknown:
            raise ValueError(f"mask references unknown directions {sorted(unknown)}")

    def to_dict(self) -> dict:
        return {
            "kind": self.kind,
            "directions": list(self.directions),
            "hide_last": self.hide_last,
            "cycle": self.cycle,
        }

    @classmethod
    def from_dict(cls, doc: dict) -> "MaskSpec":
        return cls(
            kind=doc.get("kind", "none"),
            directions=tuple(doc.get("directions", ())),
            hide_last=int(doc.get("hide_last", 0)),
            cycle=int(doc.get("cycle", 0)),
        )


def directional_channel_mask(spec: InterchangeSpec, directions) -> np.ndarray:
    """Observed indicator (M, C): 0 where a fused channel comes from a hidden gantry."""
    hidden = set(directions)
    obs = np.ones((spec.n_movements, 2 * F))
    for i, m in enumerate(spec.movements):
        if m.upstream in hidden:
            obs[i, :F] = 0.0
        if m.downstream in hidden:
            obs[i, F:] = 0.0
    return obs


def temporal_step_mask(n_steps: int, hide_last: int, cycle: int) -> np.ndarray:
    """Observed indicator (n_steps,): 0 on the trailing hide_last of each cycle block."""
    t = np.arange(n_steps)
    return ((t % cycle) < cycle - hide_last).astype(np.float64)


def apply_mask(
    x: np.ndarray, mask: MaskSpec, spec: InterchangeSpec
) -> tuple[np.ndarray, np.ndarray]:
    """Zero out masked positions of a fused window; return (masked, indicator).

    ``x`` has shape (..., T, M, C) in normalized space; zeroing there is the
    channel mean in raw space. The indicator marks observed=1 / masked=0 and
    broadcasts to x's shape.
    """
    x = np.asarray(x, dtype=np.float64)
    if x.ndim < 3 or x.shape[-2] != spec.n_movements or x.shape[-1] != 2 * F:
        raise ValueError(
            f"expected window shaped (..., T, M={spec.n_movements}, C={2 * F}), got {x.shape}"
        )
    mask.validate_for(spec)
    if mask.kind == "none":
        return x.copy(), np.ones_like(x)
    if mask.kind == "directional":
        indicator = np.broadcast_to(
            directional_channel_mask(spec, mask.directions), x.shape
        ).copy()
    else:
        steps = temporal_step_mask(x.shape[-3], mask.hide_last, mask.cycle)
        indicator = np.broadcast_to(steps[:, None, None], x.shape).copy()
    return x * indicator, indicator


@dataclass
class SampleSet:
    """Sliding-window samples: short input, long input ending at the same
    step, future target, and per-input observation indicators."""

    inputs: np.ndarray  # (n, T, M, C)
    long_inputs: np.ndarray  # (n, T_long, M, C)
    targets: np.ndarray  # (n, S, M, 1)
    long_targets: np.ndarray  # (n, T_long, M, 1) ramp values over the long window
    input_mask: np.ndarray  # (n, T, M, C), observed=1
    long_mask: np.ndarray  # (n, T_long, M, C)

    def __len__(self) -> int:
        return self.inputs.shape[0]


def make_samples(fused, ramps, T: int, T_long: int, S: int) -> SampleSet:
    """Stride-1 sliding windows; sample count = total − T_long − S + 1.

    Accepts series objects or plain arrays shaped (T, M, C) / (T, M, 1), so
    windows can be cut from normalized values as well as raw ones.
    """
    if T_long < T:
        raise ValueError(f"T_long ({T_long}) must be >= T ({T})")
    x = np.asarray(getattr(fused, "values", fused), dtype=np.float64)
    y = np.asarray(getattr(ramps, "values", ramps), dtype=np.float64)
    total = x.shape[0]
    if y.shape[0] != total:
        raise ValueError("fused and ramp series must be aligned 1:1")
    n = total - T_long - S + 1
    if n < 1:
        raise ValueError(
            f"series of {total} steps is too short for T_long={T_long} + S={S}"
        )
    idx = np.arange(n)
    long_idx = idx[:, None] + np.arange(T_long)[None, :]
    long_inputs = x[long_idx]  # (n, T_long, M, C)
    inputs = long_inputs[:, T_long - T:]  # suffix of the long window
    tgt_idx = idx[:, None] + T_long + np.arange(S)[None, :]
    targets = y[tgt_idx]  # (n, S, M, 1)
    return SampleSet(
        inputs=inputs.copy(),
        long_inputs=long_inputs,
        targets=targets,
        long_targets=y[long_idx],
        input_mask=np.ones_like(inputs),
        long_mask=np.ones_like(long_inputs),
    )


def mask_samples(samples: SampleSet, mask: MaskSpec, spec: InterchangeSpec) -> SampleSet:
    """Apply one MaskSpec to every window of a SampleSet."""
    masked_long, long_ind = apply_mask(samples.long_inputs, mask, spec)
    masked_short, short_ind = apply_mask(samples.inputs, mask, spec)
    return SampleSet(
        inputs=masked_short,
        long_inputs=masked_long,
        targets=samples.targets,
        long_targets=samples.long_targets,
        input_mask=short_ind,
        long_mask=long_ind,
    )


# ---------------------------------------------------------------------------
# dataset directory format
# ---------------------------------------------------------------------------

META_FILE = "meta.json"
MAINLINE_FILE = "mainline.csv"
RAMP_FILE = "ramp.csv"


def save_dataset(
    out_dir: str | Path,
    spec: InterchangeSpec,
    mainline: MainlineSeries,
    ramps: RampSeries,
) -> Path:
    """Write meta.json + mainline.csv + ramp.csv as dense long-format grids."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    meta = {
        "interchange": {
            "name": spec.name,
            "interval_sec": spec.interval_sec,
            "directions": list(spec.directions),
            "movements": [
                {"id": m.id, "upstream": m.upstream, "downstream": m.downstream, "label": m.label}
                for m in spec.movements
            ],
        },
        "interval_sec": spec.interval_sec,
        "channels": list(CHANNELS),
    }
    (out / META_FILE).write_text(json.dumps(meta, indent=2) + "\n", encoding="utf-8")

    t = len(mainline)
    ts_str = np.datetime_as_string(mainline.timestamps, unit="s")
    main_df = pd.DataFrame(
        {
            "timestamp": np.repeat(ts_str, len(mainline.directions)),
            "gantry_id": np.tile(mainline.directions, t),
            "volume": mainline.values[:, :, 0].ravel(),
            "speed": mainline.values[:, :, 1].ravel(),
        }
    )
    main_df.to_csv(out / MAINLINE_FILE, index=False)

    ramp_df = pd.DataFrame(
        {
            "timestamp": np.repeat(np.datetime_as_string(ramps.timestamps, unit="s"), len(ramps.movement_ids)),
            "movement_id": np.tile(ramps.movement_ids, len(ramps)),
            "volume": ramps.values[:, :, 0].ravel(),
        }
    )
    ramp_df.to_csv(out / RAMP_FILE, index=False)
    return out


def _pivot_dense(
    df: pd.DataFrame, id_col: str, ids: tuple[str, ...], value_cols: list[str], what: str
) -> tuple[np.ndarray, np.ndarray]:
    """Pivot long-format rows to a dense (T, len(ids), len(value_cols)) grid."""
    unknown = set(df[id_col].unique()) - set(ids)
    if unknown:
        raise ValueError(f"{what}: unknown {id_col} values {sorted(unknown)}")
    timestamps = np.sort(df["timestamp"].unique())
    expected = len(timestamps) * len(ids)
    if len(df) != expected or df.duplicated(["timestamp", id_col]).any():
        raise ValueError(
            f"{what}: grid is not dense; expected one row per (timestamp, {id_col}) "
            f"pair ({expected} rows), got {len(df)}"
        )
    wide = np.empty((len(timestamps), len(ids), len(value_cols)), dtype=np.float64)
    pos_t = {t: i for i, t in enumerate(timestamps)}
    pos_id = {g: j for j, g in enumerate(ids)}
    ti = df["timestamp"].map(pos_t).to_numpy()
    gi = df[id_col].map(pos_id).to_numpy()
    for k, colname in enumerate(value_cols):
        wide[ti, gi, k] = df[colname].to_numpy(dtype=np.float64)
    return timestamps.astype("datetime64[s]"), wide


def load_dataset(data_dir: str | Path) -> tuple[InterchangeSpec, MainlineSeries, RampSeries]:
    """Load a dataset directory written by :func:`save_dataset` (or compatible)."""
    data_dir = Path(data_dir)
    meta = json.loads((data_dir / META_FILE).read_text(encoding="utf-8"))
    spec_doc = meta["interchange"]
    spec = InterchangeSpec(
        name=spec_doc["name"],
        directions=tuple(spec_doc["directions"]),
        movements=tuple(
            MovementDef(
                id=m["id"],
                upstream=m["upstream"],
                downstream=m["downstream"],
                label=m.get("label", ""),
            )
            for m in spec_doc["movements"]
        ),
        interval_sec=int(meta["interval_sec"]),
    )

    main_df = pd.read_csv(data_dir / MAINLINE_FILE, dtype={"gantry_id": str})
    ts, grid = _pivot_dense(main_df, "gantry_id", spec.directions, ["volume", "speed"], "mainline.csv")
    cal = calendar_channels(ts)  # (T, 2)
    values = np.concatenate(
        [grid, np.broadcast_to(cal[:, None, :], (len(ts), spec.n_directions, 2))], axis=2
    )
    mainline = MainlineSeries(
        timestamps=ts, directions=spec.directions, values=values, interval_sec=spec.interval_sec
    )

    ramp_df = pd.read_csv(data_dir / RAMP_FILE, dtype={"movement_id": str})
    rts, rgrid = _pivot_dense(ramp_df, "movement_id", spec.movement_ids, ["volume"], "ramp.csv")
    if not np.array_equal(rts, ts):
        raise ValueError("ramp.csv timestamps do not match mainline.csv")
    ramps = RampSeries(
        timestamps=rts,
        movement_ids=spec.movement_ids,
        values=rgrid,
        interval_sec=spec.interval_sec,
    )
    return spec, mainline, ramps
