"""Minimal end-to-end run: synthesize, pretrain, fuse, forecast, score.

Uses a short six-day series and a reduced model so the whole script finishes
in about two minutes on a laptop CPU. Scale the constants up for anything
beyond a smoke run; the defaults in ramp_stdae.cli hold the full-size values.
"""

import numpy as np
import torch

from ramp_stdae import (
    STDAE,
    FusionConfig,
    PredictorConfig,
    RampForecaster,
    STDAEConfig,
    SynthConfig,
    TrainConfig,
    default_interchange,
    evaluate,
    fit_normalizer,
    full_adjacency,
    fuse_features,
    generate,
    make_samples,
    pretrain,
    split_by_days,
    train_downstream,
)
from ramp_stdae.training import seed_everything

T_LONG = 48  # four patches of 12 steps
EMBED = 32
SEED = 0

# 1. A four-leg interchange and six synthetic days at 5-minute resolution.
spec = default_interchange(interval_sec=300)
mainline, ramps = generate(spec, SynthConfig(days=6, noise_std=2.0, seed=SEED))
print(f"interchange: {spec.n_directions} gantry directions, {spec.n_movements} ramp movements")
print(f"series: {len(mainline)} steps of mainline volume/speed plus calendar channels")

# 2. Fuse per-movement features, split by whole days, normalize on train only.
fused = fuse_features(mainline, spec)
fused_splits = split_by_days(fused, (4, 1, 1))
ramp_splits = split_by_days(ramps, (4, 1, 1))
norm = fit_normalizer(fused_splits[0], ramp_splits[0])
samples = {}
for name, f, r in zip(("train", "val", "test"), fused_splits, ramp_splits):
    samples[name] = make_samples(
        norm.transform_fused(f.values), norm.transform_ramp(r.values),
        T=12, T_long=T_LONG, S=12,
    )
print({name: len(s) for name, s in samples.items()})

# 3. Stage one: both autoencoder branches learn to reconstruct ramp volumes
#    from mainline windows they never observe directly.
seed_everything(SEED)
stdae = STDAE(
    STDAEConfig(
        embed_dim=EMBED, n_encoder_layers=2, n_decoder_layers=1, heads=4,
        patch_len=12, t_long=T_LONG, channels=8, dropout=0.1, seed=SEED,
    ),
    n_nodes=spec.n_movements,
)
result = pretrain(
    stdae, samples["train"], samples["val"],
    TrainConfig(epochs=10, patience=5, batch_size=32, seed=SEED),
)
print(f"pretraining: best val {result['best_val']:.4f} at epoch {result['best_epoch']}")

# 4. Stage two: frozen encoders feed the graph-temporal forecaster.
seed_everything(SEED)
model = RampForecaster(
    in_channels=8,
    n_nodes=spec.n_movements,
    input_len=12,
    adjacency=full_adjacency(spec).matrix,
    cfg=PredictorConfig(),
    fusion=FusionConfig(source_dim=EMBED, patch_len=12, t_prime=1),
)
result = train_downstream(
    model, stdae, samples["train"], samples["val"],
    TrainConfig(epochs=10, patience=5, batch_size=32, seed=SEED), norm,
)
print(f"downstream: best val {result['best_val']:.4f} at epoch {result['best_epoch']}")

# 5. De-normalized test metrics, overall and by forecast step.
report = evaluate(model, samples["test"], norm, spec.movement_ids, stdae=stdae, seed=SEED)
o = report.overall
print(f"test: MAE {o['mae']:.3f}  RMSE {o['rmse']:.3f}  MAPE {o['mape']:.1%}")
for h, row in report.by_horizon.items():
    print(f"  {int(h) * spec.interval_sec // 60:>3d} min ahead: MAE {row['mae']:.3f}")
