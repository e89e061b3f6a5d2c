"""Ramp flow forecasting at highway interchanges from mainline gantry series.

Two-stage workflow: cross-modal reconstruction pretraining (parallel spatial
and temporal autoencoders reconstruct ramp volumes from mainline features),
then fusion of the frozen representations into a graph-temporal forecaster.
Includes a synthetic interchange generator used as a ground-truth oracle.
"""

from ramp_stdae.topology import (
    Adjacency,
    InterchangeSpec,
    MovementDef,
    default_interchange,
    full_adjacency,
    load_interchange,
    movement_endpoints,
    save_interchange,
)
from ramp_stdae.synth import SynthConfig, generate
from ramp_stdae.dataset import (
    FusedSeries,
    MainlineSeries,
    MaskSpec,
    Normalizer,
    RampSeries,
    SampleSet,
    apply_mask,
    fit_normalizer,
    fuse_features,
    load_dataset,
    make_samples,
    mask_samples,
    save_dataset,
    split_by_days,
)
from ramp_stdae.embedding import PatchConfig, PatchEmbedding, patchify, positional_encoding_2d, unpatchify
from ramp_stdae.stdae import STDAE, STDAEConfig, load_stdae, reconstruction_loss, save_stdae
from ramp_stdae.predictor import (
    FusionConfig,
    PredictorConfig,
    RampForecaster,
    extract_last_patches,
    load_forecaster,
    save_forecaster,
)
from ramp_stdae.evaluation import (
    MetricsReport,
    aggregate_reports,
    compute_report,
    evaluate,
    mae,
    mape,
    predict_samples,
    rmse,
)
from ramp_stdae.training import TrainConfig, TrainingError, pretrain, train_downstream

__all__ = [
    "Adjacency",
    "InterchangeSpec",
    "MovementDef",
    "default_interchange",
    "full_adjacency",
    "load_interchange",
    "movement_endpoints",
    "save_interchange",
    "SynthConfig",
    "generate",
    "FusedSeries",
    "MainlineSeries",
    "MaskSpec",
    "Normalizer",
    "RampSeries",
    "SampleSet",
    "apply_mask",
    "fit_normalizer",
    "fuse_features",
    "load_dataset",
    "make_samples",
    "mask_samples",
    "save_dataset",
    "split_by_days",
    "PatchConfig",
    "PatchEmbedding",
    "patchify",
    "positional_encoding_2d",
    "unpatchify",
    "STDAE",
    "STDAEConfig",
    "load_stdae",
    "reconstruction_loss",
    "save_stdae",
    "FusionConfig",
    "PredictorConfig",
    "RampForecaster",
    "extract_last_patches",
    "load_forecaster",
    "save_forecaster",
    "MetricsReport",
    "aggregate_reports",
    "compute_report",
    "evaluate",
    "mae",
    "mape",
    "predict_samples",
    "rmse",
    "TrainConfig",
    "TrainingError",
    "pretrain",
    "train_downstream",
]

__version__ = "0.1.0"
