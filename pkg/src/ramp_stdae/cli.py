"""Experiment entry point.

Subcommands cover the whole workflow: synthesize a dataset, pretrain the
reconstruction model, train the forecaster with or without fusion, evaluate
a checkpoint, run the four-arm ablation, and sweep the masked-robustness
grid over sampling intervals. Configuration is one JSON document; repeated
``--set key.path=value`` flags override file values. Every run writes a
resolved-config snapshot into its output directory so it can be re-run
identically.
"""

from __future__ import annotations

import argparse
import copy
import json
import sys
from pathlib import Path

import numpy as np

from ramp_stdae.dataset import (
    MaskSpec,
    Normalizer,
    SampleSet,
    fit_normalizer,
    fuse_features,
    load_dataset,
    make_samples,
    mask_samples,
    save_dataset,
    split_by_days,
)
from ramp_stdae.evaluation import (
    MetricsReport,
    aggregate_reports,
    evaluate,
    predict_samples,
)
from ramp_stdae.predictor import (
    FusionConfig,
    PredictorConfig,
    RampForecaster,
    load_forecaster,
    save_forecaster,
)
from ramp_stdae.stdae import STDAE, STDAEConfig, load_stdae
from ramp_stdae.synth import SynthConfig, generate
from ramp_stdae.topology import (
    InterchangeSpec,
    default_interchange,
    full_adjacency,
    load_interchange,
)
from ramp_stdae.training import TrainConfig, pretrain, seed_everything, train_downstream

DEFAULTS: dict = {
    "out_dir": "runs/experiment",
    "interchange": None,  # path to an interchange JSON; None = built-in four-leg
    "interval_sec": 300,
    "dataset_dir": None,
    "pretrain_dir": None,
    "forecaster_dir": None,
    "split": [17, 3, 3],
    "seeds": [0],
    "windows": {"t_long": 288, "patch_len": 12, "input_len": 12, "horizon": 12, "t_prime": 1},
    "synth": {
        "days": 23,
        "base_flow": 100.0,
        "diurnal_amplitude": 0.8,
        "split_fractions": None,
        "lags": None,
        "noise_std": 0.0,
        "seed": 0,
        "start": "2024-01-01",
    },
    "stdae": {"embed_dim": 96, "n_encoder_layers": 4, "n_decoder_layers": 1, "heads": 4, "dropout": 0.1},
    "predictor": {
        "hidden_dim": 32,
        "dilations": [1, 2, 1, 2],
        "graph_conv_depth": 1,
        "adaptive_embed_dim": 10,
        "head_hidden": 256,
    },
    "fusion": {"use_spatial": True, "use_temporal": True},
    "train": {
        "lr": 0.002,
        "batch_size": 16,
        "pretrain_epochs": 50,
        "downstream_epochs": 100,
        "patience": 10,
        "grad_clip": 5.0,
        "lr_schedule": "none",
    },
    "mask": {"kind": "none"},
    "robustness": {
        "intervals": [180, 300, 600],
        "hide_directions": None,  # default: first direction of the spec
        "hide_last": 6,
        "cycle": 12,
    },
    "plot": False,
}


class ConfigError(Exception):
    """Invalid experiment configuration; message names the offending field."""

    def __init__(self, field: str, message: str):
        super().__init__(f"{field}: {message}")
        self.field = field


# ---------------------------------------------------------------------------
# config plumbing
# ---------------------------------------------------------------------------


def deep_merge(base: dict, update: dict) -> dict:
    out = copy.deepcopy(base)
    for key, value in update.items():
        if isinstance(value, dict) and isinstance(out.get(key), dict):
            out[key] = deep_merge(out[key], value)
        else:
            out[key] = copy.deepcopy(value)
    return out


def apply_override(cfg: dict, assignment: str) -> None:
    key, sep, raw = assignment.partition("=")
    if not sep:
        raise ConfigError("--set", f"expected KEY=VALUE, got {assignment!r}")
    try:
        value = json.loads(raw)
    except json.JSONDecodeError:
        value = raw  # bare strings may be given unquoted
    node = cfg
    parts = key.split(".")
    for part in parts[:-1]:
        if part not in node or not isinstance(node[part], dict):
            node[part] = {}
        node = node[part]
    node[parts[-1]] = value


def resolve_config(config_path: str | None, overrides: list[str], out: str | None) -> dict:
    cfg = copy.deepcopy(DEFAULTS)
    if config_path is not None:
        path = Path(config_path)
        if not path.exists():
            raise ConfigError("--config", f"no such file: {path}")
        try:
            doc = json.loads(path.read_text(encoding="utf-8"))
        except json.JSONDecodeError as e:
            raise ConfigError("--config", f"invalid JSON: {e}") from e
        if not isinstance(doc, dict):
            raise ConfigError("--config", "top level must be a JSON object")
        cfg = deep_merge(cfg, doc)
    for assignment in overrides:
        apply_override(cfg, assignment)
    if out is not None:
        cfg["out_dir"] = out
    validate_config(cfg)
    return cfg


def validate_config(cfg: dict) -> None:
    w = cfg["windows"]
    if w["t_long"] % w["patch_len"] != 0:
        raise ConfigError(
            "windows.t_long", f"{w['t_long']} not divisible by patch_len {w['patch_len']}"
        )
    if w["t_prime"] < 1:
        raise ConfigError("windows.t_prime", "must be >= 1")
    if w["t_prime"] == 1 and w["input_len"] != w["patch_len"]:
        raise ConfigError(
            "windows.input_len",
            f"must equal patch_len ({w['patch_len']}) when t_prime=1, got {w['input_len']}",
        )
    if w["t_prime"] * w["patch_len"] < w["input_len"]:
        raise ConfigError(
            "windows.t_prime", "t_prime * patch_len must cover input_len"
        )
    if w["horizon"] < 1:
        raise ConfigError("windows.horizon", "must be >= 1")
    if cfg["train"]["lr"] <= 0:
        raise ConfigError("train.lr", "must be > 0")
    if cfg["train"]["lr_schedule"] not in ("none", "cosine"):
        raise ConfigError(
            "train.lr_schedule", f"must be 'none' or 'cosine', got {cfg['train']['lr_schedule']!r}"
        )
    seeds = cfg["seeds"]
    if not isinstance(seeds, list) or not seeds:
        raise ConfigError("seeds", "need at least one seed")
    split = cfg["split"]
    if len(split) != 3 or any(int(s) < 1 for s in split):
        raise ConfigError("split", f"need three positive day weights, got {split}")
    if cfg["interchange"] is not None and not Path(cfg["interchange"]).exists():
        raise ConfigError("interchange", f"no such file: {cfg['interchange']}")


def write_snapshot(cfg: dict, command: str) -> Path:
    out = Path(cfg["out_dir"])
    out.mkdir(parents=True, exist_ok=True)
    doc = {"command": command} | cfg
    (out / "config.json").write_text(json.dumps(doc, indent=2, sort_keys=True) + "\n", encoding="utf-8")
    return out


# ---------------------------------------------------------------------------
# shared data plumbing
# ---------------------------------------------------------------------------


def _interchange(cfg: dict) -> InterchangeSpec:
    if cfg["interchange"] is not None:
        return load_interchange(cfg["interchange"])
    return default_interchange(int(cfg["interval_sec"]))


def _require_dataset(cfg: dict) -> Path:
    if cfg["dataset_dir"] is None:
        raise ConfigError("dataset_dir", "required for this subcommand")
    path = Path(cfg["dataset_dir"])
    if not path.exists():
        raise ConfigError("dataset_dir", f"no such directory: {path}")
    return path


def prepare_splits(cfg: dict, data_dir: Path):
    """Load a dataset and cut normalized, optionally masked, sample splits."""
    spec, mainline, ramps = load_dataset(data_dir)
    fused = fuse_features(mainline, spec)
    ratio = tuple(int(s) for s in cfg["split"])
    fused_splits = split_by_days(fused, ratio)
    ramp_splits = split_by_days(ramps, ratio)
    normalizer = fit_normalizer(fused_splits[0], ramp_splits[0])
    w = cfg["windows"]
    samples = {}
    for name, f_part, r_part in zip(("train", "val", "test"), fused_splits, ramp_splits):
        samples[name] = make_samples(
            normalizer.transform_fused(f_part.values),
            normalizer.transform_ramp(r_part.values),
            T=w["input_len"],
            T_long=w["t_long"],
            S=w["horizon"],
        )
    mask = MaskSpec.from_dict(cfg["mask"])
    mask.validate_for(spec)
    if mask.kind != "none":
        samples = {k: mask_samples(s, mask, spec) for k, s in samples.items()}
    return spec, normalizer, samples, mask


def _stdae_config(cfg: dict, seed: int) -> STDAEConfig:
    w = cfg["windows"]
    s = cfg["stdae"]
    return STDAEConfig(
        embed_dim=int(s["embed_dim"]),
        n_encoder_layers=int(s["n_encoder_layers"]),
        n_decoder_layers=int(s["n_decoder_layers"]),
        heads=int(s["heads"]),
        patch_len=int(w["patch_len"]),
        t_long=int(w["t_long"]),
        channels=8,
        dropout=float(s["dropout"]),
        seed=seed,
    )


def _predictor_config(cfg: dict) -> PredictorConfig:
    p = cfg["predictor"]
    return PredictorConfig(
        hidden_dim=int(p["hidden_dim"]),
        dilations=tuple(int(d) for d in p["dilations"]),
        graph_conv_depth=int(p["graph_conv_depth"]),
        adaptive_embed_dim=int(p["adaptive_embed_dim"]),
        horizon=int(cfg["windows"]["horizon"]),
        head_hidden=int(p["head_hidden"]),
    )


def _fusion_config(cfg: dict, fusion_doc: dict | None) -> FusionConfig | None:
    if fusion_doc is None:
        return None
    w = cfg["windows"]
    return FusionConfig(
        source_dim=int(cfg["stdae"]["embed_dim"]),
        patch_len=int(w["patch_len"]),
        t_prime=int(w["t_prime"]),
        use_spatial=bool(fusion_doc.get("use_spatial", True)),
        use_temporal=bool(fusion_doc.get("use_temporal", True)),
    )


def _train_config(cfg: dict, stage: str, seed: int) -> TrainConfig:
    t = cfg["train"]
    epochs = t["pretrain_epochs"] if stage == "pretrain" else t["downstream_epochs"]
    return TrainConfig(
        lr=float(t["lr"]),
        batch_size=int(t["batch_size"]),
        epochs=int(epochs),
        patience=int(t["patience"]),
        grad_clip=float(t["grad_clip"]),
        seed=seed,
        lr_schedule=str(t["lr_schedule"]),
    )


def _pretrain_one(cfg: dict, spec, samples, seed: int, run_dir: Path) -> Path:
    """Pretrain the reconstruction model for one seed; return checkpoint dir."""
    seed_everything(seed)
    model = STDAE(_stdae_config(cfg, seed), spec.n_movements)
    ckpt = run_dir / "stdae"
    result = pretrain(
        model,
        samples["train"],
        samples["val"],
        _train_config(cfg, "pretrain", seed),
        out_dir=ckpt,
        log_path=run_dir / "pretrain_log.csv",
    )
    print(
        f"[pretrain] seed {seed}: best val {result['best_val']:.4f} "
        f"at epoch {result['best_epoch']} -> {ckpt}"
    )
    return ckpt


def _train_one(
    cfg: dict,
    spec,
    normalizer: Normalizer,
    samples,
    seed: int,
    run_dir: Path,
    fusion_doc: dict | None,
    pretrain_ckpt: Path | None,
) -> tuple[RampForecaster, STDAE | None]:
    """Train one forecaster arm for one seed; returns best model + encoders."""
    fusion = _fusion_config(cfg, fusion_doc)
    stdae = None
    if fusion is not None:
        if pretrain_ckpt is None:
            raise ConfigError(
                "pretrain_dir", "required for fused training (set fusion to null for the bare arm)"
            )
        stdae = load_stdae(pretrain_ckpt)
        if stdae.n_nodes != spec.n_movements:
            raise ConfigError(
                "pretrain_dir",
                f"checkpoint has {stdae.n_nodes} nodes, dataset has {spec.n_movements}",
            )
        if stdae.cfg.embed_dim != fusion.source_dim:
            raise ConfigError(
                "stdae.embed_dim",
                f"checkpoint embed_dim {stdae.cfg.embed_dim} != configured {fusion.source_dim}",
            )
    w = cfg["windows"]
    seed_everything(seed)
    model = RampForecaster(
        in_channels=samples["train"].inputs.shape[-1],
        n_nodes=spec.n_movements,
        input_len=int(w["input_len"]),
        adjacency=full_adjacency(spec).matrix,
        cfg=_predictor_config(cfg),
        fusion=fusion,
    )
    result = train_downstream(
        model,
        stdae,
        samples["train"],
        samples["val"],
        _train_config(cfg, "downstream", seed),
        normalizer,
        out_dir=run_dir / "forecaster",
        log_path=run_dir / "train_log.csv",
        pretrain_dir=pretrain_ckpt,
    )
    print(
        f"[train] seed {seed}: best val {result['best_val']:.4f} "
        f"at epoch {result['best_epoch']} -> {run_dir / 'forecaster'}"
    )
    return model, stdae


def _evaluate_to_file(
    model, samples, normalizer, spec, stdae, seed: int, path: Path
) -> MetricsReport:
    report = evaluate(
        model,
        samples["test"],
        normalizer,
        spec.movement_ids,
        stdae=stdae,
        seed=seed,
    )
    report.save(path)
    return report


# ---------------------------------------------------------------------------
# subcommands
# ---------------------------------------------------------------------------


def cmd_synth(cfg: dict) -> int:
    spec = _interchange(cfg)
    out = write_snapshot(cfg, "synth")
    s = cfg["synth"]
    synth_cfg = SynthConfig(
        days=int(s["days"]),
        base_flow=float(s["base_flow"]),
        diurnal_amplitude=float(s["diurnal_amplitude"]),
        split_fractions=tuple(s["split_fractions"]) if s["split_fractions"] else None,
        lags=tuple(s["lags"]) if s["lags"] else None,
        noise_std=float(s["noise_std"]),
        seed=int(s["seed"]),
        start=str(s["start"]),
    )
    mainline, ramps = generate(spec, synth_cfg)
    save_dataset(out, spec, mainline, ramps)
    print(f"[synth] {len(mainline)} steps x {spec.n_directions} directions, "
          f"{spec.n_movements} movements -> {out}")
    return 0


def cmd_pretrain(cfg: dict) -> int:
    data_dir = _require_dataset(cfg)
    out = write_snapshot(cfg, "pretrain")
    spec, _, samples, _ = prepare_splits(cfg, data_dir)
    for seed in cfg["seeds"]:
        run_dir = out / f"seed-{seed}"
        run_dir.mkdir(parents=True, exist_ok=True)
        _pretrain_one(cfg, spec, samples, int(seed), run_dir)
    return 0


def _locate_pretrain(cfg: dict, seed: int) -> Path | None:
    base = cfg["pretrain_dir"]
    if base is None:
        return None
    base = Path(base)
    for candidate in (base / f"seed-{seed}" / "stdae", base / "stdae", base):
        if (candidate / "config.json").exists():
            return candidate
    raise ConfigError("pretrain_dir", f"no checkpoint found under {base} for seed {seed}")


def cmd_train(cfg: dict) -> int:
    data_dir = _require_dataset(cfg)
    out = write_snapshot(cfg, "train")
    spec, normalizer, samples, _ = prepare_splits(cfg, data_dir)
    reports = []
    for seed in cfg["seeds"]:
        seed = int(seed)
        run_dir = out / f"seed-{seed}"
        run_dir.mkdir(parents=True, exist_ok=True)
        model, stdae = _train_one(
            cfg, spec, normalizer, samples, seed, run_dir,
            cfg["fusion"], _locate_pretrain(cfg, seed),
        )
        reports.append(
            _evaluate_to_file(model, samples, normalizer, spec, stdae, seed, run_dir / "metrics.json")
        )
    combined = aggregate_reports(reports)
    combined.save(out / "metrics.json")
    print(f"[train] test MAE {combined.overall['mae']:.4f} over {len(reports)} seed(s) -> {out / 'metrics.json'}")
    return 0


def cmd_eval(cfg: dict) -> int:
    data_dir = _require_dataset(cfg)
    if cfg["forecaster_dir"] is None:
        raise ConfigError("forecaster_dir", "required for eval")
    base = Path(cfg["forecaster_dir"])
    out = write_snapshot(cfg, "eval")
    spec, _, samples, mask = prepare_splits(cfg, data_dir)
    adjacency = full_adjacency(spec).matrix

    ckpts = sorted(base.glob("seed-*/forecaster")) or [base]
    reports = []
    for i, ckpt in enumerate(ckpts):
        if not (ckpt / "forecaster.json").exists():
            raise ConfigError("forecaster_dir", f"no forecaster checkpoint at {ckpt}")
        model, normalizer, sidecar = load_forecaster(ckpt, adjacency)
        stdae = None
        if sidecar["fusion"] is not None:
            ref = sidecar.get("pretrain_checkpoint")
            if ref is None:
                raise ConfigError(
                    "forecaster_dir", "fused checkpoint lacks its pretraining reference"
                )
            stdae = load_stdae(ref["path"])
        reports.append(
            evaluate(model, samples["test"], normalizer, spec.movement_ids, stdae=stdae, seed=i)
        )
        if cfg["plot"]:
            pred, true = predict_samples(model, samples["test"], normalizer, stdae)
            _plot_forecasts(pred, true, spec.movement_ids, out / f"forecast_curves_{ckpt.parent.name}.png")
    combined = aggregate_reports(reports) if len(reports) > 1 else reports[0]
    combined.save(out / "metrics.json")
    print(f"[eval] test MAE {combined.overall['mae']:.4f} -> {out / 'metrics.json'}")
    return 0


ABLATION_ARMS: dict[str, dict | None] = {
    "full": {"use_spatial": True, "use_temporal": True},
    "sae_only": {"use_spatial": True, "use_temporal": False},
    "tae_only": {"use_spatial": False, "use_temporal": True},
    "none": None,
}


def cmd_ablate(cfg: dict) -> int:
    data_dir = _require_dataset(cfg)
    out = write_snapshot(cfg, "ablate")
    spec, normalizer, samples, _ = prepare_splits(cfg, data_dir)
    per_arm: dict[str, list[MetricsReport]] = {arm: [] for arm in ABLATION_ARMS}
    for seed in cfg["seeds"]:
        seed = int(seed)
        seed_dir = out / f"seed-{seed}"
        seed_dir.mkdir(parents=True, exist_ok=True)
        ckpt = _pretrain_one(cfg, spec, samples, seed, seed_dir)
        for arm, fusion_doc in ABLATION_ARMS.items():
            arm_dir = seed_dir / arm
            arm_dir.mkdir(parents=True, exist_ok=True)
            model, stdae = _train_one(
                cfg, spec, normalizer, samples, seed, arm_dir,
                fusion_doc, ckpt if fusion_doc is not None else None,
            )
            per_arm[arm].append(
                _evaluate_to_file(model, samples, normalizer, spec, stdae, seed, arm_dir / "metrics.json")
            )
    grid = {arm: aggregate_reports(reports).to_dict() for arm, reports in per_arm.items()}
    (out / "ablation.json").write_text(json.dumps(grid, indent=2) + "\n", encoding="utf-8")
    for arm in ABLATION_ARMS:
        print(f"[ablate] {arm}: test MAE {grid[arm]['overall']['mae']:.4f}")
    print(f"[ablate] -> {out / 'ablation.json'}")
    return 0


def cmd_robustness(cfg: dict) -> int:
    """Sweep sampling intervals x mask kinds on freshly synthesized data.

    Each interval cell pins t_long to one day of steps at that interval, so
    every split must span at least t_long + horizon (>= 2 days for val/test).
    """
    out = write_snapshot(cfg, "robustness")
    rb = cfg["robustness"]
    grid: dict[str, dict] = {}
    for interval in rb["intervals"]:
        interval = int(interval)
        steps_per_day = 86400 // interval
        cell_cfg = deep_merge(cfg, {
            "interval_sec": interval,
            "windows": {"t_long": steps_per_day},
            "dataset_dir": str(Path(out) / f"interval-{interval}" / "dataset"),
            "out_dir": str(Path(out) / f"interval-{interval}" / "dataset"),
        })
        validate_config(cell_cfg)
        cmd_synth(cell_cfg)
        spec = _interchange(cell_cfg)
        hide = rb["hide_directions"] or [spec.directions[0]]
        masks = {
            "directional": MaskSpec(kind="directional", directions=tuple(hide)),
            "temporal": MaskSpec(kind="temporal", hide_last=int(rb["hide_last"]), cycle=int(rb["cycle"])),
        }
        grid_row: dict[str, dict] = {}
        for kind, mask in masks.items():
            mask_cfg = deep_merge(cell_cfg, {"mask": mask.to_dict()})
            data_dir = Path(mask_cfg["dataset_dir"])
            spec, normalizer, samples, _ = prepare_splits(mask_cfg, data_dir)
            reports = []
            for seed in cfg["seeds"]:
                seed = int(seed)
                run_dir = Path(out) / f"interval-{interval}" / f"mask-{kind}" / f"seed-{seed}"
                run_dir.mkdir(parents=True, exist_ok=True)
                ckpt = _pretrain_one(mask_cfg, spec, samples, seed, run_dir)
                model, stdae = _train_one(
                    mask_cfg, spec, normalizer, samples, seed, run_dir,
                    mask_cfg["fusion"], ckpt,
                )
                reports.append(
                    _evaluate_to_file(model, samples, normalizer, spec, stdae, seed, run_dir / "metrics.json")
                )
            grid_row[kind] = aggregate_reports(reports).to_dict()
            print(f"[robustness] interval {interval}s, {kind}: "
                  f"test MAE {grid_row[kind]['overall']['mae']:.4f}")
        grid[str(interval)] = grid_row
    (out / "robustness.json").write_text(json.dumps(grid, indent=2) + "\n", encoding="utf-8")
    print(f"[robustness] -> {out / 'robustness.json'}")
    return 0


def _plot_forecasts(pred: np.ndarray, true: np.ndarray, movement_ids, path: Path) -> None:
    try:
        import matplotlib
        matplotlib.use("Agg")
        import matplotlib.pyplot as plt
    except ImportError as e:
        raise ConfigError("plot", "matplotlib is not installed (pip extra: plots)") from e
    n_show = min(pred.shape[0], 576)
    m = len(movement_ids)
    cols = 3
    rows = (m + cols - 1) // cols
    fig, axes = plt.subplots(rows, cols, figsize=(4 * cols, 2.5 * rows), squeeze=False)
    for j, mid in enumerate(movement_ids):
        ax = axes[j // cols][j % cols]
        ax.plot(true[:n_show, 0, j, 0], label="true", linewidth=1.0)
        ax.plot(pred[:n_show, 0, j, 0], label="predicted", linewidth=1.0)
        ax.set_title(mid, fontsize=9)
    axes[0][0].legend(fontsize=8)
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)


COMMANDS = {
    "synth": cmd_synth,
    "pretrain": cmd_pretrain,
    "train": cmd_train,
    "eval": cmd_eval,
    "ablate": cmd_ablate,
    "robustness": cmd_robustness,
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="ramp-stdae",
        description="Ramp-flow forecasting workflow: data synthesis, two-stage training, evaluation.",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    helps = {
        "synth": "generate a synthetic dataset directory",
        "pretrain": "pretrain the reconstruction model on a dataset",
        "train": "train the downstream forecaster (optionally fused)",
        "eval": "evaluate a trained forecaster on the test split",
        "ablate": "run the four fusion arms (full / SAE-only / TAE-only / none)",
        "robustness": "sweep sampling intervals x mask kinds",
    }
    for name, help_text in helps.items():
        p = sub.add_parser(name, help=help_text)
        p.add_argument("--config", default=None, help="JSON config file")
        p.add_argument(
            "--set", action="append", default=[], metavar="KEY=VALUE",
            help="override a config entry (dotted path, JSON value)",
        )
        p.add_argument("--out", default=None, help="output directory (overrides out_dir)")
        if name == "eval":
            p.add_argument("--plot", action="store_true", help="write forecast-vs-truth curves")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = resolve_config(args.config, args.set, args.out)
        if getattr(args, "plot", False):
            cfg["plot"] = True
        return COMMANDS[args.command](cfg)
    except ConfigError as e:
        print(f"config error: {e}", file=sys.stderr)
        return 2
    except (ValueError, FileNotFoundError) as e:
        print(f"error: {e}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
