"""Command-line workflow: config plumbing, exit codes, artifact layout."""

import copy
import json

import pytest

from ramp_stdae.cli import (
    ABLATION_ARMS,
    DEFAULTS,
    ConfigError,
    apply_override,
    deep_merge,
    main,
    resolve_config,
    validate_config,
    write_snapshot,
)

# small topology-independent knobs shared by every workflow test
TINY = [
    "--set", "windows.t_long=48",
    "--set", "stdae.embed_dim=16",
    "--set", "stdae.n_encoder_layers=1",
    "--set", "stdae.dropout=0.0",
    "--set", "predictor.hidden_dim=16",
    "--set", "predictor.head_hidden=32",
    "--set", "train.pretrain_epochs=1",
    "--set", "train.downstream_epochs=1",
    "--set", "train.batch_size=64",
    "--set", "split=[1,1,1]",
    "--set", "synth.days=3",
    "--set", "synth.noise_std=1.0",
]


class TestConfigPlumbing:
    def test_deep_merge_keeps_sibling_keys(self):
        merged = deep_merge({"a": {"x": 1, "y": 2}, "b": 3}, {"a": {"y": 9}})
        assert merged == {"a": {"x": 1, "y": 9}, "b": 3}

    def test_deep_merge_does_not_mutate_base(self):
        base = {"a": {"x": 1}}
        deep_merge(base, {"a": {"x": 2}})
        assert base == {"a": {"x": 1}}

    def test_override_parses_json_values(self):
        cfg = {"train": {"lr": 0.002}}
        apply_override(cfg, "train.lr=0.01")
        apply_override(cfg, "seeds=[1,2,3]")
        apply_override(cfg, "mask.kind=temporal")
        assert cfg["train"]["lr"] == 0.01
        assert cfg["seeds"] == [1, 2, 3]
        assert cfg["mask"]["kind"] == "temporal"

    def test_override_without_equals_rejected(self):
        with pytest.raises(ConfigError, match="KEY=VALUE"):
            apply_override({}, "train.lr")

    def test_resolve_defaults_then_file_then_flags(self, tmp_path):
        cfg_file = tmp_path / "cfg.json"
        cfg_file.write_text(json.dumps({"train": {"lr": 0.5}, "seeds": [4]}))
        cfg = resolve_config(str(cfg_file), ["train.batch_size=8"], str(tmp_path / "out"))
        assert cfg["train"]["lr"] == 0.5
        assert cfg["train"]["batch_size"] == 8
        assert cfg["train"]["patience"] == DEFAULTS["train"]["patience"]
        assert cfg["seeds"] == [4]
        assert cfg["out_dir"] == str(tmp_path / "out")

    def test_resolve_rejects_missing_or_broken_files(self, tmp_path):
        with pytest.raises(ConfigError, match="no such file"):
            resolve_config(str(tmp_path / "absent.json"), [], None)
        broken = tmp_path / "broken.json"
        broken.write_text("{not json")
        with pytest.raises(ConfigError, match="invalid JSON"):
            resolve_config(str(broken), [], None)
        listy = tmp_path / "list.json"
        listy.write_text("[1, 2]")
        with pytest.raises(ConfigError, match="object"):
            resolve_config(str(listy), [], None)

    @pytest.mark.parametrize(
        "assignment,field",
        [
            ("windows.t_long=50", "windows.t_long"),
            ("windows.input_len=10", "windows.input_len"),
            ("windows.t_prime=0", "windows.t_prime"),
            ("windows.horizon=0", "windows.horizon"),
            ("train.lr=-1", "train.lr"),
            ("train.lr_schedule=linear", "train.lr_schedule"),
            ("seeds=[]", "seeds"),
            ("split=[1,2]", "split"),
            ("interchange=/no/such/file.json", "interchange"),
        ],
    )
    def test_validation_names_the_offending_field(self, assignment, field):
        cfg = copy.deepcopy(DEFAULTS)
        apply_override(cfg, assignment)
        with pytest.raises(ConfigError) as err:
            validate_config(cfg)
        assert err.value.field == field

    def test_multi_patch_context_allows_longer_inputs(self):
        cfg = copy.deepcopy(DEFAULTS)
        apply_override(cfg, "windows.t_prime=2")
        apply_override(cfg, "windows.input_len=24")
        validate_config(cfg)

    def test_snapshot_records_command_and_config(self, tmp_path):
        cfg = copy.deepcopy(DEFAULTS)
        cfg["out_dir"] = str(tmp_path / "run")
        out = write_snapshot(cfg, "train")
        doc = json.loads((out / "config.json").read_text())
        assert doc["command"] == "train"
        assert doc["train"]["lr"] == DEFAULTS["train"]["lr"]


class TestExitCodes:
    def test_config_errors_exit_2(self, tmp_path, capsys):
        assert main(["synth", "--set", "train.lr=-1", "--out", str(tmp_path)]) == 2
        assert "train.lr" in capsys.readouterr().err

    def test_bad_override_exits_2(self, tmp_path):
        assert main(["synth", "--set", "oops", "--out", str(tmp_path)]) == 2

    def test_missing_dataset_dir_exits_2(self, tmp_path, capsys):
        assert main(["train", "--out", str(tmp_path)]) == 2
        assert "dataset_dir" in capsys.readouterr().err

    def test_missing_forecaster_dir_exits_2(self, tmp_path, capsys):
        assert main(["eval", "--set", "dataset_dir=.", "--out", str(tmp_path)]) == 2
        assert "forecaster_dir" in capsys.readouterr().err

    def test_empty_pretrain_dir_exits_2(self, tmp_path, capsys):
        data = tmp_path / "data"
        assert main(["synth", *TINY, "--out", str(data)]) == 0
        rc = main([
            "train", *TINY,
            "--set", f"dataset_dir={data}",
            "--set", f"pretrain_dir={tmp_path / 'nothing'}",
            "--out", str(tmp_path / "fit"),
        ])
        assert rc == 2
        assert "pretrain_dir" in capsys.readouterr().err


@pytest.fixture(scope="module")
def pipeline(tmp_path_factory):
    """synth -> pretrain -> train -> eval on a tiny three-day dataset."""
    root = tmp_path_factory.mktemp("cli")
    dirs = {name: root / name for name in ("data", "pre", "fit", "eval")}
    assert main(["synth", *TINY, "--out", str(dirs["data"])]) == 0
    assert main([
        "pretrain", *TINY, "--set", f"dataset_dir={dirs['data']}", "--out", str(dirs["pre"]),
    ]) == 0
    assert main([
        "train", *TINY,
        "--set", f"dataset_dir={dirs['data']}",
        "--set", f"pretrain_dir={dirs['pre']}",
        "--out", str(dirs["fit"]),
    ]) == 0
    assert main([
        "eval", *TINY, "--plot",
        "--set", f"dataset_dir={dirs['data']}",
        "--set", f"forecaster_dir={dirs['fit']}",
        "--out", str(dirs["eval"]),
    ]) == 0
    return dirs


class TestWorkflow:
    def test_synth_writes_a_loadable_dataset(self, pipeline):
        data = pipeline["data"]
        for name in ("meta.json", "mainline.csv", "ramp.csv", "config.json"):
            assert (data / name).exists()
        assert json.loads((data / "config.json").read_text())["command"] == "synth"

    def test_pretrain_layout(self, pipeline):
        run = pipeline["pre"] / "seed-0"
        assert (run / "stdae" / "weights.pt").exists()
        assert (run / "stdae" / "config.json").exists()
        assert (run / "pretrain_log.csv").read_text().startswith("epoch,")

    def test_train_layout_and_report(self, pipeline):
        fit = pipeline["fit"]
        assert (fit / "seed-0" / "forecaster" / "forecaster.pt").exists()
        assert (fit / "seed-0" / "train_log.csv").exists()
        report = json.loads((fit / "metrics.json").read_text())
        assert set(report["by_horizon"]) == {"3", "6", "12"}
        assert len(report["by_movement"]) == 12
        assert report["overall"]["rmse"] >= report["overall"]["mae"]
        sidecar = json.loads(
            (fit / "seed-0" / "forecaster" / "forecaster.json").read_text()
        )
        assert sidecar["pretrain_checkpoint"]["path"].endswith("stdae")

    def test_eval_reproduces_training_metrics(self, pipeline):
        trained = json.loads((pipeline["fit"] / "metrics.json").read_text())
        evaled = json.loads((pipeline["eval"] / "metrics.json").read_text())
        assert evaled["overall"]["mae"] == pytest.approx(trained["overall"]["mae"], rel=1e-6)
        assert evaled["overall"]["rmse"] == pytest.approx(trained["overall"]["rmse"], rel=1e-6)

    def test_eval_plot_written(self, pipeline):
        pytest.importorskip("matplotlib")
        plots = list(pipeline["eval"].glob("forecast_curves_*.png"))
        assert len(plots) == 1


class TestGrids:
    def test_ablation_covers_all_four_arms(self, pipeline, tmp_path):
        out = tmp_path / "ablate"
        rc = main([
            "ablate", *TINY, "--set", f"dataset_dir={pipeline['data']}", "--out", str(out),
        ])
        assert rc == 0
        grid = json.loads((out / "ablation.json").read_text())
        assert set(grid) == set(ABLATION_ARMS) == {"full", "sae_only", "tae_only", "none"}
        for arm in grid.values():
            assert arm["overall"]["mae"] > 0
        for arm in ABLATION_ARMS:
            assert (out / "seed-0" / arm / "metrics.json").exists()

    def test_robustness_grid_keys(self, tmp_path):
        out = tmp_path / "rb"
        rc = main([
            "robustness", *TINY,
            "--set", "synth.days=6",
            "--set", "split=[2,2,2]",
            "--set", "robustness.intervals=[600]",
            "--out", str(out),
        ])
        assert rc == 0
        grid = json.loads((out / "robustness.json").read_text())
        assert set(grid) == {"600"}
        assert set(grid["600"]) == {"directional", "temporal"}
        for cell in grid["600"].values():
            assert cell["overall"]["mae"] > 0
        # each interval synthesizes its own dataset at the pinned window length
        cell_cfg = json.loads((out / "interval-600" / "dataset" / "config.json").read_text())
        assert cell_cfg["windows"]["t_long"] == 144
        assert cell_cfg["interval_sec"] == 600
