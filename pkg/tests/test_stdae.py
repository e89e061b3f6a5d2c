"""Reconstruction model: shapes, axis equivariances, loss, checkpointing."""

import json

import pytest
import torch

from ramp_stdae import STDAE, STDAEConfig, load_stdae, reconstruction_loss, save_stdae

REFERENCE_SCALE = STDAEConfig(
    embed_dim=96, n_encoder_layers=4, n_decoder_layers=1, heads=4,
    patch_len=12, t_long=288, channels=8, dropout=0.1, seed=0,
)

SMALL = STDAEConfig(
    embed_dim=32, n_encoder_layers=2, n_decoder_layers=1, heads=4,
    patch_len=12, t_long=48, channels=8, dropout=0.0, seed=0,
)


def _small_model(n_nodes=6, seed=0):
    torch.manual_seed(seed)
    model = STDAE(SMALL, n_nodes)
    model.eval()
    return model


class TestShapes:
    def test_reference_scale_latents_and_reconstructions(self):
        torch.manual_seed(0)
        model = STDAE(REFERENCE_SCALE, n_nodes=12)
        model.eval()
        x = torch.randn(1, 288, 12, 8)
        e = model.embed(x)
        assert e.shape == (1, 12, 24, 96)
        hs, ht = model.encode(x)
        assert hs.shape == (1, 12, 24, 96)
        assert ht.shape == (1, 12, 24, 96)
        ys, yt = model(x)
        assert ys.shape == (1, 12, 24, 12)
        assert yt.shape == (1, 12, 24, 12)

    def test_single_node_degenerate(self):
        model = _small_model(n_nodes=1)
        e = model.embed(torch.randn(2, 48, 1, 8))
        h = model.sae.encode(e)
        assert h.shape == (2, 1, 4, 32)

    def test_single_patch_degenerate(self):
        cfg = STDAEConfig(
            embed_dim=32, n_encoder_layers=1, n_decoder_layers=1, heads=4,
            patch_len=12, t_long=12, channels=8, dropout=0.0, seed=0,
        )
        torch.manual_seed(0)
        model = STDAE(cfg, n_nodes=6).eval()
        e = model.embed(torch.randn(2, 12, 6, 8))
        h = model.tae.encode(e)
        assert h.shape == (2, 6, 1, 32)

    def test_finite_outputs_over_random_draws(self):
        model = _small_model()
        with torch.no_grad():
            for i in range(100):
                torch.manual_seed(1000 + i)
                ys, yt = model(torch.randn(1, 48, 6, 8) * 5)
                assert torch.isfinite(ys).all() and torch.isfinite(yt).all()


class TestEquivariance:
    def test_spatial_branch_is_patch_equivariant(self):
        model = _small_model(seed=1)
        torch.manual_seed(99)
        e = torch.randn(2, 6, 4, 32)
        perm = torch.randperm(4)
        with torch.no_grad():
            h_then_perm = model.sae.encode(e)[:, :, perm, :]
            perm_then_h = model.sae.encode(e[:, :, perm, :])
            y_then_perm = model.sae.decode(model.sae.encode(e))[:, :, perm, :]
            perm_then_y = model.sae.decode(model.sae.encode(e[:, :, perm, :]))
        assert (h_then_perm - perm_then_h).abs().max().item() < 1e-5
        assert (y_then_perm - perm_then_y).abs().max().item() < 1e-5

    def test_temporal_branch_is_node_equivariant(self):
        model = _small_model(seed=2)
        torch.manual_seed(98)
        e = torch.randn(2, 6, 4, 32)
        perm = torch.randperm(6)
        with torch.no_grad():
            h_then_perm = model.tae.encode(e)[:, perm, :, :]
            perm_then_h = model.tae.encode(e[:, perm, :, :])
            y_then_perm = model.tae.decode(model.tae.encode(e))[:, perm, :, :]
            perm_then_y = model.tae.decode(model.tae.encode(e[:, perm, :, :]))
        assert (h_then_perm - perm_then_h).abs().max().item() < 1e-5
        assert (y_then_perm - perm_then_y).abs().max().item() < 1e-5

    def test_batch_independence(self):
        model = _small_model(seed=3)
        torch.manual_seed(97)
        x1 = torch.randn(1, 48, 6, 8)
        x2 = torch.randn(1, 48, 6, 8)
        with torch.no_grad():
            ys_pair, yt_pair = model(torch.cat([x1, x2], dim=0))
            ys_1, yt_1 = model(x1)
            ys_2, yt_2 = model(x2)
        assert (ys_pair[0] - ys_1[0]).abs().max().item() < 1e-5
        assert (ys_pair[1] - ys_2[0]).abs().max().item() < 1e-5
        assert (yt_pair[0] - yt_1[0]).abs().max().item() < 1e-5
        assert (yt_pair[1] - yt_2[0]).abs().max().item() < 1e-5


class TestReconstructionLoss:
    def test_perfect_reconstruction_is_zero(self):
        y = torch.randn(2, 6, 4, 12)
        assert reconstruction_loss(y, y, y).item() == 0.0

    def test_one_branch_off_by_one(self):
        y = torch.randn(2, 6, 4, 12)
        loss = reconstruction_loss(y + 1.0, y, y)
        assert abs(loss.item() - 1.0) < 1e-6

    def test_doubling_errors_doubles_loss(self):
        torch.manual_seed(0)
        y = torch.randn(2, 6, 4, 12)
        es = torch.randn_like(y)
        et = torch.randn_like(y)
        single = reconstruction_loss(y + es, y + et, y).item()
        double = reconstruction_loss(y + 2 * es, y + 2 * et, y).item()
        assert abs(double - 2 * single) < 1e-5

    def test_shape_mismatch_rejected(self):
        y = torch.randn(2, 6, 4, 12)
        with pytest.raises(ValueError, match="shape"):
            reconstruction_loss(y[:, :, :, :6], y, y)


class TestCheckpoint:
    def test_round_trip_preserves_outputs(self, tmp_path):
        model = _small_model(seed=4)
        save_stdae(model, tmp_path / "ckpt")
        clone = load_stdae(tmp_path / "ckpt").eval()
        torch.manual_seed(96)
        x = torch.randn(2, 48, 6, 8)
        with torch.no_grad():
            ys_a, yt_a = model(x)
            ys_b, yt_b = clone(x)
        assert (ys_a - ys_b).abs().max().item() == 0.0
        assert (yt_a - yt_b).abs().max().item() == 0.0

    def test_sidecar_keys(self, tmp_path):
        model = _small_model(seed=5)
        save_stdae(model, tmp_path / "ckpt")
        sidecar = json.loads((tmp_path / "ckpt" / "config.json").read_text())
        assert set(sidecar) == {
            "embed_dim", "n_encoder_layers", "n_decoder_layers", "heads",
            "patch_len", "t_long", "channels", "dropout", "seed", "n_nodes",
        }

    def test_missing_sidecar_key_rejected(self, tmp_path):
        model = _small_model(seed=6)
        save_stdae(model, tmp_path / "ckpt")
        sidecar_path = tmp_path / "ckpt" / "config.json"
        doc = json.loads(sidecar_path.read_text())
        del doc["heads"]
        sidecar_path.write_text(json.dumps(doc))
        with pytest.raises(ValueError, match="heads"):
            load_stdae(tmp_path / "ckpt")
