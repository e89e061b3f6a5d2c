"""Pretraining core: parallel spatial and temporal autoencoders.

Both branches consume the same patch embedding E (M, P, D) of a long fused
mainline window and decode reconstructions of the ramp volume patch sequence
(M, P, L). The spatial branch transposes the node and patch axes so attention
mixes across movements within a patch; the temporal branch keeps the axis
order so attention mixes across patches within a movement. Training minimizes
the sum of both branches' mean-absolute reconstruction errors.
"""

from __future__ import annotations

import json
from dataclasses import asdict, dataclass
from pathlib import Path

import torch
from torch import nn

from ramp_stdae.embedding import PatchConfig, PatchEmbedding

CHECKPOINT_FILE = "weights.pt"
SIDECAR_FILE = "config.json"


@dataclass(frozen=True)
class STDAEConfig:
    """Architecture settings; persisted verbatim in the checkpoint sidecar."""

    embed_dim: int = 96
    n_encoder_layers: int = 4
    n_decoder_layers: int = 1
    heads: int = 4
    patch_len: int = 12
    t_long: int = 288
    channels: int = 8
    dropout: float = 0.1
    seed: int = 0

    def patch_config(self) -> PatchConfig:
        return PatchConfig(
            t_long=self.t_long,
            patch_len=self.patch_len,
            embed_dim=self.embed_dim,
            channels=self.channels,
        )


def _transformer_stack(d_model: int, heads: int, n_layers: int, dropout: float) -> nn.TransformerEncoder:
    layer = nn.TransformerEncoderLayer(
        d_model=d_model,
        nhead=heads,
        dim_feedforward=4 * d_model,
        dropout=dropout,
        batch_first=True,
        norm_first=True,
    )
    return nn.TransformerEncoder(layer, num_layers=n_layers, enable_nested_tensor=False)


def _over_patches(stack: nn.Module, e: torch.Tensor) -> torch.Tensor:
    """Run attention along the patch axis, each node independently."""
    b, m, p, d = e.shape
    out = stack(e.reshape(b * m, p, d))
    return out.reshape(b, m, p, d)


def _over_nodes(stack: nn.Module, e: torch.Tensor) -> torch.Tensor:
    """Run attention along the node axis, each patch independently."""
    b, m, p, d = e.shape
    out = stack(e.transpose(1, 2).reshape(b * p, m, d))
    return out.reshape(b, p, m, d).transpose(1, 2)


class _Autoencoder(nn.Module):
    """Shared encoder/decoder skeleton; the mixing axis is the only difference."""

    def __init__(self, cfg: STDAEConfig, mix):
        super().__init__()
        d = cfg.embed_dim
        self._mix = mix
        self.encoder = _transformer_stack(d, cfg.heads, cfg.n_encoder_layers, cfg.dropout)
        self.encode_norm = nn.LayerNorm(d)
        self.latent_proj = nn.Linear(d, d)
        self.decoder = _transformer_stack(d, cfg.heads, cfg.n_decoder_layers, cfg.dropout)
        self.decode_norm = nn.LayerNorm(d)
        self.output = nn.Linear(d, cfg.patch_len)

    def encode(self, e: torch.Tensor) -> torch.Tensor:
        # (B, M, P, D) -> (B, M, P, D)
        return self.encode_norm(self._mix(self.encoder, e))

    def decode(self, h: torch.Tensor) -> torch.Tensor:
        # (B, M, P, D) -> (B, M, P, L)
        z = self._mix(self.decoder, self.latent_proj(h))
        return self.output(self.decode_norm(z))


class STDAE(nn.Module):
    """Two-branch reconstruction model over patch embeddings."""

    def __init__(self, cfg: STDAEConfig, n_nodes: int):
        super().__init__()
        self.cfg = cfg
        self.n_nodes = n_nodes
        self.embedding = PatchEmbedding(cfg.patch_config(), n_nodes)
        self.sae = _Autoencoder(cfg, _over_nodes)
        self.tae = _Autoencoder(cfg, _over_patches)

    def embed(self, x_long: torch.Tensor) -> torch.Tensor:
        # (B, T_long, M, C) -> (B, M, P, D)
        return self.embedding(x_long)

    def encode(self, x_long: torch.Tensor) -> tuple[torch.Tensor, torch.Tensor]:
        """Frozen-use entry point: spatial and temporal latents of a window."""
        e = self.embed(x_long)
        return self.sae.encode(e), self.tae.encode(e)

    def forward(self, x_long: torch.Tensor) -> tuple[torch.Tensor, torch.Tensor]:
        # returns the two reconstructions, each (B, M, P, L)
        e = self.embed(x_long)
        ys = self.sae.decode(self.sae.encode(e))
        yt = self.tae.decode(self.tae.encode(e))
        return ys, yt


def reconstruction_loss(
    ys: torch.Tensor, yt: torch.Tensor, y_patches: torch.Tensor
) -> torch.Tensor:
    """Equal-weight sum of both branches' MAE against the true ramp patches."""
    if ys.shape != y_patches.shape or yt.shape != y_patches.shape:
        raise ValueError(
            f"shape mismatch: ys {tuple(ys.shape)}, yt {tuple(yt.shape)}, "
            f"targets {tuple(y_patches.shape)}"
        )
    return (ys - y_patches).abs().mean() + (yt - y_patches).abs().mean()


def save_stdae(model: STDAE, out_dir: str | Path) -> Path:
    """Write parameter blob + config sidecar to a checkpoint directory."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    sidecar = asdict(model.cfg) | {"n_nodes": model.n_nodes}
    (out / SIDECAR_FILE).write_text(json.dumps(sidecar, indent=2) + "\n", encoding="utf-8")
    torch.save(model.state_dict(), out / CHECKPOINT_FILE)
    return out


def load_stdae(ckpt_dir: str | Path) -> STDAE:
    """Rebuild a model from its sidecar, then restore parameters."""
    ckpt_dir = Path(ckpt_dir)
    sidecar = json.loads((ckpt_dir / SIDECAR_FILE).read_text(encoding="utf-8"))
    required = {
        "embed_dim", "n_encoder_layers", "n_decoder_layers", "heads",
        "patch_len", "t_long", "channels", "dropout", "seed", "n_nodes",
    }
    missing = required - sidecar.keys()
    if missing:
        raise ValueError(f"checkpoint sidecar missing keys {sorted(missing)}")
    n_nodes = sidecar.pop("n_nodes")
    cfg = STDAEConfig(**{k: sidecar[k] for k in sidecar if k in STDAEConfig.__dataclass_fields__})
    model = STDAE(cfg, n_nodes)
    state = torch.load(ckpt_dir / CHECKPOINT_FILE, map_location="cpu", weights_only=True)
    model.load_state_dict(state)
    return model
