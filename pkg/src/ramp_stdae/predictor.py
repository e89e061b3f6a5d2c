"""Downstream forecaster and fusion of pretrained representations.

The reference predictor stacks gated dilated temporal convolutions with graph
convolutions over the movement graph (given adjacency with self-loops plus a
learned adaptive adjacency), with causal padding so the hidden representation
keeps the input's T steps at the fusion point. Frozen spatial/temporal latents
are projected by two independent two-layer MLPs and summed onto that hidden
representation; a two-layer head collapses (T, D') to the S-step forecast per
movement.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import asdict, dataclass
from pathlib import Path

import numpy as np
import torch
import torch.nn.functional as torch_fn
from torch import nn

from ramp_stdae.dataset import Normalizer

FORECASTER_FILE = "forecaster.pt"
FORECASTER_SIDECAR = "forecaster.json"


@dataclass(frozen=True)
class PredictorConfig:
    """Backbone settings for the reference graph-temporal predictor."""

    hidden_dim: int = 32  # D'
    dilations: tuple[int, ...] = (1, 2, 1, 2)
    graph_conv_depth: int = 1  # diffusion hops per block
    adaptive_embed_dim: int = 10
    horizon: int = 12  # S
    head_hidden: int = 256


@dataclass(frozen=True)
class FusionConfig:
    """Which pretrained branches feed the predictor, and their geometry."""

    source_dim: int = 96  # latent dim of the pretrained encoders
    patch_len: int = 12
    t_prime: int = 1
    use_spatial: bool = True
    use_temporal: bool = True

    def __post_init__(self):
        if not (self.use_spatial or self.use_temporal):
            raise ValueError("fusion must enable at least one branch; use fusion=None instead")


def extract_last_patches(h: torch.Tensor, t_prime: int, t_steps: int, patch_len: int) -> torch.Tensor:
    """Spread the last t_prime patch vectors of (B, M, P, D) over (B, T, M, D).

    Each selected patch vector is repeated over the patch_len steps it covers;
    the trailing t_steps rows are returned. With t_prime=1 and patch_len=T
    this broadcasts the final patch along the whole time axis.
    """
    b, m, p, d = h.shape
    if not 1 <= t_prime <= p:
        raise ValueError(f"t_prime={t_prime} out of range for P={p} patches")
    if t_prime * patch_len < t_steps:
        raise ValueError(
            f"last {t_prime} patches cover {t_prime * patch_len} steps < T={t_steps}"
        )
    sel = h[:, :, p - t_prime:, :]  # (B, M, T', D)
    spread = sel.repeat_interleave(patch_len, dim=2)  # (B, M, T'*L, D)
    return spread[:, :, -t_steps:, :].permute(0, 2, 1, 3)  # (B, T, M, D)


class FusionMLP(nn.Module):
    """Two-layer perceptron bridging latent dim D to predictor dim D'."""

    def __init__(self, source_dim: int, target_dim: int):
        super().__init__()
        self.net = nn.Sequential(
            nn.Linear(source_dim, source_dim),
            nn.ReLU(),
            nn.Linear(source_dim, target_dim),
        )

    def forward(self, x: torch.Tensor) -> torch.Tensor:
        return self.net(x)

    def zero_(self) -> None:
        """Zero all weights and biases; the fused model then equals the bare one."""
        with torch.no_grad():
            for p in self.parameters():
                p.zero_()


class _GraphConv(nn.Module):
    """Diffusion over a list of node supports, mixed by 1x1 convolutions."""

    def __init__(self, dim: int, n_supports: int, depth: int):
        super().__init__()
        self.depth = depth
        self.mix = nn.Conv2d(dim * (1 + n_supports * depth), dim, kernel_size=(1, 1))

    def forward(self, x: torch.Tensor, supports: list[torch.Tensor]) -> torch.Tensor:
        # x: (B, D', M, T); support: (M, M) row-normalized
        fields = [x]
        for a in supports:
            h = x
            for _ in range(self.depth):
                h = torch.einsum("nm,bdmt->bdnt", a, h)
                fields.append(h)
        return self.mix(torch.cat(fields, dim=1))


class _GatedBlock(nn.Module):
    """tanh/sigmoid gated dilated causal conv followed by graph mixing."""

    def __init__(self, dim: int, dilation: int, n_supports: int, depth: int):
        super().__init__()
        self.dilation = dilation
        self.filter_conv = nn.Conv2d(dim, dim, kernel_size=(1, 2), dilation=(1, dilation))
        self.gate_conv = nn.Conv2d(dim, dim, kernel_size=(1, 2), dilation=(1, dilation))
        self.gconv = _GraphConv(dim, n_supports, depth)
        self.norm = nn.LayerNorm(dim)

    def forward(self, x: torch.Tensor, supports: list[torch.Tensor]) -> torch.Tensor:
        residual = x
        # left-pad so the time axis keeps its length (causal)
        padded = torch_fn.pad(x, (self.dilation, 0, 0, 0))
        gated = torch.tanh(self.filter_conv(padded)) * torch.sigmoid(self.gate_conv(padded))
        out = self.gconv(gated, supports) + residual
        # LayerNorm over channels per (node, step)
        return self.norm(out.permute(0, 2, 3, 1)).permute(0, 3, 1, 2)


def normalized_adjacency(adj: np.ndarray | torch.Tensor) -> torch.Tensor:
    """Row-normalize (A + I) for diffusion."""
    a = torch.as_tensor(np.asarray(adj), dtype=torch.float32)
    a = a + torch.eye(a.shape[0])
    return a / a.sum(dim=1, keepdim=True)


class RampForecaster(nn.Module):
    """Graph-temporal predictor with optional fusion of pretrained latents.

    Shared (non-fusion) parameters are constructed before the fusion MLPs so
    that, under the same torch seed, the bare and fused variants initialize
    the shared parts identically.
    """

    def __init__(
        self,
        in_channels: int,
        n_nodes: int,
        input_len: int,
        adjacency: np.ndarray | torch.Tensor,
        cfg: PredictorConfig = PredictorConfig(),
        fusion: FusionConfig | None = None,
    ):
        super().__init__()
        self.cfg = cfg
        self.fusion_cfg = fusion
        self.in_channels = in_channels
        self.n_nodes = n_nodes
        self.input_len = input_len
        self.register_buffer("support", normalized_adjacency(adjacency))

        d = cfg.hidden_dim
        self.input_proj = nn.Conv2d(in_channels, d, kernel_size=(1, 1))
        # two supports: the given graph and the learned adaptive one
        self.blocks = nn.ModuleList(
            _GatedBlock(d, dil, n_supports=2, depth=cfg.graph_conv_depth)
            for dil in cfg.dilations
        )
        self.node_emb_src = nn.Parameter(torch.randn(n_nodes, cfg.adaptive_embed_dim))
        self.node_emb_dst = nn.Parameter(torch.randn(n_nodes, cfg.adaptive_embed_dim))
        self.head = nn.Sequential(
            nn.Linear(input_len * d, cfg.head_hidden),
            nn.ReLU(),
            nn.Linear(cfg.head_hidden, cfg.horizon),
        )

        if fusion is not None:
            self.fusion_spatial = FusionMLP(fusion.source_dim, d) if fusion.use_spatial else None
            self.fusion_temporal = FusionMLP(fusion.source_dim, d) if fusion.use_temporal else None
        else:
            self.fusion_spatial = None
            self.fusion_temporal = None

    def adaptive_support(self) -> torch.Tensor:
        logits = torch.relu(self.node_emb_src @ self.node_emb_dst.T)
        return torch.softmax(logits, dim=1)

    def hidden(self, x_short: torch.Tensor) -> torch.Tensor:
        """Backbone representation H(F): (B, T, M, C) -> (B, T, M, D')."""
        b, t, m, c = x_short.shape
        if t != self.input_len or m != self.n_nodes or c != self.in_channels:
            raise ValueError(
                f"expected input (B, {self.input_len}, {self.n_nodes}, {self.in_channels}), "
                f"got {tuple(x_short.shape)}"
            )
        supports = [self.support, self.adaptive_support()]
        h = self.input_proj(x_short.permute(0, 3, 2, 1))  # (B, D', M, T)
        for block in self.blocks:
            h = block(h, supports)
        return h.permute(0, 3, 2, 1)  # (B, T, M, D')

    def fuse(
        self,
        hf: torch.Tensor,
        hs_last: torch.Tensor | None,
        ht_last: torch.Tensor | None,
    ) -> torch.Tensor:
        """Sum projected latents onto the hidden representation."""
        out = hf
        if self.fusion_spatial is not None and hs_last is not None:
            out = out + self.fusion_spatial(hs_last)
        if self.fusion_temporal is not None and ht_last is not None:
            out = out + self.fusion_temporal(ht_last)
        return out

    def forward(
        self,
        x_short: torch.Tensor,
        hs: torch.Tensor | None = None,
        ht: torch.Tensor | None = None,
    ) -> torch.Tensor:
        """Normalized S-step forecast (B, S, M, 1).

        hs/ht are full latents (B, M, P, D) from the frozen encoders; their
        last t_prime patches are spread over the T input steps before fusion.
        """
        hf = self.hidden(x_short)
        hs_last = ht_last = None
        if self.fusion_cfg is not None:
            fc = self.fusion_cfg
            if hs is not None and fc.use_spatial:
                hs_last = extract_last_patches(hs, fc.t_prime, self.input_len, fc.patch_len)
            if ht is not None and fc.use_temporal:
                ht_last = extract_last_patches(ht, fc.t_prime, self.input_len, fc.patch_len)
        h_aug = self.fuse(hf, hs_last, ht_last)  # (B, T, M, D')
        b = h_aug.shape[0]
        flat = h_aug.permute(0, 2, 1, 3).reshape(b, self.n_nodes, -1)  # (B, M, T*D')
        out = self.head(flat)  # (B, M, S)
        return out.permute(0, 2, 1).unsqueeze(-1)  # (B, S, M, 1)

    def predict(
        self,
        x_short: torch.Tensor,
        normalizer: Normalizer,
        hs: torch.Tensor | None = None,
        ht: torch.Tensor | None = None,
    ) -> torch.Tensor:
        """De-normalized forecast in vehicles/interval."""
        if normalizer is None:
            raise ValueError("a fitted Normalizer is required to de-normalize forecasts")
        out = self.forward(x_short, hs, ht)
        return out * normalizer.ramp_std + normalizer.ramp_mean


def file_sha256(path: str | Path) -> str:
    h = hashlib.sha256()
    h.update(Path(path).read_bytes())
    return h.hexdigest()


def save_forecaster(
    model: RampForecaster,
    out_dir: str | Path,
    normalizer: Normalizer,
    pretrain_dir: str | Path | None = None,
) -> Path:
    """Write forecaster weights + sidecar naming the consumed pretraining blob."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    pretrain_ref = None
    if pretrain_dir is not None:
        weights = Path(pretrain_dir) / "weights.pt"
        pretrain_ref = {"path": str(pretrain_dir), "sha256": file_sha256(weights)}
    sidecar = {
        "in_channels": model.in_channels,
        "n_nodes": model.n_nodes,
        "input_len": model.input_len,
        "predictor": asdict(model.cfg),
        "fusion": asdict(model.fusion_cfg) if model.fusion_cfg is not None else None,
        "normalizer": normalizer.to_dict(),
        "pretrain_checkpoint": pretrain_ref,
    }
    (out / FORECASTER_SIDECAR).write_text(json.dumps(sidecar, indent=2) + "\n", encoding="utf-8")
    torch.save(model.state_dict(), out / FORECASTER_FILE)
    return out


def load_forecaster(
    ckpt_dir: str | Path, adjacency: np.ndarray
) -> tuple[RampForecaster, Normalizer, dict]:
    """Rebuild a forecaster and its normalizer from a checkpoint directory."""
    ckpt_dir = Path(ckpt_dir)
    sidecar = json.loads((ckpt_dir / FORECASTER_SIDECAR).read_text(encoding="utf-8"))
    pred_cfg_doc = dict(sidecar["predictor"])
    pred_cfg_doc["dilations"] = tuple(pred_cfg_doc["dilations"])
    cfg = PredictorConfig(**pred_cfg_doc)
    fusion = None
    if sidecar["fusion"] is not None:
        fusion = FusionConfig(**sidecar["fusion"])
    model = RampForecaster(
        in_channels=sidecar["in_channels"],
        n_nodes=sidecar["n_nodes"],
        input_len=sidecar["input_len"],
        adjacency=adjacency,
        cfg=cfg,
        fusion=fusion,
    )
    state = torch.load(ckpt_dir / FORECASTER_FILE, map_location="cpu", weights_only=True)
    model.load_state_dict(state)
    normalizer = Normalizer.from_dict(sidecar["normalizer"])
    return model, normalizer, sidecar
