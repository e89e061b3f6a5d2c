"""Patch embedding of long fused windows.

A window (T_long, M, C) is segmented into P = T_long / L non-overlapping
patches per movement, each patch flattened step-major to a length-L*C vector,
projected to the model dimension, layer-normalized, and offset with a 2D
sinusoidal positional encoding (one half of the channels encodes the patch
index, the other half the node index).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import torch
from torch import nn


@dataclass(frozen=True)
class PatchConfig:
    """Patching geometry; t_long must split into whole patches."""

    t_long: int
    patch_len: int  # L
    embed_dim: int  # D
    channels: int  # C

    def __post_init__(self):
        if self.t_long % self.patch_len != 0:
            raise ValueError(
                f"t_long={self.t_long} is not divisible by patch_len={self.patch_len}"
            )
        if self.embed_dim % 4 != 0:
            raise ValueError(
                f"embed_dim must be divisible by 4 for 2D sin/cos pairs, got {self.embed_dim}"
            )

    @property
    def n_patches(self) -> int:
        return self.t_long // self.patch_len


def _movedim(x, source: int, dest: int):
    if isinstance(x, torch.Tensor):
        return x.movedim(source, dest)
    return np.moveaxis(x, source, dest)


def patchify(x, patch_len: int):
    """(..., T, M, C) -> (..., M, P, L*C), flattened (step, channel)-major.

    Works on torch tensors and numpy arrays alike.
    """
    *lead, t, m, c = x.shape
    if t % patch_len != 0:
        raise ValueError(f"window length {t} is not divisible by patch_len={patch_len}")
    p = t // patch_len
    z = x.reshape(*lead, p, patch_len, m, c)  # (..., P, L, M, C)
    z = _movedim(z, -2, -4)  # (..., M, P, L, C)
    return z.reshape(*lead, m, p, patch_len * c)


def unpatchify(z, patch_len: int, channels: int):
    """Inverse of :func:`patchify`: (..., M, P, L*C) -> (..., T, M, C)."""
    *lead, m, p, lc = z.shape
    if lc != patch_len * channels:
        raise ValueError(f"last dim {lc} != patch_len*channels = {patch_len * channels}")
    x = z.reshape(*lead, m, p, patch_len, channels)  # (..., M, P, L, C)
    x = _movedim(x, -4, -2)  # (..., P, L, M, C)
    return x.reshape(*lead, p * patch_len, m, channels)


def _sinusoid(positions: np.ndarray, dim: int) -> np.ndarray:
    """Interleaved sin/cos table (len(positions), dim) at geometric frequencies."""
    k = np.arange(dim // 2)
    freq = np.power(10000.0, -2.0 * k / dim)  # (dim/2,)
    angles = positions[:, None] * freq[None, :]
    table = np.empty((len(positions), dim))
    table[:, 0::2] = np.sin(angles)
    table[:, 1::2] = np.cos(angles)
    return table


def positional_encoding_2d(
    n_nodes: int, n_patches: int, embed_dim: int, dtype: torch.dtype = torch.float32
) -> torch.Tensor:
    """Deterministic parameter-free table (M, P, D).

    Channels [0, D/2) encode the patch index, channels [D/2, D) the node
    index, each half with its own interleaved sin/cos schedule.
    """
    if embed_dim % 4 != 0:
        raise ValueError(f"embed_dim must be divisible by 4, got {embed_dim}")
    half = embed_dim // 2
    patch_part = _sinusoid(np.arange(n_patches, dtype=np.float64), half)  # (P, half)
    node_part = _sinusoid(np.arange(n_nodes, dtype=np.float64), half)  # (M, half)
    table = np.empty((n_nodes, n_patches, embed_dim))
    table[:, :, :half] = patch_part[None, :, :]
    table[:, :, half:] = node_part[:, None, :]
    return torch.from_numpy(table).to(dtype)


class PatchEmbedding(nn.Module):
    """project -> LayerNorm -> add positional encoding, in that order."""

    def __init__(self, cfg: PatchConfig, n_nodes: int):
        super().__init__()
        self.cfg = cfg
        self.proj = nn.Linear(cfg.patch_len * cfg.channels, cfg.embed_dim)
        self.norm = nn.LayerNorm(cfg.embed_dim)
        # parameter-free; recomputed from config, never serialized
        self.register_buffer(
            "pe",
            positional_encoding_2d(n_nodes, cfg.n_patches, cfg.embed_dim),
            persistent=False,
        )

    def forward(self, x: torch.Tensor) -> torch.Tensor:
        # x: (B, T_long, M, C) -> E: (B, M, P, D)
        z = patchify(x, self.cfg.patch_len)
        return self.norm(self.proj(z)) + self.pe
