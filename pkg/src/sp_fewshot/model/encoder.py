#
# SP Few-Shot - Patch Transformer Encoder
#
# Copyright (c) 2026 Shareef Jalloq
# SPDX-License-Identifier: BSD-2-Clause
#
# image -> patches -> tokens -> L pre-norm transformer layers -> mean pooling.
# All ops accept arbitrary leading batch dimensions.
#

from typing import Optional

import torch
from torch import Tensor, nn

from sp_fewshot.common.config import ModelConfig
from sp_fewshot.common.errors import ConfigError, ShapeError

from .core_math import DTYPE, LayerNorm, MLPBlock, MultiHeadSelfAttention, linear


# =============================================================================
# Patches
# =============================================================================

def patchify(img: Tensor, patch_size: int) -> Tensor:
    """
    Split (..., H, W, C) images into row-major flattened patches.

    Patches are ordered left-to-right, top-to-bottom; each row holds the
    patch pixels in (row, col, channel) order.

    Returns:
        (..., M, P*P*C) with M = (H/P) * (W/P)
    """
    if img.dim() < 3:
        raise ShapeError(f"expected (..., H, W, C) image, got shape {tuple(img.shape)}")
    h, w, c = img.shape[-3:]
    p = patch_size
    if p < 1 or h % p or w % p:
        raise ConfigError(f"image {h}x{w} not divisible into {p}x{p} patches")
    lead = img.shape[:-3]
    x = img.reshape(*lead, h // p, p, w // p, p, c).transpose(-4, -3)
    return x.reshape(*lead, (h // p) * (w // p), p * p * c)


def embed_patches(patches: Tensor, weight: Tensor, pos: Tensor) -> Tensor:
    """Z_0[i] = W_embed patch_i + pos_i"""
    if patches.shape[-2:] != (pos.shape[0], weight.shape[1]):
        raise ShapeError(
            f"patches {tuple(patches.shape[-2:])} do not match "
            f"(M, patch_dim) = ({pos.shape[0]}, {weight.shape[1]})"
        )
    return linear(patches, weight) + pos


class PatchEmbedding(nn.Module):

    def __init__(self, patch_dim: int, num_patches: int, width: int):
        super().__init__()
        self.weight = nn.Parameter(torch.zeros(width, patch_dim, dtype=DTYPE))
        self.pos = nn.Parameter(torch.zeros(num_patches, width, dtype=DTYPE))

    def forward(self, patches: Tensor) -> Tensor:
        return embed_patches(patches, self.weight, self.pos)


# =============================================================================
# Transformer Layer
# =============================================================================

class TransformerLayer(nn.Module):
    """Pre-norm block: Z' = Z + MSA(LN(Z)); out = Z' + MLP(LN(Z'))."""

    def __init__(self, cfg: ModelConfig):
        super().__init__()
        self.norm1 = LayerNorm(cfg.width, cfg.layer_norm_eps)
        self.attn = MultiHeadSelfAttention(cfg.attention)
        self.norm2 = LayerNorm(cfg.width, cfg.layer_norm_eps)
        self.mlp = MLPBlock(cfg.width, cfg.width * cfg.mlp_ratio, cfg.width, act1=cfg.activation)

    def forward(self, z: Tensor, return_attention: bool = False):
        attn_out = self.attn(self.norm1(z), return_attention=return_attention)
        if return_attention:
            attn_out, attn = attn_out
        z = z + attn_out
        z = z + self.mlp(self.norm2(z))
        return (z, attn) if return_attention else z


def transformer_layer(z: Tensor, layer: TransformerLayer) -> Tensor:
    return layer(z)


# =============================================================================
# Encoder
# =============================================================================

def init_parameters(module: nn.Module, std: float, seed: int) -> nn.Module:
    """
    Deterministic init from a private generator: weights ~ N(0, std²),
    biases / beta = 0, gamma = 1. Visits parameters in registration order.
    """
    gen = torch.Generator().manual_seed(seed)
    with torch.no_grad():
        for name, param in module.named_parameters():
            leaf = name.rsplit(".", 1)[-1]
            if leaf == "gamma":
                param.fill_(1.0)
            elif leaf in ("beta", "bias"):
                param.zero_()
            else:
                param.normal_(0.0, std, generator=gen)
    return module


class Encoder(nn.Module):
    """Patch transformer feature extractor f."""

    def __init__(self, cfg: ModelConfig):
        super().__init__()
        cfg.validate()
        self.cfg = cfg
        self.embed = PatchEmbedding(cfg.patch_dim, cfg.num_patches, cfg.width)
        self.layers = nn.ModuleList(TransformerLayer(cfg) for _ in range(cfg.depth))

    def _check_images(self, images: Tensor) -> None:
        cfg = self.cfg
        expected = (cfg.image_size, cfg.image_size, cfg.channels)
        if images.dim() < 3 or tuple(images.shape[-3:]) != expected:
            raise ShapeError(f"expected (..., {expected}) images, got {tuple(images.shape)}")

    def tokens(self, images: Tensor) -> Tensor:
        """Z_0 for (..., H, W, C) images."""
        self._check_images(images)
        return self.embed(patchify(images.to(DTYPE), self.cfg.patch_size))

    def run_layers(
        self,
        z: Tensor,
        start: int = 0,
        stop: Optional[int] = None,
        attention_maps: Optional[list] = None,
    ) -> Tensor:
        """Apply layers[start:stop] (0-based). Appends per-layer attention if a list is given."""
        for layer in self.layers[start:stop]:
            if attention_maps is None:
                z = layer(z)
            else:
                z, attn = layer(z, return_attention=True)
                attention_maps.append(attn)
        return z

    def encode(self, images: Tensor) -> Tensor:
        """f(x) = mean of the final patch tokens; (..., H, W, C) -> (..., C_z)."""
        return self.run_layers(self.tokens(images)).mean(dim=-2)

    def forward(self, images: Tensor) -> Tensor:
        return self.encode(images)


def encode(img: Tensor, model: Encoder) -> Tensor:
    return model.encode(img)
