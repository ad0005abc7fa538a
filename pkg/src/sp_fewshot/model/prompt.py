#
# SP Few-Shot - Semantic Prompt
#
# Copyright (c) 2026 Shareef Jalloq
# SPDX-License-Identifier: BSD-2-Clause
#
# Conditions the encoder on a class-name embedding g(y):
#   - spatial interaction (SI): z0 = h_s(g) is prepended to the token sequence
#     at the injection layer and flows through the remaining layers
#   - channel interaction (CI): beta = sigmoid(W2 act(W1 [h_c(g); mean(Z)] + b1) + b2)
#     is added to every patch token entering the injection layer
# With BOTH, channel modulation runs first, then the prompt token is added.
#

import dataclasses
from dataclasses import dataclass
from typing import Optional

import torch
from torch import Tensor, nn

from sp_fewshot.common.config import (
    Activation, Mechanism, ModelConfig, Pooling, ProjectorKind, PromptConfig,
)
from sp_fewshot.common.errors import ConfigError, ShapeError, StateError

from .core_math import DTYPE, MLPBlock, linear
from .encoder import Encoder, init_parameters


# =============================================================================
# Data Structures
# =============================================================================

@dataclass
class TokenSequence:
    """Token tensor (..., S, C_z) plus whether row 0 is a prompt token."""
    tokens: Tensor
    prompted: bool = False

    def __post_init__(self):
        if self.tokens.dim() < 2 or self.tokens.shape[-2] < 1:
            raise ShapeError(f"token sequence needs shape (..., S>=1, C), got {tuple(self.tokens.shape)}")

    @property
    def length(self) -> int:
        return self.tokens.shape[-2]

    @property
    def num_patches(self) -> int:
        return self.length - 1 if self.prompted else self.length

    @property
    def patch_tokens(self) -> Tensor:
        return self.tokens[..., 1:, :] if self.prompted else self.tokens


# =============================================================================
# Modules
# =============================================================================

class Projector(nn.Module):
    """h: D_g -> C_z, either a single linear map or Linear-GELU-Linear."""

    def __init__(self, in_dim: int, out_dim: int, kind: ProjectorKind = ProjectorKind.LINEAR):
        super().__init__()
        self.in_dim = in_dim
        self.kind = ProjectorKind(kind)
        if self.kind == ProjectorKind.LINEAR:
            self.fc = nn.Linear(in_dim, out_dim, dtype=DTYPE)
        else:
            self.mlp = MLPBlock(in_dim, out_dim, out_dim, Activation.GELU_TANH, Activation.IDENTITY)

    def forward(self, g: Tensor) -> Tensor:
        if g.shape[-1] != self.in_dim:
            raise ShapeError(f"semantic embedding width {g.shape[-1]} != projector input {self.in_dim}")
        g = g.to(DTYPE)
        if self.kind == ProjectorKind.LINEAR:
            return linear(g, self.fc.weight, self.fc.bias)
        return self.mlp(g)


class SemanticPrompt(nn.Module):
    """Projectors h_s, h_c and the channel-interaction MLP."""

    def __init__(self, width: int, cfg: PromptConfig):
        super().__init__()
        self.width = width
        self.spatial_projector = Projector(cfg.semantic_dim, width, cfg.projector_kind)
        self.channel_projector = Projector(cfg.semantic_dim, width, cfg.projector_kind)
        self.channel_mlp = MLPBlock(
            2 * width, width, width,
            act1=cfg.ci_inner_activation, act2=Activation.SIGMOID,
        )


# =============================================================================
# Prompt Operations
# =============================================================================

def project_spatial(g_y: Tensor, prompt: SemanticPrompt) -> Tensor:
    """z0 = h_s(g(y))"""
    return prompt.spatial_projector(g_y)


def extend_sequence(seq: TokenSequence, z0: Tensor) -> TokenSequence:
    """Prepend the prompt token: [z0, z_1, ..., z_M]."""
    if seq.prompted:
        raise StateError("sequence already carries a prompt token")
    tokens = seq.tokens
    if z0.shape[-1] != tokens.shape[-1]:
        raise ShapeError(f"prompt width {z0.shape[-1]} != token width {tokens.shape[-1]}")
    z0 = z0.unsqueeze(-2).expand(*tokens.shape[:-2], 1, tokens.shape[-1])
    return TokenSequence(torch.cat([z0, tokens], dim=-2), prompted=True)


def modulation_vector(seq: TokenSequence, g_y: Tensor, prompt: SemanticPrompt) -> Tensor:
    """beta = MLP([h_c(g); z_c]) with z_c the mean patch token; entries in (0, 1)."""
    if seq.prompted:
        raise StateError("channel modulation expects a prompt-free patch sequence")
    context = seq.tokens.mean(dim=-2)
    z0 = prompt.channel_projector(g_y)
    if z0.shape[-1] != context.shape[-1]:
        raise ShapeError(f"h_c output {z0.shape[-1]} != token width {context.shape[-1]}")
    z0, context = torch.broadcast_tensors(z0, context)
    return prompt.channel_mlp(torch.cat([z0, context], dim=-1))


def channel_modulate(seq: TokenSequence, g_y: Tensor, prompt: SemanticPrompt) -> TokenSequence:
    """Add beta to every patch token."""
    beta = modulation_vector(seq, g_y, prompt)
    return TokenSequence(seq.tokens + beta.unsqueeze(-2), prompted=False)


def pool_sequence(seq: TokenSequence, pooling: Pooling) -> Tensor:
    pooling = Pooling(pooling)
    if pooling == Pooling.HEAD:
        if not seq.prompted:
            raise ConfigError("pooling 'head' needs a prompt token")
        return seq.tokens[..., 0, :]
    if pooling == Pooling.PATCHES:
        return seq.patch_tokens.mean(dim=-2)
    return seq.tokens.mean(dim=-2)


# =============================================================================
# Prompted Model
# =============================================================================

class SemanticPromptModel(nn.Module):
    """Encoder f plus prompt parameters; f_g(x) = f(x | g(y))."""

    def __init__(self, model_cfg: ModelConfig, prompt_cfg: Optional[PromptConfig] = None):
        super().__init__()
        model_cfg.validate()
        self.model_cfg = model_cfg
        self.prompt_cfg = (prompt_cfg or PromptConfig()).resolved(model_cfg.depth)
        self.encoder = Encoder(model_cfg)
        self.prompt = SemanticPrompt(model_cfg.width, self.prompt_cfg)

    @classmethod
    def build(
        cls,
        model_cfg: ModelConfig,
        prompt_cfg: Optional[PromptConfig] = None,
        seed: int = 0,
    ) -> "SemanticPromptModel":
        model = cls(model_cfg, prompt_cfg)
        init_parameters(model, model_cfg.init_std, seed)
        return model

    def resolve(self, pcfg: Optional[PromptConfig] = None) -> PromptConfig:
        if pcfg is None:
            return self.prompt_cfg
        if pcfg.semantic_dim != self.prompt_cfg.semantic_dim \
                or pcfg.projector_kind != self.prompt_cfg.projector_kind:
            raise ConfigError("prompt override cannot change semantic_dim or projector_kind")
        return pcfg.resolved(self.model_cfg.depth)

    def with_prompt_config(self, **changes) -> PromptConfig:
        """Resolved copy of the model's prompt config with some fields replaced."""
        return self.resolve(dataclasses.replace(self.prompt_cfg, **changes))

    def encode(self, images: Tensor) -> Tensor:
        return self.encoder.encode(images)

    def prompted_tokens(
        self,
        images: Tensor,
        g_y: Tensor,
        pcfg: Optional[PromptConfig] = None,
        attention_maps: Optional[list] = None,
    ) -> TokenSequence:
        """Final-layer token sequence of the prompted forward pass."""
        pcfg = self.resolve(pcfg)
        enc = self.encoder
        split = pcfg.inject_layer - 1

        z = enc.run_layers(enc.tokens(images), 0, split, attention_maps)
        seq = TokenSequence(z)
        mech = pcfg.mechanism
        if mech.channel:
            seq = channel_modulate(seq, g_y, self.prompt)
        if mech.spatial:
            seq = extend_sequence(seq, project_spatial(g_y, self.prompt))
        z = enc.run_layers(seq.tokens, split, None, attention_maps)
        return TokenSequence(z, prompted=seq.prompted)

    def encode_with_prompt(
        self,
        images: Tensor,
        g_y: Tensor,
        pcfg: Optional[PromptConfig] = None,
    ) -> Tensor:
        """
        Prompted feature f_g(x).

        Mechanism NONE is exactly encode(); otherwise layers before the
        injection layer run unprompted and the output sequence is pooled
        per the configured strategy.
        """
        pcfg = self.resolve(pcfg)
        if pcfg.mechanism == Mechanism.NONE:
            return self.encode(images)
        return pool_sequence(self.prompted_tokens(images, g_y, pcfg), pcfg.pooling)

    def forward(self, images: Tensor, g_y: Optional[Tensor] = None) -> Tensor:
        if g_y is None:
            return self.encode(images)
        return self.encode_with_prompt(images, g_y)

    def encoder_parameters(self):
        return self.encoder.parameters()

    def prompt_parameters(self):
        return self.prompt.parameters()


def encode_with_prompt(
    img: Tensor,
    g_y: Tensor,
    model: SemanticPromptModel,
    pcfg: Optional[PromptConfig] = None,
) -> Tensor:
    return model.encode_with_prompt(img, g_y, pcfg)
