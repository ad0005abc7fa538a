#
# SP Few-Shot - Toy Builders
#
# Copyright (c) 2026 Shareef Jalloq
# SPDX-License-Identifier: BSD-2-Clause
#

"""
Tiny models and datasets that keep the fast suites under a few seconds.
"""

import torch

from sp_fewshot.common.config import (
    Mechanism, ModelConfig, Pooling, ProjectorKind, PromptConfig, SyntheticConfig,
)
from sp_fewshot.data.dataset import SplitDataset
from sp_fewshot.data.embeddings import ClassEmbeddingTable, synth_embeddings
from sp_fewshot.data.synthetic import generate_synthetic_dataset
from sp_fewshot.model.prompt import SemanticPromptModel

TOY_MODEL = ModelConfig(
    image_size=8, channels=1, patch_size=4, depth=2, width=8, num_heads=2,
    mlp_ratio=2, init_std=0.5,
)
TOY_SEMANTIC_DIM = 6

# 2x2 cell grid, so motifs plus clutter must fit in four cells
TINY_SYNTHETIC = SyntheticConfig(
    image_size=8, cell_size=4, motifs_min=1, motifs_max=2, clutter_pool=4,
    clutter_min=0, clutter_max=2,
)


def toy_model(
    mechanism: Mechanism = Mechanism.BOTH,
    inject_layer: int = 2,
    seed: int = 0,
    pooling: Pooling = Pooling.ALL,
    projector: ProjectorKind = ProjectorKind.LINEAR,
    cfg: ModelConfig = TOY_MODEL,
) -> SemanticPromptModel:
    pcfg = PromptConfig(
        mechanism=mechanism, inject_layer=inject_layer, projector_kind=projector,
        pooling=pooling, semantic_dim=TOY_SEMANTIC_DIM,
    )
    return SemanticPromptModel.build(cfg, pcfg, seed)


def toy_images(n: int, seed: int = 0, cfg: ModelConfig = TOY_MODEL) -> torch.Tensor:
    gen = torch.Generator().manual_seed(seed)
    return torch.rand(n, cfg.image_size, cfg.image_size, cfg.channels,
                      generator=gen, dtype=torch.float64)


def toy_embedding(n: int = 1, seed: int = 0) -> torch.Tensor:
    gen = torch.Generator().manual_seed(seed + 1000)
    return torch.randn(n, TOY_SEMANTIC_DIM, generator=gen, dtype=torch.float64)


def tiny_dataset(num_classes: int = 8, per_class: int = 6, seed: int = 0) -> SplitDataset:
    """8 classes: 4 base, 2 validation, 2 novel, 8x8 single-channel images."""
    return generate_synthetic_dataset(num_classes, per_class, TINY_SYNTHETIC, seed)


def tiny_embeddings(ds: SplitDataset, seed: int = 0) -> ClassEmbeddingTable:
    return synth_embeddings(ds.class_names(), TOY_SEMANTIC_DIM, seed, aligned_motifs=ds.class_motifs)
