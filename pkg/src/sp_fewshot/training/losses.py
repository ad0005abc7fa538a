#
# SP Few-Shot - Losses
#
# Copyright (c) 2026 Shareef Jalloq
# SPDX-License-Identifier: BSD-2-Clause
#

from typing import Sequence, Union

import torch
import torch.nn.functional as F
from torch import Tensor, nn

from sp_fewshot.common.errors import ConfigError, InputError, ShapeError
from sp_fewshot.data.episodes import Prototype, prototype_matrix
from sp_fewshot.model.core_math import DTYPE, cosine_similarity_matrix, ensure_finite, linear


class ClassifierHead(nn.Module):
    """Linear base-class head used only during pre-training."""

    def __init__(self, num_classes: int, width: int):
        super().__init__()
        if num_classes < 1:
            raise ConfigError(f"num_classes must be positive, got {num_classes}")
        self.weight = nn.Parameter(torch.zeros(num_classes, width, dtype=DTYPE))
        self.bias = nn.Parameter(torch.zeros(num_classes, dtype=DTYPE))

    @property
    def num_classes(self) -> int:
        return self.weight.shape[0]

    def forward(self, features: Tensor) -> Tensor:
        return linear(features, self.weight, self.bias)


def _labels(labels: Union[Tensor, Sequence[int]], count: int, num_classes: int) -> Tensor:
    labels = torch.as_tensor(labels, dtype=torch.long)
    if labels.shape != (count,):
        raise ShapeError(f"expected {count} labels, got shape {tuple(labels.shape)}")
    if count and (labels.min() < 0 or labels.max() >= num_classes):
        raise InputError(f"labels must lie in [0, {num_classes}), got {labels.tolist()}")
    return labels


def pretrain_loss(features: Tensor, labels: Union[Tensor, Sequence[int]], head: ClassifierHead) -> Tensor:
    """Mean over the batch of -log softmax(W f(x) + b)[y]."""
    if features.dim() != 2:
        raise ShapeError(f"features must be (B, C), got {tuple(features.shape)}")
    labels = _labels(labels, features.shape[0], head.num_classes)
    return F.cross_entropy(head(features), labels)


def meta_logits(query_features: Tensor, prototypes: Tensor, temperature: float) -> Tensor:
    """Cosine similarity to every prototype divided by temperature: (Q, N)."""
    if not temperature > 0:
        raise ConfigError(f"temperature must be > 0, got {temperature}")
    ensure_finite(query_features, "query features")
    return cosine_similarity_matrix(query_features, prototypes) / temperature


def meta_loss(
    query_features: Tensor,
    prototypes: Union[Tensor, Sequence[Prototype]],
    labels: Union[Tensor, Sequence[int]],
    temperature: float = 0.2,
) -> Tensor:
    """
    Prototype loss of one episode.

    Args:
        query_features: (Q, C) unprompted query features
        prototypes: (N, C) tensor or Prototype list in label order
        labels: Q episode labels in [0, N)
        temperature: Logit temperature tau > 0

    Returns:
        Mean cross entropy of cos(f(x_q), p) / tau
    """
    if not isinstance(prototypes, Tensor):
        prototypes = prototype_matrix(prototypes)
    logits = meta_logits(query_features, prototypes, temperature)
    labels = _labels(labels, logits.shape[0], logits.shape[1])
    return F.cross_entropy(logits, labels)
