#
# SP Few-Shot - End-to-End Gradient Check
#
# Copyright (c) 2026 Shareef Jalloq
# SPDX-License-Identifier: BSD-2-Clause
#
# Finite-difference check of every trained parameter through both losses on
# a toy model, once per prompt variant.
#

from dataclasses import dataclass
from typing import Optional

import numpy as np
import torch

from sp_fewshot.common.config import (
    Mechanism, ModelConfig, Pooling, ProjectorKind, PromptConfig,
)
from sp_fewshot.common.log import get_logger
from sp_fewshot.data.episodes import compute_prototypes, group_features, prototype_matrix
from sp_fewshot.model.core_math import DTYPE, GradCheckReport, GradHook, check_gradients
from sp_fewshot.model.encoder import init_parameters
from sp_fewshot.model.prompt import SemanticPromptModel

from .losses import ClassifierHead, meta_loss, pretrain_loss

log = get_logger(__name__)

TOY_MODEL = ModelConfig(
    image_size=8, channels=1, patch_size=4, depth=2, width=8, num_heads=2,
    mlp_ratio=2, init_std=0.5,
)
TOY_SEMANTIC_DIM = 4
TOY_WAYS, TOY_SHOTS, TOY_QUERIES = 2, 2, 2
TOY_TEMPERATURE = 0.5

VARIANTS: dict[str, PromptConfig] = {
    "si": PromptConfig(Mechanism.SI, inject_layer=2, semantic_dim=TOY_SEMANTIC_DIM),
    "si-head": PromptConfig(Mechanism.SI, inject_layer=1, pooling=Pooling.HEAD,
                            semantic_dim=TOY_SEMANTIC_DIM),
    "ci": PromptConfig(Mechanism.CI, inject_layer=2, semantic_dim=TOY_SEMANTIC_DIM),
    "both": PromptConfig(Mechanism.BOTH, inject_layer=2, semantic_dim=TOY_SEMANTIC_DIM),
    "both-mlp": PromptConfig(Mechanism.BOTH, inject_layer=1, projector_kind=ProjectorKind.MLP,
                             pooling=Pooling.PATCHES, semantic_dim=TOY_SEMANTIC_DIM),
}


@dataclass
class ToyEpisode:
    support: torch.Tensor          # (N*K, H, W, C)
    support_labels: list[int]
    support_g: torch.Tensor        # (N*K, D_g), each row the item's own class
    query: torch.Tensor            # (N*Q, H, W, C)
    query_labels: list[int]


def toy_episode(seed: int = 0) -> ToyEpisode:
    rng = np.random.default_rng(seed)
    cfg = TOY_MODEL
    shape = (cfg.image_size, cfg.image_size, cfg.channels)
    class_g = rng.standard_normal((TOY_WAYS, TOY_SEMANTIC_DIM))
    s_labels = [c for c in range(TOY_WAYS) for _ in range(TOY_SHOTS)]
    q_labels = [c for c in range(TOY_WAYS) for _ in range(TOY_QUERIES)]
    return ToyEpisode(
        support=torch.tensor(rng.random((len(s_labels), *shape)), dtype=DTYPE),
        support_labels=s_labels,
        support_g=torch.tensor(class_g[s_labels], dtype=DTYPE),
        query=torch.tensor(rng.random((len(q_labels), *shape)), dtype=DTYPE),
        query_labels=q_labels,
    )


def toy_meta_loss(model: SemanticPromptModel, ep: ToyEpisode) -> torch.Tensor:
    support = model.encode_with_prompt(ep.support, ep.support_g)
    names = [str(c) for c in range(TOY_WAYS)]
    protos = compute_prototypes(group_features(support, ep.support_labels, names))
    return meta_loss(model.encode(ep.query), prototype_matrix(protos), ep.query_labels, TOY_TEMPERATURE)


def run_gradcheck(
    epsilon: float = 1e-4,
    seed: int = 0,
    grad_hook: Optional[GradHook] = None,
) -> GradCheckReport:
    """
    Check the pre-training loss (encoder + head) and the meta-training loss
    (encoder + prompt) for every prompt variant.

    Returns:
        Merged report keyed "<loss>/<variant>/<parameter>"
    """
    ep = toy_episode(seed)
    report = GradCheckReport(epsilon=epsilon)

    model = SemanticPromptModel.build(TOY_MODEL, VARIANTS["both"], seed)
    head = ClassifierHead(TOY_WAYS, TOY_MODEL.width)
    init_parameters(head, TOY_MODEL.init_std, seed + 1)
    params = [(f"encoder.{n}", p) for n, p in model.encoder.named_parameters()]
    params += [(f"head.{n}", p) for n, p in head.named_parameters()]
    report.merge(
        check_gradients(lambda: pretrain_loss(model.encode(ep.query), ep.query_labels, head),
                        params, epsilon, grad_hook),
        prefix="pretrain/",
    )

    for name, pcfg in VARIANTS.items():
        model = SemanticPromptModel.build(TOY_MODEL, pcfg, seed)
        sub = check_gradients(lambda: toy_meta_loss(model, ep),
                              model.named_parameters(), epsilon, grad_hook)
        log.debug(f"{name}: worst {sub.max_relative_error:.3e} over {sub.entries_checked} entries")
        report.merge(sub, prefix=f"meta/{name}/")
    return report


def corrupt_gradient(name: str, grad: torch.Tensor) -> torch.Tensor:
    """Negative control: perturb one analytic gradient entry."""
    if "w_qkv" in name and grad.numel():
        grad = grad.clone()
        grad.view(-1)[0] += 1.0
    return grad
