#
# SP Few-Shot - Two-Stage Trainer
#
# Copyright (c) 2026 Shareef Jalloq
# SPDX-License-Identifier: BSD-2-Clause
#
# Stage 1 (pretrain): encoder + linear head, cross entropy over base classes.
# Stage 2 (meta_train): episodic fine-tuning of encoder and prompt parameters
# with the prototype loss; support images are prompted with their own class
# names, queries are not.
#

import copy
import math
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np
import torch

from sp_fewshot.common.config import EvalConfig, PromptConfig, TrainConfig
from sp_fewshot.common.errors import InputError, SamplingError, ShapeError, TrainingError
from sp_fewshot.common.log import get_logger
from sp_fewshot.data.dataset import SplitDataset, label_index, stack_images
from sp_fewshot.data.embeddings import ClassEmbeddingTable
from sp_fewshot.data.episodes import (
    Episode, compute_prototypes, episode_seed, group_features, prototype_matrix, sample_episode,
)
from sp_fewshot.evaluation.protocol import encode_query, encode_support, evaluate
from sp_fewshot.model.encoder import init_parameters
from sp_fewshot.model.prompt import SemanticPromptModel

from .losses import ClassifierHead, meta_loss, pretrain_loss
from .optim import build_optimizer, unfreeze

log = get_logger(__name__)

# Validation episodes use their own seed stream, fixed across epochs.
VALIDATION_SEED_OFFSET = 7919


# =============================================================================
# Results
# =============================================================================

@dataclass(frozen=True)
class CurveRow:
    epoch: int
    split: str
    metric: str
    value: float


ProgressFn = Callable[[CurveRow], None]


@dataclass
class PretrainResult:
    model: SemanticPromptModel
    head: ClassifierHead
    class_names: list[str]
    curve: list[CurveRow] = field(default_factory=list)

    def final(self, metric: str) -> float:
        return [r.value for r in self.curve if r.metric == metric][-1]


@dataclass
class MetaTrainResult:
    model: SemanticPromptModel
    curve: list[CurveRow] = field(default_factory=list)
    best_epoch: int = 0
    best_val_accuracy: float = math.nan


def _emit(curve: list[CurveRow], progress: Optional[ProgressFn], row: CurveRow) -> None:
    curve.append(row)
    log.info(f"epoch {row.epoch:3d} {row.split:10s} {row.metric:9s} {row.value:.4f}")
    if progress is not None:
        progress(row)


def _check_finite(loss: torch.Tensor, step: int) -> None:
    if not torch.isfinite(loss).item():
        raise TrainingError(f"non-finite loss {loss.item()}", step)


# =============================================================================
# Stage 1: Supervised Pre-training
# =============================================================================

def new_head(model: SemanticPromptModel, num_classes: int, seed: int = 0) -> ClassifierHead:
    head = ClassifierHead(num_classes, model.model_cfg.width)
    init_parameters(head, model.model_cfg.init_std, seed)
    return head


def pretrain(
    model: SemanticPromptModel,
    head: Optional[ClassifierHead],
    dataset: SplitDataset,
    cfg: TrainConfig,
    progress: Optional[ProgressFn] = None,
) -> PretrainResult:
    """
    Train encoder and head jointly on the base split.

    Args:
        model: Model whose encoder is trained in place
        head: Classifier head with one row per base class, or None for a fresh one
        dataset: Dataset; only the base split is used
        cfg: Learning rate, epochs, batch size and seed
        progress: Optional callback receiving every curve row

    Returns:
        PretrainResult with per-epoch mean loss and training accuracy

    Raises:
        TrainingError: the loss became non-finite (reports the step)
    """
    cfg.validate()
    if not dataset.base:
        raise InputError("pre-training needs a nonempty base split")
    class_names, labels = label_index(dataset.base)
    if head is None:
        head = new_head(model, len(class_names), cfg.seed)
    if head.num_classes != len(class_names):
        raise ShapeError(f"head has {head.num_classes} rows, base split has {len(class_names)} classes")

    images = torch.from_numpy(stack_images(dataset.base))
    targets = torch.from_numpy(labels)
    gen = torch.Generator().manual_seed(cfg.seed)
    optimizer = build_optimizer([
        ("encoder", model.encoder_parameters(), cfg.lr_pretrain),
        ("head", head.parameters(), cfg.lr_pretrain),
    ], cfg)

    model.train()
    curve: list[CurveRow] = []
    step = 0
    n = images.shape[0]
    try:
        for epoch in range(1, cfg.pretrain_epochs + 1):
            order = torch.randperm(n, generator=gen)
            total, correct = 0.0, 0
            for start in range(0, n, cfg.batch_size):
                idx = order[start:start + cfg.batch_size]
                features = model.encode(images[idx])
                logits = head(features)
                loss = pretrain_loss(features, targets[idx], head)
                _check_finite(loss, step)
                if optimizer is not None:
                    optimizer.zero_grad()
                    loss.backward()
                    optimizer.step()
                total += loss.item() * idx.numel()
                correct += int((logits.argmax(dim=-1) == targets[idx]).sum())
                step += 1
            _emit(curve, progress, CurveRow(epoch, "base", "loss", total / n))
            _emit(curve, progress, CurveRow(epoch, "base", "accuracy", correct / n))
    finally:
        unfreeze(model)
        unfreeze(head)
        model.eval()

    return PretrainResult(model, head, class_names, curve)


def training_accuracy(model: SemanticPromptModel, head: ClassifierHead, dataset: SplitDataset) -> float:
    """Head accuracy over the whole base split with the current weights."""
    _, labels = label_index(dataset.base)
    with torch.no_grad():
        logits = head(model.encode(torch.from_numpy(stack_images(dataset.base))))
    return float((logits.argmax(dim=-1).numpy() == labels).mean())


# =============================================================================
# Stage 2: Episodic Meta-training
# =============================================================================

def attach_prompt(
    model: SemanticPromptModel,
    prompt_cfg: PromptConfig,
    seed: int = 0,
) -> SemanticPromptModel:
    """
    New model sharing a copy of `model`'s encoder weights, with freshly
    initialized prompt parameters for `prompt_cfg`.
    """
    fresh = SemanticPromptModel.build(model.model_cfg, prompt_cfg, seed)
    fresh.encoder.load_state_dict(model.encoder.state_dict())
    return fresh


def episode_loss(
    model: SemanticPromptModel,
    episode: Episode,
    embeddings: ClassEmbeddingTable,
    temperature: float,
) -> torch.Tensor:
    support = encode_support(model, episode, embeddings)
    groups = group_features(support, episode.support_labels, episode.class_names)
    prototypes = prototype_matrix(compute_prototypes(groups))
    return meta_loss(encode_query(model, episode), prototypes, episode.query_labels, temperature)


def validation_accuracy(
    model: SemanticPromptModel,
    dataset: SplitDataset,
    embeddings: ClassEmbeddingTable,
    cfg: TrainConfig,
) -> float:
    """Mean nearest-prototype accuracy over a fixed set of validation episodes."""
    ecfg = EvalConfig(
        ways=cfg.ways, shots=cfg.shots, queries=cfg.queries,
        episodes=cfg.val_episodes, seed=cfg.seed + VALIDATION_SEED_OFFSET,
    )
    return evaluate(model, dataset.validation, embeddings, ecfg).mean_acc


def _can_validate(dataset: SplitDataset, cfg: TrainConfig) -> bool:
    if cfg.val_episodes == 0:
        return False
    try:
        sample_episode(dataset.validation, cfg.ways, cfg.shots, cfg.queries, 0)
    except SamplingError as e:
        log.warning(f"validation disabled: {e}")
        return False
    return True


def meta_train(
    model: SemanticPromptModel,
    dataset: SplitDataset,
    embeddings: ClassEmbeddingTable,
    cfg: TrainConfig,
    progress: Optional[ProgressFn] = None,
) -> MetaTrainResult:
    """
    Episodic fine-tuning with the model's own prompt config.

    Encoder and prompt parameters use lr_encoder and lr_projectors; a group
    with learning rate 0 keeps its bits. Validation accuracy is measured
    before training (epoch 0) and after every epoch; with keep_best the
    weights of the best epoch are restored at the end. The embedding table is
    read only.

    Raises:
        MissingEmbeddingError: a base class has no embedding
        TrainingError: the loss became non-finite (reports the step)
    """
    cfg.validate()
    if not dataset.base:
        raise InputError("meta-training needs a nonempty base split")
    embeddings.require(dataset.class_names("base"), compose_words=True)

    optimizer = build_optimizer([
        ("encoder", model.encoder_parameters(), cfg.lr_encoder),
        ("projectors", model.prompt_parameters(), cfg.lr_projectors),
    ], cfg)

    curve: list[CurveRow] = []
    validate = _can_validate(dataset, cfg)
    best_epoch, best_acc, best_state = 0, -math.inf, None

    def track(epoch: int) -> None:
        nonlocal best_epoch, best_acc, best_state
        model.eval()
        acc = validation_accuracy(model, dataset, embeddings, cfg)
        _emit(curve, progress, CurveRow(epoch, "validation", "accuracy", acc))
        if acc > best_acc:
            best_epoch, best_acc = epoch, acc
            if cfg.keep_best:
                best_state = copy.deepcopy(model.state_dict())

    step = 0
    try:
        if validate:
            track(0)
        for epoch in range(1, cfg.meta_epochs + 1):
            model.train()
            losses = []
            for _ in range(cfg.episodes_per_epoch):
                episode = sample_episode(
                    dataset.base, cfg.ways, cfg.shots, cfg.queries, episode_seed(cfg.seed, step),
                )
                loss = episode_loss(model, episode, embeddings, cfg.temperature)
                _check_finite(loss, step)
                if optimizer is not None:
                    optimizer.zero_grad()
                    loss.backward()
                    optimizer.step()
                losses.append(loss.item())
                step += 1
            if losses:
                _emit(curve, progress, CurveRow(epoch, "base", "loss", float(np.mean(losses))))
            if validate:
                track(epoch)
    finally:
        unfreeze(model)
        model.eval()

    if cfg.keep_best and best_state is not None:
        model.load_state_dict(best_state)
        log.info(f"restored epoch {best_epoch} weights (validation accuracy {best_acc:.4f})")

    return MetaTrainResult(
        model=model,
        curve=curve,
        best_epoch=best_epoch,
        best_val_accuracy=best_acc if validate else math.nan,
    )
