#
# SP Few-Shot - Desk-Scale Studies
#
# Copyright (c) 2026 Shareef Jalloq
# SPDX-License-Identifier: BSD-2-Clause
#
# Mechanism ablation and injection-layer sweep over several seeds. Every
# variant of a seed starts from the same pre-trained encoder and is scored on
# the same validation episodes. Meta-training inside a study keeps its final
# weights: no validation tracking, so the split used for scoring never picks
# an epoch.
#

import dataclasses
from dataclasses import dataclass
from typing import Callable, Iterable, Optional, Sequence

import numpy as np

from sp_fewshot.common.config import (
    EvalConfig, Mechanism, ModelConfig, PromptConfig, TrainConfig,
)
from sp_fewshot.common.log import get_logger
from sp_fewshot.data.dataset import SplitDataset
from sp_fewshot.data.embeddings import ClassEmbeddingTable
from sp_fewshot.model.prompt import SemanticPromptModel

from .protocol import evaluate

log = get_logger(__name__)

BASELINE = "pretrain"
ABLATION_MECHANISMS = (Mechanism.NONE, Mechanism.SI, Mechanism.CI, Mechanism.BOTH)


@dataclass(frozen=True)
class StudyRow:
    seed: int
    variant: str
    mean_acc: float
    ci95_halfwidth: float


def summarize_study(rows: Iterable[StudyRow]) -> dict[str, float]:
    """variant -> mean accuracy over seeds, in first-seen variant order."""
    by_variant: dict[str, list[float]] = {}
    for row in rows:
        by_variant.setdefault(row.variant, []).append(row.mean_acc)
    return {variant: float(np.mean(accs)) for variant, accs in by_variant.items()}


def _pretrained(
    dataset: SplitDataset,
    model_cfg: ModelConfig,
    train_cfg: TrainConfig,
    seed: int,
) -> SemanticPromptModel:
    # deferred: training.trainer imports evaluation.protocol
    from sp_fewshot.training.trainer import pretrain

    model = SemanticPromptModel.build(model_cfg, train_cfg.prompt, seed)
    return pretrain(model, None, dataset, dataclasses.replace(train_cfg, seed=seed)).model


def _score(
    model: SemanticPromptModel,
    dataset: SplitDataset,
    embeddings: ClassEmbeddingTable,
    eval_cfg: EvalConfig,
    seed: int,
    variant: str,
    pcfg: Optional[PromptConfig] = None,
) -> StudyRow:
    report = evaluate(model, dataset.validation, embeddings, eval_cfg, pcfg)
    log.info(f"seed {seed} {variant:10s} {report.summary()}")
    return StudyRow(seed, variant, report.mean_acc, report.ci95_halfwidth)


def _run_variants(
    dataset: SplitDataset,
    embeddings: ClassEmbeddingTable,
    seeds: Sequence[int],
    model_cfg: ModelConfig,
    train_cfg: TrainConfig,
    eval_cfg: EvalConfig,
    variants: Sequence[tuple[str, PromptConfig]],
    progress: Optional[Callable[[StudyRow], None]] = None,
) -> list[StudyRow]:
    from sp_fewshot.training.trainer import attach_prompt, meta_train

    rows = []

    def add(row: StudyRow) -> None:
        rows.append(row)
        if progress is not None:
            progress(row)

    for seed in seeds:
        base = _pretrained(dataset, model_cfg, train_cfg, seed)
        add(_score(base, dataset, embeddings, eval_cfg, seed, BASELINE,
                   base.with_prompt_config(mechanism=Mechanism.NONE)))
        for name, prompt_cfg in variants:
            cfg = dataclasses.replace(train_cfg, seed=seed, prompt=prompt_cfg,
                                      keep_best=False, val_episodes=0)
            model = attach_prompt(base, prompt_cfg, seed)
            meta_train(model, dataset, embeddings, cfg)
            add(_score(model, dataset, embeddings, eval_cfg, seed, name))
    return rows


def run_ablation(
    dataset: SplitDataset,
    embeddings: ClassEmbeddingTable,
    seeds: Sequence[int],
    model_cfg: ModelConfig,
    train_cfg: TrainConfig,
    eval_cfg: EvalConfig,
    mechanisms: Sequence[Mechanism] = ABLATION_MECHANISMS,
    progress: Optional[Callable[[StudyRow], None]] = None,
) -> list[StudyRow]:
    """
    Per seed: pre-train once, score the pre-trained encoder (variant
    "pretrain"), then meta-train one copy per mechanism and score it.
    """
    variants = [
        (Mechanism(m).value, dataclasses.replace(train_cfg.prompt, mechanism=Mechanism(m)))
        for m in mechanisms
    ]
    return _run_variants(dataset, embeddings, seeds, model_cfg, train_cfg, eval_cfg, variants, progress)


def run_layer_sweep(
    dataset: SplitDataset,
    embeddings: ClassEmbeddingTable,
    seeds: Sequence[int],
    layers: Sequence[int],
    model_cfg: ModelConfig,
    train_cfg: TrainConfig,
    eval_cfg: EvalConfig,
    progress: Optional[Callable[[StudyRow], None]] = None,
) -> list[StudyRow]:
    """Meta-train with the configured mechanism injected at each layer in turn."""
    variants = [
        (f"layer{layer}", dataclasses.replace(train_cfg.prompt, inject_layer=layer))
        for layer in layers
    ]
    for _, pcfg in variants:
        pcfg.validate(model_cfg.depth)
    return _run_variants(dataset, embeddings, seeds, model_cfg, train_cfg, eval_cfg, variants, progress)
