#
# SP Few-Shot - Episodic Evaluation
#
# Copyright (c) 2026 Shareef Jalloq
# SPDX-License-Identifier: BSD-2-Clause
#
# Per episode: support images are encoded with the prompt of their own class
# name, queries are encoded without a prompt, then classified by nearest
# prototype or logistic regression. Accuracies are reported as the mean with a
# 95% confidence half-width.
#

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np
import torch

from sp_fewshot.common.config import ClassifierKind, EvalConfig, Mechanism, PromptConfig
from sp_fewshot.common.errors import SamplingError
from sp_fewshot.common.log import get_logger
from sp_fewshot.data.dataset import DatasetRecord
from sp_fewshot.data.embeddings import ClassEmbeddingTable
from sp_fewshot.data.episodes import (
    Episode, compute_prototypes, episode_seed, group_features, prototype_matrix, sample_episode,
)
from sp_fewshot.model.prompt import SemanticPromptModel

from .classifiers import classify_cosine, classify_logreg

log = get_logger(__name__)

Z_95 = 1.96


# =============================================================================
# Report
# =============================================================================

def summarize_accuracies(accuracies: Sequence[float]) -> tuple[float, float]:
    """
    (mean, 1.96 * sample_std / sqrt(n)).

    The sample std uses n-1; a single episode has half-width 0, as does a
    list of identical values.
    """
    acc = np.asarray(accuracies, dtype=np.float64)
    if acc.size == 0:
        return math.nan, math.nan
    if np.all(acc == acc[0]):
        return float(acc[0]), 0.0
    mean = float(acc.mean())
    if acc.size < 2:
        return mean, 0.0
    return mean, float(Z_95 * acc.std(ddof=1) / math.sqrt(acc.size))


@dataclass
class EvalReport:
    per_episode_acc: list[float]
    mean_acc: float
    ci95_halfwidth: float
    ways: int
    shots: int
    episodes: int
    classifier: ClassifierKind
    mechanism: Mechanism
    seed: int = 0
    extra: dict = field(default_factory=dict)

    @classmethod
    def from_accuracies(cls, accuracies: Sequence[float], **echo) -> "EvalReport":
        mean, hw = summarize_accuracies(accuracies)
        echo.setdefault("episodes", len(accuracies))
        return cls(per_episode_acc=[float(a) for a in accuracies], mean_acc=mean,
                   ci95_halfwidth=hw, **echo)

    def summary(self) -> str:
        return f"{self.mean_acc:.4f} ± {self.ci95_halfwidth:.4f}"


# =============================================================================
# Episodes
# =============================================================================

def encode_support(
    model: SemanticPromptModel,
    episode: Episode,
    embeddings: ClassEmbeddingTable,
    pcfg: Optional[PromptConfig] = None,
) -> torch.Tensor:
    """Support features, each image prompted with its own class name."""
    images = torch.from_numpy(episode.support_images())
    if model.resolve(pcfg).mechanism == Mechanism.NONE:
        return model.encode(images)
    g = embeddings.lookup_many(episode.support_class_names(), compose_words=True)
    return model.encode_with_prompt(images, g, pcfg)


def encode_query(model: SemanticPromptModel, episode: Episode) -> torch.Tensor:
    return model.encode(torch.from_numpy(episode.query_images()))


def evaluate_episode(
    model: SemanticPromptModel,
    episode: Episode,
    embeddings: ClassEmbeddingTable,
    classifier: ClassifierKind = ClassifierKind.NN,
    logreg_reg: float = 1.0,
    pcfg: Optional[PromptConfig] = None,
) -> float:
    """Fraction of the episode's queries classified correctly."""
    with torch.no_grad():
        support = encode_support(model, episode, embeddings, pcfg)
        query = encode_query(model, episode)
        if ClassifierKind(classifier) == ClassifierKind.LR:
            pred = classify_logreg(support, episode.support_labels, query,
                                   reg=logreg_reg, num_classes=episode.ways)
        else:
            groups = group_features(support, episode.support_labels, episode.class_names)
            pred = classify_cosine(query, prototype_matrix(compute_prototypes(groups)))
    labels = torch.tensor(episode.query_labels, dtype=torch.long)
    return float((pred == labels).double().mean())


def evaluate(
    model: SemanticPromptModel,
    split: Sequence[DatasetRecord],
    embeddings: ClassEmbeddingTable,
    cfg: Optional[EvalConfig] = None,
    pcfg: Optional[PromptConfig] = None,
) -> EvalReport:
    """
    Run cfg.episodes episodes drawn from `split`.

    Episode i uses episode_seed(cfg.seed, i). With cfg.threads > 1 episodes
    run on a thread pool over the read-only model; results are collected in
    episode order, so the report does not depend on the thread count.

    Raises:
        SamplingError: the split has fewer than cfg.ways classes
    """
    cfg = cfg or EvalConfig()
    cfg.validate()
    resolved = model.resolve(pcfg)
    num_classes = len({r.class_name for r in split})
    if num_classes < cfg.ways:
        raise SamplingError(f"{cfg.ways}-way evaluation needs {cfg.ways} classes, split has {num_classes}")
    if resolved.mechanism != Mechanism.NONE:
        embeddings.require(sorted({r.class_name for r in split}), compose_words=True)

    def run(index: int) -> float:
        episode = sample_episode(split, cfg.ways, cfg.shots, cfg.queries, episode_seed(cfg.seed, index))
        return evaluate_episode(model, episode, embeddings, cfg.classifier, cfg.logreg_reg, resolved)

    indices = range(cfg.episodes)
    if cfg.threads > 1:
        with ThreadPoolExecutor(max_workers=cfg.threads) as pool:
            accuracies = list(pool.map(run, indices))
    else:
        accuracies = [run(i) for i in indices]

    report = EvalReport.from_accuracies(
        accuracies,
        ways=cfg.ways,
        shots=cfg.shots,
        classifier=ClassifierKind(cfg.classifier),
        mechanism=resolved.mechanism,
        seed=cfg.seed,
    )
    log.info(
        f"{cfg.ways}-way {cfg.shots}-shot {report.classifier.value} "
        f"({resolved.mechanism.value}): {report.summary()} over {cfg.episodes} episodes"
    )
    return report
