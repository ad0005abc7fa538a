#
# SP Few-Shot - Episodes and Prototypes
#
# Copyright (c) 2026 Shareef Jalloq
# SPDX-License-Identifier: BSD-2-Clause
#
# N-way K-shot episode sampling from one split, and per-class prototypes.
#

from dataclasses import dataclass
from typing import Mapping, Sequence

import numpy as np
import torch
from torch import Tensor

from sp_fewshot.common.errors import InputError, SamplingError

from .dataset import DatasetRecord, group_by_class, stack_images


# =============================================================================
# Data Structures
# =============================================================================

@dataclass(frozen=True)
class Episode:
    """
    One few-shot task. Episode label i is class_names[i]; support is grouped
    by label with exactly `shots` records each, query likewise with `queries`.
    """
    class_names: tuple[str, ...]
    support: tuple[DatasetRecord, ...]
    query: tuple[DatasetRecord, ...]
    support_labels: tuple[int, ...]
    query_labels: tuple[int, ...]
    shots: int
    queries: int
    seed: int

    @property
    def ways(self) -> int:
        return len(self.class_names)

    def support_images(self) -> np.ndarray:
        return stack_images(self.support)

    def query_images(self) -> np.ndarray:
        return stack_images(self.query)

    def support_class_names(self) -> list[str]:
        return [r.class_name for r in self.support]


@dataclass(frozen=True, eq=False)
class Prototype:
    class_name: str
    vector: Tensor


# =============================================================================
# Sampling
# =============================================================================

def episode_seed(base_seed: int, index: int) -> int:
    """Independent per-episode seed derived from (base_seed, index)."""
    return int(np.random.SeedSequence([base_seed, index]).generate_state(1)[0])


def sample_episode(
    split: Sequence[DatasetRecord],
    ways: int,
    shots: int,
    queries: int = 15,
    seed: int = 0,
) -> Episode:
    """
    Sample an episode; a pure function of (split, ways, shots, queries, seed).

    Classes are chosen uniformly without replacement from the sorted class
    list, then shots + queries distinct records per class.

    Raises:
        SamplingError: fewer than `ways` classes, or a class with fewer than
                       shots + queries records
    """
    if ways < 1 or shots < 1 or queries < 0:
        raise SamplingError(f"bad episode shape: ways={ways} shots={shots} queries={queries}")
    groups = group_by_class(split)
    names = list(groups)
    if len(names) < ways:
        raise SamplingError(f"{ways}-way episode needs {ways} classes, split has {len(names)}")
    need = shots + queries
    short = [n for n in names if len(groups[n]) < need]
    if short:
        raise SamplingError(
            f"classes {short[:5]} have fewer than shots+queries = {need} records"
        )

    rng = np.random.default_rng(seed)
    chosen = rng.choice(len(names), size=ways, replace=False)

    support, query, s_labels, q_labels = [], [], [], []
    for label, idx in enumerate(chosen):
        recs = groups[names[idx]]
        picks = rng.permutation(len(recs))[:need]
        support.extend(recs[i] for i in picks[:shots])
        query.extend(recs[i] for i in picks[shots:])
        s_labels.extend([label] * shots)
        q_labels.extend([label] * queries)

    return Episode(
        class_names=tuple(names[i] for i in chosen),
        support=tuple(support),
        query=tuple(query),
        support_labels=tuple(s_labels),
        query_labels=tuple(q_labels),
        shots=shots,
        queries=queries,
        seed=seed,
    )


# =============================================================================
# Prototypes
# =============================================================================

def compute_prototypes(support_features: Mapping[str, Sequence[Tensor]]) -> list[Prototype]:
    """p_i = mean of class i's support features, in mapping order."""
    protos = []
    for name, feats in support_features.items():
        if len(feats) == 0:
            raise InputError(f"class '{name}' has no support features")
        protos.append(Prototype(name, torch.stack(list(feats)).mean(dim=0)))
    return protos


def group_features(features: Tensor, labels: Sequence[int], class_names: Sequence[str]) -> dict[str, list[Tensor]]:
    """Split (N*K, C) support features into class_name -> rows, ordered by label."""
    groups: dict[str, list[Tensor]] = {name: [] for name in class_names}
    for row, label in zip(features, labels):
        groups[class_names[label]].append(row)
    return groups


def prototype_matrix(prototypes: Sequence[Prototype]) -> Tensor:
    """(N, C) stack of prototype vectors."""
    if not prototypes:
        raise InputError("no prototypes")
    return torch.stack([p.vector for p in prototypes])
