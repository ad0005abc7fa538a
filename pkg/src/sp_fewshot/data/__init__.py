#
# SP Few-Shot - Data
#
# Copyright (c) 2026 Shareef Jalloq
# SPDX-License-Identifier: BSD-2-Clause
#

from .dataset import DatasetRecord, SplitDataset, save_dataset, load_dataset
from .synthetic import generate_synthetic_dataset
from .episodes import Episode, Prototype, sample_episode, compute_prototypes
from .embeddings import (
    ClassEmbeddingTable,
    load_embeddings,
    save_embeddings,
    synth_embeddings,
    phrase_embedding,
)

__all__ = [
    "DatasetRecord",
    "SplitDataset",
    "save_dataset",
    "load_dataset",
    "generate_synthetic_dataset",
    "Episode",
    "Prototype",
    "sample_episode",
    "compute_prototypes",
    "ClassEmbeddingTable",
    "load_embeddings",
    "save_embeddings",
    "synth_embeddings",
    "phrase_embedding",
]
