#
# SP Few-Shot - Synthetic Motif Dataset
#
# Copyright (c) 2026 Shareef Jalloq
# SPDX-License-Identifier: BSD-2-Clause
#
# Each class owns a binary motif placed in 2-3 random grid cells; the other
# cells are filled from a clutter pool shared by all classes. Clutter is drawn
# the same way as motifs so it is a plausible spurious feature.
#

import dataclasses
from typing import Optional

import numpy as np

from sp_fewshot.common.config import SyntheticConfig
from sp_fewshot.common.log import get_logger

from .dataset import DatasetRecord, SplitDataset

log = get_logger(__name__)

ON_LEVEL = 0.9
OFF_LEVEL = 0.1

_CONSONANTS = "bdfgklmnprstvz"
_VOWELS = "aeiou"


def _class_names(rng: np.random.Generator, count: int) -> list[str]:
    """Unique pronounceable names, e.g. 'tovaki'."""
    names: list[str] = []
    seen: set[str] = set()
    while len(names) < count:
        syllables = rng.integers(2, 4)
        name = "".join(
            _CONSONANTS[rng.integers(len(_CONSONANTS))] + _VOWELS[rng.integers(len(_VOWELS))]
            for _ in range(syllables)
        )
        if name not in seen:
            seen.add(name)
            names.append(name)
    return names


def _patterns(rng: np.random.Generator, count: int, cell: int, channels: int) -> np.ndarray:
    """Distinct, non-constant binary patterns at OFF/ON intensity."""
    out: list[np.ndarray] = []
    keys: set[bytes] = set()
    while len(out) < count:
        bits = rng.random((cell, cell, channels)) < 0.5
        if bits.all() or not bits.any() or bits.tobytes() in keys:
            continue
        keys.add(bits.tobytes())
        out.append(np.where(bits, ON_LEVEL, OFF_LEVEL))
    return np.stack(out)


def _split_sizes(cfg: SyntheticConfig) -> tuple[int, int, int]:
    n = cfg.num_classes
    n_val = max(1, int(round(cfg.val_fraction * n)))
    n_novel = max(1, int(round(cfg.novel_fraction * n)))
    return n - n_val - n_novel, n_val, n_novel


def _place(image: np.ndarray, cell_index: int, pattern: np.ndarray, grid: int) -> None:
    s = pattern.shape[0]
    r, c = divmod(cell_index, grid)
    image[r * s:(r + 1) * s, c * s:(c + 1) * s, :] = pattern


def generate_synthetic_dataset(
    num_classes: int = 20,
    per_class: int = 60,
    cfg: Optional[SyntheticConfig] = None,
    seed: int = 0,
) -> SplitDataset:
    """
    Deterministic class-disjoint base/validation/novel splits.

    Args:
        num_classes: Total classes over all splits (>= 4)
        per_class: Images per class
        cfg: Remaining generator settings (image size, motif counts, clutter)
        seed: Generator seed

    Returns:
        SplitDataset whose class_motifs holds each class's motif pattern
    """
    cfg = dataclasses.replace(
        cfg or SyntheticConfig(), num_classes=num_classes, per_class=per_class, seed=seed,
    )
    cfg.validate()
    rng = np.random.default_rng(seed)
    grid, cell = cfg.grid_size, cfg.cell_size

    names = _class_names(rng, cfg.num_classes)
    motifs = _patterns(rng, cfg.num_classes + cfg.clutter_pool, cell, cfg.channels)
    class_motifs, clutter = motifs[:cfg.num_classes], motifs[cfg.num_classes:]

    n_base, n_val, _ = _split_sizes(cfg)
    order = rng.permutation(cfg.num_classes)
    split_of = {}
    for rank, class_id in enumerate(order):
        split_of[int(class_id)] = "base" if rank < n_base else (
            "validation" if rank < n_base + n_val else "novel")

    ds = SplitDataset(class_motifs={names[i]: class_motifs[i] for i in range(cfg.num_classes)})
    shape = (cfg.image_size, cfg.image_size, cfg.channels)

    for class_id in range(cfg.num_classes):
        split = split_of[class_id]
        for _ in range(cfg.per_class):
            image = np.full(shape, OFF_LEVEL * 0.5)
            cells = rng.permutation(grid * grid)
            k = int(rng.integers(cfg.motifs_min, cfg.motifs_max + 1))
            n_clutter = int(rng.integers(cfg.clutter_min, cfg.clutter_max + 1))
            for cell_index in cells[:k]:
                _place(image, int(cell_index), class_motifs[class_id], grid)
            clutter_cells = cells[k:k + n_clutter] if len(clutter) else cells[:0]
            for cell_index in clutter_cells:
                _place(image, int(cell_index), clutter[rng.integers(len(clutter))], grid)
            image += rng.normal(0.0, cfg.noise_std, size=shape)
            np.clip(image, 0.0, 1.0, out=image)
            ds.split(split).append(DatasetRecord(
                image=image,
                class_id=class_id,
                class_name=names[class_id],
                split=split,
                motif_cells=tuple(sorted(int(c) for c in cells[:k])),
                clutter_cells=tuple(sorted(int(c) for c in clutter_cells)),
            ))

    log.debug(
        f"synthetic dataset: {len(ds.base)} base / {len(ds.validation)} val / "
        f"{len(ds.novel)} novel records"
    )
    return ds
