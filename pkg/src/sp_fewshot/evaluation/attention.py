#
# SP Few-Shot - Attention Heatmaps
#
# Copyright (c) 2026 Shareef Jalloq
# SPDX-License-Identifier: BSD-2-Clause
#
# Heatmap of one prompted forward pass: the dot product between the pooled
# output feature and the output token at every patch position, laid out on
# the (H/P, W/P) patch grid.
#

from pathlib import Path
from typing import Optional, Sequence, Union

import numpy as np
import torch

from sp_fewshot.common.config import Mechanism, PromptConfig
from sp_fewshot.common.errors import SPFewShotError, ShapeError
from sp_fewshot.common.log import get_logger
from sp_fewshot.data.embeddings import ClassEmbeddingTable
from sp_fewshot.model.prompt import SemanticPromptModel, TokenSequence, pool_sequence

log = get_logger(__name__)


def attention_heatmap(
    model: SemanticPromptModel,
    image: Union[np.ndarray, torch.Tensor],
    g_y: torch.Tensor,
    pcfg: Optional[PromptConfig] = None,
) -> np.ndarray:
    """(grid, grid) heatmap for one (H, W, C) image prompted with g_y."""
    pcfg = model.resolve(pcfg)
    img = torch.as_tensor(image, dtype=torch.float64)
    if img.dim() != 3:
        raise ShapeError(f"expected one (H, W, C) image, got shape {tuple(img.shape)}")

    with torch.no_grad():
        if pcfg.mechanism == Mechanism.NONE:
            enc = model.encoder
            seq = TokenSequence(enc.run_layers(enc.tokens(img)))
            pooled = seq.tokens.mean(dim=-2)
        else:
            seq = model.prompted_tokens(img, g_y, pcfg)
            pooled = pool_sequence(seq, pcfg.pooling)
        heat = seq.patch_tokens @ pooled

    grid = model.model_cfg.grid_size
    return heat.reshape(grid, grid).numpy()


def to_gray8(heatmap: np.ndarray) -> np.ndarray:
    """Min-max scale to 0..255; a constant map becomes all zeros."""
    lo, hi = float(heatmap.min()), float(heatmap.max())
    if hi == lo:
        return np.zeros(heatmap.shape, dtype=np.uint8)
    return np.round((heatmap - lo) / (hi - lo) * 255.0).astype(np.uint8)


def write_heatmap_csv(heatmap: np.ndarray, path: Union[str, Path]) -> Path:
    path = Path(path)
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        with open(path, "w", encoding="utf-8", newline="\n") as f:
            for row in heatmap:
                f.write(",".join(repr(float(v)) for v in row) + "\n")
    except OSError as e:
        raise SPFewShotError(f"cannot write {path}: {e.strerror}") from e
    return path


def write_pgm(heatmap: np.ndarray, path: Union[str, Path]) -> Path:
    """Binary 8-bit grayscale PGM (P5)."""
    path = Path(path)
    pixels = to_gray8(heatmap)
    height, width = pixels.shape
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        with open(path, "wb") as f:
            f.write(f"P5\n{width} {height}\n255\n".encode("ascii"))
            f.write(pixels.tobytes())
    except OSError as e:
        raise SPFewShotError(f"cannot write {path}: {e.strerror}") from e
    return path


def read_pgm(path: Union[str, Path]) -> np.ndarray:
    data = Path(path).read_bytes()
    magic, dims, maxval, rest = data.split(b"\n", 3)
    if magic != b"P5" or maxval != b"255":
        raise SPFewShotError(f"{path}: not an 8-bit P5 image")
    width, height = (int(v) for v in dims.split())
    return np.frombuffer(rest, dtype=np.uint8, count=width * height).reshape(height, width)


def dump_attention(
    model: SemanticPromptModel,
    image: Union[np.ndarray, torch.Tensor],
    class_name: str,
    embeddings: ClassEmbeddingTable,
    out_path: Union[str, Path],
    pcfg: Optional[PromptConfig] = None,
) -> np.ndarray:
    """
    Write <out_path>.csv and <out_path>.pgm for `image` prompted with
    `class_name`, and return the heatmap.

    Raises:
        MissingEmbeddingError: class_name has no embedding
        SPFewShotError: an output file cannot be written
    """
    g_y = embeddings.lookup(class_name, compose_words=True)
    heatmap = attention_heatmap(model, image, g_y, pcfg)
    out_path = Path(out_path)
    csv_path = write_heatmap_csv(heatmap, out_path.with_suffix(".csv"))
    pgm_path = write_pgm(heatmap, out_path.with_suffix(".pgm"))
    log.info(f"heatmap for '{class_name}' -> {csv_path}, {pgm_path}")
    return heatmap


def motif_mass(
    heatmap: np.ndarray,
    motif_cells: Sequence[int],
    clutter_cells: Sequence[int],
) -> tuple[float, float]:
    """
    Mean 8-bit heat on motif cells and on clutter cells.

    Cell indices are row-major on the heatmap grid, so the generator's cell
    size must equal the model's patch size.
    """
    gray = to_gray8(heatmap).reshape(-1).astype(np.float64)
    on_motif = float(gray[list(motif_cells)].mean()) if len(motif_cells) else 0.0
    on_clutter = float(gray[list(clutter_cells)].mean()) if len(clutter_cells) else 0.0
    return on_motif, on_clutter
