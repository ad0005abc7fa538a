#
# SP Few-Shot - Class-Name Embeddings
#
# Copyright (c) 2026 Shareef Jalloq
# SPDX-License-Identifier: BSD-2-Clause
#
# The frozen text encoder g(.) is a lookup table loaded from a text file:
#
#   # comment lines are ignored
#   dim 4
#   cat<TAB>1 0 0 0
#
# Any external text encoder can dump its vectors in this format.
#

import hashlib
import re
from dataclasses import dataclass
from pathlib import Path
from types import MappingProxyType
from typing import Iterable, Mapping, Optional, Sequence, Union

import numpy as np
import torch
from torch import Tensor

from sp_fewshot.common.errors import ConfigError, MissingEmbeddingError, ParseError
from sp_fewshot.common.log import get_logger

log = get_logger(__name__)

_WORD_SPLIT = re.compile(r"[\s_]+")


# =============================================================================
# Table
# =============================================================================

@dataclass(frozen=True, eq=False)
class ClassEmbeddingTable:
    """Read-only class_name -> vector map; every vector has length dim."""
    dim: int
    entries: Mapping[str, np.ndarray]

    def __post_init__(self):
        frozen = {}
        for name, vec in self.entries.items():
            arr = np.array(vec, dtype=np.float64)
            if arr.shape != (self.dim,):
                raise ConfigError(f"embedding for '{name}' has shape {arr.shape}, expected ({self.dim},)")
            arr.setflags(write=False)
            frozen[name] = arr
        object.__setattr__(self, "entries", MappingProxyType(frozen))

    def __contains__(self, name: str) -> bool:
        return name in self.entries

    def __len__(self) -> int:
        return len(self.entries)

    @property
    def names(self) -> list[str]:
        return list(self.entries)

    def vector(self, name: str, compose_words: bool = False) -> np.ndarray:
        if name in self.entries:
            return self.entries[name]
        if compose_words:
            return phrase_embedding(self, name)
        raise MissingEmbeddingError(name)

    def lookup(self, name: str, compose_words: bool = False) -> Tensor:
        """g(name) as a fresh float64 tensor; MissingEmbeddingError if absent."""
        return torch.tensor(self.vector(name, compose_words), dtype=torch.float64)

    def lookup_many(self, names: Iterable[str], compose_words: bool = False) -> Tensor:
        """(n, dim) stack in the order given."""
        rows = [self.vector(n, compose_words) for n in names]
        if not rows:
            return torch.zeros(0, self.dim, dtype=torch.float64)
        return torch.tensor(np.stack(rows), dtype=torch.float64)

    def require(self, names: Iterable[str], compose_words: bool = False) -> None:
        """Fail on the first name without an embedding."""
        for name in names:
            self.vector(name, compose_words)


def phrase_embedding(table: ClassEmbeddingTable, name: str) -> np.ndarray:
    """
    Average of per-word vectors for a multi-word name ("golden retriever",
    "golden_retriever"). Exact matches win.
    """
    if name in table.entries:
        return table.entries[name]
    words = [w for w in _WORD_SPLIT.split(name.strip()) if w]
    if len(words) < 2:
        raise MissingEmbeddingError(name)
    for word in words:
        if word not in table.entries:
            raise MissingEmbeddingError(word)
    return np.mean([table.entries[w] for w in words], axis=0)


# =============================================================================
# Files
# =============================================================================

def load_embeddings(path: Union[str, Path]) -> ClassEmbeddingTable:
    dim: Optional[int] = None
    entries: dict[str, np.ndarray] = {}

    with open(path, encoding="utf-8") as f:
        for lineno, raw in enumerate(f, start=1):
            line = raw.rstrip("\r\n")
            if not line.strip() or line.lstrip().startswith("#"):
                continue

            if dim is None:
                parts = line.split()
                if len(parts) != 2 or parts[0] != "dim":
                    raise ParseError(f"expected header 'dim <D>', got {line!r}", lineno)
                try:
                    dim = int(parts[1])
                except ValueError:
                    raise ParseError(f"bad dimension {parts[1]!r}", lineno) from None
                if dim < 1:
                    raise ParseError(f"dimension must be positive, got {dim}", lineno)
                continue

            name, sep, values = line.partition("\t")
            if not sep or not name:
                raise ParseError("expected '<class_name>TAB<v1> ... <vD>'", lineno)
            if name in entries:
                raise ParseError(f"duplicate class name '{name}'", lineno)
            try:
                vec = np.array([float(v) for v in values.split()], dtype=np.float64)
            except ValueError as e:
                raise ParseError(f"bad value for '{name}': {e}", lineno) from None
            if vec.shape[0] != dim:
                raise ParseError(f"'{name}' has {vec.shape[0]} values, expected {dim}", lineno)
            entries[name] = vec

    if dim is None:
        raise ParseError(f"{path}: missing 'dim <D>' header")
    log.debug(f"loaded {len(entries)} embeddings (dim {dim}) from {path}")
    return ClassEmbeddingTable(dim, entries)


def save_embeddings(table: ClassEmbeddingTable, path: Union[str, Path]) -> Path:
    """17 significant digits, enough to read every float64 back bit-exactly."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8", newline="\n") as f:
        f.write(f"dim {table.dim}\n")
        for name, vec in table.entries.items():
            f.write(name + "\t" + " ".join(f"{v:.17g}" for v in vec) + "\n")
    return path


# =============================================================================
# Synthetic Embeddings
# =============================================================================

def _name_rng(name: str, seed: int) -> np.random.Generator:
    digest = hashlib.blake2b(f"{seed}\x00{name}".encode("utf-8"), digest_size=16).digest()
    return np.random.default_rng(int.from_bytes(digest, "little"))


def _unit(v: np.ndarray) -> np.ndarray:
    return v / np.linalg.norm(v)


def hashed_vector(name: str, dim: int, seed: int = 0) -> np.ndarray:
    """Pseudo-random unit vector determined by (name, seed)."""
    return _unit(_name_rng(name, seed).standard_normal(dim))


def synth_embeddings(
    class_names: Sequence[str],
    dim: int,
    seed: int = 0,
    aligned_motifs: Optional[Mapping[str, np.ndarray]] = None,
    alignment: float = 0.9,
) -> ClassEmbeddingTable:
    """
    Deterministic unit-norm embeddings for test fixtures.

    Args:
        class_names: Names to embed
        dim: Embedding width D_g (>= 2)
        seed: Hash salt
        aligned_motifs: Optional class_name -> motif pattern. Those names get
                        a fixed random projection of their centered motif mixed
                        with the hashed vector, so the embedding carries class
                        information.
        alignment: Weight of the motif projection in aligned mode, in [0, 1]

    Returns:
        ClassEmbeddingTable in class_names order
    """
    if dim < 2:
        raise ConfigError(f"embedding dim must be >= 2, got {dim}")
    if not 0.0 <= alignment <= 1.0:
        raise ConfigError(f"alignment must be in [0, 1], got {alignment}")

    projection = None
    entries = {}
    for name in class_names:
        vec = hashed_vector(name, dim, seed)
        if aligned_motifs is not None and name in aligned_motifs:
            motif = np.asarray(aligned_motifs[name], dtype=np.float64).reshape(-1)
            if projection is None:
                projection = np.random.default_rng(seed).standard_normal((dim, motif.size))
            centered = motif - motif.mean()
            if np.any(centered):
                vec = _unit(alignment * _unit(projection @ centered) + (1.0 - alignment) * vec)
        entries[name] = vec
    return ClassEmbeddingTable(dim, entries)
