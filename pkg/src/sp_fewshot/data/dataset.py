#
# SP Few-Shot - Dataset Model and Files
#
# Copyright (c) 2026 Shareef Jalloq
# SPDX-License-Identifier: BSD-2-Clause
#
# A dataset is three class-disjoint splits of labeled images that keep their
# text labels. On disk:
#
#   <dir>/classes.tsv            class_id TAB class_name, one class per line
#   <dir>/records/NNNNNN.spt     one tensor-block container per image
#   <dir>/motifs.spt             optional per-class motif patterns
#

from collections import defaultdict
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Optional, Sequence, Union

import numpy as np

from sp_fewshot.common.errors import InputError, ParseError
from sp_fewshot.common.log import get_logger
from sp_fewshot.common.tensor_io import read_container, write_container

log = get_logger(__name__)

SPLITS = ("base", "validation", "novel")
SPLIT_ALIASES = {"base": "base", "train": "base", "val": "validation",
                 "validation": "validation", "novel": "novel", "test": "novel"}

CLASSES_FILE = "classes.tsv"
RECORDS_DIR = "records"
MOTIFS_FILE = "motifs.spt"


# =============================================================================
# Data Structures
# =============================================================================

@dataclass(frozen=True, eq=False)
class DatasetRecord:
    """One labeled image. motif_cells / clutter_cells are the grid cells holding
    the class motif and the distractor patterns (empty when unknown)."""
    image: np.ndarray            # (H, W, C) float64 in [0, 1]
    class_id: int
    class_name: str
    split: str = "base"
    motif_cells: tuple[int, ...] = ()
    clutter_cells: tuple[int, ...] = ()

    def __post_init__(self):
        if not self.class_name:
            raise InputError("class_name must be nonempty")
        if self.image.ndim != 3:
            raise InputError(f"image must be (H, W, C), got shape {self.image.shape}")


@dataclass
class SplitDataset:
    base: list[DatasetRecord] = field(default_factory=list)
    validation: list[DatasetRecord] = field(default_factory=list)
    novel: list[DatasetRecord] = field(default_factory=list)
    class_motifs: dict[str, np.ndarray] = field(default_factory=dict)

    def split(self, name: str) -> list[DatasetRecord]:
        try:
            return getattr(self, SPLIT_ALIASES[name])
        except KeyError:
            raise InputError(f"unknown split '{name}' (expected one of {', '.join(SPLITS)})") from None

    def all_records(self) -> list[DatasetRecord]:
        return self.base + self.validation + self.novel

    def class_names(self, split: Optional[str] = None) -> list[str]:
        records = self.all_records() if split is None else self.split(split)
        return sorted({r.class_name for r in records})

    def class_table(self) -> dict[int, str]:
        """class_id -> class_name over all splits."""
        return {r.class_id: r.class_name for r in self.all_records()}

    @property
    def image_shape(self) -> tuple[int, ...]:
        return self.all_records()[0].image.shape


def group_by_class(records: Iterable[DatasetRecord]) -> dict[str, list[DatasetRecord]]:
    """class_name -> records in input order, keys sorted by name."""
    groups: dict[str, list[DatasetRecord]] = defaultdict(list)
    for rec in records:
        groups[rec.class_name].append(rec)
    return {name: groups[name] for name in sorted(groups)}


def stack_images(records: Sequence[DatasetRecord]) -> np.ndarray:
    return np.stack([r.image for r in records]).astype(np.float64, copy=False)


def label_index(records: Sequence[DatasetRecord]) -> tuple[list[str], np.ndarray]:
    """Dense labels 0..C-1 over the sorted class names present in records."""
    names = sorted({r.class_name for r in records})
    index = {n: i for i, n in enumerate(names)}
    return names, np.array([index[r.class_name] for r in records], dtype=np.int64)


# =============================================================================
# Files
# =============================================================================

def _cells_text(cells: tuple[int, ...]) -> str:
    return ",".join(str(c) for c in cells)


def _parse_cells(text: str) -> tuple[int, ...]:
    return tuple(int(v) for v in text.split(",") if v)


def save_record(rec: DatasetRecord, path: Union[str, Path]) -> Path:
    header = [
        ("class_id", str(rec.class_id)),
        ("class_name", rec.class_name),
        ("split", rec.split),
        ("motif_cells", _cells_text(rec.motif_cells)),
        ("clutter_cells", _cells_text(rec.clutter_cells)),
    ]
    return write_container(path, header, {"image": rec.image})


def load_record(path: Union[str, Path]) -> DatasetRecord:
    c = read_container(path)
    try:
        return DatasetRecord(
            image=c.block("image"),
            class_id=int(c.require("class_id")),
            class_name=c.require("class_name"),
            split=SPLIT_ALIASES.get(c.header.get("split", "base"), "base"),
            motif_cells=_parse_cells(c.header.get("motif_cells", "")),
            clutter_cells=_parse_cells(c.header.get("clutter_cells", "")),
        )
    except (ValueError, InputError) as e:
        raise ParseError(f"{path}: {e}") from e


def save_dataset(ds: SplitDataset, directory: Union[str, Path]) -> Path:
    directory = Path(directory)
    (directory / RECORDS_DIR).mkdir(parents=True, exist_ok=True)

    table = ds.class_table()
    with open(directory / CLASSES_FILE, "w", encoding="utf-8", newline="\n") as f:
        for class_id in sorted(table):
            f.write(f"{class_id}\t{table[class_id]}\n")

    for i, rec in enumerate(ds.all_records()):
        save_record(rec, directory / RECORDS_DIR / f"{i:06d}.spt")

    if ds.class_motifs:
        write_container(directory / MOTIFS_FILE, [("kind", "motifs")], ds.class_motifs)

    log.info(f"wrote {len(table)} classes / {len(ds.all_records())} records to {directory}")
    return directory


def read_classes_tsv(path: Union[str, Path]) -> dict[int, str]:
    table: dict[int, str] = {}
    names: set[str] = set()
    with open(path, encoding="utf-8") as f:
        for lineno, line in enumerate(f, start=1):
            line = line.rstrip("\r\n")
            if not line:
                continue
            id_text, sep, name = line.partition("\t")
            if not sep or not name:
                raise ParseError(f"expected 'class_id<TAB>class_name', got {line!r}", lineno)
            try:
                class_id = int(id_text)
            except ValueError:
                raise ParseError(f"class_id is not an integer: {id_text!r}", lineno) from None
            if class_id in table or name in names:
                raise ParseError(f"duplicate class {class_id}/{name!r}", lineno)
            table[class_id] = name
            names.add(name)
    return table


def load_dataset(directory: Union[str, Path]) -> SplitDataset:
    directory = Path(directory)
    table = read_classes_tsv(directory / CLASSES_FILE)

    ds = SplitDataset()
    for path in sorted((directory / RECORDS_DIR).glob("*.spt")):
        rec = load_record(path)
        if table.get(rec.class_id) != rec.class_name:
            raise ParseError(
                f"{path}: class {rec.class_id}/{rec.class_name!r} disagrees with {CLASSES_FILE}"
            )
        ds.split(rec.split).append(rec)

    motifs_path = directory / MOTIFS_FILE
    if motifs_path.exists():
        ds.class_motifs = dict(read_container(motifs_path).blocks)
    return ds
