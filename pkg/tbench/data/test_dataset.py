#
# SP Few-Shot - Dataset File Tests
#
# Copyright (c) 2026 Shareef Jalloq
# SPDX-License-Identifier: BSD-2-Clause
#

import numpy as np
import pytest

from sp_fewshot.common.errors import InputError, ParseError
from sp_fewshot.data.dataset import (
    CLASSES_FILE, RECORDS_DIR, DatasetRecord, SplitDataset, label_index, load_dataset,
    load_record, read_classes_tsv, save_record,
)


def test_dataset_round_trip(dataset_dir, tiny_ds):
    loaded = load_dataset(dataset_dir)
    for split in ("base", "validation", "novel"):
        a, b = tiny_ds.split(split), loaded.split(split)
        assert len(a) == len(b)
        for ra, rb in zip(a, b):
            assert np.array_equal(ra.image, rb.image)
            assert (ra.class_id, ra.class_name, ra.split) == (rb.class_id, rb.class_name, rb.split)
            assert (ra.motif_cells, ra.clutter_cells) == (rb.motif_cells, rb.clutter_cells)
    assert set(loaded.class_motifs) == set(tiny_ds.class_motifs)
    for name, motif in tiny_ds.class_motifs.items():
        assert np.array_equal(loaded.class_motifs[name], motif)


def test_classes_file_has_one_line_per_class(dataset_dir, tiny_ds):
    lines = (dataset_dir / CLASSES_FILE).read_text().splitlines()
    assert len(lines) == len(tiny_ds.class_names())
    assert len(list((dataset_dir / RECORDS_DIR).glob("*.spt"))) == len(tiny_ds.all_records())


@pytest.mark.parametrize("text,line", [
    ("0\tcat\nbad line\n", 2),
    ("0\tcat\nx\tdog\n", 2),
    ("0\tcat\n1\tdog\n1\temu\n", 3),
    ("0\tcat\n1\tcat\n", 2),
])
def test_classes_tsv_errors(tmp_path, text, line):
    path = tmp_path / CLASSES_FILE
    path.write_text(text)
    with pytest.raises(ParseError) as e:
        read_classes_tsv(path)
    assert e.value.line_number == line


def test_classes_tsv_accepts_crlf(tmp_path):
    path = tmp_path / CLASSES_FILE
    path.write_bytes(b"0\tcat\r\n1\tsnow leopard\r\n\r\n")
    assert read_classes_tsv(path) == {0: "cat", 1: "snow leopard"}


def test_record_disagreeing_with_classes_tsv(tmp_path):
    (tmp_path / CLASSES_FILE).write_text("0\tcat\n")
    rec = DatasetRecord(np.zeros((4, 4, 1)), class_id=0, class_name="dog")
    save_record(rec, tmp_path / RECORDS_DIR / "000000.spt")
    with pytest.raises(ParseError, match="disagrees"):
        load_dataset(tmp_path)


def test_record_round_trip(tmp_path):
    rec = DatasetRecord(np.random.default_rng(0).random((4, 4, 2)), 3, "red fox", "novel", (1, 2), (0,))
    back = load_record(save_record(rec, tmp_path / "r.spt"))
    assert np.array_equal(back.image, rec.image)
    assert (back.class_id, back.class_name, back.split) == (3, "red fox", "novel")
    assert (back.motif_cells, back.clutter_cells) == ((1, 2), (0,))


def test_record_validation():
    with pytest.raises(InputError):
        DatasetRecord(np.zeros((4, 4, 1)), 0, "")
    with pytest.raises(InputError):
        DatasetRecord(np.zeros((4, 4)), 0, "cat")


def test_split_aliases(tiny_ds):
    assert tiny_ds.split("train") is tiny_ds.base
    assert tiny_ds.split("val") is tiny_ds.validation
    assert tiny_ds.split("test") is tiny_ds.novel
    with pytest.raises(InputError):
        SplitDataset().split("holdout")


def test_label_index_is_sorted():
    recs = [DatasetRecord(np.zeros((2, 2, 1)), i, n) for i, n in enumerate(["kiwi", "emu", "kiwi", "auk"])]
    names, labels = label_index(recs)
    assert names == ["auk", "emu", "kiwi"]
    assert labels.tolist() == [2, 1, 2, 0]
