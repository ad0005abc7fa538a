#
# SP Few-Shot - Class Embedding Tests
#
# Copyright (c) 2026 Shareef Jalloq
# SPDX-License-Identifier: BSD-2-Clause
#

import numpy as np
import pytest

from sp_fewshot.common.errors import ConfigError, MissingEmbeddingError, ParseError
from sp_fewshot.data.embeddings import (
    ClassEmbeddingTable, load_embeddings, phrase_embedding, save_embeddings, synth_embeddings,
)


@pytest.fixture
def words():
    return ClassEmbeddingTable(3, {
        "golden": [1.0, 0.0, 0.0],
        "retriever": [0.0, 1.0, 0.0],
        "golden retriever": [0.0, 0.0, 1.0],
        "snow": [1.0, 1.0, 0.0],
        "leopard": [0.0, 1.0, 1.0],
    })


# =============================================================================
# Files
# =============================================================================

def test_save_load_round_trip_is_bitwise(tmp_path):
    table = synth_embeddings(["cat", "dog", "sea otter"], 5, seed=3)
    back = load_embeddings(save_embeddings(table, tmp_path / "e.txt"))
    assert back.dim == 5 and back.names == table.names
    for name in table.names:
        assert np.array_equal(back.entries[name], table.entries[name])


def test_comments_and_blank_lines_are_skipped(tmp_path):
    path = tmp_path / "e.txt"
    path.write_text("# vectors\n\ndim 2\n# more\ncat\t1 2\n\ndog\t-1 0.5\n")
    table = load_embeddings(path)
    assert table.names == ["cat", "dog"]
    assert table.vector("dog").tolist() == [-1.0, 0.5]


@pytest.mark.parametrize("text,line", [
    ("# c\ndim 3\na\t1 2 3\nb\t1 2\n", 4),
    ("dim 2\na\t1 2\na\t3 4\n", 3),
    ("dim 2\na 1 2\n", 2),
    ("dims 2\n", 1),
    ("dim 2\na\t1 x\n", 2),
])
def test_parse_errors_carry_line_numbers(tmp_path, text, line):
    path = tmp_path / "e.txt"
    path.write_text(text)
    with pytest.raises(ParseError) as e:
        load_embeddings(path)
    assert e.value.line_number == line


def test_missing_header(tmp_path):
    path = tmp_path / "e.txt"
    path.write_text("# nothing\n")
    with pytest.raises(ParseError):
        load_embeddings(path)


# =============================================================================
# Lookup
# =============================================================================

def test_lookup_missing_names_the_class(words):
    with pytest.raises(MissingEmbeddingError) as e:
        words.lookup("tiger")
    assert e.value.class_name == "tiger"
    assert "tiger" in str(e.value)


def test_exact_match_wins_over_words(words):
    assert words.lookup("golden retriever", compose_words=True).tolist() == [0.0, 0.0, 1.0]


@pytest.mark.parametrize("name", ["snow leopard", "snow_leopard", " snow  leopard "])
def test_multi_word_names_average(words, name):
    assert phrase_embedding(words, name).tolist() == [0.5, 1.0, 0.5]


def test_multi_word_missing_word(words):
    with pytest.raises(MissingEmbeddingError) as e:
        words.lookup("snow tiger", compose_words=True)
    assert e.value.class_name == "tiger"
    with pytest.raises(MissingEmbeddingError):
        words.lookup("snow leopard")


def test_table_is_read_only(words):
    with pytest.raises(ValueError):
        words.entries["snow"][0] = 5.0
    with pytest.raises(TypeError):
        words.entries["new"] = np.zeros(3)
    g = words.lookup("snow")
    g[0] = 5.0
    assert words.vector("snow")[0] == 1.0


def test_lookup_many_order(words):
    g = words.lookup_many(["leopard", "golden"])
    assert g.shape == (2, 3)
    assert g[0].tolist() == [0.0, 1.0, 1.0]


def test_wrong_vector_width():
    with pytest.raises(ConfigError):
        ClassEmbeddingTable(3, {"a": [1.0, 2.0]})


# =============================================================================
# Synthetic Embeddings
# =============================================================================

def test_synth_embeddings_deterministic_unit_norm():
    a = synth_embeddings(["x", "y"], 8, seed=1)
    b = synth_embeddings(["y", "x"], 8, seed=1)
    assert np.array_equal(a.vector("x"), b.vector("x"))
    assert np.linalg.norm(a.vector("y")) == pytest.approx(1.0, abs=1e-12)


def test_aligned_embeddings_depend_on_motif(tiny_ds):
    names = tiny_ds.class_names()
    hashed = synth_embeddings(names, 6)
    aligned = synth_embeddings(names, 6, aligned_motifs=tiny_ds.class_motifs)
    assert not np.array_equal(hashed.vector(names[0]), aligned.vector(names[0]))
    assert np.linalg.norm(aligned.vector(names[0])) == pytest.approx(1.0, abs=1e-12)


def test_synth_embeddings_dim_check():
    with pytest.raises(ConfigError):
        synth_embeddings(["a"], 1)


def test_synth_embeddings_do_not_collide():
    names = [f"class{i:04d}" for i in range(1000)]
    table = synth_embeddings(names, 32, seed=0)
    vecs = np.stack([table.vector(n) for n in names])
    assert np.allclose(np.linalg.norm(vecs, axis=1), 1.0, atol=1e-12)
    cos = vecs @ vecs.T
    np.fill_diagonal(cos, -1.0)
    assert cos.max() < 0.9
