#
# SP Few-Shot - Checkpoint / Container Tests
#
# Copyright (c) 2026 Shareef Jalloq
# SPDX-License-Identifier: BSD-2-Clause
#

import numpy as np
import pytest
import torch

from sp_fewshot.common.config import Mechanism, Pooling, ProjectorKind
from sp_fewshot.common.errors import CheckpointError
from sp_fewshot.common.tensor_io import (
    MAGIC, decode_container, encode_block, encode_container, encode_header, read_container,
    write_container,
)
from sp_fewshot.model.checkpoint import (
    checkpoint_header, checkpoint_metadata, load_checkpoint, save_checkpoint,
)

from tbench.common.toy import toy_embedding, toy_images, toy_model


# =============================================================================
# Container Codec
# =============================================================================

def test_container_preserves_header_order_and_blocks():
    blocks = {"w": np.arange(6, dtype=np.float64).reshape(2, 3), "s": np.array(2.5)}
    data = encode_container([("b", "2"), ("a", "x=y")], blocks)
    c = decode_container(data)
    assert list(c.header.items()) == [("b", "2"), ("a", "x=y")]
    assert c.blocks["w"].shape == (2, 3) and np.array_equal(c.blocks["w"], blocks["w"])
    assert c.blocks["s"].shape == () and float(c.blocks["s"]) == 2.5


def test_container_empty_header():
    c = decode_container(MAGIC + b"\n" + encode_block("x", np.ones(2)))
    assert c.header == {}
    assert c.blocks["x"].tolist() == [1.0, 1.0]


def test_container_payload_is_little_endian_f64():
    raw = encode_block("v", np.array([1.0], dtype=np.float32))
    assert raw[-8:] == np.array([1.0], dtype="<f8").tobytes()


@pytest.mark.parametrize("data", [
    b"NOTSPF\n",
    MAGIC + b"k=v\n",                                           # unterminated header
    MAGIC + b"novalue\n\n",
    MAGIC + b"\n" + encode_block("x", np.ones(4))[:-3],          # truncated payload
    MAGIC + b"\n" + encode_block("x", np.ones(1)) + encode_block("x", np.ones(1)),
])
def test_container_rejects_malformed(data):
    with pytest.raises(CheckpointError):
        decode_container(data)


def test_header_items_must_be_encodable():
    with pytest.raises(CheckpointError):
        encode_header([("a=b", "1")])
    with pytest.raises(CheckpointError):
        encode_header([("a", "line\nbreak")])


def test_read_container_missing_file(tmp_path):
    with pytest.raises(CheckpointError):
        read_container(tmp_path / "absent.spt")


# =============================================================================
# Checkpoints
# =============================================================================

@pytest.mark.parametrize("mechanism,pooling,projector", [
    (Mechanism.BOTH, Pooling.ALL, ProjectorKind.LINEAR),
    (Mechanism.SI, Pooling.HEAD, ProjectorKind.MLP),
    (Mechanism.NONE, Pooling.PATCHES, ProjectorKind.LINEAR),
])
def test_checkpoint_round_trip_is_bitwise(tmp_path, mechanism, pooling, projector):
    model = toy_model(mechanism, inject_layer=1, seed=4, pooling=pooling, projector=projector)
    path = save_checkpoint(model, tmp_path / "m.spt")
    loaded = load_checkpoint(path)

    assert loaded.model_cfg == model.model_cfg
    assert loaded.prompt_cfg == model.prompt_cfg
    for (name, a), b in zip(model.state_dict().items(), loaded.state_dict().values()):
        assert torch.equal(a, b), name

    images, g = toy_images(2), toy_embedding(2)
    assert torch.equal(model.encode_with_prompt(images, g), loaded.encode_with_prompt(images, g))


def test_checkpoint_save_is_deterministic(tmp_path):
    model = toy_model()
    a = save_checkpoint(model, tmp_path / "a.spt").read_bytes()
    b = save_checkpoint(model, tmp_path / "b.spt").read_bytes()
    assert a == b


def test_checkpoint_metadata(tmp_path):
    path = save_checkpoint(toy_model(), tmp_path / "m.spt", extra={"stage": "pretrain", "acc": "0.5"})
    assert checkpoint_metadata(path) == {"stage": "pretrain", "acc": "0.5"}


def test_checkpoint_missing_block(tmp_path):
    model = toy_model()
    blocks = {k: v.numpy() for k, v in model.state_dict().items()}
    blocks.pop(next(iter(blocks)))
    path = write_container(tmp_path / "m.spt", checkpoint_header(model), blocks)
    with pytest.raises(CheckpointError, match="missing"):
        load_checkpoint(path)


def test_checkpoint_wrong_block_shape(tmp_path):
    model = toy_model()
    blocks = {k: v.numpy() for k, v in model.state_dict().items()}
    name = next(iter(blocks))
    blocks[name] = np.zeros((1, 1))
    path = write_container(tmp_path / "m.spt", checkpoint_header(model), blocks)
    with pytest.raises(CheckpointError, match=name):
        load_checkpoint(path)


def test_checkpoint_bad_config_value(tmp_path):
    model = toy_model()
    header = [(k, "bogus" if k == "prompt.mechanism" else v) for k, v in checkpoint_header(model)]
    blocks = {k: v.numpy() for k, v in model.state_dict().items()}
    path = write_container(tmp_path / "m.spt", header, blocks)
    with pytest.raises(CheckpointError):
        load_checkpoint(path)


def test_truncated_checkpoint(tmp_path):
    path = save_checkpoint(toy_model(), tmp_path / "m.spt")
    path.write_bytes(path.read_bytes()[:-5])
    with pytest.raises(CheckpointError):
        load_checkpoint(path)
