#
# SP Few-Shot - Model Checkpoints
#
# Copyright (c) 2026 Shareef Jalloq
# SPDX-License-Identifier: BSD-2-Clause
#
# Checkpoints are tensor-block containers: the header carries the format
# version plus model.* and prompt.* config items, one block per parameter.
#

from pathlib import Path
from typing import Mapping, Optional, Union

import numpy as np
import torch

from sp_fewshot.common.config import (
    ModelConfig, PromptConfig, config_from_items, config_to_items,
)
from sp_fewshot.common.errors import CheckpointError, ConfigError
from sp_fewshot.common.log import get_logger
from sp_fewshot.common.tensor_io import read_container, write_container

from .core_math import DTYPE
from .prompt import SemanticPromptModel

CHECKPOINT_FORMAT = "1"

log = get_logger(__name__)


def checkpoint_header(
    model: SemanticPromptModel,
    extra: Optional[Mapping[str, str]] = None,
) -> list[tuple[str, str]]:
    items = [("format", CHECKPOINT_FORMAT)]
    items += config_to_items(model.model_cfg, "model")
    items += config_to_items(model.prompt_cfg, "prompt")
    for key, value in (extra or {}).items():
        items.append((f"meta.{key}", str(value)))
    return items


def save_checkpoint(
    model: SemanticPromptModel,
    path: Union[str, Path],
    extra: Optional[Mapping[str, str]] = None,
) -> Path:
    """Write every named parameter bit-exactly as float64 blocks."""
    blocks = {
        name: tensor.detach().cpu().numpy()
        for name, tensor in model.state_dict().items()
    }
    path = write_container(path, checkpoint_header(model, extra), blocks)
    log.debug(f"saved checkpoint {path} ({len(blocks)} tensors)")
    return path


def load_checkpoint(path: Union[str, Path]) -> SemanticPromptModel:
    container = read_container(path)
    if container.require("format") != CHECKPOINT_FORMAT:
        raise CheckpointError(f"{path}: unsupported checkpoint format {container.header['format']}")

    try:
        model_cfg = config_from_items(ModelConfig, container.header, "model")
        prompt_cfg = config_from_items(PromptConfig, container.header, "prompt")
        model = SemanticPromptModel(model_cfg, prompt_cfg)
    except ConfigError as e:
        raise CheckpointError(f"{path}: {e}") from e

    expected = model.state_dict()
    missing = sorted(set(expected) - set(container.blocks))
    unexpected = sorted(set(container.blocks) - set(expected))
    if missing or unexpected:
        raise CheckpointError(f"{path}: missing {missing}, unexpected {unexpected}")

    state = {}
    for name, ref in expected.items():
        arr = container.blocks[name]
        if tuple(arr.shape) != tuple(ref.shape):
            raise CheckpointError(
                f"{path}: block '{name}' has shape {arr.shape}, expected {tuple(ref.shape)}"
            )
        state[name] = torch.from_numpy(np.ascontiguousarray(arr)).to(DTYPE)
    model.load_state_dict(state, strict=True)
    return model


def checkpoint_metadata(path: Union[str, Path]) -> dict[str, str]:
    """The meta.* header items written by save_checkpoint(extra=...)."""
    header = read_container(path).header
    return {k[len("meta."):]: v for k, v in header.items() if k.startswith("meta.")}
