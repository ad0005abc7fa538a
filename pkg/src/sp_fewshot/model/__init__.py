#
# SP Few-Shot - Model
#
# Copyright (c) 2026 Shareef Jalloq
# SPDX-License-Identifier: BSD-2-Clause
#
# Double-precision patch transformer and the semantic prompt that
# conditions it on a class-name embedding.
#

from .core_math import check_gradients, GradCheckReport
from .encoder import Encoder, encode, patchify
from .prompt import SemanticPromptModel, TokenSequence, encode_with_prompt
from .checkpoint import save_checkpoint, load_checkpoint, checkpoint_metadata

__all__ = [
    "check_gradients",
    "GradCheckReport",
    "Encoder",
    "encode",
    "patchify",
    "SemanticPromptModel",
    "TokenSequence",
    "encode_with_prompt",
    "save_checkpoint",
    "load_checkpoint",
    "checkpoint_metadata",
]
