#
# SP Few-Shot - Training
#
# Copyright (c) 2026 Shareef Jalloq
# SPDX-License-Identifier: BSD-2-Clause
#
# Supervised pre-training followed by episodic meta-training.
#

from .losses import ClassifierHead, pretrain_loss, meta_loss
from .optim import build_optimizer
from .trainer import CurveRow, attach_prompt, pretrain, meta_train

__all__ = [
    "ClassifierHead",
    "pretrain_loss",
    "meta_loss",
    "build_optimizer",
    "CurveRow",
    "attach_prompt",
    "pretrain",
    "meta_train",
]
