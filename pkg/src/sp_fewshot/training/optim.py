#
# SP Few-Shot - Optimizer Construction
#
# Copyright (c) 2026 Shareef Jalloq
# SPDX-License-Identifier: BSD-2-Clause
#

from typing import Iterable, Optional, Sequence

import torch
from torch import nn

from sp_fewshot.common.config import OptimizerKind, TrainConfig
from sp_fewshot.common.log import get_logger

log = get_logger(__name__)

# (group name, parameters, learning rate)
ParamGroup = tuple[str, Iterable[nn.Parameter], float]


def build_optimizer(groups: Sequence[ParamGroup], cfg: TrainConfig) -> Optional[torch.optim.Optimizer]:
    """
    One optimizer over the trainable groups.

    Groups with learning rate 0 are frozen (requires_grad=False) and left out
    entirely, so neither the update nor weight decay can touch their bits.
    Returns None when every group is frozen.
    """
    param_groups = []
    for name, params, lr in groups:
        params = list(params)
        if lr == 0:
            for p in params:
                p.requires_grad_(False)
            log.debug(f"group '{name}' frozen ({len(params)} tensors)")
            continue
        for p in params:
            p.requires_grad_(True)
        param_groups.append({"params": params, "lr": lr, "name": name})

    if not param_groups:
        return None
    if cfg.optimizer == OptimizerKind.SGD:
        return torch.optim.SGD(param_groups, lr=param_groups[0]["lr"], momentum=0.0, weight_decay=0.0)
    return torch.optim.AdamW(param_groups, lr=param_groups[0]["lr"], weight_decay=cfg.weight_decay)


def unfreeze(module: nn.Module) -> None:
    for p in module.parameters():
        p.requires_grad_(True)
