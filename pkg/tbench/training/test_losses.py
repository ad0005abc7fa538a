#
# SP Few-Shot - Loss Tests
#
# Copyright (c) 2026 Shareef Jalloq
# SPDX-License-Identifier: BSD-2-Clause
#

import math

import pytest
import torch

from sp_fewshot.common.config import OptimizerKind, TrainConfig
from sp_fewshot.common.errors import ConfigError, InputError, ShapeError
from sp_fewshot.data.episodes import Prototype
from sp_fewshot.training.losses import ClassifierHead, meta_loss, pretrain_loss
from sp_fewshot.training.optim import build_optimizer

from tbench.common import oracles
from tbench.common.randomizer import ShapeRandomizer


def random_head(r: ShapeRandomizer, num_classes: int, width: int) -> ClassifierHead:
    head = ClassifierHead(num_classes, width)
    with torch.no_grad():
        head.weight.copy_(r.random_weight(num_classes, width))
        head.bias.copy_(r.random_tensor(num_classes))
    return head


# =============================================================================
# Pre-training Loss
# =============================================================================

@pytest.mark.parametrize("seed", [0, 1, 2])
def test_pretrain_loss_matches_oracle(seed):
    r = ShapeRandomizer(seed)
    head = random_head(r, 4, 6)
    feats = r.random_tensor(5, 6, std=2.0)
    labels = [r.rng.randrange(4) for _ in range(5)]
    L = oracles.as_list
    expected = oracles.pretrain_loss(L(feats), labels, L(head.weight), L(head.bias))
    assert abs(float(pretrain_loss(feats, labels, head)) - expected) <= 1e-10


def test_pretrain_loss_zero_head_is_log_c(rand):
    head = ClassifierHead(7, 5)
    loss = pretrain_loss(rand.random_tensor(3, 5), [0, 6, 2], head)
    assert abs(float(loss) - math.log(7)) <= 1e-12


def test_pretrain_loss_checks(rand):
    head = ClassifierHead(3, 4)
    with pytest.raises(InputError):
        pretrain_loss(rand.random_tensor(2, 4), [0, 3], head)
    with pytest.raises(ShapeError):
        pretrain_loss(rand.random_tensor(2, 4), [0], head)
    with pytest.raises(ShapeError):
        pretrain_loss(rand.random_tensor(4), [0], head)


# =============================================================================
# Meta Loss
# =============================================================================

@pytest.mark.parametrize("seed", [0, 1, 2])
def test_meta_loss_matches_oracle(seed):
    r = ShapeRandomizer(seed)
    q, p = r.random_tensor(6, 5), r.random_tensor(3, 5)
    labels = [0, 1, 2, 2, 1, 0]
    tau = 0.1 * (seed + 1)
    expected = oracles.meta_loss(oracles.as_list(q), oracles.as_list(p), labels, tau)
    assert abs(float(meta_loss(q, p, labels, tau)) - expected) <= 1e-10


@pytest.mark.parametrize("n", [2, 5, 10])
def test_meta_loss_identical_prototypes_is_log_n(rand, n):
    proto = rand.random_tensor(8)
    protos = proto.expand(n, 8).clone()
    loss = meta_loss(rand.random_tensor(4, 8), protos, [0, 1 % n, n - 1, 0], 0.2)
    assert abs(float(loss) - math.log(n)) <= 1e-12


def test_meta_loss_accepts_prototype_list(rand):
    q, p = rand.random_tensor(3, 4), rand.random_tensor(2, 4)
    protos = [Prototype("a", p[0]), Prototype("b", p[1])]
    assert torch.equal(meta_loss(q, protos, [0, 1, 1]), meta_loss(q, p, [0, 1, 1]))


def test_meta_loss_checks(rand):
    q, p = rand.random_tensor(3, 4), rand.random_tensor(2, 4)
    with pytest.raises(ConfigError):
        meta_loss(q, p, [0, 1, 1], temperature=0.0)
    with pytest.raises(InputError):
        meta_loss(q, p, [0, 1, 2])


@pytest.mark.parametrize("seed", [0, 1, 2])
def test_meta_loss_ignores_feature_scale(seed):
    r = ShapeRandomizer(seed)
    q, p = r.random_tensor(6, 5), r.random_tensor(3, 5)
    labels = [0, 1, 2, 2, 1, 0]
    q_scale = torch.tensor([0.5, 2.0, 7.0, 1e-3, 30.0, 1.0], dtype=torch.float64).unsqueeze(1)
    p_scale = torch.tensor([3.0, 0.25, 100.0], dtype=torch.float64).unsqueeze(1)
    base = float(meta_loss(q, p, labels, 0.1))
    scaled = float(meta_loss(q * q_scale, p * p_scale, labels, 0.1))
    assert scaled == pytest.approx(base, rel=1e-12, abs=1e-12)


def test_meta_loss_backpropagates_to_queries(rand):
    q = rand.random_tensor(3, 4).requires_grad_(True)
    meta_loss(q, rand.random_tensor(2, 4), [0, 1, 0]).backward()
    assert q.grad is not None and float(q.grad.abs().sum()) > 0


# =============================================================================
# Optimizer
# =============================================================================

def test_zero_lr_group_is_frozen():
    a = torch.nn.Linear(2, 2, dtype=torch.float64)
    b = torch.nn.Linear(2, 2, dtype=torch.float64)
    opt = build_optimizer([("a", a.parameters(), 0.0), ("b", b.parameters(), 1e-2)], TrainConfig())
    assert not any(p.requires_grad for p in a.parameters())
    assert all(p.requires_grad for p in b.parameters())
    assert len(opt.param_groups) == 1 and opt.param_groups[0]["name"] == "b"
    assert isinstance(opt, torch.optim.AdamW)


def test_sgd_and_all_frozen():
    layer = torch.nn.Linear(2, 2, dtype=torch.float64)
    sgd = build_optimizer([("x", layer.parameters(), 0.5)], TrainConfig(optimizer=OptimizerKind.SGD))
    assert isinstance(sgd, torch.optim.SGD)
    assert sgd.param_groups[0]["momentum"] == 0.0
    assert build_optimizer([("x", layer.parameters(), 0.0)], TrainConfig()) is None


def test_sgd_step_is_plain_gradient_descent():
    w = torch.nn.Parameter(torch.tensor([1.0, -2.0], dtype=torch.float64))
    opt = build_optimizer([("w", [w], 0.125)], TrainConfig(optimizer=OptimizerKind.SGD))
    loss = ((w - 3.0) ** 2).sum()
    loss.backward()
    grad = w.grad.clone()
    expected = w.detach() - 0.125 * grad
    opt.step()
    assert torch.equal(w.detach(), expected)
    assert w.tolist() == [1.5, -0.75]
