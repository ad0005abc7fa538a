#
# SP Few-Shot - Ablation and Layer Sweep Tests
#
# Copyright (c) 2026 Shareef Jalloq
# SPDX-License-Identifier: BSD-2-Clause
#

import pytest

from sp_fewshot.common.config import EvalConfig, Mechanism, PromptConfig, TrainConfig
from sp_fewshot.common.errors import ConfigError
from sp_fewshot.evaluation.studies import StudyRow, run_ablation, run_layer_sweep, summarize_study
from sp_fewshot.training import trainer

from tbench.common.toy import TOY_MODEL, TOY_SEMANTIC_DIM

TRAIN = TrainConfig(
    pretrain_epochs=1, batch_size=8, meta_epochs=1, episodes_per_epoch=2, val_episodes=2,
    ways=2, shots=1, queries=2, prompt=PromptConfig(semantic_dim=TOY_SEMANTIC_DIM),
)
EVAL = EvalConfig(ways=2, shots=1, queries=2, episodes=3)


def test_summarize_study_keeps_variant_order():
    rows = [StudyRow(0, "b", 0.5, 0.0), StudyRow(0, "a", 1.0, 0.0), StudyRow(1, "b", 0.7, 0.0)]
    summary = summarize_study(rows)
    assert list(summary) == ["b", "a"]
    assert summary["b"] == pytest.approx(0.6)


@pytest.mark.slow
def test_ablation_rows(tiny_ds, tiny_table):
    seen = []
    rows = run_ablation(tiny_ds, tiny_table, [0, 1], TOY_MODEL, TRAIN, EVAL, progress=seen.append)
    assert seen == rows
    assert [r.variant for r in rows[:5]] == ["pretrain", "none", "si", "ci", "both"]
    assert [r.seed for r in rows] == [0] * 5 + [1] * 5
    assert all(0.0 <= r.mean_acc <= 1.0 for r in rows)


@pytest.mark.slow
def test_ablation_is_deterministic(tiny_ds, tiny_table):
    a = run_ablation(tiny_ds, tiny_table, [3], TOY_MODEL, TRAIN, EVAL)
    b = run_ablation(tiny_ds, tiny_table, [3], TOY_MODEL, TRAIN, EVAL)
    assert a == b


@pytest.mark.slow
def test_layer_sweep_rows(tiny_ds, tiny_table):
    rows = run_layer_sweep(tiny_ds, tiny_table, [0], [1, 2], TOY_MODEL, TRAIN, EVAL)
    assert [r.variant for r in rows] == ["pretrain", "layer1", "layer2"]


def test_layer_sweep_rejects_bad_layer(tiny_ds, tiny_table):
    with pytest.raises(ConfigError):
        run_layer_sweep(tiny_ds, tiny_table, [0], [3], TOY_MODEL, TRAIN, EVAL)


def test_studies_never_select_on_the_scored_split(tiny_ds, tiny_table, monkeypatch):
    def no_validation(*args, **kwargs):
        raise AssertionError("study meta-training must not read validation episodes")

    monkeypatch.setattr(trainer, "validation_accuracy", no_validation)
    rows = run_ablation(tiny_ds, tiny_table, [0], TOY_MODEL, TRAIN, EVAL, mechanisms=[Mechanism.BOTH])
    assert [r.variant for r in rows] == ["pretrain", "both"]
