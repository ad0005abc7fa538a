#
# SP Few-Shot - Desk-Scale Acceptance Runs
#
# Copyright (c) 2026 Shareef Jalloq
# SPDX-License-Identifier: BSD-2-Clause
#

"""
Full-size runs on synthetic datasets. Together they take several minutes on
one CPU core; the ablation rows are shared by every test that reads them.

    pytest -m slow tbench/acceptance

The studies use a 64-class dataset so the base split (32 classes) spans the
16-dimensional motif space the aligned class-name embeddings are built from.
With fewer base classes a linear projector can memorize every base name and
learns nothing that carries over to unseen classes.
"""

import dataclasses

import numpy as np
import pytest
import torch

from sp_fewshot.common.config import EvalConfig, Mechanism, ModelConfig, PromptConfig, TrainConfig
from sp_fewshot.data.embeddings import synth_embeddings
from sp_fewshot.data.synthetic import generate_synthetic_dataset
from sp_fewshot.evaluation.attention import attention_heatmap, motif_mass
from sp_fewshot.evaluation.studies import BASELINE, run_ablation, run_layer_sweep, summarize_study
from sp_fewshot.model.prompt import SemanticPromptModel
from sp_fewshot.training.trainer import attach_prompt, meta_train, pretrain, training_accuracy

pytestmark = pytest.mark.slow

SEEDS = [0, 1, 2, 3, 4]
SEMANTIC_DIM = 16

STUDY_MODEL = ModelConfig(width=32, num_heads=4)
STUDY_TRAIN = TrainConfig(
    pretrain_epochs=30, meta_epochs=5, episodes_per_epoch=100, queries=10,
    prompt=PromptConfig(Mechanism.BOTH, semantic_dim=SEMANTIC_DIM),
)
STUDY_EVAL = EvalConfig(ways=5, shots=1, queries=15, episodes=200)


@pytest.fixture(scope="module")
def study_ds():
    return generate_synthetic_dataset(64, 30, seed=0)


@pytest.fixture(scope="module")
def study_table(study_ds):
    return synth_embeddings(study_ds.class_names(), SEMANTIC_DIM, 0, aligned_motifs=study_ds.class_motifs)


@pytest.fixture(scope="module")
def ablation(study_ds, study_table):
    return run_ablation(study_ds, study_table, SEEDS, STUDY_MODEL, STUDY_TRAIN, STUDY_EVAL)


# =============================================================================
# Pre-training
# =============================================================================

def test_pretraining_learns_base_classes():
    ds = generate_synthetic_dataset(20, 60, seed=0)
    model = SemanticPromptModel.build(ModelConfig(), PromptConfig(Mechanism.NONE))
    result = pretrain(model, None, ds, TrainConfig(pretrain_epochs=50))
    assert training_accuracy(result.model, result.head, ds) >= 0.9


# =============================================================================
# Mechanism Ablation
# =============================================================================

def test_every_prompt_mechanism_beats_pretrained_baseline(ablation):
    summary = summarize_study(ablation)
    for mechanism in ("si", "ci", "both"):
        assert summary[mechanism] > summary[BASELINE], summary


def test_combined_prompt_within_a_point_of_best_single(ablation):
    summary = summarize_study(ablation)
    assert summary["both"] >= max(summary["si"], summary["ci"]) - 0.01, summary


def test_combined_prompt_beats_plain_fine_tuning(ablation):
    summary = summarize_study(ablation)
    assert summary["both"] > summary["none"], summary


def test_meta_training_keeps_validation_accuracy_on_most_seeds(ablation):
    before = {r.seed: r.mean_acc for r in ablation if r.variant == BASELINE}
    after = {r.seed: r.mean_acc for r in ablation if r.variant == "both"}
    kept = [seed for seed in SEEDS if after[seed] >= before[seed]]
    assert len(kept) >= 3, (before, after)


# =============================================================================
# Injection Layer
# =============================================================================

def test_last_layer_injection_is_not_worse_than_first(study_ds, study_table):
    depth = STUDY_MODEL.depth
    rows = run_layer_sweep(study_ds, study_table, SEEDS, [1, depth], STUDY_MODEL, STUDY_TRAIN, STUDY_EVAL)
    summary = summarize_study(rows)
    assert summary[f"layer{depth}"] >= summary["layer1"], summary


# =============================================================================
# Attention Maps
# =============================================================================

def test_prompted_heat_favours_motif_cells(study_ds, study_table):
    pre = pretrain(SemanticPromptModel.build(STUDY_MODEL, PromptConfig(Mechanism.NONE)), None,
                   study_ds, STUDY_TRAIN)
    model = attach_prompt(pre.model, STUDY_TRAIN.prompt)
    meta_train(model, study_ds, study_table,
               dataclasses.replace(STUDY_TRAIN, keep_best=False, val_episodes=0))

    records = [r for r in study_ds.split("validation") if r.clutter_cells]
    records = records[::max(1, len(records) // 50)][:50]
    assert len(records) == 50
    motif, clutter = [], []
    for rec in records:
        heat = attention_heatmap(model, rec.image, torch.tensor(study_table.vector(rec.class_name)))
        on_motif, on_clutter = motif_mass(heat, rec.motif_cells, rec.clutter_cells)
        motif.append(on_motif)
        clutter.append(on_clutter)
    assert np.mean(motif) > np.mean(clutter), (np.mean(motif), np.mean(clutter))
