#
# SP Few-Shot - Evaluation Protocol Tests
#
# Copyright (c) 2026 Shareef Jalloq
# SPDX-License-Identifier: BSD-2-Clause
#

import math
import statistics

import numpy as np
import pytest

from sp_fewshot.common.config import ClassifierKind, EvalConfig, Mechanism
from sp_fewshot.common.errors import MissingEmbeddingError, SamplingError
from sp_fewshot.data.dataset import DatasetRecord
from sp_fewshot.data.embeddings import ClassEmbeddingTable
from sp_fewshot.evaluation.protocol import EvalReport, evaluate, summarize_accuracies

from tbench.common.toy import TOY_SEMANTIC_DIM, toy_model

SMALL = dict(ways=2, shots=1, queries=2, episodes=6, seed=4)


# =============================================================================
# Summary Statistics
# =============================================================================

def test_confidence_interval_uses_sample_std():
    accs = [1.0, 0.5, 0.75, 0.25]
    mean, hw = summarize_accuracies(accs)
    assert mean == pytest.approx(0.625, abs=1e-15)
    assert hw == pytest.approx(1.96 * statistics.stdev(accs) / 2.0, rel=1e-12)


@pytest.mark.parametrize("accs,expected", [
    ([0.4], (0.4, 0.0)),
    ([0.6] * 5, (0.6, 0.0)),
])
def test_degenerate_intervals(accs, expected):
    assert summarize_accuracies(accs) == expected


def test_empty_summary_is_nan():
    assert all(math.isnan(v) for v in summarize_accuracies([]))


def test_report_summary_format():
    report = EvalReport.from_accuracies(
        [1.0, 0.5], ways=2, shots=1, classifier=ClassifierKind.NN, mechanism=Mechanism.BOTH,
    )
    assert report.episodes == 2
    assert report.summary() == "0.7500 ± 0.4900"


def test_default_episode_count():
    assert EvalConfig().episodes == 2000


# =============================================================================
# Episodic Evaluation
# =============================================================================

def test_evaluate_is_deterministic(tiny_ds, tiny_table):
    model = toy_model()
    a = evaluate(model, tiny_ds.novel, tiny_table, EvalConfig(**SMALL))
    b = evaluate(model, tiny_ds.novel, tiny_table, EvalConfig(**SMALL))
    assert a.per_episode_acc == b.per_episode_acc
    assert len(a.per_episode_acc) == 6
    assert all(0.0 <= v <= 1.0 for v in a.per_episode_acc)
    assert a.mechanism == Mechanism.BOTH


def test_thread_count_does_not_change_results(tiny_ds, tiny_table):
    model = toy_model()
    one = evaluate(model, tiny_ds.novel, tiny_table, EvalConfig(**SMALL, threads=1))
    two = evaluate(model, tiny_ds.novel, tiny_table, EvalConfig(**SMALL, threads=2))
    assert one.per_episode_acc == two.per_episode_acc


def test_logistic_classifier_runs(tiny_ds, tiny_table):
    report = evaluate(toy_model(), tiny_ds.novel, tiny_table,
                      EvalConfig(**SMALL, classifier=ClassifierKind.LR))
    assert report.classifier == ClassifierKind.LR
    assert 0.0 <= report.mean_acc <= 1.0


def test_too_many_ways(tiny_ds, tiny_table):
    with pytest.raises(SamplingError):
        evaluate(toy_model(), tiny_ds.novel, tiny_table, EvalConfig(ways=3, episodes=1))


def test_unprompted_needs_no_embeddings(tiny_ds):
    empty = ClassEmbeddingTable(TOY_SEMANTIC_DIM, {})
    report = evaluate(toy_model(Mechanism.NONE), tiny_ds.novel, empty, EvalConfig(**SMALL))
    assert report.mechanism == Mechanism.NONE


def test_prompt_override_at_evaluation(tiny_ds):
    model = toy_model()
    empty = ClassEmbeddingTable(TOY_SEMANTIC_DIM, {})
    with pytest.raises(MissingEmbeddingError):
        evaluate(model, tiny_ds.novel, empty, EvalConfig(**SMALL))
    report = evaluate(model, tiny_ds.novel, empty, EvalConfig(**SMALL),
                      model.with_prompt_config(mechanism=Mechanism.NONE))
    assert report.mechanism == Mechanism.NONE


def test_repeated_images_classify_perfectly():
    rng = np.random.default_rng(0)
    split = []
    for class_id, name in enumerate(["auk", "emu", "kiwi"]):
        image = rng.random((8, 8, 1))
        split += [DatasetRecord(image, class_id, name, "novel") for _ in range(4)]
    report = evaluate(toy_model(Mechanism.NONE), split, ClassEmbeddingTable(TOY_SEMANTIC_DIM, {}),
                      EvalConfig(ways=3, shots=1, queries=3, episodes=5))
    assert report.mean_acc == 1.0
    assert report.ci95_halfwidth == 0.0
