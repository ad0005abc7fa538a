#
# SP Few-Shot - Classifier Tests
#
# Copyright (c) 2026 Shareef Jalloq
# SPDX-License-Identifier: BSD-2-Clause
#

import numpy as np
import pytest
import torch

from sp_fewshot.common.errors import ConvergenceError, InputError, NumericDomainError
from sp_fewshot.evaluation.classifiers import classify_cosine, classify_logreg, fit_logreg


def clusters(seed: int = 0, per_class: int = 5, noise: float = 0.05):
    rng = np.random.default_rng(seed)
    centers = np.eye(3, 4) * 2.0 + 0.1
    x = np.vstack([c + noise * rng.standard_normal((per_class, 4)) for c in centers])
    y = np.repeat(np.arange(3), per_class)
    return x, y


# =============================================================================
# Nearest Prototype
# =============================================================================

def test_cosine_picks_nearest_direction():
    protos = torch.tensor([[1.0, 0.0], [0.0, 1.0]], dtype=torch.float64)
    queries = torch.tensor([[2.0, 0.1], [0.1, 3.0], [-1.0, 5.0]], dtype=torch.float64)
    assert classify_cosine(queries, protos).tolist() == [0, 1, 1]


def test_cosine_ignores_magnitude():
    protos = torch.tensor([[1.0, 1.0], [1.0, -1.0]], dtype=torch.float64)
    q = torch.tensor([[0.3, 0.2]], dtype=torch.float64)
    assert classify_cosine(q, protos).tolist() == classify_cosine(q * 1e3, protos * 1e-3).tolist()


def test_cosine_ties_go_to_first_index():
    protos = torch.tensor([[1.0, 0.0], [1.0, 0.0], [0.0, 1.0]], dtype=torch.float64)
    assert classify_cosine(torch.tensor([[4.0, 0.0]], dtype=torch.float64), protos).tolist() == [0]


def test_cosine_zero_vector():
    protos = torch.eye(2, dtype=torch.float64)
    with pytest.raises(NumericDomainError):
        classify_cosine(torch.zeros(1, 2, dtype=torch.float64), protos)


# =============================================================================
# Logistic Regression
# =============================================================================

def test_logreg_separates_clusters():
    x, y = clusters()
    xq, yq = clusters(seed=1)
    pred = classify_logreg(x, y, xq)
    assert pred.tolist() == yq.tolist()


def test_logreg_reaches_stationary_point():
    x, y = clusters()
    reg = 0.5
    model = fit_logreg(x, y, reg=reg)
    assert model.grad_norm <= 1e-6

    # gradient of the regularized objective, recomputed here
    xn = x / np.linalg.norm(x, axis=1, keepdims=True)
    logits = xn @ model.weight.T + model.bias
    p = np.exp(logits - logits.max(axis=1, keepdims=True))
    p /= p.sum(axis=1, keepdims=True)
    resid = p - np.eye(3)[y]
    g_w = resid.T @ xn / len(y) + reg * model.weight
    g_b = resid.mean(axis=0) + reg * model.bias
    assert np.sqrt((g_w ** 2).sum() + (g_b ** 2).sum()) <= 1e-6


def test_logreg_is_order_and_scale_invariant():
    x, y = clusters(seed=2)
    ref = fit_logreg(x, y)
    perm = np.random.default_rng(0).permutation(len(y))
    shuffled = fit_logreg(x[perm], y[perm])
    scaled = fit_logreg(x * 7.5, y)
    for other in (shuffled, scaled):
        assert np.allclose(other.weight, ref.weight, atol=1e-5)
        assert np.allclose(other.bias, ref.bias, atol=1e-5)


def test_logreg_honours_num_classes():
    x, y = clusters()
    model = fit_logreg(x, y, num_classes=5)
    assert model.weight.shape == (5, 4)
    with pytest.raises(InputError):
        fit_logreg(x, y, num_classes=2)


def test_logreg_input_errors():
    x, _ = clusters()
    with pytest.raises(InputError):
        fit_logreg(x, np.zeros(len(x), dtype=int))
    with pytest.raises(NumericDomainError):
        fit_logreg(np.vstack([x, np.zeros((1, 4))]), list(range(3)) * 5 + [0])


def test_logreg_reports_non_convergence():
    x, y = clusters()
    with pytest.raises(ConvergenceError):
        fit_logreg(x, y, max_iter=0)


def test_logreg_duplicated_support_fits_the_same():
    x, y = clusters()
    single = fit_logreg(x, y)
    doubled = fit_logreg(np.vstack([x, x]), np.concatenate([y, y]))
    assert np.allclose(single.logits(x), doubled.logits(x), atol=1e-6)


def test_logreg_agrees_with_cosine_on_separated_clusters():
    x, y = clusters(per_class=10)
    xq, _ = clusters(seed=5, per_class=20)
    protos = torch.tensor(np.stack([x[y == c].mean(axis=0) for c in range(3)]))
    by_cosine = classify_cosine(torch.tensor(xq), protos)
    by_logreg = classify_logreg(x, y, xq)
    assert float((by_cosine == by_logreg).double().mean()) >= 0.95
