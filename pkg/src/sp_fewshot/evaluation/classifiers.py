#
# SP Few-Shot - Episode Classifiers
#
# Copyright (c) 2026 Shareef Jalloq
# SPDX-License-Identifier: BSD-2-Clause
#
# Nearest prototype by cosine similarity, and multinomial logistic regression
# fitted on L2-normalized support features. Ties go to the lowest class index.
#

from dataclasses import dataclass
from typing import Sequence, Union

import numpy as np
import torch
from torch import Tensor

from sp_fewshot.common.errors import ConvergenceError, InputError, NumericDomainError, ShapeError
from sp_fewshot.common.log import get_logger
from sp_fewshot.model.core_math import cosine_similarity_matrix

log = get_logger(__name__)

ArrayLike = Union[Tensor, np.ndarray]

ARMIJO_C = 1e-4
MAX_BACKTRACKS = 60
FULL_STEP_GRAD_NORM = 1e-4


def _as_numpy(x: ArrayLike) -> np.ndarray:
    if isinstance(x, Tensor):
        x = x.detach().cpu().numpy()
    return np.asarray(x, dtype=np.float64)


# =============================================================================
# Cosine Classifier
# =============================================================================

def classify_cosine(query_features: Tensor, prototypes: Tensor) -> Tensor:
    """argmax_i cos(q, p_i) per query; (Q, C) x (N, C) -> (Q,) long."""
    sims = cosine_similarity_matrix(query_features, prototypes)
    # numpy argmax returns the first maximum
    return torch.from_numpy(np.argmax(_as_numpy(sims), axis=-1).astype(np.int64))


# =============================================================================
# Logistic Regression
# =============================================================================

def l2_normalize(x: np.ndarray) -> np.ndarray:
    norms = np.linalg.norm(x, axis=-1, keepdims=True)
    if np.any(norms == 0) or not np.all(np.isfinite(norms)):
        raise NumericDomainError("cannot L2-normalize a zero or non-finite feature")
    return x / norms


def _softmax(logits: np.ndarray) -> np.ndarray:
    shifted = logits - logits.max(axis=-1, keepdims=True)
    e = np.exp(shifted)
    return e / e.sum(axis=-1, keepdims=True)


def _log_softmax(logits: np.ndarray) -> np.ndarray:
    shifted = logits - logits.max(axis=-1, keepdims=True)
    return shifted - np.log(np.exp(shifted).sum(axis=-1, keepdims=True))


@dataclass
class LogisticRegression:
    """Fitted multinomial model: logits = x W^T + b."""
    weight: np.ndarray       # (K, D)
    bias: np.ndarray         # (K,)
    iterations: int
    grad_norm: float

    def logits(self, features: ArrayLike, normalize: bool = True) -> np.ndarray:
        x = _as_numpy(features)
        if normalize:
            x = l2_normalize(x)
        return x @ self.weight.T + self.bias

    def predict(self, features: ArrayLike) -> np.ndarray:
        return np.argmax(self.logits(features), axis=-1)


def fit_logreg(
    features: ArrayLike,
    labels: Sequence[int],
    num_classes: int | None = None,
    reg: float = 1.0,
    tol: float = 1e-6,
    max_iter: int = 100,
) -> LogisticRegression:
    """
    Minimize mean cross entropy + reg/2 (|W|^2 + |b|^2) by damped Newton steps.

    Features are L2-normalized first. The objective is strictly convex for
    reg > 0, so the minimizer is unique.

    Raises:
        InputError: fewer than two classes in the labels
        ConvergenceError: gradient norm still above tol after max_iter steps
    """
    x = l2_normalize(_as_numpy(features))
    y = np.asarray(labels, dtype=np.int64)
    if x.ndim != 2 or y.shape != (x.shape[0],):
        raise ShapeError(f"features {x.shape} and labels {y.shape} do not match")
    if len(np.unique(y)) < 2:
        raise InputError("logistic regression needs at least two classes in the support set")
    if y.min() < 0:
        raise InputError("labels must be non-negative")
    k = int(num_classes if num_classes is not None else y.max() + 1)
    if y.max() >= k:
        raise InputError(f"label {y.max()} out of range for {k} classes")

    n, d = x.shape
    xa = np.hstack([x, np.ones((n, 1))])          # bias as an extra input column
    onehot = np.eye(k)[y]
    theta = np.zeros((k, d + 1))
    eye = np.eye(k)

    def objective(t: np.ndarray) -> float:
        logp = _log_softmax(xa @ t.T)
        return float(-(onehot * logp).sum() / n + 0.5 * reg * (t * t).sum())

    for it in range(max_iter + 1):
        p = _softmax(xa @ theta.T)
        grad = (p - onehot).T @ xa / n + reg * theta
        gnorm = float(np.linalg.norm(grad))
        if gnorm <= tol:
            log.debug(f"logreg converged in {it} Newton steps (|g| = {gnorm:.3e})")
            return LogisticRegression(theta[:, :d].copy(), theta[:, d].copy(), it, gnorm)
        if it == max_iter:
            break

        s = p[:, :, None] * eye[None] - p[:, :, None] * p[:, None, :]
        hess = np.einsum("iab,id,ie->adbe", s, xa, xa, optimize=True) / n
        size = k * (d + 1)
        hess = hess.reshape(size, size) + reg * np.eye(size)
        step = np.linalg.solve(hess, grad.reshape(-1)).reshape(k, d + 1)

        # Armijo backtracking; close to the optimum the objective decrease is
        # below rounding, so full Newton steps are taken there
        t = 1.0
        if gnorm > FULL_STEP_GRAD_NORM:
            f0 = objective(theta)
            slope = float((grad * step).sum())
            for _ in range(MAX_BACKTRACKS):
                if objective(theta - t * step) <= f0 - ARMIJO_C * t * slope:
                    break
                t *= 0.5
        theta = theta - t * step

    raise ConvergenceError(
        f"logistic regression did not reach |grad| <= {tol:g} in {max_iter} iterations"
    )


def classify_logreg(
    support_features: ArrayLike,
    support_labels: Sequence[int],
    query_features: ArrayLike,
    reg: float = 1.0,
    num_classes: int | None = None,
) -> Tensor:
    """Fit on the support set, predict argmax logit for each query."""
    model = fit_logreg(support_features, support_labels, num_classes=num_classes, reg=reg)
    return torch.from_numpy(model.predict(query_features).astype(np.int64))
