#
# SP Few-Shot - Reference Oracles
#
# Copyright (c) 2026 Shareef Jalloq
# SPDX-License-Identifier: BSD-2-Clause
#

"""
Step-by-step reference implementations on plain Python floats.

Nothing here touches torch ops: inputs are converted with `as_list` and every
sum goes through math.fsum, so the oracles are independent of the library's
vectorized code paths.
"""

import math
from typing import List, Sequence

Vector = List[float]
Matrix = List[List[float]]


def as_list(t) -> list:
    """Tensor / ndarray -> nested Python lists."""
    if hasattr(t, "detach"):
        t = t.detach()
    return t.tolist()


# =============================================================================
# Elementwise
# =============================================================================

def sigmoid(x: float) -> float:
    if x >= 0:
        return 1.0 / (1.0 + math.exp(-x))
    e = math.exp(x)
    return e / (1.0 + e)


def gelu_tanh(x: float) -> float:
    return 0.5 * x * (1.0 + math.tanh(math.sqrt(2.0 / math.pi) * (x + 0.044715 * x ** 3)))


ACT = {
    "gelu_tanh": gelu_tanh,
    "sigmoid": sigmoid,
    "relu": lambda x: max(x, 0.0),
    "identity": lambda x: x,
}


# =============================================================================
# Linear Algebra
# =============================================================================

def dot(a: Sequence[float], b: Sequence[float]) -> float:
    return math.fsum(x * y for x, y in zip(a, b))


def matvec(w: Matrix, x: Vector, b: Sequence[float] = ()) -> Vector:
    """W x + b with W stored (out, in)."""
    out = [dot(row, x) for row in w]
    return [o + bi for o, bi in zip(out, b)] if b else out


def mean_rows(rows: Sequence[Vector]) -> Vector:
    n = len(rows)
    return [math.fsum(r[j] for r in rows) / n for j in range(len(rows[0]))]


def norm(v: Sequence[float]) -> float:
    return math.sqrt(math.fsum(x * x for x in v))


def cosine(a: Vector, b: Vector) -> float:
    return dot(a, b) / (norm(a) * norm(b))


# =============================================================================
# Network Ops
# =============================================================================

def softmax(v: Sequence[float]) -> Vector:
    m = max(v)
    e = [math.exp(x - m) for x in v]
    s = math.fsum(e)
    return [x / s for x in e]


def log_softmax(v: Sequence[float]) -> Vector:
    m = max(v)
    lse = m + math.log(math.fsum(math.exp(x - m) for x in v))
    return [x - lse for x in v]


def layer_norm(x: Vector, gamma: Vector, beta: Vector, eps: float = 1e-5) -> Vector:
    n = len(x)
    mu = math.fsum(x) / n
    var = math.fsum((xi - mu) ** 2 for xi in x) / n
    inv = 1.0 / math.sqrt(var + eps)
    return [(xi - mu) * inv * g + b for xi, g, b in zip(x, gamma, beta)]


def mlp(x: Vector, w1: Matrix, b1: Vector, w2: Matrix, b2: Vector,
        act1: str = "gelu_tanh", act2: str = "identity") -> Vector:
    hidden = [ACT[act1](h) for h in matvec(w1, x, b1)]
    return [ACT[act2](o) for o in matvec(w2, hidden, b2)]


def msa(z: Matrix, w_qkv: Matrix, w_out: Matrix, num_heads: int, scale_exponent: float = 0.25) -> Matrix:
    """Multi-head self-attention of one (S, C) sequence, head by head."""
    width = len(z[0])
    head_dim = width // num_heads
    scale = head_dim ** scale_exponent
    qkv = [matvec(w_qkv, row) for row in z]
    q = [r[:width] for r in qkv]
    k = [r[width:2 * width] for r in qkv]
    v = [r[2 * width:] for r in qkv]

    context = [[0.0] * width for _ in z]
    for h in range(num_heads):
        lo, hi = h * head_dim, (h + 1) * head_dim
        for i in range(len(z)):
            logits = [dot(q[i][lo:hi], k[j][lo:hi]) / scale for j in range(len(z))]
            a = softmax(logits)
            for c in range(lo, hi):
                context[i][c] = math.fsum(a[j] * v[j][c] for j in range(len(z)))
    return [matvec(w_out, row) for row in context]


def channel_modulation(tokens: Matrix, g: Vector, w_hc: Matrix, b_hc: Vector,
                       w1: Matrix, b1: Vector, w2: Matrix, b2: Vector,
                       act1: str = "sigmoid") -> tuple[Vector, Matrix]:
    """(beta, tokens + beta) for a linear channel projector."""
    z0 = matvec(w_hc, g, b_hc)
    zc = mean_rows(tokens)
    beta = mlp(z0 + zc, w1, b1, w2, b2, act1, "sigmoid")
    return beta, [[t + b for t, b in zip(row, beta)] for row in tokens]


# =============================================================================
# Losses
# =============================================================================

def prototype(rows: Sequence[Vector]) -> Vector:
    return mean_rows(rows)


def cross_entropy(logit_rows: Sequence[Vector], labels: Sequence[int]) -> float:
    return -math.fsum(log_softmax(row)[y] for row, y in zip(logit_rows, labels)) / len(labels)


def meta_loss(queries: Matrix, prototypes: Matrix, labels: Sequence[int], tau: float) -> float:
    logits = [[cosine(q, p) / tau for p in prototypes] for q in queries]
    return cross_entropy(logits, labels)


def pretrain_loss(features: Matrix, labels: Sequence[int], weight: Matrix, bias: Vector) -> float:
    return cross_entropy([matvec(weight, f, bias) for f in features], labels)
