#
# SP Few-Shot - Core Numeric Primitives
#
# Copyright (c) 2026 Shareef Jalloq
# SPDX-License-Identifier: BSD-2-Clause
#
# Differentiable building blocks shared by the encoder and prompt modules,
# plus the finite-difference gradient checker. Everything runs in float64;
# backward passes come from torch autograd.
#

import math
from dataclasses import dataclass, field
from typing import Callable, Iterable, Mapping, Optional, Union

import torch
import torch.nn.functional as F
from torch import Tensor, nn

from sp_fewshot.common.config import Activation, AttentionConfig
from sp_fewshot.common.errors import ConfigError, NumericDomainError, ShapeError

DTYPE = torch.float64


# =============================================================================
# Elementwise Helpers
# =============================================================================

def ensure_finite(t: Tensor, what: str = "input") -> Tensor:
    """Raise NumericDomainError if t holds NaN or Inf."""
    if not bool(torch.isfinite(t).all()):
        raise NumericDomainError(f"non-finite values in {what}")
    return t


ACTIVATIONS: dict[Activation, Callable[[Tensor], Tensor]] = {
    Activation.GELU_TANH: lambda x: F.gelu(x, approximate="tanh"),
    Activation.GELU_ERF: lambda x: F.gelu(x, approximate="none"),
    Activation.SIGMOID: torch.sigmoid,
    Activation.RELU: torch.relu,
    Activation.IDENTITY: lambda x: x,
}


def activation_fn(kind: Union[Activation, str]) -> Callable[[Tensor], Tensor]:
    try:
        return ACTIVATIONS[Activation(kind)]
    except ValueError:
        raise ConfigError(f"unknown activation '{kind}'") from None


# =============================================================================
# Functional Ops
# =============================================================================

def softmax(v: Tensor, axis: int = -1) -> Tensor:
    """Numerically stable softmax (max-subtracted) along axis."""
    ensure_finite(v, "softmax input")
    return torch.softmax(v, dim=axis)


def linear(x: Tensor, weight: Tensor, bias: Optional[Tensor] = None) -> Tensor:
    """x Wᵀ + b with weight stored (out, in)."""
    if x.shape[-1] != weight.shape[-1]:
        raise ShapeError(f"linear: input width {x.shape[-1]} != weight in-dim {weight.shape[-1]}")
    if bias is not None and bias.shape[-1] != weight.shape[0]:
        raise ShapeError(f"linear: bias length {bias.shape[-1]} != weight out-dim {weight.shape[0]}")
    return F.linear(x, weight, bias)


def layer_norm(x: Tensor, gamma: Tensor, beta: Tensor, eps: float = 1e-5) -> Tensor:
    """Normalize the last axis to mean 0 / population variance 1, then scale and shift."""
    n = x.shape[-1]
    if gamma.shape != (n,) or beta.shape != (n,):
        raise ShapeError(
            f"layer_norm: last axis {n} vs gamma {tuple(gamma.shape)} / beta {tuple(beta.shape)}"
        )
    if eps <= 0:
        raise ConfigError("layer_norm eps must be > 0")
    return F.layer_norm(x, (n,), gamma, beta, eps)


def multihead_self_attention(
    z: Tensor,
    w_qkv: Tensor,
    w_out: Tensor,
    cfg: AttentionConfig,
    return_attention: bool = False,
) -> Union[Tensor, tuple[Tensor, Tensor]]:
    """
    Multi-head self-attention over a (..., S, C_z) sequence.

    [q, k, v] = Z W_qkvᵀ, A = softmax(q kᵀ / C_h**scale_exponent) per head,
    out = concat_h(A v) W_outᵀ. W_qkv is (3 C_z, C_z) with rows ordered
    [q | k | v]; each third is split into N_h contiguous heads of C_h.

    Args:
        z: Token sequence (..., S, C_z)
        w_qkv: (3 C_z, C_z)
        w_out: (C_z, C_z)
        cfg: Head layout and logit scale
        return_attention: Also return A of shape (..., N_h, S, S)
    """
    cfg.validate()
    width = z.shape[-1]
    if width != cfg.width:
        raise ConfigError(
            f"attention width {width} != num_heads*head_dim = {cfg.num_heads}*{cfg.head_dim}"
        )
    if z.shape[-2] < 1:
        raise ShapeError("attention needs at least one token")
    if w_qkv.shape != (3 * width, width) or w_out.shape != (width, width):
        raise ShapeError(
            f"attention weights {tuple(w_qkv.shape)}/{tuple(w_out.shape)} do not match width {width}"
        )

    q, k, v = linear(z, w_qkv).chunk(3, dim=-1)

    def split_heads(t: Tensor) -> Tensor:
        return t.unflatten(-1, (cfg.num_heads, cfg.head_dim)).transpose(-3, -2)

    q, k, v = split_heads(q), split_heads(k), split_heads(v)
    attn = softmax(q @ k.transpose(-2, -1) / cfg.scale, axis=-1)
    context = (attn @ v).transpose(-3, -2).flatten(-2)
    out = linear(context, w_out)
    return (out, attn) if return_attention else out


def mlp_block(
    x: Tensor,
    w1: Tensor, b1: Tensor,
    w2: Tensor, b2: Tensor,
    act1: Union[Activation, str] = Activation.GELU_TANH,
    act2: Union[Activation, str] = Activation.IDENTITY,
) -> Tensor:
    """act2(W_2 act1(W_1 x + b_1) + b_2)"""
    if x.shape[-1] != w1.shape[-1]:
        raise ShapeError(f"mlp: input width {x.shape[-1]} != first weight in-dim {w1.shape[-1]}")
    if w2.shape[-1] != w1.shape[0]:
        raise ShapeError(f"mlp: hidden {w1.shape[0]} != second weight in-dim {w2.shape[-1]}")
    hidden = activation_fn(act1)(linear(x, w1, b1))
    return activation_fn(act2)(linear(hidden, w2, b2))


def _norms(x: Tensor, what: str) -> Tensor:
    norms = torch.linalg.vector_norm(x, dim=-1, keepdim=True)
    if bool((norms == 0).any()):
        raise NumericDomainError(f"zero-norm vector in {what}")
    return norms


def cosine_similarity(a: Tensor, b: Tensor) -> Tensor:
    """Cosine similarity of two vectors; 0-dim tensor in [-1, 1]."""
    if a.shape != b.shape or a.dim() != 1:
        raise ShapeError(f"cosine_similarity needs equal 1-D shapes, got {tuple(a.shape)}, {tuple(b.shape)}")
    value = (a @ b) / (_norms(a, "a") * _norms(b, "b")).squeeze(-1)
    return value.clamp(-1.0, 1.0)


def cosine_similarity_matrix(a: Tensor, b: Tensor) -> Tensor:
    """Pairwise cosine similarities: (Q, D) x (N, D) -> (Q, N)."""
    if a.shape[-1] != b.shape[-1]:
        raise ShapeError(f"feature widths differ: {a.shape[-1]} vs {b.shape[-1]}")
    return (a / _norms(a, "queries")) @ (b / _norms(b, "prototypes")).transpose(-2, -1)


# =============================================================================
# Parameter Holders
# =============================================================================

class LayerNorm(nn.Module):
    """Affine layer norm over the last axis (gamma / beta parameters)."""

    def __init__(self, width: int, eps: float = 1e-5):
        super().__init__()
        self.eps = eps
        self.gamma = nn.Parameter(torch.ones(width, dtype=DTYPE))
        self.beta = nn.Parameter(torch.zeros(width, dtype=DTYPE))

    def forward(self, x: Tensor) -> Tensor:
        return layer_norm(x, self.gamma, self.beta, self.eps)


class MultiHeadSelfAttention(nn.Module):

    def __init__(self, cfg: AttentionConfig):
        super().__init__()
        cfg.validate()
        self.cfg = cfg
        width = cfg.width
        self.w_qkv = nn.Parameter(torch.zeros(3 * width, width, dtype=DTYPE))
        self.w_out = nn.Parameter(torch.zeros(width, width, dtype=DTYPE))

    def forward(self, z: Tensor, return_attention: bool = False):
        return multihead_self_attention(z, self.w_qkv, self.w_out, self.cfg, return_attention)


class MLPBlock(nn.Module):
    """Two linear layers with configurable activations."""

    def __init__(
        self,
        in_dim: int,
        hidden_dim: int,
        out_dim: int,
        act1: Activation = Activation.GELU_TANH,
        act2: Activation = Activation.IDENTITY,
    ):
        super().__init__()
        self.act1 = Activation(act1)
        self.act2 = Activation(act2)
        self.fc1 = nn.Linear(in_dim, hidden_dim, dtype=DTYPE)
        self.fc2 = nn.Linear(hidden_dim, out_dim, dtype=DTYPE)

    def forward(self, x: Tensor) -> Tensor:
        return mlp_block(
            x, self.fc1.weight, self.fc1.bias, self.fc2.weight, self.fc2.bias,
            self.act1, self.act2,
        )


# =============================================================================
# Gradient Checking
# =============================================================================

ParamSource = Union[Mapping[str, Tensor], Iterable[tuple[str, Tensor]]]
GradHook = Callable[[str, Tensor], Tensor]


def relative_error(analytic: Tensor, numeric: Tensor, floor: float = 1e-8) -> float:
    """
    Worst entry-wise |a - n| / max(|a|, |n|). Entries where both |a| and |n|
    are below floor contribute the absolute difference |a - n| instead.
    """
    diff = (analytic - numeric).abs()
    scale = torch.maximum(analytic.abs(), numeric.abs())
    err = torch.where(scale < floor, diff, diff / scale.clamp_min(floor))
    if err.numel() == 0:
        return 0.0
    if torch.isnan(err).any():
        return math.inf
    return float(err.max())


@dataclass
class GradCheckReport:
    """Worst entry-wise relative gradient error per parameter tensor."""
    epsilon: float
    per_parameter: dict[str, float] = field(default_factory=dict)
    entries_checked: int = 0

    @property
    def max_relative_error(self) -> float:
        return max(self.per_parameter.values(), default=0.0)

    def worst_first(self) -> list[tuple[str, float]]:
        return sorted(self.per_parameter.items(), key=lambda kv: (-kv[1], kv[0]))

    def passed(self, threshold: float = 1e-4) -> bool:
        return self.max_relative_error <= threshold

    def merge(self, other: "GradCheckReport", prefix: str = "") -> None:
        for name, err in other.per_parameter.items():
            key = f"{prefix}{name}"
            self.per_parameter[key] = max(err, self.per_parameter.get(key, 0.0))
        self.entries_checked += other.entries_checked


def check_gradients(
    scalar_fn: Callable[[], Tensor],
    params: ParamSource,
    epsilon: float = 1e-4,
    grad_hook: Optional[GradHook] = None,
) -> GradCheckReport:
    """
    Compare autograd gradients against central finite differences.

    Every entry of every parameter is perturbed by ±epsilon in place and
    restored afterwards, so the parameters are bitwise unchanged on return.

    Args:
        scalar_fn: Closure recomputing the scalar objective from the current params
        params: Named parameters to check
        epsilon: Finite-difference step
        grad_hook: Optional (name, grad) -> grad applied to the analytic gradient
                   before comparison (negative-control hook)

    Returns:
        GradCheckReport with the worst entry-wise relative error of each parameter
    """
    named = list(params.items()) if isinstance(params, Mapping) else list(params)
    tensors = [p for _, p in named]

    with torch.enable_grad():
        loss = scalar_fn()
        grads = torch.autograd.grad(loss, tensors, allow_unused=True)
    grads = [torch.zeros_like(p) if g is None else g.detach() for p, g in zip(tensors, grads)]

    report = GradCheckReport(epsilon=epsilon)
    with torch.no_grad():
        for (name, param), grad in zip(named, grads):
            if grad_hook is not None:
                grad = grad_hook(name, grad)
            flat = param.data.view(-1)
            numeric = torch.zeros_like(flat)
            for i in range(flat.numel()):
                original = flat[i].item()
                flat[i] = original + epsilon
                f_plus = float(scalar_fn())
                flat[i] = original - epsilon
                f_minus = float(scalar_fn())
                flat[i] = original
                numeric[i] = (f_plus - f_minus) / (2.0 * epsilon)
            report.per_parameter[name] = relative_error(grad.reshape(-1), numeric)
            report.entries_checked += flat.numel()
    return report
