#
# SP Few-Shot - Configuration
#
# Copyright (c) 2026 Shareef Jalloq
# SPDX-License-Identifier: BSD-2-Clause
#
# Config dataclasses and enums shared by the model, trainer, evaluator and CLI.
# Model and prompt configs serialize to "key=value" items for the checkpoint
# header; every config serializes to a plain dict for run manifests.
#

import dataclasses
import math
import typing
from dataclasses import dataclass, field
from enum import Enum
from typing import Any, Iterable, Mapping, Optional, TypeVar

from .errors import ConfigError

T = TypeVar("T")


# =============================================================================
# Enums
# =============================================================================

class Mechanism(str, Enum):
    """Which semantic-prompt interaction is applied at the injection layer."""
    NONE = "none"
    SI = "si"      # spatial interaction: prompt token appended to the sequence
    CI = "ci"      # channel interaction: sigmoid-gated shift of every patch token
    BOTH = "both"

    @property
    def spatial(self) -> bool:
        return self in (Mechanism.SI, Mechanism.BOTH)

    @property
    def channel(self) -> bool:
        return self in (Mechanism.CI, Mechanism.BOTH)


class ProjectorKind(str, Enum):
    LINEAR = "linear"
    MLP = "mlp"


class Pooling(str, Enum):
    """Output pooling of the prompted sequence."""
    HEAD = "head"          # output at the prompt position
    PATCHES = "patches"    # mean over patch positions only
    ALL = "all"            # mean over the full sequence


class Activation(str, Enum):
    GELU_TANH = "gelu_tanh"
    GELU_ERF = "gelu_erf"
    SIGMOID = "sigmoid"
    RELU = "relu"
    IDENTITY = "identity"


class ClassifierKind(str, Enum):
    NN = "nn"    # cosine nearest prototype
    LR = "lr"    # multinomial logistic regression


class OptimizerKind(str, Enum):
    ADAMW = "adamw"
    SGD = "sgd"    # plain gradient descent (no momentum, no decay)


# =============================================================================
# Model Configs
# =============================================================================

@dataclass
class AttentionConfig:
    """Multi-head self-attention shape; logits are divided by head_dim**scale_exponent."""
    num_heads: int
    head_dim: int
    scale_exponent: float = 0.25

    @property
    def width(self) -> int:
        return self.num_heads * self.head_dim

    @property
    def scale(self) -> float:
        return float(self.head_dim) ** self.scale_exponent

    def validate(self) -> None:
        if self.num_heads < 1 or self.head_dim < 1:
            raise ConfigError(f"num_heads and head_dim must be positive: {self}")


@dataclass
class ModelConfig:
    """Patch transformer hyperparameters."""
    image_size: int = 16
    channels: int = 1
    patch_size: int = 4
    depth: int = 4
    width: int = 64
    num_heads: int = 4
    mlp_ratio: int = 4
    activation: Activation = Activation.GELU_TANH
    scale_exponent: float = 0.25
    layer_norm_eps: float = 1e-5
    init_std: float = 0.02

    @property
    def grid_size(self) -> int:
        return self.image_size // self.patch_size

    @property
    def num_patches(self) -> int:
        return self.grid_size ** 2

    @property
    def patch_dim(self) -> int:
        return self.patch_size * self.patch_size * self.channels

    @property
    def head_dim(self) -> int:
        return self.width // self.num_heads

    @property
    def attention(self) -> AttentionConfig:
        return AttentionConfig(self.num_heads, self.head_dim, self.scale_exponent)

    def validate(self) -> None:
        if min(self.image_size, self.channels, self.patch_size, self.width,
               self.num_heads, self.mlp_ratio) < 1:
            raise ConfigError(f"model sizes must be positive: {self}")
        if self.depth < 0:
            raise ConfigError(f"depth must be >= 0, got {self.depth}")
        if self.image_size % self.patch_size:
            raise ConfigError(
                f"image_size {self.image_size} not divisible by patch_size {self.patch_size}"
            )
        if self.width % self.num_heads:
            raise ConfigError(f"width {self.width} not divisible by num_heads {self.num_heads}")
        if self.layer_norm_eps <= 0:
            raise ConfigError("layer_norm_eps must be > 0")


def default_inject_layer(depth: int) -> int:
    """First layer of the final third of the stack (1-based), clamped to [1, depth]."""
    return max(1, min(depth, math.ceil(2 * depth / 3) + 1))


@dataclass
class PromptConfig:
    """Semantic prompt injection settings."""
    mechanism: Mechanism = Mechanism.BOTH
    inject_layer: Optional[int] = None   # None -> default_inject_layer(depth)
    projector_kind: ProjectorKind = ProjectorKind.LINEAR
    pooling: Pooling = Pooling.ALL
    semantic_dim: int = 32
    ci_inner_activation: Activation = Activation.SIGMOID

    def resolved(self, depth: int) -> "PromptConfig":
        """Copy with inject_layer materialized for a model of the given depth."""
        layer = self.inject_layer if self.inject_layer is not None else default_inject_layer(depth)
        cfg = dataclasses.replace(self, inject_layer=layer)
        cfg.validate(depth)
        return cfg

    def validate(self, depth: int) -> None:
        if self.semantic_dim < 1:
            raise ConfigError(f"semantic_dim must be positive, got {self.semantic_dim}")
        if self.inject_layer is not None and not (1 <= self.inject_layer <= max(depth, 1)):
            raise ConfigError(f"inject_layer {self.inject_layer} outside [1, {depth}]")
        if self.pooling == Pooling.HEAD and self.mechanism != Mechanism.NONE \
                and not self.mechanism.spatial:
            raise ConfigError("pooling 'head' needs a prompt position (mechanism si or both)")


# =============================================================================
# Run Configs
# =============================================================================

@dataclass
class TrainConfig:
    """Both training stages. Desk-scale learning rates by default."""
    temperature: float = 0.2
    lr_pretrain: float = 1e-3
    lr_encoder: float = 1e-4
    lr_projectors: float = 1e-3
    weight_decay: float = 5e-2
    optimizer: OptimizerKind = OptimizerKind.ADAMW
    pretrain_epochs: int = 50
    batch_size: int = 64
    meta_epochs: int = 10
    episodes_per_epoch: int = 100
    ways: int = 5
    shots: int = 1
    queries: int = 15
    val_episodes: int = 100
    keep_best: bool = True
    seed: int = 0
    prompt: PromptConfig = field(default_factory=PromptConfig)

    def validate(self) -> None:
        if not self.temperature > 0:
            raise ConfigError(f"temperature must be > 0, got {self.temperature}")
        for name in ("lr_pretrain", "lr_encoder", "lr_projectors", "weight_decay"):
            if getattr(self, name) < 0:
                raise ConfigError(f"{name} must be >= 0")
        if self.batch_size < 1 or self.ways < 1 or self.shots < 1 or self.queries < 1:
            raise ConfigError("batch_size, ways, shots and queries must be positive")
        if min(self.pretrain_epochs, self.meta_epochs, self.episodes_per_epoch,
               self.val_episodes) < 0:
            raise ConfigError("epoch and episode counts must be >= 0")


@dataclass
class EvalConfig:
    ways: int = 5
    shots: int = 1
    queries: int = 15
    episodes: int = 2000
    classifier: ClassifierKind = ClassifierKind.NN
    logreg_reg: float = 1.0
    seed: int = 0
    threads: int = 1

    def validate(self) -> None:
        if self.ways < 1 or self.shots < 1 or self.queries < 1 or self.episodes < 1:
            raise ConfigError("ways, shots, queries and episodes must be positive")
        if self.logreg_reg <= 0:
            raise ConfigError("logreg_reg must be > 0")
        if self.threads < 1:
            raise ConfigError("threads must be >= 1")


@dataclass
class SyntheticConfig:
    """Synthetic motif/clutter dataset generator."""
    num_classes: int = 20
    per_class: int = 60
    image_size: int = 16
    channels: int = 1
    cell_size: int = 4
    motifs_min: int = 2
    motifs_max: int = 3
    clutter_pool: int = 8
    clutter_min: int = 2
    clutter_max: int = 4
    noise_std: float = 0.05
    val_fraction: float = 0.25
    novel_fraction: float = 0.25
    seed: int = 0

    @property
    def grid_size(self) -> int:
        return self.image_size // self.cell_size

    def validate(self) -> None:
        if self.num_classes < 4:
            raise ConfigError(f"num_classes must be >= 4, got {self.num_classes}")
        if self.per_class < 1:
            raise ConfigError("per_class must be positive")
        if self.image_size % self.cell_size:
            raise ConfigError("image_size must be a multiple of cell_size")
        if not 1 <= self.motifs_min <= self.motifs_max:
            raise ConfigError("need 1 <= motifs_min <= motifs_max")
        if not 0 <= self.clutter_min <= self.clutter_max:
            raise ConfigError("need 0 <= clutter_min <= clutter_max")
        if self.motifs_max + self.clutter_max > self.grid_size ** 2:
            raise ConfigError("motifs plus clutter exceed the number of grid cells")


# =============================================================================
# Serialization Helpers
# =============================================================================

def _coerce(tp: Any, text: str) -> Any:
    origin = typing.get_origin(tp)
    if origin is typing.Union:
        args = [a for a in typing.get_args(tp) if a is not type(None)]
        if text == "None":
            return None
        return _coerce(args[0], text)
    if isinstance(tp, type) and issubclass(tp, Enum):
        return tp(text)
    if tp is bool:
        if text not in ("True", "False"):
            raise ConfigError(f"expected True/False, got {text!r}")
        return text == "True"
    if tp is int:
        return int(text)
    if tp is float:
        return float(text)
    return text


def _format(value: Any) -> str:
    if isinstance(value, Enum):
        return str(value.value)
    if isinstance(value, float):
        return repr(value)
    return str(value)


def config_to_items(cfg: Any, prefix: str) -> list[tuple[str, str]]:
    """Flatten a flat dataclass into ("prefix.field", text) pairs."""
    return [
        (f"{prefix}.{f.name}", _format(getattr(cfg, f.name)))
        for f in dataclasses.fields(cfg)
    ]


def config_from_items(cls: type[T], items: Mapping[str, str], prefix: str) -> T:
    """Inverse of config_to_items; missing keys keep their defaults."""
    hints = typing.get_type_hints(cls)
    kwargs = {}
    for f in dataclasses.fields(cls):
        key = f"{prefix}.{f.name}"
        if key in items:
            try:
                kwargs[f.name] = _coerce(hints[f.name], items[key])
            except ValueError as e:
                raise ConfigError(f"bad value for {key}: {items[key]!r} ({e})") from e
    return cls(**kwargs)


def config_to_dict(cfg: Any) -> dict:
    """JSON-friendly dict (enums as their values), recursing into nested configs."""
    out = {}
    for f in dataclasses.fields(cfg):
        value = getattr(cfg, f.name)
        if dataclasses.is_dataclass(value):
            out[f.name] = config_to_dict(value)
        elif isinstance(value, Enum):
            out[f.name] = value.value
        else:
            out[f.name] = value
    return out


def config_from_dict(cls: type[T], data: Mapping[str, Any]) -> T:
    hints = typing.get_type_hints(cls)
    kwargs = {}
    for f in dataclasses.fields(cls):
        if f.name not in data:
            continue
        tp, value = hints[f.name], data[f.name]
        if dataclasses.is_dataclass(tp):
            kwargs[f.name] = config_from_dict(tp, value)
        elif value is None:
            kwargs[f.name] = None
        else:
            kwargs[f.name] = _coerce(tp, _format(value) if not isinstance(value, str) else value)
    return cls(**kwargs)


def parse_int_list(text: str | Iterable[int]) -> list[int]:
    """'0,1,2' -> [0, 1, 2]"""
    if not isinstance(text, str):
        return [int(v) for v in text]
    return [int(v) for v in text.split(",") if v.strip()]
