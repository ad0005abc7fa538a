#
# SP Few-Shot - Common Definitions
#
# Copyright (c) 2026 Shareef Jalloq
# SPDX-License-Identifier: BSD-2-Clause
#
# Configs, errors, logging and the tensor-block container shared by every
# other sub-package. This package has no torch dependency.
#

from .config import (
    # Enums
    Mechanism,
    ProjectorKind,
    Pooling,
    Activation,
    ClassifierKind,
    OptimizerKind,
    # Configs
    AttentionConfig,
    ModelConfig,
    PromptConfig,
    TrainConfig,
    EvalConfig,
    SyntheticConfig,
    default_inject_layer,
    # Serialization
    config_to_items,
    config_from_items,
    config_to_dict,
    config_from_dict,
)
from .errors import (
    SPFewShotError,
    ShapeError,
    ConfigError,
    NumericDomainError,
    StateError,
    SamplingError,
    InputError,
    ParseError,
    CheckpointError,
    MissingEmbeddingError,
    TrainingError,
    ConvergenceError,
)
from .log import get_logger, setup_logging
from .tensor_io import Container, read_container, write_container

__all__ = [
    # Enums
    "Mechanism",
    "ProjectorKind",
    "Pooling",
    "Activation",
    "ClassifierKind",
    "OptimizerKind",
    # Configs
    "AttentionConfig",
    "ModelConfig",
    "PromptConfig",
    "TrainConfig",
    "EvalConfig",
    "SyntheticConfig",
    "default_inject_layer",
    # Serialization
    "config_to_items",
    "config_from_items",
    "config_to_dict",
    "config_from_dict",
    # Errors
    "SPFewShotError",
    "ShapeError",
    "ConfigError",
    "NumericDomainError",
    "StateError",
    "SamplingError",
    "InputError",
    "ParseError",
    "CheckpointError",
    "MissingEmbeddingError",
    "TrainingError",
    "ConvergenceError",
    # Logging
    "get_logger",
    "setup_logging",
    # Container files
    "Container",
    "read_container",
    "write_container",
]
