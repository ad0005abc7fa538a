#
# SP Few-Shot - Error Hierarchy
#
# Copyright (c) 2026 Shareef Jalloq
# SPDX-License-Identifier: BSD-2-Clause
#
# Every failure raised by the library derives from SPFewShotError so the CLI
# can map it to exit code 1 in one place.
#

from typing import Optional


class SPFewShotError(Exception):
    """Base class for all library errors."""


class ShapeError(SPFewShotError, ValueError):
    """Tensor shapes do not line up."""


class ConfigError(SPFewShotError, ValueError):
    """Invalid or inconsistent configuration."""


class NumericDomainError(SPFewShotError, ValueError):
    """Non-finite input or an operation outside its numeric domain (e.g. zero norm)."""


class StateError(SPFewShotError, RuntimeError):
    """Operation is not valid in the current state (e.g. double prompt extension)."""


class SamplingError(SPFewShotError, ValueError):
    """Episode cannot be sampled from the split."""


class InputError(SPFewShotError, ValueError):
    """Malformed call arguments (labels out of range, empty classes, ...)."""


class ParseError(SPFewShotError, ValueError):
    """Text or binary file could not be parsed."""

    def __init__(self, message: str, line_number: Optional[int] = None):
        if line_number is not None:
            message = f"line {line_number}: {message}"
        super().__init__(message)
        self.line_number = line_number


class CheckpointError(ParseError):
    """Checkpoint / tensor-block container is invalid."""


class MissingEmbeddingError(SPFewShotError, KeyError):
    """Class name has no semantic embedding."""

    def __init__(self, class_name: str):
        super().__init__(class_name)
        self.class_name = class_name

    def __str__(self) -> str:
        return f"no semantic embedding for class '{self.class_name}'"


class TrainingError(SPFewShotError, RuntimeError):
    """Training diverged."""

    def __init__(self, message: str, step: int):
        super().__init__(f"step {step}: {message}")
        self.step = step


class ConvergenceError(SPFewShotError, RuntimeError):
    """Iterative solver hit its iteration cap."""
