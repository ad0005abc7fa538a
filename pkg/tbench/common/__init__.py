#
# SP Few-Shot - Common Test Infrastructure
#
# Copyright (c) 2026 Shareef Jalloq
# SPDX-License-Identifier: BSD-2-Clause
#

"""
Shared helpers for the SP Few-Shot test suites.

This package provides:
- oracles: independent step-by-step reference implementations on Python floats
- ShapeRandomizer: seeded constrained-random shapes and tensors
- toy: tiny model / dataset builders shared across suites
"""

from tbench.common.randomizer import ShapeConstraints, ShapeRandomizer
from tbench.common.toy import TOY_MODEL, tiny_dataset, toy_images, toy_model

__all__ = [
    'ShapeConstraints',
    'ShapeRandomizer',
    'TOY_MODEL',
    'tiny_dataset',
    'toy_images',
    'toy_model',
]
