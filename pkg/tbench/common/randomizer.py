#
# SP Few-Shot - Constrained-Random Shape Generator
#
# Copyright (c) 2026 Shareef Jalloq
# SPDX-License-Identifier: BSD-2-Clause
#

"""
Constrained-random stimulus generation for the numeric test suites.

Provides:
- ShapeConstraints: Configurable bounds for attention / token shapes
- ShapeRandomizer: Generates random but legal shapes and float64 tensors
- History tracking for debug/reproduction

Usage:
    rand = ShapeRandomizer(seed=12345, constraints=SMALL_ATTENTION_CONSTRAINTS)
    params = rand.generate_attention_params()
    # params contains: num_heads, head_dim, seq_len, batch, z, w_qkv, w_out
"""

import random
from dataclasses import dataclass
from typing import Any, Dict, List, Optional, Tuple

import torch


@dataclass
class ShapeConstraints:
    """Constraints for shape and value generation."""

    # Attention layout
    min_heads: int = 1
    max_heads: int = 3
    min_head_dim: int = 1
    max_head_dim: int = 4

    # Sequence
    min_seq_len: int = 1
    max_seq_len: int = 6

    # Leading batch dimension; 0 means "no batch axis"
    max_batch: int = 2

    # Value scale
    value_std: float = 1.0
    weight_std: float = 0.5


class ShapeRandomizer:
    """Constrained-random shape and tensor generator."""

    def __init__(self, seed: Optional[int] = None,
                 constraints: Optional[ShapeConstraints] = None):
        """
        Initialize randomizer.

        Args:
            seed: Random seed for reproducibility. If None, uses system entropy.
            constraints: Shape constraints. If None, uses defaults.
        """
        self.seed = seed
        self.rng = random.Random(seed)
        self.gen = torch.Generator().manual_seed(seed if seed is not None else random.getrandbits(32))
        self.constraints = constraints or ShapeConstraints()
        self.generated_count = 0
        self.history: List[Tuple[str, Dict[str, Any]]] = []

    def get_state(self) -> Dict[str, Any]:
        """Get current state for reproduction."""
        return {
            'seed': self.seed,
            'generated_count': self.generated_count,
        }

    def random_tensor(self, *shape: int, std: Optional[float] = None) -> torch.Tensor:
        """Gaussian float64 tensor."""
        std = self.constraints.value_std if std is None else std
        return torch.randn(*shape, generator=self.gen, dtype=torch.float64) * std

    def random_weight(self, out_dim: int, in_dim: int) -> torch.Tensor:
        return self.random_tensor(out_dim, in_dim, std=self.constraints.weight_std)

    def random_lead(self) -> Tuple[int, ...]:
        """Optional leading batch shape."""
        batch = self.rng.randint(0, self.constraints.max_batch)
        return (batch,) if batch else ()

    def generate_attention_params(self) -> Dict[str, Any]:
        """Complete multi-head self-attention instance."""
        c = self.constraints
        heads = self.rng.randint(c.min_heads, c.max_heads)
        head_dim = self.rng.randint(c.min_head_dim, c.max_head_dim)
        width = heads * head_dim
        seq_len = self.rng.randint(c.min_seq_len, c.max_seq_len)
        lead = self.random_lead()

        params = {
            'num_heads': heads,
            'head_dim': head_dim,
            'seq_len': seq_len,
            'lead': lead,
            'z': self.random_tensor(*lead, seq_len, width),
            'w_qkv': self.random_weight(3 * width, width),
            'w_out': self.random_weight(width, width),
        }

        self.generated_count += 1
        self.history.append(('MSA', {k: params[k] for k in ('num_heads', 'head_dim', 'seq_len', 'lead')}))
        return params

    def generate_modulation_params(self, semantic_dim: int = 3) -> Dict[str, Any]:
        """Token sequence plus class embedding for channel modulation."""
        c = self.constraints
        width = self.rng.randint(2, 2 * c.max_head_dim)
        seq_len = self.rng.randint(c.min_seq_len, c.max_seq_len)

        params = {
            'width': width,
            'seq_len': seq_len,
            'semantic_dim': semantic_dim,
            'tokens': self.random_tensor(seq_len, width),
            'g': self.random_tensor(semantic_dim),
        }

        self.generated_count += 1
        self.history.append(('CI', {'width': width, 'seq_len': seq_len}))
        return params


# =============================================================================
# Pre-defined Constraint Sets
# =============================================================================

SMALL_ATTENTION_CONSTRAINTS = ShapeConstraints(
    min_heads=1,
    max_heads=2,
    min_head_dim=2,
    max_head_dim=3,
    min_seq_len=2,
    max_seq_len=4,
    max_batch=0,
)

STRESS_ATTENTION_CONSTRAINTS = ShapeConstraints(
    min_heads=1,
    max_heads=4,
    min_head_dim=1,
    max_head_dim=5,
    min_seq_len=1,
    max_seq_len=9,
    max_batch=3,
    value_std=3.0,
)
