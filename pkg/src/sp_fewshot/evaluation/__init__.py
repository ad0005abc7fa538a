#
# SP Few-Shot - Evaluation
#
# Copyright (c) 2026 Shareef Jalloq
# SPDX-License-Identifier: BSD-2-Clause
#
# Note: studies pull in the trainer, import them explicitly:
#
#   from sp_fewshot.evaluation.studies import run_ablation
#

from .classifiers import classify_cosine, classify_logreg
from .protocol import EvalReport, evaluate, summarize_accuracies
from .attention import dump_attention

__all__ = [
    "classify_cosine",
    "classify_logreg",
    "EvalReport",
    "evaluate",
    "summarize_accuracies",
    "dump_attention",
]
