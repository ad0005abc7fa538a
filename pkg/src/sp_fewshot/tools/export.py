#
# SP Few-Shot - Export Functions
#
# Copyright (c) 2026 Shareef Jalloq
# SPDX-License-Identifier: BSD-2-Clause
#
# Write training curves, evaluation reports and study tables to disk.
#

import csv
import json
from pathlib import Path
from typing import Iterable, Sequence

from sp_fewshot.evaluation.protocol import EvalReport
from sp_fewshot.evaluation.studies import StudyRow, summarize_study
from sp_fewshot.training.trainer import CurveRow

CURVE_FIELDS = ["epoch", "split", "metric", "value"]
STUDY_FIELDS = ["seed", "variant", "mean_acc", "ci95_halfwidth"]


def _open(output: Path, newline: str = "\n"):
    output = Path(output)
    output.parent.mkdir(parents=True, exist_ok=True)
    return open(output, "w", encoding="utf-8", newline=newline)


def export_curve_csv(rows: Iterable[CurveRow], output: Path) -> int:
    """
    Export a loss / accuracy curve as `epoch,split,metric,value`.

    Args:
        rows: Curve rows in emission order
        output: Output file path

    Returns:
        Number of rows exported
    """
    count = 0
    with _open(output, newline="") as f:
        writer = csv.DictWriter(f, fieldnames=CURVE_FIELDS, lineterminator="\n")
        writer.writeheader()
        for row in rows:
            writer.writerow({
                "epoch": row.epoch,
                "split": row.split,
                "metric": row.metric,
                "value": repr(float(row.value)),
            })
            count += 1
    return count


def export_episodes_csv(report: EvalReport, output: Path) -> int:
    """One line per episode: `episode,accuracy`."""
    with _open(output, newline="") as f:
        writer = csv.writer(f, lineterminator="\n")
        writer.writerow(["episode", "accuracy"])
        for i, acc in enumerate(report.per_episode_acc):
            writer.writerow([i, repr(float(acc))])
    return len(report.per_episode_acc)


def export_summary_text(report: EvalReport, output: Path) -> int:
    """Plain-text summary; the first line is `mean ± halfwidth`."""
    with _open(output) as f:
        f.write(report.summary() + "\n")
        f.write(f"ways={report.ways} shots={report.shots} episodes={report.episodes} "
                f"classifier={report.classifier.value} mechanism={report.mechanism.value} "
                f"seed={report.seed}\n")
    return 1


def export_report_json(report: EvalReport, output: Path) -> int:
    obj = {
        "mean_acc": report.mean_acc,
        "ci95_halfwidth": report.ci95_halfwidth,
        "ways": report.ways,
        "shots": report.shots,
        "episodes": report.episodes,
        "classifier": report.classifier.value,
        "mechanism": report.mechanism.value,
        "seed": report.seed,
        "per_episode_acc": report.per_episode_acc,
    }
    with _open(output) as f:
        json.dump(obj, f, indent=2)
        f.write("\n")
    return 1


def export_report(report: EvalReport, output: Path, format: str = "auto") -> int:
    """
    Export an evaluation report.

    Args:
        report: Report to write
        output: Output file path
        format: 'txt', 'csv' (per-episode accuracies), 'json' or 'auto'

    Returns:
        Number of records exported
    """
    if format == "auto":
        format_map = {
            ".txt": "txt",
            ".text": "txt",
            ".csv": "csv",
            ".json": "json",
        }
        format = format_map.get(Path(output).suffix.lower(), "txt")

    exporters = {
        "txt": export_summary_text,
        "csv": export_episodes_csv,
        "json": export_report_json,
    }
    exporter = exporters.get(format)
    if not exporter:
        raise ValueError(f"Unknown export format: {format}")
    return exporter(report, output)


def export_study_csv(rows: Sequence[StudyRow], output: Path) -> int:
    """One row per (seed, variant)."""
    with _open(output, newline="") as f:
        writer = csv.DictWriter(f, fieldnames=STUDY_FIELDS, lineterminator="\n")
        writer.writeheader()
        for row in rows:
            writer.writerow({
                "seed": row.seed,
                "variant": row.variant,
                "mean_acc": repr(row.mean_acc),
                "ci95_halfwidth": repr(row.ci95_halfwidth),
            })
    return len(rows)


def export_study_summary(rows: Sequence[StudyRow], output: Path) -> int:
    """`variant mean` lines, mean accuracy over seeds at 4 decimals."""
    summary = summarize_study(rows)
    with _open(output) as f:
        for variant, mean in summary.items():
            f.write(f"{variant:10s} {mean:.4f}\n")
    return len(summary)
