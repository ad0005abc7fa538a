#
# SP Few-Shot - Export and Live View Tests
#
# Copyright (c) 2026 Shareef Jalloq
# SPDX-License-Identifier: BSD-2-Clause
#

import csv
import io
import json

import pytest
from rich.console import Console

from sp_fewshot.common.config import ClassifierKind, Mechanism
from sp_fewshot.evaluation.protocol import EvalReport
from sp_fewshot.evaluation.studies import StudyRow
from sp_fewshot.tools.export import (
    export_curve_csv, export_report, export_study_csv, export_study_summary,
)
from sp_fewshot.tools.live import TrainingView, metric_style
from sp_fewshot.training.trainer import CurveRow

CURVE = [
    CurveRow(0, "validation", "accuracy", 0.4),
    CurveRow(1, "base", "loss", 1.0 / 3.0),
    CurveRow(1, "validation", "accuracy", 0.55),
]


@pytest.fixture
def report():
    return EvalReport.from_accuracies(
        [1.0, 0.5, 0.75], ways=2, shots=1, classifier=ClassifierKind.NN,
        mechanism=Mechanism.BOTH, seed=9,
    )


def test_curve_csv_values_are_exact(tmp_path):
    path = tmp_path / "sub" / "curve.csv"
    assert export_curve_csv(CURVE, path) == 3
    with open(path, newline="") as f:
        rows = list(csv.DictReader(f))
    assert [r["split"] for r in rows] == ["validation", "base", "validation"]
    assert float(rows[1]["value"]) == 1.0 / 3.0
    assert path.read_bytes().startswith(b"epoch,split,metric,value\n")


def test_report_format_follows_suffix(tmp_path, report):
    export_report(report, tmp_path / "r.txt")
    export_report(report, tmp_path / "r.csv")
    export_report(report, tmp_path / "r.json")

    lines = (tmp_path / "r.txt").read_text().splitlines()
    assert lines[0] == report.summary()
    assert "mechanism=both" in lines[1] and "seed=9" in lines[1]

    rows = (tmp_path / "r.csv").read_text().splitlines()
    assert rows[0] == "episode,accuracy" and rows[3] == "2,0.75"

    obj = json.loads((tmp_path / "r.json").read_text())
    assert obj["episodes"] == 3
    assert obj["per_episode_acc"] == [1.0, 0.5, 0.75]
    assert obj["classifier"] == "nn"


def test_unknown_report_format(tmp_path, report):
    with pytest.raises(ValueError):
        export_report(report, tmp_path / "r.bin", format="bin")


def test_study_exports(tmp_path):
    rows = [StudyRow(0, "pretrain", 0.5, 0.1), StudyRow(0, "both", 0.75, 0.1),
            StudyRow(1, "pretrain", 0.6, 0.1), StudyRow(1, "both", 0.85, 0.1)]
    assert export_study_csv(rows, tmp_path / "s.csv") == 4
    assert export_study_summary(rows, tmp_path / "s.txt") == 2
    assert (tmp_path / "s.txt").read_text().splitlines() == [
        "pretrain   0.5500", "both       0.8000",
    ]


# =============================================================================
# Live View
# =============================================================================

def test_metric_styles_differ():
    styles = {metric_style(row) for row in CURVE}
    assert len(styles) == 2


def test_view_prints_final_table():
    buf = io.StringIO()
    view = TrainingView("Meta-training", console=Console(file=buf, width=100))
    with view:
        for row in CURVE:
            view.update(row)
        view.study_update(StudyRow(3, "ci", 0.625, 0.01))
    text = buf.getvalue()
    assert "Meta-training" in text
    assert "0.3333" in text and "0.6250" in text
    assert view._stats["best_val"] == 0.55
    assert view._stats["epoch"] == 3
