#
# SP Few-Shot - Live Training View
#
# Copyright (c) 2026 Shareef Jalloq
# SPDX-License-Identifier: BSD-2-Clause
#
# Rich-based terminal view of the training curve while a stage runs.
#

import math
import time
from collections import deque
from typing import Optional

from rich.console import Console
from rich.layout import Layout
from rich.live import Live
from rich.panel import Panel
from rich.table import Table
from rich.text import Text

from sp_fewshot.evaluation.studies import StudyRow
from sp_fewshot.training.trainer import CurveRow


def metric_style(row: CurveRow) -> str:
    """Rich style for a curve row."""
    styles = {
        ("base", "loss"): "cyan",
        ("base", "accuracy"): "green",
        ("validation", "accuracy"): "magenta",
    }
    return styles.get((row.split, row.metric), "white")


class TrainingView:
    """
    Live table of the most recent curve rows with a summary panel.

    Use as a context manager and pass `update` as the trainer's progress
    callback.
    """

    def __init__(
        self,
        title: str,
        max_rows: int = 20,
        show_stats: bool = True,
        console: Optional[Console] = None,
    ):
        """
        Initialize live view.

        Args:
            title: Table title (stage name)
            max_rows: Maximum rows to display in table
            show_stats: Whether to show the summary panel
            console: Console to render on (stderr by default)
        """
        self.title = title
        self.max_rows = max_rows
        self.show_stats = show_stats
        self.console = console or Console(stderr=True)
        self._rows: deque[CurveRow] = deque(maxlen=max_rows)
        self._live: Optional[Live] = None
        self._start = 0.0

        self._stats = {
            "rows": 0,
            "epoch": 0,
            "last_loss": math.nan,
            "best_val": math.nan,
        }

    def _update_stats(self, row: CurveRow) -> None:
        self._stats["rows"] += 1
        self._stats["epoch"] = max(self._stats["epoch"], row.epoch)
        if row.metric == "loss":
            self._stats["last_loss"] = row.value
        elif row.split == "validation":
            best = self._stats["best_val"]
            self._stats["best_val"] = row.value if math.isnan(best) else max(best, row.value)

    def _make_table(self) -> Table:
        table = Table(
            title=self.title,
            show_header=True,
            header_style="bold",
            border_style="dim",
            expand=True,
        )
        table.add_column("Epoch", style="dim", width=6, justify="right")
        table.add_column("Split", width=11)
        table.add_column("Metric", width=9)
        table.add_column("Value", width=10, justify="right")

        for row in self._rows:
            table.add_row(
                str(row.epoch),
                row.split,
                Text(row.metric, style=metric_style(row)),
                f"{row.value:.4f}",
            )
        return table

    def _make_stats_panel(self) -> Panel:
        elapsed = time.monotonic() - self._start
        text = Text()
        text.append(f"Epoch: {self._stats['epoch']}\n", style="bold")
        text.append(f"  Loss:     {self._stats['last_loss']:.4f}\n", style="cyan")
        if not math.isnan(self._stats["best_val"]):
            text.append(f"  Best val: {self._stats['best_val']:.4f}\n", style="magenta")
        text.append(f"\nTime: {elapsed:.1f}s", style="dim")
        return Panel(text, title="Progress", border_style="dim")

    def _make_layout(self) -> Layout:
        layout = Layout()
        if self.show_stats:
            layout.split_row(
                Layout(name="table", ratio=3),
                Layout(name="stats", ratio=1),
            )
            layout["table"].update(self._make_table())
            layout["stats"].update(self._make_stats_panel())
        else:
            layout.update(self._make_table())
        return layout

    def update(self, row: CurveRow) -> None:
        """Progress callback for pretrain / meta_train."""
        self._rows.append(row)
        self._update_stats(row)
        if self._live is not None:
            self._live.update(self._make_layout())

    def study_update(self, row: StudyRow) -> None:
        """Progress callback for the ablation / layer studies."""
        self.update(CurveRow(row.seed, row.variant, "accuracy", row.mean_acc))

    def __enter__(self) -> "TrainingView":
        self._start = time.monotonic()
        self._live = Live(
            self._make_layout(),
            console=self.console,
            refresh_per_second=4,
            transient=True,
        )
        self._live.__enter__()
        return self

    def __exit__(self, *exc) -> None:
        if self._live is not None:
            self._live.__exit__(*exc)
            self._live = None
        if self._rows:
            self.console.print(self._make_table())
