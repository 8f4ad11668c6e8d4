"""Render report figures to files next to the delimited outputs."""

from __future__ import annotations

from pathlib import Path
from typing import Sequence

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt

from .bias import CategoryBiasReport
from .demographics import Crosstab, ValueCount
from .maskprob import MaskReportRow

# Fixed metadata keeps PNG bytes reproducible across runs.
_PNG_METADATA = {"Software": "clinbias"}

_BAR_COLOR = "#1F608B"
_FEMALE_COLOR = "#C76048"
_MALE_COLOR = "#1F608B"


def _save(fig, path: str | Path) -> None:
    fig.savefig(Path(path), dpi=150, bbox_inches="tight", metadata=_PNG_METADATA)
    plt.close(fig)


def render_category_bias(reports: Sequence[CategoryBiasReport], path: str | Path) -> None:
    """Bar chart of direct bias per category, labeled with the numeric value."""
    cats = [r.category for r in reports]
    values = [r.direct_bias if r.direct_bias is not None else 0.0 for r in reports]
    fig, ax = plt.subplots(figsize=(max(4.0, 1.6 * len(cats)), 3.2))
    bars = ax.bar(range(len(cats)), values, color=_BAR_COLOR, width=0.6)
    ax.set_xticks(range(len(cats)))
    ax.set_xticklabels([c.replace("_", "\n") for c in cats], fontsize=8)
    ax.set_ylabel("direct bias")
    ax.set_ylim(0, max(values + [0.01]) * 1.25)
    for bar, value in zip(bars, values):
        ax.text(bar.get_x() + bar.get_width() / 2, value, f"{value:.3f}", ha="center", va="bottom", fontsize=8)
    ax.spines[["top", "right"]].set_visible(False)
    _save(fig, path)


def render_value_counts(rows: Sequence[ValueCount], column: str, path: str | Path) -> None:
    """Horizontal bars of the percentage distribution of one column."""
    labeled = [(r.value, r.percentage) for r in rows if r.percentage is not None]
    labels = [v for v, _ in labeled]
    values = [p for _, p in labeled]
    fig, ax = plt.subplots(figsize=(5.0, max(2.0, 0.4 * len(labels))))
    ax.barh(range(len(labels)), values, color=_BAR_COLOR)
    ax.set_yticks(range(len(labels)))
    ax.set_yticklabels(labels, fontsize=8)
    ax.invert_yaxis()
    ax.set_xlabel(f"% of non-missing {column}")
    ax.spines[["top", "right"]].set_visible(False)
    _save(fig, path)


def render_crosstab(tab: Crosstab, path: str | Path) -> None:
    """Grouped bars: within each row value, the percentage of each column value."""
    n_rows = len(tab.row_values)
    n_cols = len(tab.col_values)
    width = 0.8 / n_cols
    fig, ax = plt.subplots(figsize=(max(4.0, 1.0 * n_rows), 3.2))
    cmap = plt.get_cmap("tab10")
    for j, col_value in enumerate(tab.col_values):
        xs = [i + j * width for i in range(n_rows)]
        ys = [tab.percentages[i][j] for i in range(n_rows)]
        ax.bar(xs, ys, width=width, label=col_value, color=cmap(j % 10))
    ax.set_xticks([i + 0.4 - width / 2 for i in range(n_rows)])
    ax.set_xticklabels(tab.row_values, fontsize=8, rotation=30, ha="right")
    ax.set_ylabel(f"% within {tab.row_column}")
    ax.legend(title=tab.col_column, fontsize=8)
    ax.spines[["top", "right"]].set_visible(False)
    _save(fig, path)


def render_mask_report(rows: Sequence[MaskReportRow], path: str | Path) -> None:
    """Female vs male probability mass per sentence, one bar pair each."""
    n = len(rows)
    labels = [f"s{i + 1}" for i in range(n)]
    fig, ax = plt.subplots(figsize=(max(4.0, 1.2 * n), 3.2))
    xs = range(n)
    ax.bar([x - 0.18 for x in xs], [r.female_mass for r in rows], width=0.36, label="female", color=_FEMALE_COLOR)
    ax.bar([x + 0.18 for x in xs], [r.male_mass for r in rows], width=0.36, label="male", color=_MALE_COLOR)
    ax.set_xticks(list(xs))
    ax.set_xticklabels(labels, fontsize=8)
    ax.set_ylabel("top-k probability mass")
    ax.legend(fontsize=8)
    ax.spines[["top", "right"]].set_visible(False)
    _save(fig, path)
