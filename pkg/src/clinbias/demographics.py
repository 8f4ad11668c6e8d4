"""Descriptive statistics over cohort CSV exports: distributions, cross-tabs, ICD-9 chapters."""

from __future__ import annotations

import csv
import re
from dataclasses import dataclass
from datetime import datetime
from decimal import ROUND_HALF_UP, Decimal
from pathlib import Path
from typing import Iterable, Sequence

# Cells treated as missing: excluded from percentage denominators but
# still reported on their own row.
DEFAULT_MISSING_TOKENS = frozenset({"", "not specified", "unknown"})
MISSING_LABEL = "(missing)"

_ICD9_NUMERIC = re.compile(r"\d{3}(?:\d{1,2}|\.\d{1,2})?")
_ICD9_V = re.compile(r"[Vv]\d{2}(?:\d{1,2}|\.\d{1,2})?")
_ICD9_E = re.compile(r"[Ee]\d{3}(?:\d|\.\d)?")

UNMAPPED_LABEL = "unmapped"


class CohortError(ValueError):
    """A cohort table or chapter map violates its contract."""


class CohortTable:
    """Rectangular table of string cells with a declared patient-key column."""

    def __init__(self, columns: Sequence[str], rows: Sequence[Sequence[str]], key_column: str):
        self.columns = list(columns)
        if key_column not in self.columns:
            raise CohortError(f"key column {key_column!r} not among columns {self.columns}")
        self.key_column = key_column
        width = len(self.columns)
        key_idx = self.columns.index(key_column)
        self.rows: list[tuple[str, ...]] = []
        for i, row in enumerate(rows, start=1):
            if len(row) != width:
                raise CohortError(f"row {i} has {len(row)} cells, expected {width}")
            if not str(row[key_idx]).strip():
                raise CohortError(f"row {i} has an empty key ({key_column!r})")
            self.rows.append(tuple(str(c) for c in row))

    def __len__(self) -> int:
        return len(self.rows)

    def column(self, name: str) -> list[str]:
        if name not in self.columns:
            raise CohortError(f"unknown column {name!r}; table has {self.columns}")
        idx = self.columns.index(name)
        return [row[idx] for row in self.rows]


def load_cohort(path: str | Path, key_column: str) -> CohortTable:
    path = Path(path)
    with path.open("r", encoding="utf-8", newline="") as fin:
        reader = csv.reader(fin)
        try:
            header = next(reader)
        except StopIteration:
            raise CohortError(f"{path}: empty cohort file") from None
        rows = list(reader)
    return CohortTable(columns=[h.strip() for h in header], rows=rows, key_column=key_column)


def display_percent(value: float) -> str:
    """Integer percent, rounded half-up, e.g. 43.5 -> '44%'."""
    return f"{int(Decimal(repr(value)).quantize(Decimal('1'), rounding=ROUND_HALF_UP))}%"


@dataclass(frozen=True)
class ValueCount:
    value: str
    count: int
    percentage: float | None  # None for the missing row


def _is_missing(cell: str, missing_tokens: frozenset[str]) -> bool:
    return cell.strip().lower() in missing_tokens


def summarize_categorical(
    table: CohortTable,
    column: str,
    missing_tokens: frozenset[str] = DEFAULT_MISSING_TOKENS,
) -> list[ValueCount]:
    """Value counts with percentages over non-missing rows, descending by count.

    Missing cells are excluded from the denominator and reported as a final
    ``(missing)`` row without a percentage.
    """
    cells = table.column(column)
    counts: dict[str, int] = {}
    n_missing = 0
    for cell in cells:
        if _is_missing(cell, missing_tokens):
            n_missing += 1
        else:
            counts[cell] = counts.get(cell, 0) + 1
    total = sum(counts.values())
    ordered = sorted(counts.items(), key=lambda kv: (-kv[1], kv[0]))
    out = [ValueCount(value=v, count=n, percentage=100.0 * n / total) for v, n in ordered]
    if n_missing:
        out.append(ValueCount(value=MISSING_LABEL, count=n_missing, percentage=None))
    return out


@dataclass(frozen=True)
class Crosstab:
    """Row-normalized percentages of col_values within each row_value group.

    ``totals`` is the appended totals row: the overall distribution of
    col_values across every counted row.
    """

    row_column: str
    col_column: str
    row_values: list[str]
    col_values: list[str]
    counts: list[list[int]]
    percentages: list[list[float]]
    totals: list[float]


def crosstab(
    table: CohortTable,
    row_col: str,
    col_col: str,
    missing_tokens: frozenset[str] = DEFAULT_MISSING_TOKENS,
) -> Crosstab:
    """Cross-tabulate two columns; rows with a missing cell in either are excluded."""
    row_cells = table.column(row_col)
    col_cells = table.column(col_col)
    pairs = [
        (r, c)
        for r, c in zip(row_cells, col_cells)
        if not _is_missing(r, missing_tokens) and not _is_missing(c, missing_tokens)
    ]
    if not pairs:
        raise CohortError(f"no rows with both {row_col!r} and {col_col!r} present")
    row_values = sorted({r for r, _ in pairs})
    col_values = sorted({c for _, c in pairs})
    col_idx = {c: j for j, c in enumerate(col_values)}
    counts = [[0] * len(col_values) for _ in row_values]
    for i, r in enumerate(row_values):
        for pr, pc in pairs:
            if pr == r:
                counts[i][col_idx[pc]] += 1
    percentages = []
    for row_counts in counts:
        row_total = sum(row_counts)
        percentages.append([100.0 * n / row_total for n in row_counts])
    grand = len(pairs)
    col_totals = [100.0 * sum(counts[i][j] for i in range(len(row_values))) / grand for j in range(len(col_values))]
    return Crosstab(
        row_column=row_col,
        col_column=col_col,
        row_values=row_values,
        col_values=col_values,
        counts=counts,
        percentages=percentages,
        totals=col_totals,
    )


@dataclass(frozen=True)
class ChapterRange:
    start: int
    end: int
    label: str


class ChapterMap:
    """Numeric ICD-9 prefix ranges plus single V-code and E-code buckets."""

    def __init__(
        self,
        ranges: Sequence[ChapterRange],
        v_label: str | None = None,
        e_label: str | None = None,
    ):
        ordered = sorted(ranges, key=lambda r: r.start)
        for a, b in zip(ordered, ordered[1:]):
            if b.start <= a.end:
                raise CohortError(
                    f"chapter ranges overlap: {a.start}-{a.end} ({a.label}) and {b.start}-{b.end} ({b.label})"
                )
        self.ranges = list(ordered)
        self.v_label = v_label
        self.e_label = e_label

    @classmethod
    def from_csv(cls, path: str | Path) -> "ChapterMap":
        """Read ``start,end,label`` rows; V.. / E.. bounds define the V and E buckets."""
        path = Path(path)
        ranges: list[ChapterRange] = []
        v_label = e_label = None
        with path.open("r", encoding="utf-8", newline="") as fin:
            reader = csv.reader(fin)
            try:
                header = next(reader)
            except StopIteration:
                raise CohortError(f"{path}: empty chapter map") from None
            if [h.strip().lower() for h in header] != ["start", "end", "label"]:
                raise CohortError(f"{path}: expected header 'start,end,label', got {','.join(header)!r}")
            for lineno, row in enumerate(reader, start=2):
                if not row or all(c.strip() == "" for c in row):
                    continue
                if len(row) != 3:
                    raise CohortError(f"{path}:{lineno}: expected 3 columns, got {len(row)}")
                start, end, label = (c.strip() for c in row)
                if not label:
                    raise CohortError(f"{path}:{lineno}: empty label")
                if start[:1].upper() == "V":
                    v_label = label
                elif start[:1].upper() == "E":
                    e_label = label
                else:
                    try:
                        ranges.append(ChapterRange(start=int(start), end=int(end), label=label))
                    except ValueError:
                        raise CohortError(f"{path}:{lineno}: non-numeric bounds {start!r}-{end!r}") from None
        return cls(ranges, v_label=v_label, e_label=e_label)

    def chapter(self, code: str) -> str:
        """Chapter label for one ICD-9 code; 'unmapped' when outside every range."""
        code = code.strip()
        if _ICD9_V.fullmatch(code):
            return self.v_label or UNMAPPED_LABEL
        if _ICD9_E.fullmatch(code):
            return self.e_label or UNMAPPED_LABEL
        if _ICD9_NUMERIC.fullmatch(code):
            prefix = int(code[:3])
            for r in self.ranges:
                if r.start <= prefix <= r.end:
                    return r.label
            return UNMAPPED_LABEL
        raise CohortError(f"malformed ICD-9 code {code!r}")


def icd9_chapter(code: str, chapter_map: ChapterMap) -> str:
    return chapter_map.chapter(code)


@dataclass(frozen=True)
class ChapterCount:
    label: str
    n_rows: int  # one count per diagnosis row
    n_keys: int  # one count per distinct key (admission / patient)


def chapter_distribution(
    table: CohortTable,
    code_column: str,
    chapter_map: ChapterMap,
) -> list[ChapterCount]:
    """Chapter counts under both countings: per diagnosis row and per distinct key.

    The source data never says whether headline percentages count rows or
    admissions, so both are reported side by side.
    """
    codes = table.column(code_column)
    keys = table.column(table.key_column)
    row_counts: dict[str, int] = {}
    key_sets: dict[str, set[str]] = {}
    for i, (code, key) in enumerate(zip(codes, keys), start=1):
        try:
            label = chapter_map.chapter(code)
        except CohortError as exc:
            raise CohortError(f"row {i}: {exc}") from None
        row_counts[label] = row_counts.get(label, 0) + 1
        key_sets.setdefault(label, set()).add(key)
    ordered = sorted(row_counts.items(), key=lambda kv: (-kv[1], kv[0]))
    return [ChapterCount(label=label, n_rows=n, n_keys=len(key_sets[label])) for label, n in ordered]


@dataclass(frozen=True)
class StaySummary:
    n: int
    min_days: float
    mean_days: float
    max_days: float
    n_negative: int  # discharge before admission: data-quality warning, not a feature


def stay_summary(table: CohortTable, admit_column: str, discharge_column: str) -> StaySummary:
    admits = table.column(admit_column)
    discharges = table.column(discharge_column)
    durations = []
    for i, (a, d) in enumerate(zip(admits, discharges), start=1):
        try:
            t0 = datetime.fromisoformat(a.strip())
            t1 = datetime.fromisoformat(d.strip())
        except ValueError:
            raise CohortError(f"row {i}: unparseable timestamp {a!r} / {d!r}") from None
        durations.append((t1 - t0).total_seconds() / 86400.0)
    if not durations:
        raise CohortError("no stays to summarize")
    return StaySummary(
        n=len(durations),
        min_days=min(durations),
        mean_days=sum(durations) / len(durations),
        max_days=max(durations),
        n_negative=sum(1 for d in durations if d < 0),
    )


def write_summary_csv(rows: Iterable[ValueCount], column: str, path: str | Path) -> None:
    path = Path(path)
    with path.open("w", encoding="utf-8", newline="") as fout:
        writer = csv.writer(fout, lineterminator="\n")
        writer.writerow(["column", "value", "count", "percentage", "display"])
        for r in rows:
            writer.writerow(
                [
                    column,
                    r.value,
                    r.count,
                    "" if r.percentage is None else format(r.percentage, ".12g"),
                    "" if r.percentage is None else display_percent(r.percentage),
                ]
            )


def summary_markdown(rows: Sequence[ValueCount], column: str) -> str:
    lines = [f"| {column} | count | percent |", "| --- | --- | --- |"]
    for r in rows:
        pct = "" if r.percentage is None else display_percent(r.percentage)
        lines.append(f"| {r.value} | {r.count} | {pct} |")
    return "\n".join(lines) + "\n"


def crosstab_markdown(tab: Crosstab) -> str:
    header = f"| {tab.row_column} \\ {tab.col_column} | " + " | ".join(tab.col_values) + " |"
    sep = "| --- |" + " --- |" * len(tab.col_values)
    lines = [header, sep]
    for value, row in zip(tab.row_values, tab.percentages):
        cells = " | ".join(display_percent(p) for p in row)
        lines.append(f"| {value} | {cells} |")
    totals = " | ".join(display_percent(p) for p in tab.totals)
    lines.append(f"| total | {totals} |")
    return "\n".join(lines) + "\n"


def write_crosstab_csv(tab: Crosstab, path: str | Path) -> None:
    path = Path(path)
    with path.open("w", encoding="utf-8", newline="") as fout:
        writer = csv.writer(fout, lineterminator="\n")
        writer.writerow([f"{tab.row_column}\\{tab.col_column}"] + tab.col_values)
        for value, row in zip(tab.row_values, tab.percentages):
            writer.writerow([value] + [format(p, ".12g") for p in row])
        writer.writerow(["total"] + [format(p, ".12g") for p in tab.totals])
