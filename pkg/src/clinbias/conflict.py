"""Classify per-term biases as accurate or conflicting against literature prevalence."""

from __future__ import annotations

import csv
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Sequence

from .bias import BiasRecord

FEMALE_HIGHER = "female_higher"
MALE_HIGHER = "male_higher"
EQUAL = "equal"
UNKNOWN = "unknown"
DIRECTIONS = (FEMALE_HIGHER, MALE_HIGHER, EQUAL, UNKNOWN)

ACCURATE = "accurate"
CONFLICTING = "conflicting"
UNASSESSED = "unassessed"
BELOW_THRESHOLD = "below_threshold"

# |0.04 - 0.06| reads as "slightly biased" in the literature comparison, so
# the default cut sits at the bottom of that band.
DEFAULT_THRESHOLD = 0.05


@dataclass(frozen=True)
class PrevalenceRow:
    term: str
    expected_direction: str
    source: str

    def __post_init__(self):
        if self.expected_direction not in DIRECTIONS:
            raise ValueError(
                f"unknown expected_direction {self.expected_direction!r}; expected one of {DIRECTIONS}"
            )


class PrevalenceTable:
    """term -> literature-expected gender direction, with citations."""

    def __init__(self, rows: Iterable[PrevalenceRow]):
        self._rows: dict[str, PrevalenceRow] = {}
        for row in rows:
            if row.term in self._rows:
                raise ValueError(f"duplicate prevalence term {row.term!r}")
            self._rows[row.term] = row

    def __len__(self) -> int:
        return len(self._rows)

    def __contains__(self, term: str) -> bool:
        return term in self._rows

    def get(self, term: str) -> PrevalenceRow | None:
        return self._rows.get(term)

    def rows(self) -> list[PrevalenceRow]:
        return list(self._rows.values())


@dataclass(frozen=True)
class ConflictVerdict:
    term: str
    score: float
    expected_direction: str | None
    verdict: str


def load_prevalence(path: str | Path) -> PrevalenceTable:
    """Read a ``term,expected_direction,source`` CSV."""
    path = Path(path)
    rows: list[PrevalenceRow] = []
    with path.open("r", encoding="utf-8", newline="") as fin:
        reader = csv.reader(fin)
        try:
            header = next(reader)
        except StopIteration:
            raise ValueError(f"{path}: empty prevalence file") from None
        if [h.strip().lower() for h in header] != ["term", "expected_direction", "source"]:
            raise ValueError(
                f"{path}: expected header 'term,expected_direction,source', got {','.join(header)!r}"
            )
        for lineno, row in enumerate(reader, start=2):
            if not row or all(cell.strip() == "" for cell in row):
                continue
            if len(row) != 3:
                raise ValueError(f"{path}:{lineno}: expected 3 columns, got {len(row)}")
            term, direction, source = (cell.strip() for cell in row)
            if not term:
                raise ValueError(f"{path}:{lineno}: empty term")
            if direction not in DIRECTIONS:
                raise ValueError(
                    f"{path}:{lineno}: unknown expected_direction {direction!r}; "
                    f"expected one of {DIRECTIONS}"
                )
            rows.append(PrevalenceRow(term=term, expected_direction=direction, source=source))
    if not rows:
        raise ValueError(f"{path}: no prevalence rows found")
    return PrevalenceTable(rows)


def classify_score(term: str, score: float, table: PrevalenceTable, threshold: float) -> ConflictVerdict:
    """Verdict for a single signed score (positive = female-leaning)."""
    if not 0.0 <= threshold <= 1.0:
        raise ValueError(f"threshold must lie in [0, 1], got {threshold}")
    row = table.get(term)
    if row is None or row.expected_direction == UNKNOWN:
        return ConflictVerdict(
            term=term,
            score=score,
            expected_direction=row.expected_direction if row else None,
            verdict=UNASSESSED,
        )
    # A zero score carries no direction, so it can never match or contradict one.
    if abs(score) < threshold or score == 0.0:
        return ConflictVerdict(term=term, score=score, expected_direction=row.expected_direction, verdict=BELOW_THRESHOLD)
    if row.expected_direction == EQUAL:
        verdict = CONFLICTING
    else:
        observed = FEMALE_HIGHER if score > 0 else MALE_HIGHER
        verdict = ACCURATE if observed == row.expected_direction else CONFLICTING
    return ConflictVerdict(term=term, score=score, expected_direction=row.expected_direction, verdict=verdict)


def classify(
    records: Sequence[BiasRecord],
    table: PrevalenceTable,
    threshold: float = DEFAULT_THRESHOLD,
) -> list[ConflictVerdict]:
    """One verdict per scored record, in input order; skipped records have no score to judge."""
    return [
        classify_score(r.term, r.score, table, threshold)
        for r in records
        if not r.skipped
    ]


def write_verdicts_csv(verdicts: Iterable[ConflictVerdict], path: str | Path) -> None:
    path = Path(path)
    with path.open("w", encoding="utf-8", newline="") as fout:
        writer = csv.writer(fout, lineterminator="\n")
        writer.writerow(["term", "score", "expected", "verdict"])
        for v in verdicts:
            writer.writerow([v.term, format(v.score, ".12g"), v.expected_direction or "", v.verdict])
