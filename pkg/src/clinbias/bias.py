"""Per-term signed bias scores and per-category direct bias (mean absolute cosine)."""

from __future__ import annotations

import csv
import re
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from .gender import GenderDirection
from .lexicon import TermLexicon
from .linalg import ZeroVectorError, cosine, mean_pool
from .vectors import SOURCE_CONTEXTUAL, VectorStore

# Medical terms split into tokens on whitespace, hyphen and slash ("HIV/AIDS").
_TOKEN_SPLIT = re.compile(r"[\s/\-]+")

SKIP_NO_TOKENS = "no tokens found"
SKIP_NOT_IN_STORE = "term not found in contextual store"
SKIP_ZERO_NORM = "zero-norm pooled vector"


@dataclass(frozen=True)
class BiasRecord:
    """Signed cosine score of one term against the gender direction.

    Positive scores lean female, negative lean male. Skipped records
    carry no score, only the reason they could not be scored.
    """

    term: str
    category: str
    subgroup: str | None = None
    score: float | None = None
    resolved_tokens: tuple[str, ...] = ()
    skipped: bool = False
    reason: str = ""

    def __post_init__(self):
        if self.skipped and self.score is not None:
            raise ValueError("a skipped record cannot carry a score")
        if not self.skipped:
            if self.score is None:
                raise ValueError("a scored record must carry a score")
            if abs(self.score) > 1.0:
                raise ValueError(f"|score| must be <= 1, got {self.score}")


@dataclass(frozen=True)
class CategoryBiasReport:
    """Direct bias of one category: mean absolute score over its scored terms."""

    category: str
    n_scored: int
    n_skipped: int
    direct_bias: float | None
    subgroup_breakdown: dict[str, float]
    max_abs_term: str | None
    min_abs_term: str | None


def split_term(term: str) -> list[str]:
    """Tokens of a (possibly multi-word) term; empty pieces dropped."""
    return [t for t in _TOKEN_SPLIT.split(term) if t]


def term_bias(
    store: VectorStore,
    term: str,
    g: GenderDirection,
    category: str = "",
    subgroup: str | None = None,
) -> BiasRecord:
    """Score one term against the gender direction.

    Contextual stores are keyed by whole terms, so the term is looked up
    directly. Static stores hold single words: the term is split, each
    token resolved with a case-fold fallback, missing tokens dropped, and
    the found vectors mean-pooled before taking the cosine.
    """
    if store.dimension != g.dimension:
        raise ValueError(f"store dimension {store.dimension} != gender direction dimension {g.dimension}")

    def skipped(reason: str) -> BiasRecord:
        return BiasRecord(term=term, category=category, subgroup=subgroup, skipped=True, reason=reason)

    if store.source_kind == SOURCE_CONTEXTUAL:
        vec = store.get(term)
        if vec is None:
            return skipped(SKIP_NOT_IN_STORE)
        resolved = (term,)
    else:
        found: list[np.ndarray] = []
        resolved_tokens: list[str] = []
        for token in split_term(term):
            vec = store.get(token)
            if vec is not None:
                found.append(vec)
                resolved_tokens.append(token)
        if not found:
            return skipped(SKIP_NO_TOKENS)
        vec = mean_pool(found)
        resolved = tuple(resolved_tokens)
    try:
        score = cosine(vec, g.g)
    except ZeroVectorError:
        return skipped(SKIP_ZERO_NORM)
    return BiasRecord(
        term=term,
        category=category,
        subgroup=subgroup,
        score=score,
        resolved_tokens=resolved,
    )


def direct_bias(records: Sequence[BiasRecord]) -> float:
    """Arithmetic mean of |score| over non-skipped records."""
    scores = [abs(r.score) for r in records if not r.skipped]
    if not scores:
        raise ValueError("direct bias undefined: all records skipped")
    return float(sum(scores) / len(scores))


def score_lexicon(store: VectorStore, lex: TermLexicon, g: GenderDirection) -> list[BiasRecord]:
    """One BiasRecord per lexicon term, in lexicon order."""
    if lex.total_terms() == 0:
        raise ValueError("empty lexicon")
    return [
        term_bias(store, entry.term, g, category=category, subgroup=entry.subgroup)
        for category, entry in lex.all_entries()
    ]


def category_report(
    store: VectorStore,
    lex: TermLexicon,
    g: GenderDirection,
    records: Sequence[BiasRecord] | None = None,
) -> list[CategoryBiasReport]:
    """Direct bias per category with subgroup breakdowns and extrema.

    Pass precomputed ``records`` to avoid re-scoring; they must be in
    lexicon order (as produced by score_lexicon).
    """
    if records is None:
        records = score_lexicon(store, lex, g)
    by_category: dict[str, list[BiasRecord]] = {}
    for record in records:
        by_category.setdefault(record.category, []).append(record)
    reports = []
    for category in lex.categories:
        recs = by_category.get(category, [])
        scored = [r for r in recs if not r.skipped]
        n_skipped = len(recs) - len(scored)
        if scored:
            bias = direct_bias(scored)
            max_term = max(scored, key=lambda r: abs(r.score)).term
            min_term = min(scored, key=lambda r: abs(r.score)).term
        else:
            bias, max_term, min_term = None, None, None
        breakdown: dict[str, float] = {}
        subgroups: dict[str, list[BiasRecord]] = {}
        for r in scored:
            if r.subgroup:
                subgroups.setdefault(r.subgroup, []).append(r)
        for subgroup, sub_records in subgroups.items():
            breakdown[subgroup] = direct_bias(sub_records)
        reports.append(
            CategoryBiasReport(
                category=category,
                n_scored=len(scored),
                n_skipped=n_skipped,
                direct_bias=bias,
                subgroup_breakdown=breakdown,
                max_abs_term=max_term,
                min_abs_term=min_term,
            )
        )
    return reports


def _fmt(x: float | None) -> str:
    return "" if x is None else format(x, ".12g")


def write_bias_records_csv(records: Iterable[BiasRecord], path: str | Path) -> None:
    path = Path(path)
    with path.open("w", encoding="utf-8", newline="") as fout:
        writer = csv.writer(fout, lineterminator="\n")
        writer.writerow(["term", "category", "subgroup", "score", "skipped", "reason"])
        for r in records:
            writer.writerow(
                [r.term, r.category, r.subgroup or "", _fmt(r.score), str(r.skipped).lower(), r.reason]
            )


def write_category_reports_csv(reports: Iterable[CategoryBiasReport], path: str | Path) -> None:
    """Category rows carry an empty subgroup cell; breakdown rows follow their category."""
    path = Path(path)
    with path.open("w", encoding="utf-8", newline="") as fout:
        writer = csv.writer(fout, lineterminator="\n")
        writer.writerow(
            ["category", "subgroup", "n_scored", "n_skipped", "direct_bias", "max_abs_term", "min_abs_term"]
        )
        for rep in reports:
            writer.writerow(
                [
                    rep.category,
                    "",
                    rep.n_scored,
                    rep.n_skipped,
                    _fmt(rep.direct_bias),
                    rep.max_abs_term or "",
                    rep.min_abs_term or "",
                ]
            )
            for subgroup in sorted(rep.subgroup_breakdown):
                writer.writerow([rep.category, subgroup, "", "", _fmt(rep.subgroup_breakdown[subgroup]), "", ""])


def category_reports_markdown(reports: Iterable[CategoryBiasReport]) -> str:
    lines = [
        "| category | subgroup | n scored | n skipped | direct bias | max \\|score\\| term | min \\|score\\| term |",
        "| --- | --- | --- | --- | --- | --- | --- |",
    ]
    for rep in reports:
        lines.append(
            f"| {rep.category} | | {rep.n_scored} | {rep.n_skipped} | {_fmt(rep.direct_bias)} "
            f"| {rep.max_abs_term or ''} | {rep.min_abs_term or ''} |"
        )
        for subgroup in sorted(rep.subgroup_breakdown):
            lines.append(f"| {rep.category} | {subgroup} | | | {_fmt(rep.subgroup_breakdown[subgroup])} | | |")
    return "\n".join(lines) + "\n"


def write_category_reports_md(reports: Iterable[CategoryBiasReport], path: str | Path) -> None:
    Path(path).write_text(category_reports_markdown(reports), encoding="utf-8")


def read_bias_records_csv(path: str | Path) -> list[BiasRecord]:
    """Read records written by write_bias_records_csv."""
    path = Path(path)
    records: list[BiasRecord] = []
    with path.open("r", encoding="utf-8", newline="") as fin:
        reader = csv.DictReader(fin)
        expected = {"term", "category", "subgroup", "score", "skipped", "reason"}
        if reader.fieldnames is None or set(reader.fieldnames) != expected:
            raise ValueError(f"{path}: expected columns {sorted(expected)}, got {reader.fieldnames}")
        for lineno, row in enumerate(reader, start=2):
            skipped = row["skipped"].strip().lower() == "true"
            score = None if skipped or row["score"] == "" else float(row["score"])
            try:
                records.append(
                    BiasRecord(
                        term=row["term"],
                        category=row["category"],
                        subgroup=row["subgroup"] or None,
                        score=score,
                        skipped=skipped,
                        reason=row["reason"],
                    )
                )
            except ValueError as exc:
                raise ValueError(f"{path}:{lineno}: {exc}") from None
    if not records:
        raise ValueError(f"{path}: no bias records")
    return records
