"""Categorized medical term lists and template-sentence rendering."""

from __future__ import annotations

import csv
import re
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, NamedTuple

CATEGORY_MENTAL = "mental_disorders"
CATEGORY_STD = "sexually_transmitted_diseases"
CATEGORY_TRAITS = "personality_traits"

# Subgroup vocabularies for the constrained categories; other categories are free-form.
CONSTRAINED_SUBGROUPS: dict[str, frozenset[str]] = {
    CATEGORY_STD: frozenset({"bacterial", "fungal", "viral", "parasitic"}),
    CATEGORY_TRAITS: frozenset({"positive", "neutral", "negative"}),
}

# Counts reported for the reference lists; deviations warn, they do not fail.
REFERENCE_COUNTS = {
    CATEGORY_MENTAL: 221,
    CATEGORY_STD: 15,
    CATEGORY_TRAITS: 639,
}

PLACEHOLDER = "{X}"

_TOKEN_SPLIT = re.compile(r"[\s/\-]+")


class LexiconError(ValueError):
    """A lexicon or template file violates its contract."""


@dataclass(frozen=True)
class TermEntry:
    term: str
    subgroup: str | None = None


class RenderedSentence(NamedTuple):
    term: str
    category: str
    sentence: str


class TermLexicon:
    """Medical term lists keyed by category, with optional subgroup tags."""

    def __init__(self, categories: dict[str, list[TermEntry]]):
        for category, entries in categories.items():
            if not category:
                raise LexiconError("empty category name")
            seen: set[str] = set()
            allowed = CONSTRAINED_SUBGROUPS.get(category)
            for entry in entries:
                if not entry.term:
                    raise LexiconError(f"empty term in category {category!r}")
                if entry.term in seen:
                    raise LexiconError(f"duplicate term {entry.term!r} in category {category!r}")
                seen.add(entry.term)
                if entry.subgroup and allowed is not None and entry.subgroup not in allowed:
                    raise LexiconError(
                        f"unknown subgroup {entry.subgroup!r} for category {category!r}; "
                        f"expected one of {sorted(allowed)}"
                    )
        self._categories = {c: list(es) for c, es in categories.items()}

    @property
    def categories(self) -> list[str]:
        return list(self._categories)

    def entries(self, category: str) -> list[TermEntry]:
        if category not in self._categories:
            raise KeyError(category)
        return list(self._categories[category])

    def all_entries(self) -> Iterable[tuple[str, TermEntry]]:
        for category, entries in self._categories.items():
            for entry in entries:
                yield category, entry

    def counts(self) -> dict[str, int]:
        return {c: len(es) for c, es in self._categories.items()}

    def subgroup_counts(self, category: str) -> dict[str, int]:
        counts: dict[str, int] = {}
        for entry in self.entries(category):
            key = entry.subgroup or ""
            counts[key] = counts.get(key, 0) + 1
        return counts

    def total_terms(self) -> int:
        return sum(len(es) for es in self._categories.values())

    def gendered_terms(self, gender_words: Iterable[str]) -> dict[str, list[str]]:
        """Terms containing a gendered word as a token; flagged, never rejected."""
        folded = {w.lower() for w in gender_words}
        flagged: dict[str, list[str]] = {}
        for _, entry in self.all_entries():
            hits = [t for t in _TOKEN_SPLIT.split(entry.term) if t.lower() in folded]
            if hits:
                flagged[entry.term] = hits
        return flagged


def load_lexicon(path: str | Path) -> TermLexicon:
    """Read a ``term,category,subgroup`` CSV into a validated TermLexicon."""
    path = Path(path)
    categories: dict[str, list[TermEntry]] = {}
    with path.open("r", encoding="utf-8", newline="") as fin:
        reader = csv.reader(fin)
        try:
            header = next(reader)
        except StopIteration:
            raise LexiconError(f"{path}: empty lexicon file") from None
        if [h.strip().lower() for h in header] != ["term", "category", "subgroup"]:
            raise LexiconError(f"{path}: expected header 'term,category,subgroup', got {','.join(header)!r}")
        for lineno, row in enumerate(reader, start=2):
            if not row or all(cell.strip() == "" for cell in row):
                continue
            if len(row) != 3:
                raise LexiconError(f"{path}:{lineno}: expected 3 columns, got {len(row)}")
            term, category, subgroup = (cell.strip() for cell in row)
            if not term:
                raise LexiconError(f"{path}:{lineno}: empty term")
            if not category:
                raise LexiconError(f"{path}:{lineno}: empty category for term {term!r}")
            entries = categories.setdefault(category, [])
            if any(e.term == term for e in entries):
                raise LexiconError(f"{path}:{lineno}: duplicate term {term!r} in category {category!r}")
            allowed = CONSTRAINED_SUBGROUPS.get(category)
            if subgroup and allowed is not None and subgroup not in allowed:
                raise LexiconError(
                    f"{path}:{lineno}: unknown subgroup {subgroup!r} for category {category!r}; "
                    f"expected one of {sorted(allowed)}"
                )
            entries.append(TermEntry(term=term, subgroup=subgroup or None))
    if not categories:
        raise LexiconError(f"{path}: no terms found")
    return TermLexicon(categories)


def reference_count_warnings(lex: TermLexicon) -> list[str]:
    """Deviations of the loaded lists from the reference category counts."""
    warnings = []
    counts = lex.counts()
    for category, expected in REFERENCE_COUNTS.items():
        actual = counts.get(category)
        if actual is not None and actual != expected:
            warnings.append(
                f"category {category!r} holds {actual} terms; the reference list holds {expected}"
            )
    return warnings


class TemplateSet:
    """Per-category template sentences with exactly one {X} placeholder."""

    def __init__(self, templates: dict[str, str], gender_words: Iterable[str] | None = None):
        folded = {w.lower() for w in gender_words} if gender_words is not None else None
        for category, template in templates.items():
            n = template.count(PLACEHOLDER)
            if n != 1:
                raise LexiconError(
                    f"template for {category!r} must contain {PLACEHOLDER} exactly once, found {n}"
                )
            if folded is not None:
                hits = [t for t in _TOKEN_SPLIT.split(template.replace(PLACEHOLDER, "")) if t.lower() in folded]
                if hits:
                    raise LexiconError(
                        f"template for {category!r} contains gendered word(s) {hits}; templates must be gender-neutral"
                    )
        self._templates = dict(templates)

    @property
    def categories(self) -> list[str]:
        return list(self._templates)

    def template(self, category: str) -> str:
        if category not in self._templates:
            raise KeyError(category)
        return self._templates[category]

    def render(self, category: str, term: str) -> str:
        return self.template(category).replace(PLACEHOLDER, term)


def load_templates(path: str | Path, gender_words: Iterable[str] | None = None) -> TemplateSet:
    """Read ``category = template with {X}`` lines; '#' starts a comment line."""
    path = Path(path)
    templates: dict[str, str] = {}
    with path.open("r", encoding="utf-8") as fin:
        for lineno, raw in enumerate(fin, start=1):
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            if "=" not in line:
                raise LexiconError(f"{path}:{lineno}: expected 'category = template', got {line!r}")
            category, template = line.split("=", 1)
            category = category.strip()
            template = template.strip()
            if not category or not template:
                raise LexiconError(f"{path}:{lineno}: empty category or template")
            if category in templates:
                raise LexiconError(f"{path}:{lineno}: duplicate template for category {category!r}")
            templates[category] = template
    if not templates:
        raise LexiconError(f"{path}: no templates found")
    return TemplateSet(templates, gender_words=gender_words)


def render_templates(lex: TermLexicon, templates: TemplateSet) -> list[RenderedSentence]:
    """One sentence per lexicon term, {X} replaced verbatim by the term."""
    missing = [c for c in lex.categories if c not in templates.categories]
    if missing:
        raise LexiconError(f"no template for categories: {', '.join(sorted(missing))}")
    rendered = []
    for category, entry in lex.all_entries():
        rendered.append(
            RenderedSentence(term=entry.term, category=category, sentence=templates.render(category, entry.term))
        )
    return rendered
