"""Readers for the audit toolkit's interchange files (lexicon CSV, templates, gender pairs).

These parse the same on-disk formats the audit toolkit defines; the two
packages share files, not code.
"""

from __future__ import annotations

import csv
from pathlib import Path

PLACEHOLDER = "{X}"


def read_lexicon(path: str | Path) -> list[tuple[str, str]]:
    """(term, category) rows of a ``term,category,subgroup`` CSV, in file order."""
    path = Path(path)
    out: list[tuple[str, str]] = []
    with path.open("r", encoding="utf-8", newline="") as fin:
        reader = csv.reader(fin)
        header = next(reader, None)
        if header is None or [h.strip().lower() for h in header][:2] != ["term", "category"]:
            raise ValueError(f"{path}: expected a 'term,category,subgroup' CSV")
        for lineno, row in enumerate(reader, start=2):
            if not row or all(c.strip() == "" for c in row):
                continue
            if len(row) < 2 or not row[0].strip() or not row[1].strip():
                raise ValueError(f"{path}:{lineno}: malformed lexicon row {row!r}")
            out.append((row[0].strip(), row[1].strip()))
    if not out:
        raise ValueError(f"{path}: no lexicon terms")
    return out


def read_templates(path: str | Path) -> dict[str, str]:
    """``category = template with {X}`` lines; '#' starts a comment."""
    path = Path(path)
    templates: dict[str, str] = {}
    for lineno, raw in enumerate(path.read_text(encoding="utf-8").splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if "=" not in line:
            raise ValueError(f"{path}:{lineno}: expected 'category = template'")
        category, template = (part.strip() for part in line.split("=", 1))
        if template.count(PLACEHOLDER) != 1:
            raise ValueError(f"{path}:{lineno}: template must contain {PLACEHOLDER} exactly once")
        templates[category] = template
    if not templates:
        raise ValueError(f"{path}: no templates")
    return templates


def read_gender_pairs(path: str | Path) -> list[tuple[str, str]]:
    """(female, male) rows of a ``female,male`` CSV."""
    path = Path(path)
    pairs: list[tuple[str, str]] = []
    with path.open("r", encoding="utf-8", newline="") as fin:
        reader = csv.reader(fin)
        header = next(reader, None)
        if header is None or [h.strip().lower() for h in header] != ["female", "male"]:
            raise ValueError(f"{path}: expected a 'female,male' CSV")
        for lineno, row in enumerate(reader, start=2):
            if not row or all(c.strip() == "" for c in row):
                continue
            if len(row) != 2 or not row[0].strip() or not row[1].strip():
                raise ValueError(f"{path}:{lineno}: malformed pair row {row!r}")
            pairs.append((row[0].strip(), row[1].strip()))
    if not pairs:
        raise ValueError(f"{path}: no gender pairs")
    return pairs
