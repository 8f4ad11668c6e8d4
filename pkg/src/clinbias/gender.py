"""Oriented gender direction from definitional word pairs and a vector store."""

from __future__ import annotations

import csv
from dataclasses import dataclass, field
from pathlib import Path
from typing import Sequence

import numpy as np

from .linalg import DEFAULT_SEED, pair_center, top_component
from .vectors import VectorStore


@dataclass(frozen=True)
class GenderPair:
    """A definitional pair differing only by gender, e.g. (she, he)."""

    female_word: str
    male_word: str

    def __post_init__(self):
        if not self.female_word or not self.male_word:
            raise ValueError("gender pair words must be non-empty")
        if self.female_word == self.male_word:
            raise ValueError(f"gender pair words must differ, got {self.female_word!r} twice")

    def swapped(self) -> "GenderPair":
        return GenderPair(female_word=self.male_word, male_word=self.female_word)


@dataclass(frozen=True)
class GenderDirection:
    """Unit vector whose positive cosine means female-leaning.

    Diagnostics record which pairs contributed, which were skipped for
    missing vocabulary, and how well-separated the top eigenvalue was.
    """

    g: np.ndarray
    pairs_used: tuple[GenderPair, ...]
    pairs_skipped: tuple[GenderPair, ...]
    eigenvalue_ratio: float
    degenerate: bool
    source_kind: str
    poolings: str = ""

    def __post_init__(self):
        norm = float(np.linalg.norm(self.g))
        if abs(norm - 1.0) > 1e-9:
            raise ValueError(f"gender direction must be unit norm, got {norm}")
        self.g.flags.writeable = False

    @property
    def dimension(self) -> int:
        return int(self.g.shape[0])

    def flipped(self) -> "GenderDirection":
        """Same axis with reversed orientation (test helper)."""
        return GenderDirection(
            g=-self.g.copy(),
            pairs_used=self.pairs_used,
            pairs_skipped=self.pairs_skipped,
            eigenvalue_ratio=self.eigenvalue_ratio,
            degenerate=self.degenerate,
            source_kind=self.source_kind,
            poolings=self.poolings,
        )


def load_gender_pairs(path: str | Path) -> list[GenderPair]:
    """Read a definitional-pairs CSV with header ``female,male``."""
    path = Path(path)
    pairs: list[GenderPair] = []
    with path.open("r", encoding="utf-8", newline="") as fin:
        reader = csv.reader(fin)
        try:
            header = next(reader)
        except StopIteration:
            raise ValueError(f"{path}: empty gender-pair file") from None
        if [h.strip().lower() for h in header] != ["female", "male"]:
            raise ValueError(f"{path}: expected header 'female,male', got {','.join(header)!r}")
        for lineno, row in enumerate(reader, start=2):
            if not row or all(cell.strip() == "" for cell in row):
                continue
            if len(row) != 2 or not row[0].strip() or not row[1].strip():
                raise ValueError(f"{path}:{lineno}: malformed row {row!r}, expected 'female,male'")
            pairs.append(GenderPair(female_word=row[0].strip(), male_word=row[1].strip()))
    if not pairs:
        raise ValueError(f"{path}: no gender pairs found")
    return pairs


def gender_direction(
    store: VectorStore,
    pairs: Sequence[GenderPair],
    seed: int = DEFAULT_SEED,
) -> GenderDirection:
    """Derive the oriented gender direction from definitional pairs.

    Resolvable pairs are midpoint-centered and fed to the top principal
    component; the sign is then fixed so the mean cosine against the
    centered female-word rows is positive (positive score = female-leaning).
    Pairs with either word missing from the store are skipped and recorded.
    """
    if not pairs:
        raise ValueError("no gender pairs supplied")
    used: list[GenderPair] = []
    skipped: list[GenderPair] = []
    centered_pairs = []
    female_rows = []
    for pair in pairs:
        f_vec = store.get(pair.female_word)
        m_vec = store.get(pair.male_word)
        if f_vec is None or m_vec is None:
            skipped.append(pair)
            continue
        used.append(pair)
        centered_pairs.append((f_vec, m_vec))
        female_rows.append(f_vec - (f_vec + m_vec) / 2.0)
    if not used:
        raise ValueError(
            f"none of the {len(pairs)} gender pairs resolve in the store "
            f"(first miss: {pairs[0].female_word!r}/{pairs[0].male_word!r})"
        )
    matrix = pair_center(centered_pairs)
    comp = top_component(matrix, seed=seed)
    g = comp.vector
    cosines = []
    for row in female_rows:
        norm = float(np.linalg.norm(row))
        if norm > 0.0:
            cosines.append(float(np.dot(row, g)) / norm)
    lean = float(np.mean(cosines)) if cosines else 0.0
    if lean < 0.0:
        g = -g
    return GenderDirection(
        g=g,
        pairs_used=tuple(used),
        pairs_skipped=tuple(skipped),
        eigenvalue_ratio=comp.eigenvalue_ratio,
        degenerate=comp.degenerate,
        source_kind=store.source_kind,
        poolings=store.metadata.get("poolings", ""),
    )
