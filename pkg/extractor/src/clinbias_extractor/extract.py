"""Turn encoder outputs into the NDJSON interchange records the audit toolkit consumes."""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Sequence

import torch

from .inputs import PLACEHOLDER
from .model import MaskedLanguageEncoder

POOLING_MODES = ("term_tokens_mean", "sentence_mean")

GENDER_CATEGORY = "gender_pairs"
GENDER_TEMPLATE_ID = "gender"
DEFAULT_GENDER_PATTERN = "{W} is a person."
WORD_SLOT = "{W}"


@dataclass(frozen=True)
class TermSentence:
    """A term placed in its template sentence, with the term's character span."""

    term: str
    category: str
    template_id: str
    sentence: str
    span_start: int
    span_end: int

    def __post_init__(self):
        if not (0 <= self.span_start < self.span_end <= len(self.sentence)):
            raise ValueError(
                f"span [{self.span_start}, {self.span_end}) outside sentence of length {len(self.sentence)}"
            )


@dataclass(frozen=True)
class ExtractionJob:
    """Everything one extraction run needs besides the loaded model."""

    model_id: str
    sentences: tuple[TermSentence, ...]
    pooling: str = "term_tokens_mean"
    layer: int = -1
    k: int = 10

    def __post_init__(self):
        if self.pooling not in POOLING_MODES:
            raise ValueError(f"unknown pooling {self.pooling!r}; expected one of {POOLING_MODES}")
        if self.k < 1:
            raise ValueError(f"k must be >= 1, got {self.k}")


def build_term_sentences(
    lexicon_rows: Sequence[tuple[str, str]],
    templates: dict[str, str],
) -> list[TermSentence]:
    """Render every lexicon term into its category template, tracking the term span."""
    missing = sorted({category for _, category in lexicon_rows} - set(templates))
    if missing:
        raise ValueError(f"no template for categories: {', '.join(missing)}")
    out = []
    for term, category in lexicon_rows:
        template = templates[category]
        start = template.index(PLACEHOLDER)
        out.append(
            TermSentence(
                term=term,
                category=category,
                template_id=category,
                sentence=template.replace(PLACEHOLDER, term),
                span_start=start,
                span_end=start + len(term),
            )
        )
    return out


def _pool(encoded, span: tuple[int, int] | None, pooling: str) -> torch.Tensor | None:
    """Mean vector over the span's tokens (term_tokens_mean) or all word tokens."""
    rows = []
    for i, (token_start, token_end) in enumerate(encoded.offsets):
        if encoded.special_mask[i]:
            continue
        if pooling == "term_tokens_mean":
            assert span is not None
            if token_start < span[1] and token_end > span[0]:
                rows.append(encoded.hidden[i])
        else:
            rows.append(encoded.hidden[i])
    if not rows:
        return None
    return torch.stack(rows).mean(dim=0)


def extract_term_vectors(
    encoder: MaskedLanguageEncoder,
    job: ExtractionJob,
) -> tuple[list[dict], list[tuple[str, str]]]:
    """One contextual record per (term, template), in input order.

    Terms whose span aligns to no subword token are skipped and reported
    with a reason instead of silently dropped.
    """
    encoded = encoder.encode([s.sentence for s in job.sentences], layer=job.layer)
    records: list[dict] = []
    skipped: list[tuple[str, str]] = []
    for ts, enc in zip(job.sentences, encoded):
        vector = _pool(enc, (ts.span_start, ts.span_end), job.pooling)
        if vector is None:
            skipped.append((ts.term, "term not alignable to subword tokens"))
            continue
        records.append(
            {
                "term": ts.term,
                "category": ts.category,
                "template_id": ts.template_id,
                "vector": [float(x) for x in vector.tolist()],
                "pooling": job.pooling,
            }
        )
    return records, skipped


def extract_gender_sentence_vectors(
    encoder: MaskedLanguageEncoder,
    pairs: Sequence[tuple[str, str]],
    sentence_patterns: Sequence[str] = (DEFAULT_GENDER_PATTERN,),
    pooling: str = "term_tokens_mean",
    layer: int = -1,
) -> tuple[list[dict], list[tuple[str, str]]]:
    """One record per gendered word (two per pair), averaged across patterns."""
    if pooling not in POOLING_MODES:
        raise ValueError(f"unknown pooling {pooling!r}")
    patterns = list(sentence_patterns) or [DEFAULT_GENDER_PATTERN]
    for pattern in patterns:
        if pattern.count(WORD_SLOT) != 1:
            raise ValueError(f"pattern must contain {WORD_SLOT} exactly once: {pattern!r}")
    words: list[str] = []
    for female, male in pairs:
        words.append(female)
        words.append(male)

    sentences = []
    spans = []
    for word in words:
        for pattern in patterns:
            start = pattern.index(WORD_SLOT)
            sentences.append(pattern.replace(WORD_SLOT, word))
            spans.append((start, start + len(word)))
    encoded = encoder.encode(sentences, layer=layer)

    records: list[dict] = []
    skipped: list[tuple[str, str]] = []
    per_word = len(patterns)
    for w, word in enumerate(words):
        vectors = []
        for p in range(per_word):
            idx = w * per_word + p
            vector = _pool(encoded[idx], spans[idx], pooling)
            if vector is not None:
                vectors.append(vector)
        if not vectors:
            skipped.append((word, "gendered word not alignable to subword tokens"))
            continue
        mean = torch.stack(vectors).mean(dim=0)
        records.append(
            {
                "term": word,
                "category": GENDER_CATEGORY,
                "template_id": GENDER_TEMPLATE_ID,
                "vector": [float(x) for x in mean.tolist()],
                "pooling": pooling,
            }
        )
    return records, skipped


def mask_topk(
    encoder: MaskedLanguageEncoder,
    sentences: Sequence[str],
    k: int = 10,
) -> list[dict]:
    """One mask record per sentence, top-k probabilities descending."""
    records = []
    for sentence in sentences:
        topk = encoder.mask_topk(sentence, k)
        records.append(
            {
                "sentence": sentence,
                "model_id": encoder.model_id,
                "topk": [{"token": token, "prob": prob} for token, prob in topk],
            }
        )
    return records


def write_ndjson(records: Iterable[dict], path: str | Path) -> None:
    path = Path(path)
    with path.open("w", encoding="utf-8", newline="\n") as fout:
        for record in records:
            fout.write(json.dumps(record, ensure_ascii=False))
            fout.write("\n")
