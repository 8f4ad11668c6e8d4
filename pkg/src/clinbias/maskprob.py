"""Aggregate mask-fill top-k outputs into gendered probability masses."""

from __future__ import annotations

import csv
import json
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Sequence

MASK_MARKER = "[MASK]"
PROB_SUM_SLACK = 1e-6

# The default gendered token sets; always echoed into report headers so a
# reader can audit what counted as female/male mass.
DEFAULT_FEMALE_TOKENS = frozenset({"woman", "female", "f", "she", "girl", "lady", "mother"})
DEFAULT_MALE_TOKENS = frozenset({"man", "male", "m", "he", "gentleman", "father"})

DEFAULT_TOP_K = 10


class MaskResultError(ValueError):
    """A mask-fill record violates its schema."""


@dataclass(frozen=True)
class MaskResult:
    """Top-k token distribution predicted for the single [MASK] slot of a sentence."""

    sentence: str
    topk: tuple[tuple[str, float], ...]
    model_id: str = ""

    def __post_init__(self):
        n_masks = self.sentence.count(MASK_MARKER)
        if n_masks != 1:
            raise MaskResultError(
                f"sentence must contain exactly one {MASK_MARKER}, found {n_masks}: {self.sentence!r}"
            )
        total = 0.0
        for token, prob in self.topk:
            if not 0.0 <= prob <= 1.0:
                raise MaskResultError(f"probability for token {token!r} outside [0, 1]: {prob}")
            total += prob
        if total > 1.0 + PROB_SUM_SLACK:
            raise MaskResultError(f"top-k probabilities sum to {total}, exceeding 1")

    @property
    def total_mass(self) -> float:
        return float(sum(p for _, p in self.topk))


@dataclass(frozen=True)
class GenderMass:
    """Split of a top-k distribution's mass into female / male / other tokens."""

    female_mass: float
    male_mass: float
    other_mass: float

    @property
    def total(self) -> float:
        return self.female_mass + self.male_mass + self.other_mass


def gender_mass(
    result: MaskResult,
    female_tokens: Iterable[str] = DEFAULT_FEMALE_TOKENS,
    male_tokens: Iterable[str] = DEFAULT_MALE_TOKENS,
) -> GenderMass:
    """Sum top-k probability over each gendered token set (case-folded)."""
    female = {t.casefold() for t in female_tokens}
    male = {t.casefold() for t in male_tokens}
    overlap = female & male
    if overlap:
        raise ValueError(f"gendered token sets overlap: {sorted(overlap)}")
    f_mass = m_mass = o_mass = 0.0
    for token, prob in result.topk:
        folded = token.casefold()
        if folded in female:
            f_mass += prob
        elif folded in male:
            m_mass += prob
        else:
            o_mass += prob
    return GenderMass(female_mass=f_mass, male_mass=m_mass, other_mass=o_mass)


@dataclass(frozen=True)
class MaskReportRow:
    sentence: str
    model_id: str
    female_mass: float
    male_mass: float
    other_mass: float
    total_mass: float


def mask_report(
    results: Sequence[MaskResult],
    female_tokens: Iterable[str] = DEFAULT_FEMALE_TOKENS,
    male_tokens: Iterable[str] = DEFAULT_MALE_TOKENS,
) -> list[MaskReportRow]:
    """One row per sentence, in input order; empty input gives an empty table."""
    rows = []
    for result in results:
        mass = gender_mass(result, female_tokens, male_tokens)
        rows.append(
            MaskReportRow(
                sentence=result.sentence,
                model_id=result.model_id,
                female_mass=mass.female_mass,
                male_mass=mass.male_mass,
                other_mass=mass.other_mass,
                total_mass=result.total_mass,
            )
        )
    return rows


def load_mask_ndjson(path: str | Path) -> list[MaskResult]:
    """Read extractor mask output: one {sentence, model_id, topk} object per line."""
    path = Path(path)
    results: list[MaskResult] = []
    with path.open("r", encoding="utf-8") as fin:
        for lineno, line in enumerate(fin, start=1):
            if line.strip() == "":
                continue
            where = f"{path}:{lineno}"
            try:
                obj = json.loads(line)
            except json.JSONDecodeError as exc:
                raise MaskResultError(f"{where}: invalid JSON ({exc.msg})") from None
            if not isinstance(obj, dict):
                raise MaskResultError(f"{where}: record is not a JSON object")
            sentence = obj.get("sentence")
            model_id = obj.get("model_id", "")
            topk = obj.get("topk")
            if not isinstance(sentence, str):
                raise MaskResultError(f"{where}: missing or non-string 'sentence'")
            if not isinstance(model_id, str):
                raise MaskResultError(f"{where}: 'model_id' must be a string")
            if not isinstance(topk, list):
                raise MaskResultError(f"{where}: missing or non-array 'topk'")
            pairs = []
            for item in topk:
                if (
                    not isinstance(item, dict)
                    or not isinstance(item.get("token"), str)
                    or isinstance(item.get("prob"), bool)
                    or not isinstance(item.get("prob"), (int, float))
                ):
                    raise MaskResultError(f"{where}: topk entries must be {{'token': str, 'prob': number}}")
                pairs.append((item["token"], float(item["prob"])))
            try:
                results.append(MaskResult(sentence=sentence, topk=tuple(pairs), model_id=model_id))
            except MaskResultError as exc:
                raise MaskResultError(f"{where}: {exc}") from None
    return results


def _echo_sets(female_tokens: Iterable[str], male_tokens: Iterable[str]) -> tuple[str, str]:
    return ",".join(sorted(female_tokens)), ",".join(sorted(male_tokens))


def write_mask_report_csv(
    rows: Sequence[MaskReportRow],
    path: str | Path,
    female_tokens: Iterable[str] = DEFAULT_FEMALE_TOKENS,
    male_tokens: Iterable[str] = DEFAULT_MALE_TOKENS,
) -> None:
    f_echo, m_echo = _echo_sets(female_tokens, male_tokens)
    path = Path(path)
    with path.open("w", encoding="utf-8", newline="") as fout:
        fout.write(f"# female_tokens: {f_echo}\n")
        fout.write(f"# male_tokens: {m_echo}\n")
        writer = csv.writer(fout, lineterminator="\n")
        writer.writerow(["sentence", "model_id", "female_mass", "male_mass", "other_mass", "total_mass"])
        for row in rows:
            writer.writerow(
                [
                    row.sentence,
                    row.model_id,
                    format(row.female_mass, ".12g"),
                    format(row.male_mass, ".12g"),
                    format(row.other_mass, ".12g"),
                    format(row.total_mass, ".12g"),
                ]
            )


def mask_report_markdown(
    rows: Sequence[MaskReportRow],
    female_tokens: Iterable[str] = DEFAULT_FEMALE_TOKENS,
    male_tokens: Iterable[str] = DEFAULT_MALE_TOKENS,
) -> str:
    f_echo, m_echo = _echo_sets(female_tokens, male_tokens)
    lines = [
        f"female tokens: `{f_echo}`  ",
        f"male tokens: `{m_echo}`",
        "",
        "| sentence | female | male | other | total top-k mass |",
        "| --- | --- | --- | --- | --- |",
    ]
    for row in rows:
        sentence = row.sentence.replace("|", "\\|")
        lines.append(
            f"| {sentence} | {row.female_mass:.4f} | {row.male_mass:.4f} "
            f"| {row.other_mass:.4f} | {row.total_mass:.4f} |"
        )
    return "\n".join(lines) + "\n"
