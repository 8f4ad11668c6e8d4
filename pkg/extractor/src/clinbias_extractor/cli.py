"""CLI: extract contextual vectors and mask-fill distributions to NDJSON files."""

from __future__ import annotations

import sys
from pathlib import Path

import click

from . import __version__
from .extract import (
    DEFAULT_GENDER_PATTERN,
    ExtractionJob,
    build_term_sentences,
    extract_gender_sentence_vectors,
    extract_term_vectors,
    mask_topk,
    write_ndjson,
)
from .inputs import read_gender_pairs, read_lexicon, read_templates
from .model import MaskedLanguageEncoder


def _fail(message: str, code: int = 1) -> None:
    click.echo(f"error: {message}", err=True)
    sys.exit(code)


def _require_file(path: str, what: str) -> Path:
    p = Path(path)
    if not p.is_file():
        _fail(f"{what} not found ({p})", 2)
    return p


def _load_encoder(model: str, batch_size: int) -> MaskedLanguageEncoder:
    try:
        return MaskedLanguageEncoder(model, batch_size=batch_size)
    except Exception as exc:  # transformers raises a zoo of types here
        _fail(f"cannot load model {model!r}: {exc}")


@click.group()
@click.version_option(version=__version__, prog_name="clinbias-extract")
def main():
    """Run a masked LM over template sentences and emit NDJSON interchange files."""


@main.command("extract-terms")
@click.option("--model", required=True, help="Model identifier or local path.")
@click.option("--lexicon", required=True, type=str, help="term,category,subgroup CSV.")
@click.option("--templates", required=True, type=str, help="category = template file.")
@click.option("--pooling", type=click.Choice(["term_tokens_mean", "sentence_mean"]), default="term_tokens_mean")
@click.option("--layer", type=int, default=-1, help="Hidden-state index; -1 is the final layer.")
@click.option("--batch-size", type=int, default=32)
@click.option("--out", required=True, type=str)
def cmd_extract_terms(model, lexicon, templates, pooling, layer, batch_size, out):
    """One contextual vector per lexicon term, rendered through its category template."""
    lexicon_rows = read_lexicon(_require_file(lexicon, "lexicon"))
    template_map = read_templates(_require_file(templates, "templates"))
    encoder = _load_encoder(model, batch_size)
    try:
        sentences = build_term_sentences(lexicon_rows, template_map)
        job = ExtractionJob(model_id=model, sentences=tuple(sentences), pooling=pooling, layer=layer)
        records, skipped = extract_term_vectors(encoder, job)
    except ValueError as exc:
        _fail(str(exc))
    write_ndjson(records, out)
    for term, reason in skipped:
        click.echo(f"warning: skipped {term!r}: {reason}", err=True)
    click.echo(f"{len(records)} records written to {out} ({len(skipped)} skipped)")


@main.command("extract-gender")
@click.option("--model", required=True)
@click.option("--pairs", required=True, type=str, help="female,male CSV.")
@click.option("--pattern", "patterns", multiple=True, help=f"Sentence pattern with {{W}} (default {DEFAULT_GENDER_PATTERN!r}).")
@click.option("--pooling", type=click.Choice(["term_tokens_mean", "sentence_mean"]), default="term_tokens_mean")
@click.option("--layer", type=int, default=-1)
@click.option("--batch-size", type=int, default=32)
@click.option("--out", required=True, type=str)
def cmd_extract_gender(model, pairs, patterns, pooling, layer, batch_size, out):
    """One contextual vector per gendered word, from simple swapped sentences."""
    pair_rows = read_gender_pairs(_require_file(pairs, "pairs"))
    encoder = _load_encoder(model, batch_size)
    try:
        records, skipped = extract_gender_sentence_vectors(
            encoder,
            pair_rows,
            sentence_patterns=patterns or (DEFAULT_GENDER_PATTERN,),
            pooling=pooling,
            layer=layer,
        )
    except ValueError as exc:
        _fail(str(exc))
    write_ndjson(records, out)
    for word, reason in skipped:
        click.echo(f"warning: skipped {word!r}: {reason}", err=True)
    click.echo(f"{len(records)} records written to {out} ({len(skipped)} skipped)")


@main.command("mask-topk")
@click.option("--model", required=True)
@click.option("--sentences", "sentences_path", required=True, type=str, help="One [MASK] sentence per line.")
@click.option("--k", type=int, default=10)
@click.option("--batch-size", type=int, default=32)
@click.option("--out", required=True, type=str)
def cmd_mask_topk(model, sentences_path, k, batch_size, out):
    """Top-k mask-fill distribution per sentence."""
    path = _require_file(sentences_path, "sentences file")
    sentences = [line for line in path.read_text(encoding="utf-8").splitlines() if line.strip()]
    if not sentences:
        _fail(f"no sentences in {path}")
    encoder = _load_encoder(model, batch_size)
    try:
        records = mask_topk(encoder, sentences, k=k)
    except ValueError as exc:
        _fail(str(exc))
    write_ndjson(records, out)
    click.echo(f"{len(records)} records written to {out}")


if __name__ == "__main__":
    main()
