"""Command-line entry point: audits, single-step reports, and format conversion."""

from __future__ import annotations

import sys
from pathlib import Path

import click

from . import __version__, figures
from .bias import (
    category_report,
    read_bias_records_csv,
    score_lexicon,
    write_bias_records_csv,
    write_category_reports_csv,
    write_category_reports_md,
    category_reports_markdown,
)
from .conflict import DEFAULT_THRESHOLD, classify, load_prevalence, write_verdicts_csv
from .data import packaged_path
from .demographics import (
    ChapterMap,
    chapter_distribution,
    crosstab,
    crosstab_markdown,
    display_percent,
    load_cohort,
    stay_summary,
    summarize_categorical,
    summary_markdown,
    write_crosstab_csv,
    write_summary_csv,
)
from .gender import gender_direction, load_gender_pairs
from .lexicon import load_lexicon, load_templates, reference_count_warnings
from .maskprob import (
    DEFAULT_FEMALE_TOKENS,
    DEFAULT_MALE_TOKENS,
    load_mask_ndjson,
    mask_report,
    mask_report_markdown,
    write_mask_report_csv,
)
from .vectors import (
    load_contextual_ndjson,
    load_word2vec_binary,
    load_word2vec_text,
    write_word2vec_binary,
    write_word2vec_text,
)

STORE_FORMATS = {
    "w2v-text": load_word2vec_text,
    "w2v-bin": load_word2vec_binary,
    "ndjson": load_contextual_ndjson,
}

EXIT_BAD_INPUT = 2
EXIT_MODULE_ERROR = 1


def _fail(message: str, code: int) -> None:
    click.echo(f"error: {message}", err=True)
    sys.exit(code)


def _require_file(path: str | None, what: str) -> Path:
    if not path:
        _fail(f"{what} required", EXIT_BAD_INPUT)
    p = Path(path)
    if not p.is_file():
        _fail(f"{what} not found ({p})", EXIT_BAD_INPUT)
    return p


def _load_store(path: str, store_format: str):
    loader = STORE_FORMATS.get(store_format)
    if loader is None:
        _fail(f"unknown store format {store_format!r}", EXIT_BAD_INPUT)
    return loader(path)


def read_config(path: str | Path) -> dict[str, str]:
    """Plain ``key = value`` config lines; '#' starts a comment."""
    config: dict[str, str] = {}
    for lineno, raw in enumerate(Path(path).read_text(encoding="utf-8").splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if "=" not in line:
            raise ValueError(f"{path}:{lineno}: expected 'key = value', got {line!r}")
        key, value = line.split("=", 1)
        config[key.strip().replace("-", "_")] = value.strip()
    return config


def _resolve(flag_value, config: dict[str, str], key: str, default=None):
    """Flags win over the config file, which wins over the default."""
    if flag_value is not None:
        return flag_value
    if key in config:
        return config[key]
    return default


@click.group()
@click.version_option(version=__version__, prog_name="clinbias")
def main():
    """Audit gender bias in clinical word embeddings."""


@main.command()
@click.option("--config", "config_path", type=str, default=None, help="key=value config file; flags override it.")
@click.option("--store", type=str, default=None, help="Embedding file to audit.")
@click.option("--store-format", type=click.Choice(sorted(STORE_FORMATS)), default=None)
@click.option("--pairs", type=str, default=None, help="Definitional gender-pair CSV (packaged default).")
@click.option("--lexicon", "lexicon_path", type=str, default=None, help="Term lexicon CSV (packaged default).")
@click.option("--templates", "templates_path", type=str, default=None, help="Template file; validated and echoed.")
@click.option("--prevalence", type=str, default=None, help="Literature prevalence CSV (packaged default).")
@click.option("--threshold", type=float, default=None, help=f"Conflict threshold (default {DEFAULT_THRESHOLD}).")
@click.option("--seed", type=int, default=None, help="Seed for the PCA start vector (default 42).")
@click.option("--out", "--output", "out_dir", type=str, default=None, help="Output directory (default audit_out).")
@click.option("--figures/--no-figures", "render_figures", default=True, help="Render PNG figures beside the CSVs.")
def audit(config_path, store, store_format, pairs, lexicon_path, templates_path, prevalence, threshold, seed, out_dir, render_figures):
    """Run the full bias audit and write every report into one directory."""
    config = {}
    if config_path is not None:
        config_file = _require_file(config_path, "config")
        try:
            config = read_config(config_file)
        except ValueError as exc:
            _fail(str(exc), EXIT_BAD_INPUT)

    store = _resolve(store, config, "store")
    store_format = _resolve(store_format, config, "store_format", "w2v-text")
    pairs = _resolve(pairs, config, "pairs", str(packaged_path("gender_pairs")))
    lexicon_path = _resolve(lexicon_path, config, "lexicon", str(packaged_path("lexicon")))
    templates_path = _resolve(templates_path, config, "templates")
    prevalence = _resolve(prevalence, config, "prevalence", str(packaged_path("prevalence")))
    threshold = float(_resolve(threshold, config, "threshold", DEFAULT_THRESHOLD))
    seed = int(_resolve(seed, config, "seed", 42))
    out_dir = Path(_resolve(out_dir, config, "out", "audit_out"))

    store_file = _require_file(store, "store")
    pairs_file = _require_file(pairs, "pairs")
    lexicon_file = _require_file(lexicon_path, "lexicon")
    prevalence_file = _require_file(prevalence, "prevalence")

    try:
        vec_store = _load_store(str(store_file), store_format)
        gender_pairs = load_gender_pairs(pairs_file)
        lex = load_lexicon(lexicon_file)
        prevalence_table = load_prevalence(prevalence_file)
        gender_words = [w for p in gender_pairs for w in (p.female_word, p.male_word)]
        if templates_path is not None:
            templates_file = _require_file(templates_path, "templates")
            load_templates(templates_file, gender_words=gender_words)

        direction = gender_direction(vec_store, gender_pairs, seed=seed)
        records = score_lexicon(vec_store, lex, direction)
        reports = category_report(vec_store, lex, direction, records=records)
        verdicts = classify(records, prevalence_table, threshold)
    except (ValueError, OSError) as exc:
        _fail(str(exc), EXIT_MODULE_ERROR)

    out_dir.mkdir(parents=True, exist_ok=True)
    write_bias_records_csv(records, out_dir / "bias_records.csv")
    write_category_reports_csv(reports, out_dir / "category_report.csv")
    write_category_reports_md(reports, out_dir / "category_report.md")
    write_verdicts_csv(verdicts, out_dir / "verdicts.csv")
    if render_figures:
        figures.render_category_bias(reports, out_dir / "category_report.png")

    count_warnings = reference_count_warnings(lex)
    flagged = lex.gendered_terms(gender_words)
    manifest_lines = [
        f"tool_version = {__version__}",
        f"store = {store_file}",
        f"store_format = {store_format}",
        f"pairs = {pairs_file}",
        f"lexicon = {lexicon_file}",
        f"templates = {templates_path or ''}",
        f"prevalence = {prevalence_file}",
        f"threshold = {format(threshold, '.12g')}",
        f"seed = {seed}",
        f"out = {out_dir}",
        f"figures = {str(render_figures).lower()}",
        f"store_entries = {len(vec_store)}",
        f"store_dimension = {vec_store.dimension}",
        f"store_source_kind = {vec_store.source_kind}",
        f"pairs_used = {len(direction.pairs_used)}",
        f"pairs_skipped = {';'.join(f'{p.female_word}/{p.male_word}' for p in direction.pairs_skipped)}",
        f"eigenvalue_ratio = {format(direction.eigenvalue_ratio, '.12g')}",
        f"degenerate_direction = {str(direction.degenerate).lower()}",
        f"lexicon_counts = {';'.join(f'{c}={n}' for c, n in sorted(lex.counts().items()))}",
        f"lexicon_count_warnings = {';'.join(count_warnings)}",
        f"gendered_terms_flagged = {';'.join(sorted(flagged))}",
    ]
    (out_dir / "run_manifest.txt").write_text("\n".join(manifest_lines) + "\n", encoding="utf-8")

    for warning in count_warnings:
        click.echo(f"warning: {warning}", err=True)
    if direction.degenerate:
        click.echo("warning: top two eigenvalues nearly tie; the gender direction is ill-defined", err=True)
    for rep in reports:
        bias_text = "n/a" if rep.direct_bias is None else f"{rep.direct_bias:.4f}"
        click.echo(f"{rep.category}: direct_bias={bias_text} scored={rep.n_scored} skipped={rep.n_skipped}")
    click.echo(f"reports written to {out_dir}")


@main.command("gender-direction")
@click.option("--store", required=True, type=str)
@click.option("--store-format", type=click.Choice(sorted(STORE_FORMATS)), default="w2v-text")
@click.option("--pairs", type=str, default=None)
@click.option("--seed", type=int, default=42)
@click.option("--out", "--output", "out_path", type=str, default=None, help="Save g as a one-entry word2vec text file.")
def cmd_gender_direction(store, store_format, pairs, seed, out_path):
    """Derive the gender direction and print its diagnostics."""
    store_file = _require_file(store, "store")
    pairs_file = _require_file(pairs or str(packaged_path("gender_pairs")), "pairs")
    try:
        vec_store = _load_store(str(store_file), store_format)
        gender_pairs = load_gender_pairs(pairs_file)
        direction = gender_direction(vec_store, gender_pairs, seed=seed)
    except (ValueError, OSError) as exc:
        _fail(str(exc), EXIT_MODULE_ERROR)
    import numpy as np

    click.echo(f"dimension = {direction.dimension}")
    click.echo(f"norm = {format(float(np.linalg.norm(direction.g)), '.12g')}")
    click.echo(f"eigenvalue_ratio = {format(direction.eigenvalue_ratio, '.12g')}")
    click.echo(f"degenerate = {str(direction.degenerate).lower()}")
    click.echo(f"pairs_used = {len(direction.pairs_used)}")
    skipped = ";".join(f"{p.female_word}/{p.male_word}" for p in direction.pairs_skipped)
    click.echo(f"pairs_skipped = {skipped}")
    if out_path:
        from .vectors import VectorStore

        write_word2vec_text(
            VectorStore([("gender_direction", direction.g)], metadata={"kind": "gender-direction"}),
            out_path,
        )
        click.echo(f"direction written to {out_path}")


@main.command("direct-bias")
@click.option("--records", "records_path", type=str, default=None, help="Reuse a bias_records.csv instead of scoring.")
@click.option("--store", type=str, default=None)
@click.option("--store-format", type=click.Choice(sorted(STORE_FORMATS)), default="w2v-text")
@click.option("--pairs", type=str, default=None)
@click.option("--lexicon", "lexicon_path", type=str, default=None)
@click.option("--seed", type=int, default=42)
@click.option("--out", "--output", "out_path", type=str, default=None)
@click.option("--format", "out_format", type=click.Choice(["csv", "md"]), default="csv")
@click.option("--figures/--no-figures", "render_figures", default=True)
def cmd_direct_bias(records_path, store, store_format, pairs, lexicon_path, seed, out_path, out_format, render_figures):
    """Per-category direct bias, from a store or from saved bias records."""
    try:
        lex = load_lexicon(_require_file(lexicon_path or str(packaged_path("lexicon")), "lexicon"))
        if records_path is not None:
            records = read_bias_records_csv(_require_file(records_path, "records"))
            reports = category_report(None, lex, None, records=records)
        else:
            store_file = _require_file(store, "store")
            pairs_file = _require_file(pairs or str(packaged_path("gender_pairs")), "pairs")
            vec_store = _load_store(str(store_file), store_format)
            direction = gender_direction(vec_store, load_gender_pairs(pairs_file), seed=seed)
            records = score_lexicon(vec_store, lex, direction)
            reports = category_report(vec_store, lex, direction, records=records)
    except (ValueError, OSError) as exc:
        _fail(str(exc), EXIT_MODULE_ERROR)
    if out_path:
        out_file = Path(out_path)
        if out_format == "md":
            write_category_reports_md(reports, out_file)
        else:
            write_category_reports_csv(reports, out_file)
        if render_figures:
            figures.render_category_bias(reports, out_file.with_suffix(".png"))
        click.echo(f"report written to {out_file}")
    else:
        click.echo(category_reports_markdown(reports), nl=False)


@main.command("mask-report")
@click.argument("mask_file", type=str)
@click.option("--female-tokens", type=str, default=None, help="Comma-separated override of the female token set.")
@click.option("--male-tokens", type=str, default=None, help="Comma-separated override of the male token set.")
@click.option("--out", "--output", "out_path", type=str, default=None)
@click.option("--format", "out_format", type=click.Choice(["csv", "md"]), default="csv")
@click.option("--figures/--no-figures", "render_figures", default=True)
def cmd_mask_report(mask_file, female_tokens, male_tokens, out_path, out_format, render_figures):
    """Aggregate mask-fill NDJSON into gendered probability masses per sentence."""
    mask_path = _require_file(mask_file, "mask file")
    female = set(t.strip() for t in female_tokens.split(",") if t.strip()) if female_tokens else DEFAULT_FEMALE_TOKENS
    male = set(t.strip() for t in male_tokens.split(",") if t.strip()) if male_tokens else DEFAULT_MALE_TOKENS
    try:
        results = load_mask_ndjson(mask_path)
        rows = mask_report(results, female, male)
    except ValueError as exc:
        _fail(str(exc), EXIT_MODULE_ERROR)
    if out_path:
        out_file = Path(out_path)
        if out_format == "md":
            out_file.write_text(mask_report_markdown(rows, female, male), encoding="utf-8")
        else:
            write_mask_report_csv(rows, out_file, female, male)
        if render_figures and rows:
            figures.render_mask_report(rows, out_file.with_suffix(".png"))
        click.echo(f"report written to {out_file}")
    else:
        click.echo(mask_report_markdown(rows, female, male), nl=False)


@main.command()
@click.option("--cohort", required=True, type=str, help="Cohort CSV export.")
@click.option("--key", "key_column", required=True, type=str, help="Patient/admission id column.")
@click.option("--summarize", "summarize_columns", multiple=True, help="Categorical column to summarize (repeatable).")
@click.option("--crosstab", "crosstab_spec", type=str, default=None, help="ROW_COL,COL_COL cross tabulation.")
@click.option("--chapters", "chapters_path", type=str, default=None, help="ICD-9 chapter map CSV (packaged default).")
@click.option("--code-column", type=str, default=None, help="ICD-9 code column for chapter distribution.")
@click.option("--stay", "stay_spec", type=str, default=None, help="ADMIT_COL,DISCHARGE_COL stay summary.")
@click.option("--out", "--output", "out_dir", type=str, default=None)
@click.option("--format", "out_format", type=click.Choice(["csv", "md"]), default="csv")
@click.option("--figures/--no-figures", "render_figures", default=True)
def demographics(cohort, key_column, summarize_columns, crosstab_spec, chapters_path, code_column, stay_spec, out_dir, out_format, render_figures):
    """Descriptive statistics over a cohort CSV."""
    cohort_file = _require_file(cohort, "cohort")
    try:
        table = load_cohort(cohort_file, key_column)
    except ValueError as exc:
        _fail(str(exc), EXIT_MODULE_ERROR)
    out = Path(out_dir) if out_dir else None
    if out:
        out.mkdir(parents=True, exist_ok=True)

    def emit(name: str, csv_writer, md_text: str, figure_renderer=None):
        if out:
            if out_format == "md":
                (out / f"{name}.md").write_text(md_text, encoding="utf-8")
            else:
                csv_writer(out / f"{name}.csv")
            if render_figures and figure_renderer is not None:
                figure_renderer(out / f"{name}.png")
        else:
            click.echo(md_text, nl=False)

    try:
        for column in summarize_columns:
            rows = summarize_categorical(table, column)
            emit(
                f"summary_{column}",
                lambda p, rows=rows, column=column: write_summary_csv(rows, column, p),
                summary_markdown(rows, column),
                lambda p, rows=rows, column=column: figures.render_value_counts(rows, column, p),
            )
        if crosstab_spec:
            parts = [c.strip() for c in crosstab_spec.split(",")]
            if len(parts) != 2:
                _fail(f"--crosstab expects 'row_col,col_col', got {crosstab_spec!r}", EXIT_BAD_INPUT)
            tab = crosstab(table, parts[0], parts[1])
            emit(
                f"crosstab_{parts[0]}_{parts[1]}",
                lambda p, tab=tab: write_crosstab_csv(tab, p),
                crosstab_markdown(tab),
                lambda p, tab=tab: figures.render_crosstab(tab, p),
            )
        if code_column:
            chapter_map = ChapterMap.from_csv(
                _require_file(chapters_path or str(packaged_path("icd9_chapters")), "chapters")
            )
            dist = chapter_distribution(table, code_column, chapter_map)
            lines = ["| chapter | rows | distinct keys |", "| --- | --- | --- |"]
            for c in dist:
                lines.append(f"| {c.label} | {c.n_rows} | {c.n_keys} |")
            md = "\n".join(lines) + "\n"

            def write_chapters_csv(p, dist=dist):
                import csv as _csv

                with Path(p).open("w", encoding="utf-8", newline="") as fout:
                    w = _csv.writer(fout, lineterminator="\n")
                    w.writerow(["chapter", "n_rows", "n_keys"])
                    for c in dist:
                        w.writerow([c.label, c.n_rows, c.n_keys])

            emit("icd9_chapters", write_chapters_csv, md)
        if stay_spec:
            parts = [c.strip() for c in stay_spec.split(",")]
            if len(parts) != 2:
                _fail(f"--stay expects 'admit_col,discharge_col', got {stay_spec!r}", EXIT_BAD_INPUT)
            stays = stay_summary(table, parts[0], parts[1])
            md = (
                f"stays: n={stays.n} min={stays.min_days:.3f}d mean={stays.mean_days:.3f}d "
                f"max={stays.max_days:.3f}d\n"
            )
            if stays.n_negative:
                md += f"warning: {stays.n_negative} stay(s) end before they begin\n"
            if out:
                (out / "stays.txt").write_text(md, encoding="utf-8")
            else:
                click.echo(md, nl=False)
            if stays.n_negative:
                click.echo(f"warning: {stays.n_negative} stay(s) end before they begin", err=True)
    except ValueError as exc:
        _fail(str(exc), EXIT_MODULE_ERROR)
    if out:
        click.echo(f"reports written to {out}")


@main.command()
@click.option("--store", required=True, type=str)
@click.option("--store-format", type=click.Choice(sorted(STORE_FORMATS)), default="w2v-text")
@click.option("--to", "target_format", required=True, type=click.Choice(["w2v-text", "w2v-bin"]))
@click.option("--out", "--output", "out_path", required=True, type=str)
def convert(store, store_format, target_format, out_path):
    """Convert between embedding file formats (contextual NDJSON converts one way, to word2vec)."""
    store_file = _require_file(store, "store")
    try:
        vec_store = _load_store(str(store_file), store_format)
        if target_format == "w2v-text":
            write_word2vec_text(vec_store, out_path)
        else:
            write_word2vec_binary(vec_store, out_path)
    except (ValueError, OSError) as exc:
        _fail(str(exc), EXIT_MODULE_ERROR)
    click.echo(f"{len(vec_store)} vectors (dim {vec_store.dimension}) written to {out_path}")


if __name__ == "__main__":
    main()
