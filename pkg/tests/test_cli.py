"""End-to-end CLI tests over synthetic fixtures."""

import json

import numpy as np
import pytest
from click.testing import CliRunner

from clinbias.cli import main, read_config
from clinbias.vectors import VectorStore, load_word2vec_text, write_word2vec_text


@pytest.fixture
def runner():
    return CliRunner()


def write_small_lexicon(path):
    path.write_text(
        "term,category,subgroup\n"
        "anxiety,mental_disorders,\n"
        "bipolar disorder,mental_disorders,\n"
        "chlamydia,sexually_transmitted_diseases,bacterial\n"
        "honest,personality_traits,positive\n"
        "cruel,personality_traits,negative\n"
    )


def write_pairs(path):
    path.write_text("female,male\nshe,he\n")


def write_store(path, entries, dim):
    write_word2vec_text(VectorStore(entries), path)
    return path


@pytest.fixture
def audit_inputs(tmp_path):
    """Store where g = e2 exactly and every lexicon token is orthogonal to it."""
    rng = np.random.default_rng(7)

    def orth(dim=4):
        v = rng.uniform(0.1, 1.0, size=dim)
        v[1] = 0.0
        return v

    entries = [
        ("she", (0.0, 1.0, 0.0, 0.0)),
        ("he", (0.0, -1.0, 0.0, 0.0)),
        ("anxiety", orth()),
        ("bipolar", orth()),
        ("disorder", orth()),
        ("chlamydia", orth()),
        ("honest", orth()),
        ("cruel", orth()),
    ]
    store = tmp_path / "store.txt"
    write_store(store, entries, 4)
    lexicon = tmp_path / "lexicon.csv"
    write_small_lexicon(lexicon)
    pairs = tmp_path / "pairs.csv"
    write_pairs(pairs)
    return store, lexicon, pairs


def run_audit(runner, audit_inputs, out_dir, extra=()):
    store, lexicon, pairs = audit_inputs
    args = [
        "audit",
        "--store",
        str(store),
        "--lexicon",
        str(lexicon),
        "--pairs",
        str(pairs),
        "--out",
        str(out_dir),
        *extra,
    ]
    return runner.invoke(main, args)


EXPECTED_AUDIT_FILES = [
    "bias_records.csv",
    "category_report.csv",
    "category_report.md",
    "verdicts.csv",
    "run_manifest.txt",
    "category_report.png",
]


class TestAudit:
    def test_writes_all_reports(self, runner, audit_inputs, tmp_path):
        out = tmp_path / "out"
        result = run_audit(runner, audit_inputs, out)
        assert result.exit_code == 0, result.output
        for name in EXPECTED_AUDIT_FILES:
            assert (out / name).is_file(), name

    def test_byte_identical_across_runs(self, runner, audit_inputs, tmp_path):
        out = tmp_path / "out"
        assert run_audit(runner, audit_inputs, out).exit_code == 0
        first = {name: (out / name).read_bytes() for name in EXPECTED_AUDIT_FILES}
        assert run_audit(runner, audit_inputs, out).exit_code == 0
        for name in EXPECTED_AUDIT_FILES:
            assert (out / name).read_bytes() == first[name], f"{name} differs between identical runs"

    def test_zero_bias_fixture(self, runner, audit_inputs, tmp_path):
        out = tmp_path / "out"
        result = run_audit(runner, audit_inputs, out)
        assert result.exit_code == 0
        report = (out / "category_report.csv").read_text().splitlines()
        category_rows = [line for line in report[1:] if line.split(",")[1] == ""]
        assert len(category_rows) == 3
        for line in category_rows:
            assert line.split(",")[4] == "0", line  # direct_bias column exactly zero

    def test_missing_lexicon_exits_2(self, runner, audit_inputs, tmp_path):
        store, _, pairs = audit_inputs
        result = runner.invoke(
            main,
            ["audit", "--store", str(store), "--pairs", str(pairs), "--lexicon", str(tmp_path / "nope.csv")],
        )
        assert result.exit_code == 2
        assert "lexicon not found" in result.stderr

    def test_missing_store_exits_2(self, runner, tmp_path):
        result = runner.invoke(main, ["audit", "--store", str(tmp_path / "nope.txt")])
        assert result.exit_code == 2
        assert "store not found" in result.stderr

    def test_config_file_with_flag_override(self, runner, audit_inputs, tmp_path):
        store, lexicon, pairs = audit_inputs
        config = tmp_path / "audit.conf"
        config.write_text(
            f"store = {store}\n"
            f"lexicon = {lexicon}\n"
            f"pairs = {pairs}\n"
            f"out = {tmp_path / 'from_config'}\n"
            "threshold = 0.2\n"
        )
        out_flag = tmp_path / "from_flag"
        result = runner.invoke(main, ["audit", "--config", str(config), "--out", str(out_flag)])
        assert result.exit_code == 0, result.output
        assert out_flag.is_dir()
        assert not (tmp_path / "from_config").exists()
        manifest = (out_flag / "run_manifest.txt").read_text()
        assert "threshold = 0.2" in manifest  # config value survived where no flag overrode it

    def test_manifest_records_seed_and_diagnostics(self, runner, audit_inputs, tmp_path):
        out = tmp_path / "out"
        result = run_audit(runner, audit_inputs, out, extra=["--seed", "7"])
        assert result.exit_code == 0
        manifest = (out / "run_manifest.txt").read_text()
        assert "seed = 7" in manifest
        assert "store_dimension = 4" in manifest
        assert "pairs_used = 1" in manifest
        assert "eigenvalue_ratio = " in manifest

    def test_no_figures_flag(self, runner, audit_inputs, tmp_path):
        out = tmp_path / "out"
        result = run_audit(runner, audit_inputs, out, extra=["--no-figures"])
        assert result.exit_code == 0
        assert not (out / "category_report.png").exists()


class TestConvert:
    def test_text_binary_text_round_trip(self, runner, tmp_path, rng):
        entries = [(f"tok{i}", rng.uniform(-1, 1, size=6)) for i in range(40)]
        src = write_store(tmp_path / "a.txt", entries, 6)
        as_bin = tmp_path / "a.bin"
        back = tmp_path / "b.txt"
        r1 = runner.invoke(main, ["convert", "--store", str(src), "--to", "w2v-bin", "--out", str(as_bin)])
        assert r1.exit_code == 0, r1.output
        r2 = runner.invoke(
            main,
            ["convert", "--store", str(as_bin), "--store-format", "w2v-bin", "--to", "w2v-text", "--out", str(back)],
        )
        assert r2.exit_code == 0, r2.output
        original = load_word2vec_text(src)
        converted = load_word2vec_text(back)
        assert original.tokens() == converted.tokens()
        for token, vec in original.items():
            np.testing.assert_allclose(converted[token], vec, atol=1e-6)

    def test_ndjson_to_text(self, runner, tmp_path):
        nd = tmp_path / "c.ndjson"
        nd.write_text(
            json.dumps(
                {
                    "term": "anxiety",
                    "category": "mental_disorders",
                    "template_id": "md",
                    "vector": [0.5, 0.25],
                    "pooling": "term_tokens_mean",
                }
            )
            + "\n"
        )
        out = tmp_path / "c.txt"
        result = runner.invoke(
            main, ["convert", "--store", str(nd), "--store-format", "ndjson", "--to", "w2v-text", "--out", str(out)]
        )
        assert result.exit_code == 0, result.output
        assert load_word2vec_text(out)["anxiety"] == pytest.approx([0.5, 0.25])


class TestGenderDirectionCommand:
    def test_prints_norm_and_ratio(self, runner, audit_inputs):
        store, _, pairs = audit_inputs
        result = runner.invoke(main, ["gender-direction", "--store", str(store), "--pairs", str(pairs)])
        assert result.exit_code == 0, result.output
        assert "norm = 1" in result.output
        assert "eigenvalue_ratio = " in result.output
        assert "pairs_used = 1" in result.output

    def test_saves_direction_vector(self, runner, audit_inputs, tmp_path):
        store, _, pairs = audit_inputs
        out = tmp_path / "g.txt"
        result = runner.invoke(
            main, ["gender-direction", "--store", str(store), "--pairs", str(pairs), "--out", str(out)]
        )
        assert result.exit_code == 0
        saved = load_word2vec_text(out)
        assert np.linalg.norm(saved["gender_direction"]) == pytest.approx(1.0, abs=1e-6)


class TestDirectBiasCommand:
    def test_from_store(self, runner, audit_inputs, tmp_path):
        store, lexicon, pairs = audit_inputs
        out = tmp_path / "db.csv"
        result = runner.invoke(
            main,
            [
                "direct-bias",
                "--store",
                str(store),
                "--lexicon",
                str(lexicon),
                "--pairs",
                str(pairs),
                "--out",
                str(out),
            ],
        )
        assert result.exit_code == 0, result.output
        assert out.is_file()
        assert out.with_suffix(".png").is_file()

    def test_from_saved_records(self, runner, audit_inputs, tmp_path):
        out = tmp_path / "audit"
        assert run_audit(runner, audit_inputs, out).exit_code == 0
        _, lexicon, _ = audit_inputs
        result = runner.invoke(
            main,
            ["direct-bias", "--records", str(out / "bias_records.csv"), "--lexicon", str(lexicon)],
        )
        assert result.exit_code == 0, result.output
        assert "mental_disorders" in result.output


class TestMaskReportCommand:
    def test_four_rows(self, runner, tmp_path):
        nd = tmp_path / "mask.ndjson"
        sentences = [
            "32yr old [MASK] pt admitted for tricyclic overdose.",
            "note that stated [MASK] had taken 20 Thorazine",
            "48 y/o [MASK] with a history of alcohol abuse",
            "33yr old [MASK] pt was found highly introverted.",
        ]
        with nd.open("w") as f:
            for s in sentences:
                f.write(
                    json.dumps(
                        {"sentence": s, "model_id": "m", "topk": [{"token": "woman", "prob": 0.2}]}
                    )
                    + "\n"
                )
        out = tmp_path / "mask.csv"
        result = runner.invoke(main, ["mask-report", str(nd), "--out", str(out)])
        assert result.exit_code == 0, result.output
        data_lines = [l for l in out.read_text().splitlines() if l and not l.startswith("#")]
        assert len(data_lines) == 1 + 4  # header + one row per sentence

    def test_custom_token_sets_echoed(self, runner, tmp_path):
        nd = tmp_path / "mask.ndjson"
        nd.write_text(
            json.dumps({"sentence": "a [MASK] b", "model_id": "m", "topk": [{"token": "x", "prob": 0.5}]}) + "\n"
        )
        result = runner.invoke(main, ["mask-report", str(nd), "--female-tokens", "x,y", "--male-tokens", "z"])
        assert result.exit_code == 0
        assert "x,y" in result.output


class TestDemographicsCommand:
    def test_summaries_and_crosstab(self, runner, tmp_path):
        cohort = tmp_path / "cohort.csv"
        cohort.write_text(
            "pid,gender,eth,icd9\n"
            "1,F,White,410\n"
            "2,M,White,V300\n"
            "3,F,Black,29000\n"
            "4,M,Black,41071\n"
        )
        out = tmp_path / "demo"
        result = runner.invoke(
            main,
            [
                "demographics",
                "--cohort",
                str(cohort),
                "--key",
                "pid",
                "--summarize",
                "gender",
                "--crosstab",
                "eth,gender",
                "--code-column",
                "icd9",
                "--out",
                str(out),
            ],
        )
        assert result.exit_code == 0, result.output
        assert (out / "summary_gender.csv").is_file()
        assert (out / "summary_gender.png").is_file()
        assert (out / "crosstab_eth_gender.csv").is_file()
        assert (out / "icd9_chapters.csv").is_file()
        chapters = (out / "icd9_chapters.csv").read_text()
        assert "circulatory system,2,2" in chapters

    def test_unknown_column_exits_1(self, runner, tmp_path):
        cohort = tmp_path / "cohort.csv"
        cohort.write_text("pid,gender\n1,F\n")
        result = runner.invoke(
            main, ["demographics", "--cohort", str(cohort), "--key", "pid", "--summarize", "nope"]
        )
        assert result.exit_code == 1
        assert "unknown column" in result.stderr


class TestConfigParsing:
    def test_read_config(self, tmp_path):
        path = tmp_path / "c.conf"
        path.write_text("# comment\nstore = /tmp/x.txt\nstore-format = w2v-bin\n\nseed = 9\n")
        config = read_config(path)
        assert config == {"store": "/tmp/x.txt", "store_format": "w2v-bin", "seed": "9"}

    def test_bad_line_rejected(self, tmp_path):
        path = tmp_path / "c.conf"
        path.write_text("just some words\n")
        with pytest.raises(ValueError, match="expected 'key = value'"):
            read_config(path)
