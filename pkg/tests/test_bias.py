"""Per-term scoring and direct-bias aggregation against brute-force oracles."""

import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from clinbias.bias import (
    BiasRecord,
    category_report,
    direct_bias,
    read_bias_records_csv,
    score_lexicon,
    split_term,
    term_bias,
    write_bias_records_csv,
)
from clinbias.lexicon import TermEntry, TermLexicon
from clinbias.vectors import VectorStore

from conftest import make_direction


def brute_force_term_score(vectors: dict, term: str, g) -> float | None:
    """Independent reimplementation: plain dict/math, no shared code paths."""
    tokens = []
    for piece in term.replace("/", " ").replace("-", " ").split():
        if piece in vectors:
            tokens.append(vectors[piece])
        elif piece.lower() in vectors:
            tokens.append(vectors[piece.lower()])
    if not tokens:
        return None
    dim = len(g)
    pooled = [sum(vec[i] for vec in tokens) / len(tokens) for i in range(dim)]
    dot = sum(pooled[i] * g[i] for i in range(dim))
    norm_p = math.sqrt(sum(x * x for x in pooled))
    norm_g = math.sqrt(sum(x * x for x in g))
    if norm_p == 0.0 or norm_g == 0.0:
        return None
    return dot / (norm_p * norm_g)


class TestTermBias:
    def test_multiword_pooling_hand_example(self):
        store = VectorStore([("bipolar", (1.0, 0.0)), ("disorder", (0.0, 1.0))])
        g = make_direction((1.0, 0.0))
        record = term_bias(store, "bipolar disorder", g)
        assert record.score == pytest.approx(0.7071, abs=5e-5)
        assert record.resolved_tokens == ("bipolar", "disorder")

    def test_orthogonal_term_scores_zero(self):
        store = VectorStore([("anxiety", (0.0, 1.0))])
        record = term_bias(store, "anxiety", make_direction((1.0, 0.0)))
        assert record.score == 0.0

    def test_unresolvable_term_skipped(self):
        store = VectorStore([("anxiety", (0.0, 1.0))])
        record = term_bias(store, "dissociative fugue", make_direction((1.0, 0.0)))
        assert record.skipped
        assert record.reason == "no tokens found"
        assert record.score is None

    def test_partial_tokens_drop_missing(self):
        store = VectorStore([("bipolar", (1.0, 0.0))])
        record = term_bias(store, "bipolar disorder", make_direction((1.0, 0.0)))
        assert record.resolved_tokens == ("bipolar",)
        assert record.score == pytest.approx(1.0)

    def test_slash_and_hyphen_splitting(self):
        assert split_term("HIV/AIDS") == ["HIV", "AIDS"]
        assert split_term("obsessive-compulsive disorder") == ["obsessive", "compulsive", "disorder"]

    def test_contextual_store_uses_whole_term(self):
        store = VectorStore(
            [("bipolar disorder", (1.0, 0.0)), ("bipolar", (0.0, 1.0))],
            source_kind="contextual",
        )
        record = term_bias(store, "bipolar disorder", make_direction((1.0, 0.0)))
        assert record.score == pytest.approx(1.0)
        assert record.resolved_tokens == ("bipolar disorder",)

    def test_contextual_miss_skipped(self):
        store = VectorStore([("anxiety", (1.0, 0.0))], source_kind="contextual")
        record = term_bias(store, "psychosis", make_direction((1.0, 0.0)))
        assert record.skipped
        assert record.reason == "term not found in contextual store"

    def test_zero_norm_pooled_vector_skipped(self):
        store = VectorStore([("a", (1.0, 0.0)), ("b", (-1.0, 0.0))])
        record = term_bias(store, "a b", make_direction((1.0, 0.0)))
        assert record.skipped
        assert record.reason == "zero-norm pooled vector"

    def test_dimension_mismatch_rejected(self):
        store = VectorStore([("a", (1.0, 0.0, 0.0))])
        with pytest.raises(ValueError, match="dimension"):
            term_bias(store, "a", make_direction((1.0, 0.0)))

    def test_matches_brute_force(self, rng):
        tokens = [f"t{i}" for i in range(12)]
        store = VectorStore([(t, rng.uniform(-1, 1, size=4)) for t in tokens])
        vectors = {t: list(store[t]) for t in tokens}
        g_vec = rng.uniform(-1, 1, size=4)
        g = make_direction(g_vec)
        for term in ["t0", "t1 t2", "t3-t4/t5", "t0 missing", "missing only"]:
            record = term_bias(store, term, g)
            expected = brute_force_term_score(vectors, term, list(g.g))
            if expected is None:
                assert record.skipped
            else:
                assert record.score == pytest.approx(expected, abs=1e-9)


class TestDirectBias:
    def test_hand_example(self):
        records = [
            BiasRecord(term="a", category="c", score=1.0),
            BiasRecord(term="b", category="c", score=0.0),
            BiasRecord(term="c", category="c", score=0.6),
        ]
        assert direct_bias(records) == pytest.approx(0.5333333333333333, abs=1e-12)

    def test_absolute_value_of_single_score(self):
        assert direct_bias([BiasRecord(term="a", category="c", score=-0.3)]) == pytest.approx(0.3)

    def test_all_skipped_rejected(self):
        records = [BiasRecord(term="a", category="c", skipped=True, reason="x")]
        with pytest.raises(ValueError, match="all records skipped"):
            direct_bias(records)

    def test_skipped_excluded_from_denominator(self):
        records = [
            BiasRecord(term="a", category="c", score=0.5),
            BiasRecord(term="b", category="c", skipped=True, reason="x"),
        ]
        assert direct_bias(records) == pytest.approx(0.5)

    @given(st.lists(st.floats(-1.0, 1.0), min_size=1, max_size=40))
    def test_matches_independent_fold(self, scores):
        records = [BiasRecord(term=f"t{i}", category="c", score=s) for i, s in enumerate(scores)]
        total = 0.0
        for s in scores:
            total += abs(s)
        assert direct_bias(records) == pytest.approx(total / len(scores), abs=1e-12)
        assert 0.0 <= direct_bias(records) <= 1.0

    @given(st.lists(st.floats(-1.0, 1.0), min_size=1, max_size=20), st.randoms())
    def test_permutation_invariant(self, scores, rand):
        records = [BiasRecord(term=f"t{i}", category="c", score=s) for i, s in enumerate(scores)]
        shuffled = list(records)
        rand.shuffle(shuffled)
        assert direct_bias(records) == pytest.approx(direct_bias(shuffled), abs=1e-12)

    def test_duplicated_term_acts_as_weighted_mean(self):
        base = [
            BiasRecord(term="a", category="c", score=0.9),
            BiasRecord(term="b", category="c", score=0.1),
        ]
        doubled = base + [BiasRecord(term="a2", category="c", score=0.9)]
        assert direct_bias(doubled) == pytest.approx((0.9 + 0.1 + 0.9) / 3, abs=1e-12)


def _toy_lexicon() -> TermLexicon:
    return TermLexicon(
        {
            "mental_disorders": [TermEntry("alpha"), TermEntry("beta"), TermEntry("gone")],
            "personality_traits": [
                TermEntry("gamma", "positive"),
                TermEntry("delta", "negative"),
            ],
        }
    )


class TestCategoryReport:
    def test_reports_with_subgroups_and_extrema(self):
        store = VectorStore(
            [
                ("alpha", (1.0, 0.0)),
                ("beta", (0.0, 1.0)),
                ("gamma", (0.6, 0.8)),
                ("delta", (-1.0, 0.0)),
            ]
        )
        g = make_direction((1.0, 0.0))
        reports = {r.category: r for r in category_report(store, _toy_lexicon(), g)}

        mental = reports["mental_disorders"]
        assert mental.n_scored == 2
        assert mental.n_skipped == 1
        assert mental.direct_bias == pytest.approx(0.5)
        assert mental.max_abs_term == "alpha"
        assert mental.min_abs_term == "beta"

        traits = reports["personality_traits"]
        assert traits.direct_bias == pytest.approx((0.6 + 1.0) / 2)
        assert traits.subgroup_breakdown == {
            "positive": pytest.approx(0.6),
            "negative": pytest.approx(1.0),
        }
        assert traits.max_abs_term == "delta"

    def test_all_vectors_equal_g_gives_bias_one(self):
        store = VectorStore([("alpha", (1.0, 0.0)), ("beta", (1.0, 0.0))])
        lex = TermLexicon({"mental_disorders": [TermEntry("alpha"), TermEntry("beta")]})
        reports = category_report(store, lex, make_direction((1.0, 0.0)))
        assert reports[0].direct_bias == 1.0

    def test_all_vectors_orthogonal_gives_bias_zero(self):
        store = VectorStore([("alpha", (0.0, 1.0)), ("beta", (0.0, -2.0))])
        lex = TermLexicon({"mental_disorders": [TermEntry("alpha"), TermEntry("beta")]})
        reports = category_report(store, lex, make_direction((1.0, 0.0)))
        assert reports[0].direct_bias == 0.0

    def test_empty_lexicon_rejected(self):
        store = VectorStore([("a", (1.0,))])
        with pytest.raises(ValueError, match="empty lexicon"):
            score_lexicon(store, TermLexicon({}), make_direction((1.0,)))


class TestInvariances:
    def test_store_scaling_leaves_scores(self, rng):
        tokens = [f"t{i}" for i in range(10)]
        store = VectorStore([(t, rng.uniform(-1, 1, size=5)) for t in tokens])
        g = make_direction(rng.uniform(-1, 1, size=5))
        scaled = store.scaled(3.7)
        for t in tokens:
            a = term_bias(store, t, g).score
            b = term_bias(scaled, t, g).score
            assert b == pytest.approx(a, abs=1e-9)

    def test_negating_g_negates_scores_keeps_direct_bias(self, rng):
        tokens = [f"t{i}" for i in range(10)]
        store = VectorStore([(t, rng.uniform(-1, 1, size=5)) for t in tokens])
        g = make_direction(rng.uniform(-1, 1, size=5))
        neg = g.flipped()
        records_pos = [term_bias(store, t, g) for t in tokens]
        records_neg = [term_bias(store, t, neg) for t in tokens]
        for a, b in zip(records_pos, records_neg):
            assert b.score == pytest.approx(-a.score, abs=1e-12)
        assert direct_bias(records_neg) == pytest.approx(direct_bias(records_pos), abs=1e-12)


class TestRecordSerialization:
    def test_csv_round_trip(self, tmp_path):
        records = [
            BiasRecord(term="alpha", category="mental_disorders", score=0.25, resolved_tokens=("alpha",)),
            BiasRecord(term="beta two", category="personality_traits", subgroup="negative", score=-0.5),
            BiasRecord(term="gone", category="mental_disorders", skipped=True, reason="no tokens found"),
        ]
        path = tmp_path / "records.csv"
        write_bias_records_csv(records, path)
        loaded = read_bias_records_csv(path)
        assert [(r.term, r.category, r.subgroup, r.skipped, r.reason) for r in loaded] == [
            (r.term, r.category, r.subgroup, r.skipped, r.reason) for r in records
        ]
        assert loaded[0].score == pytest.approx(0.25, abs=1e-12)
        assert loaded[1].score == pytest.approx(-0.5, abs=1e-12)
        assert loaded[2].score is None
