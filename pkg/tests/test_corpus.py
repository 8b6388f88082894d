"""Parsing, joining, round-trips, and synthetic topic generation."""

import numpy as np
import pytest
from scipy import stats

from tarstop.corpus import (
    SyntheticSpec,
    format_run,
    generate_synthetic,
    join,
    parse_qrels,
    parse_run,
)
from tarstop.errors import (
    DuplicateEntryError,
    ParseError,
    TopicNotFoundError,
    ValidationError,
)


class TestParseQrels:
    def test_direct_mapping(self):
        q = parse_qrels("T1 0 d1 1\nT1 0 d2 0")
        assert q.entries == {("T1", "d1"): 1, ("T1", "d2"): 0}

    def test_graded_collapses_to_binary(self):
        q = parse_qrels("T1 0 d1 2")
        assert q.entries == {("T1", "d1"): 1}

    def test_negative_relevance_maps_to_zero(self):
        q = parse_qrels("T1 0 d1 -1")
        assert q.entries == {("T1", "d1"): 0}

    def test_wrong_field_count_names_line(self):
        with pytest.raises(ParseError, match="line 1"):
            parse_qrels("T1 0 d1")

    def test_error_line_number_counts_comments(self):
        with pytest.raises(ParseError, match="line 3"):
            parse_qrels("# header\nT1 0 d1 1\nT1 0 d2\n")

    def test_non_integer_relevance(self):
        with pytest.raises(ParseError, match="not an integer"):
            parse_qrels("T1 0 d1 maybe")

    def test_duplicate_key(self):
        with pytest.raises(DuplicateEntryError):
            parse_qrels("T1 0 d1 1\nT1 0 d1 0")

    def test_comments_and_blank_lines_skipped(self):
        q = parse_qrels("\n# comment\nT1 0 d1 1\n\n")
        assert q.entries == {("T1", "d1"): 1}


class TestParseRun:
    def test_sorts_by_rank(self):
        run = parse_run("T1 Q0 d2 2 0.5 x\nT1 Q0 d1 1 0.9 x")
        entries = run.topics["T1"]
        assert [(e.doc_id, e.rank, e.score) for e in entries] == [
            ("d1", 1, 0.9),
            ("d2", 2, 0.5),
        ]

    def test_empty_input(self):
        assert parse_run("").topics == {}

    def test_duplicate_doc(self):
        with pytest.raises(DuplicateEntryError):
            parse_run("T1 Q0 d1 1 0.9 x\nT1 Q0 d1 2 0.8 x")

    def test_ranks_renumbered_densely(self):
        run = parse_run("T1 Q0 d9 10 0.1 x\nT1 Q0 d5 5 0.5 x\nT1 Q0 d2 2 0.9 x")
        assert [e.rank for e in run.topics["T1"]] == [1, 2, 3]
        assert [e.doc_id for e in run.topics["T1"]] == ["d2", "d5", "d9"]

    def test_non_numeric_rank(self):
        with pytest.raises(ParseError, match="rank"):
            parse_run("T1 Q0 d1 one 0.9 x")

    def test_non_numeric_score(self):
        with pytest.raises(ParseError, match="score"):
            parse_run("T1 Q0 d1 1 high x")

    def test_wrong_field_count(self):
        with pytest.raises(ParseError, match="6 fields"):
            parse_run("T1 Q0 d1 1 0.9")

    def test_round_trip_preserves_rank_order(self):
        text = "T1 Q0 d2 2 0.5 x\nT1 Q0 d1 1 0.9 x\nT2 Q0 a 7 3.0 x\n"
        run = parse_run(text)
        again = parse_run(format_run(run))
        for topic in run.topic_ids():
            assert [e.doc_id for e in run.topics[topic]] == [
                e.doc_id for e in again.topics[topic]
            ]


class TestJoin:
    def test_missing_from_qrels_is_nonrelevant(self):
        run = parse_run("T1 Q0 d1 1 3 x\nT1 Q0 d2 2 2 x\nT1 Q0 d3 3 1 x")
        qrels = parse_qrels("T1 0 d1 1")
        topic = join(run, qrels, "T1")
        assert topic.labels.tolist() == [True, False, False]
        assert topic.total_relevant == 1

    def test_judged_nonrelevant(self):
        run = parse_run("T1 Q0 d1 1 3 x")
        qrels = parse_qrels("T1 0 d1 0")
        topic = join(run, qrels, "T1")
        assert topic.labels.tolist() == [False]
        assert topic.total_relevant == 0

    def test_absent_topic(self):
        run = parse_run("T1 Q0 d1 1 3 x")
        with pytest.raises(TopicNotFoundError):
            join(run, parse_qrels(""), "T9")

    def test_relevant_count_never_exceeds_n(self, rng):
        for _ in range(20):
            n = int(rng.integers(1, 60))
            lines_run = [f"T Q0 d{i} {i} {n - i} x" for i in range(1, n + 1)]
            judged = rng.random(n) < 0.7
            rels = rng.integers(0, 3, n)
            lines_q = [
                f"T 0 d{i} {rels[i - 1]}" for i in range(1, n + 1) if judged[i - 1]
            ]
            topic = join(
                parse_run("\n".join(lines_run)),
                parse_qrels("\n".join(lines_q)),
                "T",
            )
            assert topic.total_relevant == int(topic.labels.sum()) <= topic.n


class TestGenerateSynthetic:
    def test_uniform_rate_matches_binomial_bounds(self):
        # central 99.9% interval of Binomial(10000, 0.05), via scipy
        spec = SyntheticSpec(n=10000, kind="uniform", params={"a": 0.05}, seed=123)
        topic = generate_synthetic(spec)
        lo = stats.binom.ppf(0.0005, 10000, 0.05)
        hi = stats.binom.ppf(0.9995, 10000, 0.05)
        assert lo <= topic.total_relevant <= hi

    def test_zero_rate_yields_no_relevant(self):
        spec = SyntheticSpec(n=500, kind="uniform", params={"a": 0.0}, seed=9)
        assert generate_synthetic(spec).total_relevant == 0

    def test_determinism(self):
        spec = SyntheticSpec(
            n=2000, kind="exponential", params={"a": 0.5, "b": -0.01}, seed=77
        )
        a = generate_synthetic(spec)
        b = generate_synthetic(spec)
        assert np.array_equal(a.labels, b.labels)

    def test_different_seeds_differ(self):
        base = dict(n=2000, kind="exponential", params={"a": 0.5, "b": -0.01})
        a = generate_synthetic(SyntheticSpec(seed=1, **base))
        b = generate_synthetic(SyntheticSpec(seed=2, **base))
        assert not np.array_equal(a.labels, b.labels)

    def test_noise_flips_labels(self):
        quiet = SyntheticSpec(n=5000, kind="uniform", params={"a": 0.0}, seed=5)
        noisy = SyntheticSpec(
            n=5000, kind="uniform", params={"a": 0.0}, seed=5, noise=0.2
        )
        flipped = generate_synthetic(noisy).total_relevant
        assert generate_synthetic(quiet).total_relevant == 0
        assert 0.15 * 5000 < flipped < 0.25 * 5000

    def test_invalid_hyperbolic_params(self):
        with pytest.raises(ValidationError):
            SyntheticSpec(
                n=100, kind="hyperbolic", params={"a": 0.5, "b": 1.5, "c": 0.01}, seed=1
            )

    def test_invalid_noise(self):
        with pytest.raises(ValidationError):
            SyntheticSpec(n=100, kind="uniform", params={"a": 0.1}, seed=1, noise=0.5)

    def test_unknown_kind(self):
        with pytest.raises(ValidationError):
            SyntheticSpec(n=100, kind="linear", params={"a": 0.1}, seed=1)

    def test_rate_clamped_to_probability(self):
        # a = 3 would be an invalid Bernoulli probability without clamping
        spec = SyntheticSpec(n=50, kind="uniform", params={"a": 3.0}, seed=4)
        assert generate_synthetic(spec).total_relevant == 50
