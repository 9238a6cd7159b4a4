import pytest
from hypothesis import given
from hypothesis import strategies as st

from radlabel.corpus import ArbitrationRecord, Evidence, LabelRecord
from radlabel.errors import ArbitrationError, SamplingError
from radlabel.stats import (
    CiParams,
    SampleSpec,
    confidence_interval,
    draw_sample,
    effective_verdicts,
    fpc,
    per_keyword_seed,
    positive_population,
    summarize,
)


class TestFpc:
    def test_census_is_zero(self):
        assert fpc(52, 52) == 0.0

    def test_reference_value(self):
        # sqrt(19000/19051), computed by hand
        assert fpc(19052, 52) == pytest.approx(0.9986606, abs=1e-6)

    def test_small_sample_of_large_population_near_one(self):
        assert fpc(10 ** 6, 1) == pytest.approx(1.0, abs=1e-5)

    def test_tiny_population_rejected(self):
        with pytest.raises(SamplingError):
            fpc(1, 1)

    def test_oversample_rejected(self):
        with pytest.raises(SamplingError):
            fpc(10, 11)


class TestConfidenceInterval:
    @pytest.mark.parametrize(
        "N,n,hits,lower,upper",
        [
            (36296, 31, 25, 0.662, 0.951),   # atrophy, NLP stage
            (19052, 52, 51, 0.942, 1.000),   # atrophy, final
            (3678, 33, 31, 0.855, 1.000),    # hemorrhage, final
            (1396, 51, 48, 0.875, 1.000),    # hemorrhage, second site
        ],
    )
    def test_reference_rows(self, N, n, hits, lower, upper):
        ci = confidence_interval(N, n, hits)
        assert round(ci.lower, 3) == pytest.approx(lower, abs=0.001)
        assert round(ci.upper, 3) == pytest.approx(upper, abs=0.001)

    def test_point_only_below_threshold(self):
        ci = confidence_interval(2, 2, 1)
        assert ci.point_only
        assert ci.p_hat == 0.5
        assert ci.lower == ci.upper == 0.5

    def test_empty_sample_rejected(self):
        with pytest.raises(SamplingError):
            confidence_interval(10, 0, 0)

    def test_all_hits_zero_width(self):
        ci = confidence_interval(552, 30, 30)
        assert (ci.lower, ci.upper) == (1.0, 1.0)

    def test_no_hits_zero_width(self):
        ci = confidence_interval(552, 30, 0)
        assert (ci.lower, ci.upper) == (0.0, 0.0)

    def test_census_collapse(self):
        ci = confidence_interval(30, 30, 24)
        assert ci.se == 0.0
        assert ci.lower == ci.upper == ci.p_hat

    def test_monotone_narrowing(self):
        widths = []
        for n, hits in [(20, 16), (25, 20), (40, 32), (50, 40)]:
            ci = confidence_interval(100, n, hits)
            widths.append(ci.upper - ci.lower)
        assert widths == sorted(widths, reverse=True)

    @given(
        st.integers(min_value=2, max_value=5000),
        st.integers(min_value=1, max_value=5000),
        st.floats(min_value=0.0, max_value=1.0),
    )
    def test_bounds_ordered_and_clamped(self, N, n, frac):
        n = min(n, N)
        hits = round(frac * n)
        ci = confidence_interval(N, n, hits)
        assert 0.0 <= ci.lower <= ci.p_hat <= ci.upper <= 1.0

    @given(
        st.integers(min_value=20, max_value=60),
        st.integers(min_value=2, max_value=5),
        st.floats(min_value=0.05, max_value=0.95),
    )
    def test_scaling_sample_preserving_ratio_narrows(self, n, factor, frac):
        hits = round(frac * n)
        big_n, big_hits = n * factor, hits * factor
        N = big_n * 3
        small = confidence_interval(N, n, hits)
        big = confidence_interval(N, big_n, big_hits)
        assert big.upper - big.lower <= small.upper - small.lower + 1e-12

    def test_df_exact_mode(self):
        from scipy.stats import t as t_dist

        params = CiParams(df_exact=True)
        ci = confidence_interval(1000, 31, 25, params)
        expected_t = float(t_dist.ppf(0.975, 30))
        assert expected_t == pytest.approx(2.042, abs=0.001)
        default = confidence_interval(1000, 31, 25)
        assert ci.upper - ci.lower == pytest.approx(
            (default.upper - default.lower) * expected_t / 2.04, rel=1e-9
        )


class TestDrawSample:
    def test_census_permutation(self):
        ids = [f"r{i}" for i in range(5)]
        drawn = draw_sample(SampleSpec("kw", 5, 5, seed=3), ids)
        assert sorted(drawn) == sorted(ids)

    def test_deterministic(self):
        ids = [f"r{i}" for i in range(100)]
        a = draw_sample(SampleSpec("kw", 100, 33, seed=7), ids)
        b = draw_sample(SampleSpec("kw", 100, 33, seed=7), ids)
        assert a == b
        assert len(set(a)) == 33

    def test_seed_changes_sample(self):
        ids = [f"r{i}" for i in range(100)]
        a = draw_sample(SampleSpec("kw", 100, 33, seed=7), ids)
        b = draw_sample(SampleSpec("kw", 100, 33, seed=8), ids)
        assert a != b

    def test_zero_sample_rejected(self):
        with pytest.raises(SamplingError):
            draw_sample(SampleSpec("kw", 5, 0, seed=1), ["a", "b", "c", "d", "e"])

    def test_oversample_suggests_point_only(self):
        with pytest.raises(SamplingError, match="point-only"):
            draw_sample(SampleSpec("kw", 2, 5, seed=1), ["a", "b"])

    def test_population_size_mismatch(self):
        with pytest.raises(SamplingError):
            draw_sample(SampleSpec("kw", 3, 2, seed=1), ["a", "b"])

    def test_per_keyword_seed_stable(self):
        assert per_keyword_seed(7, "hemorrhage") == per_keyword_seed(7, "hemorrhage")
        assert per_keyword_seed(7, "hemorrhage") != per_keyword_seed(7, "mass")


def _label(report_id, keyword, nlp="positive", final="positive"):
    return LabelRecord(report_id, keyword, "c", nlp, final, (Evidence(0, 0, 4),) if final == "positive" else ())


def _arb(report_id, keyword, correct, arbiter="rad1", ts="t1"):
    return ArbitrationRecord(report_id, keyword, correct, arbiter, ts)


class TestEffectiveVerdicts:
    def test_supersede_same_arbiter(self):
        log = [_arb("r1", "kw", True), _arb("r1", "kw", False)]
        assert effective_verdicts(log) == {("r1", "kw"): False}

    def test_latest_across_arbiters_wins(self):
        log = [_arb("r1", "kw", True, "rad1"), _arb("r1", "kw", False, "rad2")]
        assert effective_verdicts(log) == {("r1", "kw"): False}

    def test_distinct_pairs_kept(self):
        log = [_arb("r1", "kw", True), _arb("r2", "kw", False)]
        assert effective_verdicts(log) == {("r1", "kw"): True, ("r2", "kw"): False}


class TestSummarize:
    def test_zero_positive_keyword_is_na(self):
        labels = [_label("r1", "arachnoid cyst", nlp="irrelevant", final="unmarked")]
        rows = summarize(labels, [])
        assert rows[0].csv_fields() == ("arachnoid cyst", "0", "0", "0", "N/A", "N/A", "N/A")
        assert rows[0].interval_display() == "N/A"

    def test_unsampled_marking(self):
        labels = [_label("r1", "hemorrhage")]
        rows = summarize(labels, [])
        assert rows[0].csv_fields()[4] == "unsampled"
        assert rows[0].interval_display() == "unsampled"

    def test_counts_and_interval(self):
        labels = [_label(f"r{i}", "hemorrhage") for i in range(40)]
        log = [_arb(f"r{i}", "hemorrhage", i != 0) for i in range(25)]
        rows = summarize(labels, log)
        row = rows[0]
        assert (row.n_positive, row.n_sampled, row.n_correct) == (40, 25, 24)
        assert row.ci is not None and not row.ci.point_only

    def test_arbitration_for_unlabeled_pair_rejected(self):
        labels = [_label("r1", "hemorrhage")]
        with pytest.raises(ArbitrationError):
            summarize(labels, [_arb("r9", "hemorrhage", True)])

    def test_arbitration_must_match_stage(self):
        labels = [_label("r1", "hemorrhage", nlp="positive", final="unmarked")]
        with pytest.raises(ArbitrationError, match="final-positive"):
            summarize(labels, [_arb("r1", "hemorrhage", True)], stage="final")
        rows = summarize(labels, [_arb("r1", "hemorrhage", True)], stage="nlp")
        assert rows[0].n_sampled == 1

    def test_point_only_row_display(self):
        labels = [_label("r1", "acute ischemic event"), _label("r2", "acute ischemic event")]
        log = [_arb("r1", "acute ischemic event", True)]
        rows = summarize(labels, log)
        assert rows[0].interval_display() == "1.000"
        assert rows[0].ci.point_only


def test_positive_population_stages():
    labels = [
        _label("r1", "hemorrhage", nlp="positive", final="positive"),
        _label("r2", "hemorrhage", nlp="positive", final="unmarked"),
        _label("r3", "hemorrhage", nlp="negative", final="unmarked"),
    ]
    assert positive_population(labels, "nlp")["hemorrhage"] == ["r1", "r2"]
    assert positive_population(labels, "final")["hemorrhage"] == ["r1"]
    with pytest.raises(ValueError):
        positive_population(labels, "bogus")
