import random

import pytest
from hypothesis import given, settings, strategies as st

from driftbench.evaluation import (
    ConfusionCounts,
    DetectionLog,
    GroundTruth,
    aggregate,
    counts_of,
    f1,
    f1_from,
    mean_delay,
    precision,
    recall,
    score_detections,
)

from oracles import brute_force_metrics, brute_force_score, small_grid

alarm_sets = st.lists(st.integers(0, 100), unique=True, max_size=12).map(sorted)
positions = st.one_of(st.none(), st.integers(0, 100))


def as_tuple(c):
    return c.tp, c.fp, c.fn, c.tn, c.delay_sum


class TestScore:
    def test_single_tp(self):
        c = score_detections([10_500], GroundTruth(10_000, 4_000))
        assert as_tuple(c) == (1, 0, 0, 0, 500)

    def test_missed(self):
        assert as_tuple(score_detections([], GroundTruth(10_000))) == (0, 0, 1, 0, 0)

    def test_first_in_range_wins(self):
        c = score_detections(DetectionLog((9_000, 10_500, 12_000)), GroundTruth(10_000, 4_000))
        assert as_tuple(c) == (1, 1, 0, 0, 500)

    def test_range_is_closed(self):
        assert score_detections([14_000], GroundTruth(10_000, 4_000)).tp == 1
        assert score_detections([14_001], GroundTruth(10_000, 4_000)).fp == 1
        assert score_detections([9_999], GroundTruth(10_000, 4_000)).fp == 1

    def test_stationary(self):
        assert as_tuple(score_detections([], GroundTruth(None))) == (0, 0, 0, 1, 0)
        assert as_tuple(score_detections([3, 9], GroundTruth(None))) == (0, 2, 0, 0, 0)

    def test_exhaustive_small_grid(self):
        for alarms, position, range_ in small_grid():
            got = score_detections(alarms, GroundTruth(position, range_))
            assert as_tuple(got) == brute_force_score(alarms, position, range_, 8)

    @settings(max_examples=500, deadline=None)
    @given(alarms=alarm_sets, position=positions, range_=st.integers(1, 100))
    def test_matches_brute_force(self, alarms, position, range_):
        got = score_detections(alarms, GroundTruth(position, range_))
        assert as_tuple(got) == brute_force_score(alarms, position, range_, 100)

    @settings(max_examples=300, deadline=None)
    @given(alarms=alarm_sets, position=st.integers(0, 100), r1=st.integers(1, 100), r2=st.integers(1, 100))
    def test_range_monotonicity(self, alarms, position, r1, r2):
        small, large = sorted((r1, r2))
        a = score_detections(alarms, GroundTruth(position, small))
        b = score_detections(alarms, GroundTruth(position, large))
        assert b.tp >= a.tp and b.fp <= a.fp

    @settings(max_examples=200, deadline=None)
    @given(alarms=alarm_sets, position=positions)
    def test_count_invariants(self, alarms, position):
        c = score_detections(alarms, GroundTruth(position, 30))
        if position is None:
            assert c.tp + c.fn == 0 and c.tn in (0, 1)
        else:
            assert c.tp + c.fn == 1 and c.tn == 0
        assert min(as_tuple(c)) >= 0


class TestValidation:
    def test_unordered_log(self):
        with pytest.raises(ValueError):
            DetectionLog((5, 3))
        with pytest.raises(ValueError):
            DetectionLog((3, 3))

    def test_negative(self):
        with pytest.raises(ValueError):
            DetectionLog((-1,))
        with pytest.raises(ValueError):
            GroundTruth(10, 0)

    def test_range_past_end_warns(self):
        with pytest.warns(UserWarning):
            GroundTruth(19_000, 4_000, length=20_000)


class TestMetrics:
    def test_precision(self):
        assert precision(ConfusionCounts(tp=3, fp=1)) == 0.75
        assert precision(ConfusionCounts()) == 0.0
        assert recall(ConfusionCounts()) == 0.0 and f1(ConfusionCounts()) == 0.0

    def test_f1_from_reported_rates(self):
        # reference ADWIN precision and recall, in percent
        p, r, expected = 7.40, 34.50, 12.19
        assert abs(100 * f1_from(p / 100, r / 100) - expected) <= 0.01

    def test_mean_delay(self):
        assert mean_delay(ConfusionCounts(tp=1, delay_sum=500)) == 500
        assert mean_delay(ConfusionCounts(fn=1)) is None
        pooled = ConfusionCounts(tp=1, delay_sum=400) + ConfusionCounts(tp=1, delay_sum=600)
        assert mean_delay(pooled) == 500

    @settings(max_examples=200)
    @given(tp=st.integers(0, 50), fp=st.integers(0, 50), fn=st.integers(0, 50))
    def test_f1_consistency(self, tp, fp, fn):
        c = ConfusionCounts(tp=tp, fp=fp, fn=fn)
        p, r = precision(c), recall(c)
        assert f1(c) == (pytest.approx(2 * p * r / (p + r)) if p + r else 0.0)


class TestAggregate:
    def test_two_stream_micro_average(self):
        rows = [({"g": "a"}, ConfusionCounts(tp=1, fp=1)), ({"g": "a"}, ConfusionCounts(fn=1))]
        (row,) = aggregate(rows, "g")
        assert (row.precision, row.recall, row.n_streams) == (0.5, 0.5, 2)

    def test_singleton_equals_stream(self):
        c = ConfusionCounts(tp=1, fp=3, delay_sum=70)
        (row,) = aggregate([({"k": 1}, c)], "k")
        assert (row.precision, row.recall, row.f1, row.mean_delay) == (precision(c), recall(c), f1(c), 70)

    def test_four_categories(self):
        cats = ["single_class_local", "single_class_global", "multi_class_local", "multi_class_global"]
        rows = [({"category": c}, ConfusionCounts(fn=1)) for c in cats * 3]
        assert [r.key for r in aggregate(rows, "category")] == [(c,) for c in cats]

    def test_mapping_records_and_composite_keys(self):
        recs = [{"d": "x", "n": 2, "tp": 1, "fp": 0, "fn": 0, "tn": 0, "delay_sum": 5},
                {"d": "x", "n": 3, "tp": 0, "fp": 2, "fn": 1, "tn": 0, "delay_sum": 0}]
        assert len(aggregate(recs, ["d", "n"])) == 2
        (row,) = aggregate(recs, lambda r: r["d"])
        assert row.counts == counts_of(recs[0]) + counts_of(recs[1])

    def test_random_groups_match_oracle(self):
        rng = random.Random(0)
        recs, by_group = [], {}
        for _ in range(2_000):
            alarms = sorted(rng.sample(range(101), rng.randint(0, 6)))
            position = rng.choice([None, rng.randint(0, 100)])
            range_ = rng.randint(1, 60)
            g = rng.randint(0, 7)
            recs.append(({"g": g}, score_detections(alarms, GroundTruth(position, range_))))
            by_group.setdefault(g, []).append(brute_force_score(alarms, position, range_, 100))
        for row in aggregate(recs, "g"):
            p, r, f, d = brute_force_metrics(by_group[row.key[0]])
            assert (row.precision, row.recall) == (pytest.approx(p), pytest.approx(r))
            assert row.f1 == pytest.approx(f)
            assert row.mean_delay == (None if d is None else pytest.approx(float(d)))
