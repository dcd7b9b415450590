"""Daily means, window aggregation, and median-split labeling."""
from __future__ import annotations

import datetime as dt

import numpy as np
import pytest

from perfpipe.aggregate import (
    MONTHLY,
    TRIAL_MEAN,
    WEEKLY,
    WindowPolicy,
    build_joined_samples,
    build_labeled_samples,
    daily_means,
    label_samples,
    median_split_labels,
    window_aggregate,
)
from perfpipe.errors import (
    EmptyWindowSetError,
    InsufficientGradesError,
    MissingLabelError,
)
from perfpipe.ingest import FEATURE_NAMES, GradeRecord, build_trial

from test_ingest import VALID_VALUES, make_record

START = dt.date(2026, 1, 5)


def trial_of(records, students_with_grades, end=dt.date(2026, 2, 1)):
    grades = [GradeRecord(s, "t1", g) for s, g in students_with_grades]
    return build_trial(records, grades, "t1", START, end)


class TestDailyMeans:
    def test_single_record_is_identity(self):
        trial = trial_of([make_record()], [("s1", 12.0), ("s2", 9.0)])
        daily = daily_means(trial)
        assert daily[("s1", START)] == tuple(VALID_VALUES[n] for n in FEATURE_NAMES)

    def test_two_records_average(self):
        # duplicate student-days are rejected at parse time but legal as
        # direct records; the mean of sleep 6 and 8 must be 7
        recs = [
            make_record(sleep_hours=6.0, study_hours=1.0),
            make_record(sleep_hours=8.0, study_hours=3.0),
        ]
        trial = trial_of(recs, [("s1", 12.0), ("s2", 9.0)])
        vec = daily_means(trial)[("s1", START)]
        assert vec[FEATURE_NAMES.index("sleep_hours")] == 7.0
        assert vec[FEATURE_NAMES.index("study_hours")] == 2.0

    def test_missing_field_ignored_in_mean(self):
        recs = [
            make_record(arousal=0.5),
            make_record(arousal=None),
        ]
        trial = trial_of(recs, [("s1", 12.0), ("s2", 9.0)])
        vec = daily_means(trial)[("s1", START)]
        assert vec[FEATURE_NAMES.index("arousal")] == 0.5

    def test_field_absent_everywhere_stays_missing(self):
        trial = trial_of([make_record(arousal=None)], [("s1", 12.0), ("s2", 9.0)])
        vec = daily_means(trial)[("s1", START)]
        assert vec[FEATURE_NAMES.index("arousal")] is None

    def test_random_records_match_bruteforce(self):
        # oracle: recompute every (student, day, field) mean with plain dicts
        rng = np.random.default_rng(3)
        records = []
        expected: dict[tuple[str, dt.date], dict[str, list[float]]] = {}
        for _ in range(30):
            student = f"s{rng.integers(3)}"
            day = START + dt.timedelta(days=int(rng.integers(5)))
            sleep = float(rng.uniform(4, 10))
            study = float(rng.uniform(0, 6))
            records.append(make_record(student=student, date=day,
                                       sleep_hours=sleep, study_hours=study))
            bucket = expected.setdefault((student, day), {"sleep_hours": [], "study_hours": []})
            bucket["sleep_hours"].append(sleep)
            bucket["study_hours"].append(study)
        trial = trial_of(records, [("s0", 10.0), ("s1", 12.0), ("s2", 14.0)])
        daily = daily_means(trial)
        assert set(daily) == set(expected)
        for key, bucket in expected.items():
            for field, values in bucket.items():
                got = daily[key][FEATURE_NAMES.index(field)]
                assert got == pytest.approx(sum(values) / len(values), abs=1e-12)


class TestWindowAggregate:
    def make_daily(self, spec):
        # spec: {(student, day_offset): sleep_hours}
        out = {}
        for (student, off), sleep in spec.items():
            vec = [VALID_VALUES[n] for n in FEATURE_NAMES]
            vec[FEATURE_NAMES.index("sleep_hours")] = sleep
            out[(student, START + dt.timedelta(days=off))] = tuple(vec)
        return out

    def test_identical_days_collapse_to_same_vector(self):
        daily = self.make_daily({("s1", off): 6.5 for off in range(7)})
        samples = window_aggregate(daily, WindowPolicy(kind=WEEKLY), "t1", START)
        assert len(samples) == 1
        s = samples[0]
        assert s.window_index == 0 and s.n_days == 7
        assert s.features[FEATURE_NAMES.index("sleep_hours")] == 6.5
        expected = tuple(VALID_VALUES[n] for n in FEATURE_NAMES[:7])
        assert s.features[:7] == expected

    def test_window_membership_by_day_arithmetic(self):
        daily = self.make_daily({("s1", 3): 6.0, ("s1", 16): 7.0, ("s2", 8): 8.0})
        samples = window_aggregate(daily, WindowPolicy(kind=WEEKLY), "t1", START)
        got = {(s.student_id, s.window_index) for s in samples}
        assert got == {("s1", 0), ("s1", 2), ("s2", 1)}

    def test_monthly_gives_one_sample_per_student(self):
        daily = self.make_daily(
            {(f"s{i}", off): 6.0 + i for i in range(5) for off in range(0, 28, 3)}
        )
        samples = window_aggregate(daily, WindowPolicy(kind=MONTHLY), "t1", START)
        assert len(samples) == 5
        assert {s.window_index for s in samples} == {0}

    def test_min_days_drops_sparse_windows(self):
        daily = self.make_daily({("s1", 0): 6.0, ("s1", 1): 6.0, ("s1", 7): 7.0})
        samples = window_aggregate(daily, WindowPolicy(kind=WEEKLY, min_days=2), "t1", START)
        assert [(s.window_index, s.n_days) for s in samples] == [(0, 2)]

    def test_nothing_survives_raises(self):
        daily = self.make_daily({("s1", 0): 6.0})
        with pytest.raises(EmptyWindowSetError):
            window_aggregate(daily, WindowPolicy(kind=WEEKLY, min_days=3), "t1", START)

    def test_all_missing_feature_drops_sample_by_default(self):
        daily = self.make_daily({("s1", 0): 6.0, ("s2", 0): 7.0})
        key = ("s1", START)
        vec = list(daily[key])
        vec[FEATURE_NAMES.index("arousal")] = None
        daily[key] = tuple(vec)
        samples = window_aggregate(daily, WindowPolicy(kind=WEEKLY), "t1", START)
        assert [s.student_id for s in samples] == ["s2"]

    def test_trial_mean_imputation_fills_gap(self):
        daily = self.make_daily({("s1", 0): 6.0, ("s2", 0): 7.0})
        idx = FEATURE_NAMES.index("arousal")
        key = ("s1", START)
        vec = list(daily[key])
        vec[idx] = None
        daily[key] = tuple(vec)
        policy = WindowPolicy(kind=WEEKLY, imputation=TRIAL_MEAN)
        samples = window_aggregate(daily, policy, "t1", START)
        by_student = {s.student_id: s for s in samples}
        # only s2 contributes arousal to the trial mean
        assert by_student["s1"].features[idx] == by_student["s2"].features[idx]

    def test_policy_validation(self):
        with pytest.raises(ValueError):
            WindowPolicy(kind="fortnightly")
        with pytest.raises(ValueError):
            WindowPolicy(min_days=0)
        with pytest.raises(ValueError):
            WindowPolicy(imputation="zero")


class TestMedianSplit:
    def test_two_grades(self):
        labels, med = median_split_labels(
            [GradeRecord("a", "t1", 10.0), GradeRecord("b", "t1", 14.0)]
        )
        assert med == 12.0
        assert labels == {"a": 0, "b": 1}

    def test_grade_equal_to_median_is_positive(self):
        grades = [GradeRecord(s, "t1", g) for s, g in
                  [("a", 10.0), ("b", 12.0), ("c", 12.0), ("d", 14.0)]]
        labels, med = median_split_labels(grades)
        assert med == 12.0
        assert labels == {"a": 0, "b": 1, "c": 1, "d": 1}

    def test_matches_sort_and_split_oracle(self):
        rng = np.random.default_rng(9)
        grades = [GradeRecord(f"s{i}", "t1", float(g))
                  for i, g in enumerate(rng.uniform(5, 19, size=33).round(1))]
        labels, med = median_split_labels(grades)
        values = sorted(g.grade for g in grades)
        oracle_median = values[len(values) // 2]  # odd count: middle element
        assert med == oracle_median
        for g in grades:
            assert labels[g.student_id] == int(g.grade >= oracle_median)

    def test_needs_two_grades(self):
        with pytest.raises(InsufficientGradesError):
            median_split_labels([GradeRecord("a", "t1", 10.0)])

    def test_rejects_mixed_trials(self):
        with pytest.raises(ValueError, match="trial"):
            median_split_labels(
                [GradeRecord("a", "t1", 10.0), GradeRecord("b", "t2", 14.0)]
            )


class TestLabeling:
    def test_labels_broadcast_per_student(self, tiny_trial):
        trial, _, _ = tiny_trial
        samples = build_labeled_samples(trial, WindowPolicy(kind=WEEKLY))
        labels, _ = median_split_labels(trial.grades)
        for s in samples:
            assert s.label == labels[s.student_id]

    def test_unknown_student_raises(self):
        trial = trial_of([make_record()], [("s1", 12.0), ("s2", 9.0)])
        samples = window_aggregate(daily_means(trial), WindowPolicy(), "t1", START)
        with pytest.raises(MissingLabelError, match="s1"):
            label_samples(samples, {"someone_else": 1})

    def test_joined_counts_are_per_trial_sums(self):
        recs_a = [make_record(student=s) for s in ("a1", "a2")]
        trial_a = trial_of(recs_a, [("a1", 10.0), ("a2", 14.0)])
        recs_b = [
            make_record(student=s, trial="t2") for s in ("b1", "b2", "b3", "b4")
        ]
        grades_b = [GradeRecord(s, "t2", g) for s, g in
                    [("b1", 8.0), ("b2", 9.0), ("b3", 15.0), ("b4", 16.0)]]
        trial_b = build_trial(recs_b, grades_b, "t2", START, dt.date(2026, 2, 1))
        pooled = build_joined_samples([trial_a, trial_b], WindowPolicy(kind=WEEKLY))
        a_only = build_labeled_samples(trial_a, WindowPolicy(kind=WEEKLY))
        b_only = build_labeled_samples(trial_b, WindowPolicy(kind=WEEKLY))
        assert len(pooled) == len(a_only) + len(b_only)
        count = lambda ss, v: sum(1 for s in ss if s.label == v)
        for v in (0, 1):
            assert count(pooled, v) == count(a_only, v) + count(b_only, v)
        # each trial is split at its own median: both have a 50/50 label split
        assert count(a_only, 1) == 1 and count(b_only, 1) == 2
