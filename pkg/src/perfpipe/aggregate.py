"""Time-window aggregation and median-split labeling.

Daily records are reduced to one mean vector per student-day, then averaged
over windows: consecutive 7-day blocks counted from the trial start
(weekly), or the whole trial (monthly). A trailing partial week is kept when
it has at least ``min_days`` contributing days. Labels come from a per-trial
median split of final grades and are never pooled across trials.
"""
from __future__ import annotations

import datetime as dt
import statistics
from dataclasses import dataclass, replace
from typing import Iterable, Mapping, Optional, Sequence

from .errors import (
    EmptyWindowSetError,
    InsufficientGradesError,
    MissingLabelError,
)
from .ingest import FEATURE_NAMES, GradeRecord, Trial

WEEKLY = "weekly"
MONTHLY = "monthly"
DROP_MISSING = "drop"
TRIAL_MEAN = "trial_mean"

N_FEATURES = len(FEATURE_NAMES)


@dataclass(frozen=True)
class WindowPolicy:
    """How student-days are grouped and how missing fields are filled."""

    kind: str = WEEKLY
    min_days: int = 1
    imputation: str = DROP_MISSING

    def __post_init__(self) -> None:
        if self.kind not in (WEEKLY, MONTHLY):
            raise ValueError(f"unknown window kind {self.kind!r}")
        if self.min_days < 1:
            raise ValueError("min_days must be at least 1")
        if self.imputation not in (DROP_MISSING, TRIAL_MEAN):
            raise ValueError(f"unknown imputation {self.imputation!r}")


@dataclass(frozen=True)
class AggregatedSample:
    """One feature vector: a student's mean behavior over one window."""

    student_id: str
    trial_id: str
    window_index: int
    n_days: int
    features: tuple[float, ...]
    label: Optional[int] = None


def daily_means(trial: Trial) -> dict[tuple[str, dt.date], tuple[Optional[float], ...]]:
    """Mean feature vector per student-day.

    A field's mean uses only the records where it is present; a field absent
    from every record of the day stays missing for that day.
    """
    buckets: dict[tuple[str, dt.date], list[list[float]]] = {}
    for rec in trial.records:
        key = (rec.student_id, rec.date)
        per_field = buckets.setdefault(key, [[] for _ in range(N_FEATURES)])
        for i, v in enumerate(rec.feature_values()):
            if v is not None:
                per_field[i].append(v)
    out: dict[tuple[str, dt.date], tuple[Optional[float], ...]] = {}
    for key, per_field in buckets.items():
        out[key] = tuple(sum(vs) / len(vs) if vs else None for vs in per_field)
    return out


def _window_of(date: dt.date, start: dt.date, kind: str) -> int:
    return (date - start).days // 7 if kind == WEEKLY else 0


def window_aggregate(
    daily: Mapping[tuple[str, dt.date], tuple[Optional[float], ...]],
    policy: WindowPolicy,
    trial_id: str,
    start_date: dt.date,
) -> list[AggregatedSample]:
    """Average daily means over windows, yielding unlabeled samples.

    Windows with fewer than ``min_days`` contributing days are dropped. A
    field missing on all of a window's days is either imputed with the
    trial-wide mean of that field or causes the sample to be dropped,
    depending on the policy. Raises ``EmptyWindowSetError`` when nothing
    survives.
    """
    groups: dict[tuple[str, int], list[tuple[Optional[float], ...]]] = {}
    for (student_id, date), vector in daily.items():
        w = _window_of(date, start_date, policy.kind)
        groups.setdefault((student_id, w), []).append(vector)

    trial_totals = [0.0] * N_FEATURES
    trial_counts = [0] * N_FEATURES
    for vector in daily.values():
        for i, v in enumerate(vector):
            if v is not None:
                trial_totals[i] += v
                trial_counts[i] += 1

    samples: list[AggregatedSample] = []
    for (student_id, w) in sorted(groups):
        vectors = groups[(student_id, w)]
        if len(vectors) < policy.min_days:
            continue
        features: list[float] = []
        dropped = False
        for i in range(N_FEATURES):
            present = [vec[i] for vec in vectors if vec[i] is not None]
            if present:
                features.append(sum(present) / len(present))
            elif policy.imputation == TRIAL_MEAN and trial_counts[i] > 0:
                features.append(trial_totals[i] / trial_counts[i])
            else:
                dropped = True
                break
        if dropped:
            continue
        samples.append(
            AggregatedSample(
                student_id=student_id,
                trial_id=trial_id,
                window_index=w,
                n_days=len(vectors),
                features=tuple(features),
            )
        )
    if not samples:
        raise EmptyWindowSetError(f"no samples survive the {policy.kind} policy for trial {trial_id}")
    return samples


def median_split_labels(grades: Sequence[GradeRecord]) -> tuple[dict[str, int], float]:
    """Per-trial median split: label 1 iff grade >= the trial's median grade.

    The grades must all belong to one trial; pooling trials before splitting
    would shift the threshold.
    """
    if len({g.trial_id for g in grades}) > 1:
        raise ValueError("grades span multiple trials; split each trial separately")
    if len(grades) < 2:
        raise InsufficientGradesError("median split needs at least two grades")
    med = float(statistics.median(g.grade for g in grades))
    return {g.student_id: int(g.grade >= med) for g in grades}, med


def label_samples(
    samples: Iterable[AggregatedSample], labels: Mapping[str, int]
) -> list[AggregatedSample]:
    """Attach student labels to samples; unknown students are an error."""
    out: list[AggregatedSample] = []
    for s in samples:
        if s.student_id not in labels:
            raise MissingLabelError(f"no label for student {s.student_id}")
        out.append(replace(s, label=int(labels[s.student_id])))
    return out


def build_labeled_samples(trial: Trial, policy: WindowPolicy) -> list[AggregatedSample]:
    """Full single-trial pipeline: daily means, windows, median-split labels."""
    daily = daily_means(trial)
    samples = window_aggregate(daily, policy, trial.trial_id, trial.start_date)
    labels, _ = median_split_labels(trial.grades)
    return label_samples(samples, labels)


def build_joined_samples(trials: Sequence[Trial], policy: WindowPolicy) -> list[AggregatedSample]:
    """Label each trial against its own grade median, then pool the samples."""
    pooled: list[AggregatedSample] = []
    for trial in trials:
        pooled.extend(build_labeled_samples(trial, policy))
    return pooled
