"""Decision-level fusion: median voting over a student's window predictions.

Window-level predictions from one classifier are grouped per student and
replaced by the median of the group, turning many per-window decisions into
one per-student decision broadcast back over the group.
"""
from __future__ import annotations

import statistics
from dataclasses import replace
from typing import Hashable, Optional, Sequence

import numpy as np

from .aggregate import AggregatedSample
from .errors import LengthMismatchError
from .evaluate import (
    EvalReport,
    PredictionRecord,
    RunMetrics,
    confusion,
    loocv,
    roc_auc,
)
from .learners import ClassifierSpec

TIE_RULES = ("ge", "gt")


def median_vote(
    predictions: Sequence[int],
    keys: Sequence[Hashable],
    tie: str = "ge",
) -> np.ndarray:
    """Replace each prediction by its group's median vote.

    Groups are the distinct values of ``keys``. A group's vote is the
    multiset median of its 0/1 predictions; under the default "ge" rule an
    exactly split group votes 1 (median 0.5 rounds up), under "gt" it votes 0.
    """
    if tie not in TIE_RULES:
        raise ValueError(f"tie must be one of {TIE_RULES}, got {tie!r}")
    if len(predictions) != len(keys):
        raise LengthMismatchError(
            f"{len(predictions)} predictions vs {len(keys)} keys"
        )
    groups: dict[Hashable, list[int]] = {}
    for key, pred in zip(keys, predictions):
        groups.setdefault(key, []).append(int(pred))
    votes = {}
    for key, preds in groups.items():
        med = statistics.median(preds)
        votes[key] = int(med >= 0.5 if tie == "ge" else med > 0.5)
    return np.asarray([votes[key] for key in keys], dtype=np.int64)


def vote_share(predictions: Sequence[int], keys: Sequence[Hashable]) -> np.ndarray:
    """Fraction of positive predictions in each sample's group.

    The median rule is a threshold on this share, so it doubles as the voted
    decision score when ranking students for a ROC curve.
    """
    if len(predictions) != len(keys):
        raise LengthMismatchError(
            f"{len(predictions)} predictions vs {len(keys)} keys"
        )
    totals: dict[Hashable, int] = {}
    pos: dict[Hashable, int] = {}
    for key, pred in zip(keys, predictions):
        totals[key] = totals.get(key, 0) + 1
        pos[key] = pos.get(key, 0) + int(pred)
    return np.asarray([pos[key] / totals[key] for key in keys], dtype=np.float64)


def _voted_report(base: EvalReport, tie: str) -> EvalReport:
    """Re-score a LOOCV report after per-student median voting in every run."""
    if base.run_predictions is None:
        raise ValueError("voting needs per-run predictions; rerun with keep_run_predictions")
    keys = [(p.trial_id, p.student_id) for p in base.predictions]
    y_true = np.asarray([p.y_true for p in base.predictions], dtype=np.int64)
    runs: list[RunMetrics] = []
    last_preds: list[PredictionRecord] = []
    last_scores: Optional[np.ndarray] = None
    for run_preds in base.run_predictions:
        raw = list(run_preds)
        voted = median_vote(raw, keys, tie=tie)
        share = vote_share(raw, keys)
        runs.append(RunMetrics(cm=confusion(y_true, voted)))
        last_preds = [
            replace(p, y_pred=int(v), score=float(s))
            for p, v, s in zip(base.predictions, voted, share)
        ]
        last_scores = share
    points, auc = roc_auc(y_true, last_scores)
    return EvalReport(
        spec=base.spec,
        n_runs=base.n_runs,
        runs=tuple(runs),
        mean_sensitivity=float(np.mean([r.cm.sensitivity for r in runs])),
        mean_specificity=float(np.mean([r.cm.specificity for r in runs])),
        mean_accuracy=float(np.mean([r.cm.accuracy for r in runs])),
        roc_points=points,
        auc=auc,
        predictions=tuple(last_preds),
        run_predictions=base.run_predictions,
    )


def _collapse_students(report: EvalReport) -> EvalReport:
    """Keep one prediction per student (all group members agree after voting)."""
    seen: set[tuple[str, str]] = set()
    kept: list[PredictionRecord] = []
    for p in report.predictions:
        key = (p.trial_id, p.student_id)
        if key in seen:
            continue
        seen.add(key)
        kept.append(p)
    y_true = np.asarray([p.y_true for p in kept], dtype=np.int64)
    y_pred = np.asarray([p.y_pred for p in kept], dtype=np.int64)
    scores = np.asarray([p.score for p in kept], dtype=np.float64)
    cm = confusion(y_true, y_pred)
    points, auc = roc_auc(y_true, scores)
    runs = (RunMetrics(cm=cm),)
    return EvalReport(
        spec=report.spec,
        n_runs=report.n_runs,
        runs=runs,
        mean_sensitivity=cm.sensitivity,
        mean_specificity=cm.specificity,
        mean_accuracy=cm.accuracy,
        roc_points=points,
        auc=auc,
        predictions=tuple(kept),
    )


def vote_pipeline(
    samples: Sequence[AggregatedSample],
    spec: ClassifierSpec,
    n_runs: int = 10,
    standardize: bool = False,
    tie: str = "ge",
) -> tuple[EvalReport, EvalReport]:
    """LOOCV a classifier, then median-vote each student's window predictions.

    Returns (window_level, student_level) reports: the first keeps one voted
    row per window for comparison against the unvoted run, the second
    collapses each student to a single decision. Student-level metrics come
    from the last run only; window-level metrics are averaged over runs.
    """
    base = loocv(
        samples, spec, n_runs=n_runs, standardize=standardize, keep_run_predictions=True
    )
    window_level = _voted_report(base, tie=tie)
    return window_level, _collapse_students(window_level)
