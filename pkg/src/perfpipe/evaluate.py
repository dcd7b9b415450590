"""Leave-one-out evaluation, confusion metrics, and ROC analysis.

A LOOCV evaluation repeats the full leave-one-out loop ``n_runs`` times;
run r trains every fold with a seed derived from (master seed, r), so only
model randomness varies between runs. Folds are independent and may be
evaluated in parallel; results are always reduced in fold order, which keeps
reports byte-identical at any worker count.
"""
from __future__ import annotations

import warnings
from dataclasses import dataclass, replace
from typing import Optional, Sequence

import numpy as np

from .aggregate import AggregatedSample
from .errors import (
    LengthMismatchError,
    MissingLabelError,
    PipelineError,
    SingleClassError,
)
from .learners import ClassifierSpec, fit, decision_score
from .parallel import map_ordered
from .seeding import derive_seed


@dataclass(frozen=True)
class ConfusionMatrix:
    tp: int
    fp: int
    tn: int
    fn: int

    @property
    def sensitivity(self) -> float:
        """True positive rate; 0.0 when there are no positives."""
        denom = self.tp + self.fn
        return self.tp / denom if denom else 0.0

    @property
    def specificity(self) -> float:
        """True negative rate; 0.0 when there are no negatives."""
        denom = self.tn + self.fp
        return self.tn / denom if denom else 0.0

    @property
    def accuracy(self) -> float:
        total = self.tp + self.fp + self.tn + self.fn
        return (self.tp + self.tn) / total if total else 0.0


def confusion(y_true: Sequence[int], y_pred: Sequence[int]) -> ConfusionMatrix:
    """Count the four outcomes of binary predictions."""
    yt = np.asarray(y_true, dtype=np.int64)
    yp = np.asarray(y_pred, dtype=np.int64)
    if yt.shape != yp.shape:
        raise LengthMismatchError(f"y_true has shape {yt.shape}, y_pred {yp.shape}")
    return ConfusionMatrix(
        tp=int(((yt == 1) & (yp == 1)).sum()),
        fp=int(((yt == 0) & (yp == 1)).sum()),
        tn=int(((yt == 0) & (yp == 0)).sum()),
        fn=int(((yt == 1) & (yp == 0)).sum()),
    )


def roc_auc(y_true: Sequence[int], scores: Sequence[float]) -> tuple[list[tuple[float, float]], float]:
    """ROC points over descending distinct score thresholds plus the area.

    The trapezoidal area equals the Mann-Whitney statistic U / (n1 * n0)
    with tied score pairs counted one half.
    """
    yt = np.asarray(y_true, dtype=np.int64)
    sc = np.asarray(scores, dtype=np.float64)
    if yt.shape != sc.shape:
        raise LengthMismatchError(f"y_true has shape {yt.shape}, scores {sc.shape}")
    n1 = int((yt == 1).sum())
    n0 = int((yt == 0).sum())
    if n1 == 0 or n0 == 0:
        raise SingleClassError("ROC needs both classes present")
    order = np.argsort(-sc, kind="stable")
    ys = yt[order]
    ss = sc[order]
    tps = np.cumsum(ys == 1)
    fps = np.cumsum(ys == 0)
    # one operating point per distinct threshold: the last row of a tie block
    last_of_block = np.append(ss[1:] != ss[:-1], True)
    tpr = tps[last_of_block] / n1
    fpr = fps[last_of_block] / n0
    xs = np.concatenate(([0.0], fpr))
    ys_curve = np.concatenate(([0.0], tpr))
    auc = float(np.sum((xs[1:] - xs[:-1]) * (ys_curve[1:] + ys_curve[:-1]) / 2.0))
    points = [(float(x), float(y)) for x, y in zip(xs, ys_curve)]
    return points, auc


@dataclass(frozen=True)
class RunMetrics:
    cm: ConfusionMatrix

    @property
    def sensitivity(self) -> float:
        return self.cm.sensitivity

    @property
    def specificity(self) -> float:
        return self.cm.specificity

    @property
    def accuracy(self) -> float:
        return self.cm.accuracy


@dataclass(frozen=True)
class PredictionRecord:
    student_id: str
    trial_id: str
    window_index: int
    y_true: int
    y_pred: int
    score: float


@dataclass(frozen=True)
class EvalReport:
    spec: Optional[ClassifierSpec]
    n_runs: int
    runs: tuple[RunMetrics, ...]
    mean_sensitivity: float
    mean_specificity: float
    mean_accuracy: float
    roc_points: tuple[tuple[float, float], ...]
    auc: float
    predictions: tuple[PredictionRecord, ...]
    run_predictions: Optional[tuple[tuple[int, ...], ...]] = None


def samples_to_xy(samples: Sequence[AggregatedSample]) -> tuple[np.ndarray, np.ndarray]:
    """Stack labeled samples into a feature matrix and a label vector."""
    if any(s.label is None for s in samples):
        raise MissingLabelError("all samples must be labeled before evaluation")
    X = np.asarray([s.features for s in samples], dtype=np.float64)
    y = np.asarray([s.label for s in samples], dtype=np.int64)
    return X, y


def _check_two_classes(y: np.ndarray) -> None:
    if not (y == 0).any() or not (y == 1).any():
        raise SingleClassError("evaluation set must contain both classes")


def _standardized(Xtr: np.ndarray, Xte: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    # statistics come from the training fold only
    mu = Xtr.mean(axis=0)
    sd = Xtr.std(axis=0)
    sd = np.where(sd > 0.0, sd, 1.0)
    return (Xtr - mu) / sd, (Xte - mu) / sd


def _loocv_fold(task: tuple[ClassifierSpec, np.ndarray, np.ndarray, int, bool]) -> float:
    spec, X, y, i, standardize = task
    mask = np.ones(y.shape[0], dtype=bool)
    mask[i] = False
    Xtr, ytr = X[mask], y[mask]
    Xte = X[i : i + 1]
    if standardize:
        Xtr, Xte = _standardized(Xtr, Xte)
    try:
        model = fit(spec, Xtr, ytr)
        return float(decision_score(model, Xte)[0])
    except PipelineError as exc:
        raise type(exc)(f"{exc} [fold {i}]") from exc


def _mk_predictions(
    samples: Sequence[AggregatedSample], y: np.ndarray, scores: np.ndarray
) -> tuple[PredictionRecord, ...]:
    return tuple(
        PredictionRecord(
            student_id=s.student_id,
            trial_id=s.trial_id,
            window_index=s.window_index,
            y_true=int(yt),
            y_pred=int(sc >= 0.5),
            score=float(sc),
        )
        for s, yt, sc in zip(samples, y, scores)
    )


def loocv(
    samples: Sequence[AggregatedSample],
    spec: ClassifierSpec,
    n_runs: int = 10,
    standardize: bool = False,
    roc_from: str = "last",
    keep_run_predictions: bool = False,
) -> EvalReport:
    """Repeated leave-one-out cross-validation.

    Metrics are averaged over runs; the ROC comes from the last run's scores
    ("last") or from scores averaged across runs ("mean").
    """
    if len(samples) < 3:
        raise ValueError("leave-one-out needs at least 3 samples")
    if n_runs < 1:
        raise ValueError("n_runs must be at least 1")
    if roc_from not in ("last", "mean"):
        raise ValueError(f"roc_from={roc_from!r} must be 'last' or 'mean'")
    X, y = samples_to_xy(samples)
    _check_two_classes(y)
    n = y.shape[0]
    runs: list[RunMetrics] = []
    run_preds: list[tuple[int, ...]] = []
    score_sum = np.zeros(n)
    scores = np.zeros(n)
    for r in range(n_runs):
        run_spec = replace(spec, seed=derive_seed(spec.seed, r))
        scores = np.asarray(
            map_ordered(_loocv_fold, [(run_spec, X, y, i, standardize) for i in range(n)])
        )
        preds = (scores >= 0.5).astype(np.int64)
        runs.append(RunMetrics(cm=confusion(y, preds)))
        run_preds.append(tuple(int(p) for p in preds))
        score_sum += scores
    roc_scores = scores if roc_from == "last" else score_sum / n_runs
    points, auc = roc_auc(y, roc_scores)
    return EvalReport(
        spec=spec,
        n_runs=n_runs,
        runs=tuple(runs),
        mean_sensitivity=float(np.mean([m.sensitivity for m in runs])),
        mean_specificity=float(np.mean([m.specificity for m in runs])),
        mean_accuracy=float(np.mean([m.accuracy for m in runs])),
        roc_points=tuple(points),
        auc=auc,
        predictions=_mk_predictions(samples, y, roc_scores),
        run_predictions=tuple(run_preds) if keep_run_predictions else None,
    )


def cross_eval(
    train_samples: Sequence[AggregatedSample],
    test_samples: Sequence[AggregatedSample],
    spec: ClassifierSpec,
    n_runs: int = 10,
    standardize: bool = False,
) -> EvalReport:
    """Fit on one sample set, evaluate on another (repeated over run seeds)."""
    if not train_samples:
        raise ValueError("training set is empty")
    if not test_samples:
        raise ValueError("test set is empty")
    train_keys = {(s.trial_id, s.student_id, s.window_index) for s in train_samples}
    test_keys = {(s.trial_id, s.student_id, s.window_index) for s in test_samples}
    if train_keys & test_keys:
        warnings.warn("train and test samples overlap; the result is optimistic", stacklevel=2)
    Xtr, ytr = samples_to_xy(train_samples)
    Xte, yte = samples_to_xy(test_samples)
    _check_two_classes(ytr)
    _check_two_classes(yte)
    if standardize:
        Xtr, Xte = _standardized(Xtr, Xte)
    runs: list[RunMetrics] = []
    run_preds: list[tuple[int, ...]] = []
    scores = np.zeros(yte.shape[0])
    for r in range(n_runs):
        run_spec = replace(spec, seed=derive_seed(spec.seed, r))
        model = fit(run_spec, Xtr, ytr)
        scores = decision_score(model, Xte)
        preds = (scores >= 0.5).astype(np.int64)
        runs.append(RunMetrics(cm=confusion(yte, preds)))
        run_preds.append(tuple(int(p) for p in preds))
    points, auc = roc_auc(yte, scores)
    return EvalReport(
        spec=spec,
        n_runs=n_runs,
        runs=tuple(runs),
        mean_sensitivity=float(np.mean([m.sensitivity for m in runs])),
        mean_specificity=float(np.mean([m.specificity for m in runs])),
        mean_accuracy=float(np.mean([m.accuracy for m in runs])),
        roc_points=tuple(points),
        auc=auc,
        predictions=_mk_predictions(test_samples, yte, scores),
        run_predictions=tuple(run_preds),
    )


def report_to_dict(report: EvalReport) -> dict:
    """JSON-ready view of a report (deterministic for identical inputs)."""
    return {
        "n_runs": report.n_runs,
        "n_samples": len(report.predictions),
        "runs": [
            {
                "confusion": {"tp": m.cm.tp, "fp": m.cm.fp, "tn": m.cm.tn, "fn": m.cm.fn},
                "sensitivity": m.sensitivity,
                "specificity": m.specificity,
                "accuracy": m.accuracy,
            }
            for m in report.runs
        ],
        "mean": {
            "sensitivity": report.mean_sensitivity,
            "specificity": report.mean_specificity,
            "accuracy": report.mean_accuracy,
        },
        "auc": report.auc,
        "roc": [[x, y] for x, y in report.roc_points],
        "predictions": [
            {
                "student_id": p.student_id,
                "trial_id": p.trial_id,
                "window_index": p.window_index,
                "y_true": p.y_true,
                "y_pred": p.y_pred,
                "score": p.score,
            }
            for p in report.predictions
        ],
    }
