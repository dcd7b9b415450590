"""Multiclass-exponential-loss boosting over a forest base learner.

Stage weights use the K-class formulation alpha = ln((1-err)/err) + ln(K-1),
which reduces to the classic two-class rule at K=2. A stage with weighted
error at or above 1 - 1/K is discarded and the sample weights reset to
uniform; a perfect stage receives a capped weight and stops the ensemble.
The ensemble score is the stage-weight-normalized share of votes for class 1.
"""
from __future__ import annotations

import math

import numpy as np

from ..errors import DegenerateStageError, UnsupportedParamError
from ..seeding import derive_seed
from .forest import RandomForest

ALPHA_CAP = math.log(1e10)


def samme_stage(
    predictions: np.ndarray,
    y: np.ndarray,
    w: np.ndarray,
    n_classes: int = 2,
) -> tuple[float, np.ndarray]:
    """One boosting update: stage weight and reweighted samples.

    Raises ``DegenerateStageError`` when the weighted error is 0 (caller
    should keep the stage with a capped weight and stop) or at least
    1 - 1/n_classes (caller should discard the stage).
    """
    predictions = np.asarray(predictions)
    y = np.asarray(y)
    w = np.asarray(w, dtype=np.float64)
    miss = predictions != y
    total = w.sum()
    err = float(w[miss].sum() / total)
    if err <= 0.0:
        raise DegenerateStageError("stage is perfect on the weighted sample", err=err)
    if err >= 1.0 - 1.0 / n_classes:
        raise DegenerateStageError(f"stage error {err:.4f} is no better than chance", err=err)
    alpha = math.log((1.0 - err) / err) + math.log(n_classes - 1.0)
    w_next = w * np.exp(alpha * miss)
    w_next *= total / w_next.sum()
    return alpha, w_next


class SammeRF:
    """Boosted ensemble whose base learner is a random forest."""

    def __init__(self, n_estimators: int = 10, rf_params: dict | None = None, seed: int = 0):
        if int(n_estimators) < 1:
            raise UnsupportedParamError("n_estimators must be at least 1")
        self.n_estimators = int(n_estimators)
        self.rf_params = dict(rf_params or {})
        self.seed = int(seed)
        self.members: list[RandomForest] = []
        self.alphas: list[float] = []
        self.prior_p1: float = 0.5

    def fit(self, X: np.ndarray, y: np.ndarray, w: np.ndarray) -> "SammeRF":
        n = X.shape[0]
        total = float(w.sum())
        self.prior_p1 = float(w[y == 1].sum() / total)
        self.members = []
        self.alphas = []
        w_cur = np.asarray(w, dtype=np.float64).copy()
        for t in range(self.n_estimators):
            rf = RandomForest(seed=derive_seed(self.seed, t), **self.rf_params)
            rf.fit(X, y, w_cur)
            pred = (rf.score01(X) >= 0.5).astype(np.int64)
            try:
                alpha, w_cur = samme_stage(pred, y, w_cur)
            except DegenerateStageError as exc:
                if exc.err <= 0.0:
                    self.members.append(rf)
                    self.alphas.append(ALPHA_CAP)
                    break
                # chance-level stage: drop it and restart from uniform weights
                w_cur = np.full(n, total / n)
                continue
            self.members.append(rf)
            self.alphas.append(alpha)
        return self

    def score01(self, X: np.ndarray) -> np.ndarray:
        n = np.asarray(X).shape[0]
        alpha_sum = float(sum(self.alphas))
        if not self.members or alpha_sum <= 0.0:
            return np.full(n, self.prior_p1)
        votes = np.zeros(n, dtype=np.float64)
        for alpha, rf in zip(self.alphas, self.members):
            votes += alpha * (rf.score01(X) >= 0.5)
        return votes / alpha_sum

    def to_state(self) -> dict:
        return {
            "alphas": list(self.alphas),
            "prior_p1": self.prior_p1,
            "members": [m.to_state() for m in self.members],
        }

    @classmethod
    def from_state(cls, state: dict) -> "SammeRF":
        model = cls(n_estimators=max(1, len(state["members"])))
        model.alphas = [float(a) for a in state["alphas"]]
        model.prior_p1 = float(state["prior_p1"])
        model.members = [RandomForest.from_state(s) for s in state["members"]]
        return model
