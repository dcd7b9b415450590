"""Gradient-boosted trees on the binary logistic loss.

Each stage fits a regression tree to the loss gradients g = p - y and sets
leaf values by a damped Newton step -sum(w*g) / (sum(w*h) + lambda) with
h = p * (1 - p) and lambda fixed at 1. Only the tree booster exists; the
linear and dart variants are named but unsupported. The model keeps its
weighted training loss after every stage for convergence checks.
"""
from __future__ import annotations

import math

import numpy as np

from ..errors import UnsupportedParamError
from .tree import GradientTree

REG_LAMBDA = 1.0
BOOSTERS = ("gbtree", "linear", "dart")


def _sigmoid(z: np.ndarray) -> np.ndarray:
    return 1.0 / (1.0 + np.exp(np.clip(-z, -745.0, 745.0)))


def _logistic_loss(y: np.ndarray, p: np.ndarray, w: np.ndarray) -> float:
    p = np.clip(p, 1e-12, 1.0 - 1e-12)
    per = -(y * np.log(p) + (1.0 - y) * np.log(1.0 - p))
    return float((w * per).sum() / w.sum())


class GradBoost:
    def __init__(
        self,
        booster: str = "gbtree",
        n_estimators: int = 100,
        learning_rate: float = 0.3,
        max_depth: int = 3,
    ):
        if booster not in BOOSTERS:
            raise UnsupportedParamError(f"booster={booster!r} not supported")
        if booster != "gbtree":
            raise UnsupportedParamError(f"booster={booster!r} is named but not implemented; use gbtree")
        if int(n_estimators) < 0:
            raise UnsupportedParamError("n_estimators must be non-negative")
        if not (learning_rate >= 0.0 and math.isfinite(learning_rate)):
            raise UnsupportedParamError("learning_rate must be finite and non-negative")
        self.booster = booster
        self.n_estimators = int(n_estimators)
        self.learning_rate = float(learning_rate)
        self.max_depth = int(max_depth)
        self.base_score: float = 0.0
        self.trees: list[GradientTree] = []
        self.train_losses: list[float] = []

    def fit(self, X: np.ndarray, y: np.ndarray, w: np.ndarray) -> "GradBoost":
        y = np.asarray(y, dtype=np.float64)
        w = np.asarray(w, dtype=np.float64)
        p1 = float(w[y == 1].sum() / w.sum())
        p1 = min(max(p1, 1e-12), 1.0 - 1e-12)
        self.base_score = math.log(p1 / (1.0 - p1))
        F = np.full(X.shape[0], self.base_score)
        self.trees = []
        self.train_losses = [_logistic_loss(y, _sigmoid(F), w)]
        for _ in range(self.n_estimators):
            p = _sigmoid(F)
            g = p - y
            h = p * (1.0 - p)
            tree = GradientTree(max_depth=self.max_depth, reg_lambda=REG_LAMBDA)
            tree.fit(X, g, h, w)
            F = F + self.learning_rate * tree.predict_value(X)
            self.trees.append(tree)
            self.train_losses.append(_logistic_loss(y, _sigmoid(F), w))
        return self

    def _raw(self, X: np.ndarray) -> np.ndarray:
        X = np.asarray(X, dtype=np.float64)
        F = np.full(X.shape[0], self.base_score)
        for tree in self.trees:
            F += self.learning_rate * tree.predict_value(X)
        return F

    def score01(self, X: np.ndarray) -> np.ndarray:
        return _sigmoid(self._raw(X))

    def to_state(self) -> dict:
        return {
            "base_score": self.base_score,
            "learning_rate": self.learning_rate,
            "train_losses": list(self.train_losses),
            "trees": [t.to_state() for t in self.trees],
        }

    @classmethod
    def from_state(cls, state: dict) -> "GradBoost":
        model = cls(n_estimators=len(state["trees"]), learning_rate=state["learning_rate"])
        model.base_score = float(state["base_score"])
        model.train_losses = [float(v) for v in state["train_losses"]]
        model.trees = [GradientTree.from_state(s) for s in state["trees"]]
        return model
