"""Random forest over the weighted decision tree."""
from __future__ import annotations

from typing import Optional, Union

import numpy as np

from ..errors import UnsupportedParamError
from ..seeding import spawn_rng
from .tree import DecisionTree


class RandomForest:
    """Average of randomized trees.

    With ``bootstrap`` each tree trains on n indices drawn with probability
    proportional to the sample weights (drawn rows get unit weight), so
    weighting and duplication agree in distribution. Without it every tree
    sees the full weighted set and randomness comes from feature subsampling
    alone. The forest score is the mean of the trees' leaf fractions.
    """

    def __init__(
        self,
        n_estimators: int = 100,
        bootstrap: bool = True,
        max_features: Union[int, str, None] = "sqrt",
        max_depth: Optional[int] = None,
        min_samples_leaf: int = 1,
        min_samples_split: int = 2,
        seed: int = 0,
    ):
        if int(n_estimators) < 1:
            raise UnsupportedParamError("n_estimators must be at least 1")
        self.n_estimators = int(n_estimators)
        self.bootstrap = bool(bootstrap)
        self.max_features = max_features
        self.max_depth = max_depth
        self.min_samples_leaf = int(min_samples_leaf)
        self.min_samples_split = int(min_samples_split)
        self.seed = int(seed)
        self.trees: list[DecisionTree] = []

    def _make_tree(self, rng: np.random.Generator) -> DecisionTree:
        return DecisionTree(
            criterion="gini",
            max_depth=self.max_depth,
            max_features=self.max_features,
            min_samples_leaf=self.min_samples_leaf,
            min_samples_split=self.min_samples_split,
            rng=rng,
        )

    def fit(self, X: np.ndarray, y: np.ndarray, w: np.ndarray) -> "RandomForest":
        n = X.shape[0]
        self.trees = []
        ones = np.ones(n, dtype=np.float64)
        prob = w / w.sum()
        for t in range(self.n_estimators):
            rng = spawn_rng(self.seed, t)
            tree = self._make_tree(rng)
            if self.bootstrap:
                idx = rng.choice(n, size=n, replace=True, p=prob)
                tree.fit(X[idx], y[idx], ones)
            else:
                tree.fit(X, y, w)
            self.trees.append(tree)
        return self

    def score01(self, X: np.ndarray) -> np.ndarray:
        acc = np.zeros(X.shape[0], dtype=np.float64)
        for tree in self.trees:
            acc += tree.predict_p1(X)
        return acc / len(self.trees)

    def to_state(self) -> dict:
        return {"trees": [t.to_state() for t in self.trees]}

    @classmethod
    def from_state(cls, state: dict) -> "RandomForest":
        forest = cls(n_estimators=max(1, len(state["trees"])))
        forest.trees = [DecisionTree.from_state(s) for s in state["trees"]]
        return forest
