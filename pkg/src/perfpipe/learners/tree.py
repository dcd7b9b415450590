"""Binary classification and regression trees with weighted greedy splits.

Splits are exact: every midpoint between consecutive distinct sorted values
of a candidate feature is scored, and the lowest weighted child impurity
wins. Ties go to the earliest candidate in scan order, which makes a tree
fully deterministic once its feature order is fixed. Randomness enters only
through per-node feature subsampling when ``max_features`` restricts the
scan.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Union

import numpy as np

from ..errors import EmptyNodeError, UnsupportedParamError

EPS_W = 1e-300  # guards 0/0 on zero-weight partitions


def gini_impurity(w1: float, w0: float) -> float:
    """Gini impurity of a node with weighted class masses (w1, w0)."""
    total = w1 + w0
    if total <= 0.0:
        return 0.0
    p1 = w1 / total
    p0 = w0 / total
    return 1.0 - (p1 * p1 + p0 * p0)


def entropy_impurity(w1: float, w0: float) -> float:
    """Shannon entropy (bits) of a node with weighted class masses."""
    total = w1 + w0
    if total <= 0.0:
        return 0.0
    out = 0.0
    for m in (w1, w0):
        p = m / total
        if p > 0.0:
            out -= p * np.log2(p)
    return float(out)


def _impurity_curve(w1: np.ndarray, w0: np.ndarray, criterion: str) -> np.ndarray:
    total = w1 + w0
    safe = np.maximum(total, EPS_W)
    p1 = w1 / safe
    p0 = w0 / safe
    if criterion == "gini":
        imp = 1.0 - (p1 * p1 + p0 * p0)
    else:
        imp = -(
            np.where(p1 > 0.0, p1 * np.log2(np.maximum(p1, EPS_W)), 0.0)
            + np.where(p0 > 0.0, p0 * np.log2(np.maximum(p0, EPS_W)), 0.0)
        )
    return np.where(total > 0.0, imp, 0.0)


@dataclass
class Leaf:
    p1: float  # weighted class-1 fraction of the training samples here
    n: int


@dataclass
class Split:
    feature: int
    threshold: float
    left: Union["Split", Leaf]
    right: Union["Split", Leaf]


def resolve_max_features(max_features: Union[int, str, None], d: int) -> int:
    if max_features is None:
        return d
    if max_features == "sqrt":
        return max(1, int(np.sqrt(d)))
    if max_features == "log2":
        return max(1, int(np.log2(d)))
    if isinstance(max_features, (int, np.integer)) and not isinstance(max_features, bool):
        if max_features < 1:
            raise UnsupportedParamError("max_features must be at least 1")
        return min(int(max_features), d)
    raise UnsupportedParamError(f"max_features={max_features!r} not supported")


def _scan_feature(
    xv: np.ndarray,
    w1v: np.ndarray,
    w0v: np.ndarray,
    min_samples_leaf: int,
    criterion: str,
) -> Optional[tuple[float, float]]:
    """Best (weighted child impurity, threshold) along one sorted feature."""
    n = xv.shape[0]
    if n < 2 or xv[0] == xv[-1]:
        return None
    c1 = np.cumsum(w1v)[:-1]
    c0 = np.cumsum(w0v)[:-1]
    tot1 = c1[-1] + w1v[-1]
    tot0 = c0[-1] + w0v[-1]
    r1 = tot1 - c1
    r0 = tot0 - c0
    left_counts = np.arange(1, n)
    valid = (xv[1:] > xv[:-1]) & (left_counts >= min_samples_leaf) & ((n - left_counts) >= min_samples_leaf)
    if not valid.any():
        return None
    wl = c1 + c0
    wr = r1 + r0
    after = (wl * _impurity_curve(c1, c0, criterion) + wr * _impurity_curve(r1, r0, criterion)) / np.maximum(
        wl + wr, EPS_W
    )
    after = np.where(valid, after, np.inf)
    i = int(np.argmin(after))
    thr = (xv[i] + xv[i + 1]) / 2.0
    if thr >= xv[i + 1]:  # no float strictly between the two values
        thr = float(xv[i])
    return float(after[i]), float(thr)


class DecisionTree:
    """Greedy binary classification tree.

    Leaves store the weighted class-1 fraction, so the tree's score is a
    probability-like value in [0, 1]. When ``max_features`` is smaller than
    the feature count, each node scans a random permutation of features and
    stops after that many non-constant candidates, continuing past constant
    ones so a usable split is still found whenever one exists.
    """

    def __init__(
        self,
        criterion: str = "gini",
        max_depth: Optional[int] = None,
        max_features: Union[int, str, None] = None,
        min_samples_leaf: int = 1,
        min_samples_split: int = 2,
        rng: Optional[np.random.Generator] = None,
    ):
        if criterion not in ("gini", "entropy"):
            raise UnsupportedParamError(f"criterion={criterion!r} not supported")
        self.criterion = criterion
        self.max_depth = max_depth
        self.max_features = max_features
        self.min_samples_leaf = int(min_samples_leaf)
        self.min_samples_split = int(min_samples_split)
        self.rng = rng if rng is not None else np.random.default_rng(0)
        self.root: Union[Split, Leaf, None] = None

    def fit(self, X: np.ndarray, y: np.ndarray, w: np.ndarray) -> "DecisionTree":
        X = np.asarray(X, dtype=np.float64)
        y = np.asarray(y, dtype=np.int64)
        w = np.asarray(w, dtype=np.float64)
        if X.shape[0] == 0:
            raise EmptyNodeError("cannot grow a tree from zero samples")
        self._d = X.shape[1]
        self._k = resolve_max_features(self.max_features, self._d)
        self.root = self._grow(X, y, w, np.arange(X.shape[0]), depth=0)
        return self

    def _grow(self, X, y, w, idx, depth) -> Union[Split, Leaf]:
        yv = y[idx]
        wv = w[idx]
        w1 = float(wv[yv == 1].sum())
        w0 = float(wv[yv == 0].sum())
        leaf = Leaf(p1=w1 / (w1 + w0) if (w1 + w0) > 0.0 else 0.5, n=len(idx))
        if (
            w1 <= 0.0
            or w0 <= 0.0
            or len(idx) < self.min_samples_split
            or (self.max_depth is not None and depth >= self.max_depth)
        ):
            return leaf
        found = self._best_split(X, yv, wv, idx)
        if found is None:
            return leaf
        feature, threshold = found
        mask = X[idx, feature] <= threshold
        left_idx = idx[mask]
        right_idx = idx[~mask]
        if len(left_idx) == 0 or len(right_idx) == 0:
            return leaf
        return Split(
            feature=feature,
            threshold=threshold,
            left=self._grow(X, y, w, left_idx, depth + 1),
            right=self._grow(X, y, w, right_idx, depth + 1),
        )

    def _best_split(self, X, yv, wv, idx) -> Optional[tuple[int, float]]:
        if self._k < self._d:
            order = self.rng.permutation(self._d)
        else:
            order = np.arange(self._d)
        w1v_all = wv * (yv == 1)
        w0v_all = wv * (yv == 0)
        best: Optional[tuple[float, int, float]] = None
        examined = 0
        for f in order:
            if examined >= self._k and best is not None:
                break
            xs = X[idx, f]
            sort = np.argsort(xs, kind="stable")
            xv = xs[sort]
            if xv[0] == xv[-1]:
                continue  # constant feature, does not count toward the budget
            examined += 1
            found = _scan_feature(xv, w1v_all[sort], w0v_all[sort], self.min_samples_leaf, self.criterion)
            if found is None:
                continue
            after, thr = found
            if best is None or after < best[0]:
                best = (after, int(f), thr)
        if best is None:
            return None
        return best[1], best[2]

    def predict_p1(self, X: np.ndarray) -> np.ndarray:
        X = np.asarray(X, dtype=np.float64)
        out = np.empty(X.shape[0], dtype=np.float64)
        for i in range(X.shape[0]):
            node = self.root
            while isinstance(node, Split):
                node = node.left if X[i, node.feature] <= node.threshold else node.right
            out[i] = node.p1
        return out

    def score01(self, X: np.ndarray) -> np.ndarray:
        return self.predict_p1(X)

    def to_state(self) -> dict:
        def enc(node):
            if isinstance(node, Leaf):
                return {"p1": node.p1, "n": node.n}
            return {"f": node.feature, "t": node.threshold, "l": enc(node.left), "r": enc(node.right)}

        return {
            "criterion": self.criterion,
            "root": enc(self.root),
        }

    @classmethod
    def from_state(cls, state: dict) -> "DecisionTree":
        def dec(doc):
            if "p1" in doc:
                return Leaf(p1=float(doc["p1"]), n=int(doc["n"]))
            return Split(feature=int(doc["f"]), threshold=float(doc["t"]), left=dec(doc["l"]), right=dec(doc["r"]))

        tree = cls(criterion=state["criterion"])
        tree.root = dec(state["root"])
        return tree


@dataclass
class RegLeaf:
    value: float
    n: int


@dataclass
class RegSplit:
    feature: int
    threshold: float
    left: Union["RegSplit", RegLeaf]
    right: Union["RegSplit", RegLeaf]


class GradientTree:
    """Regression tree over per-sample gradients with Newton leaf values.

    Structure minimizes the weighted squared error of the gradient targets;
    each leaf then stores -sum(w*g) / (sum(w*h) + reg_lambda).
    """

    def __init__(
        self,
        max_depth: int = 3,
        min_samples_leaf: int = 1,
        min_samples_split: int = 2,
        reg_lambda: float = 1.0,
    ):
        self.max_depth = int(max_depth)
        self.min_samples_leaf = int(min_samples_leaf)
        self.min_samples_split = int(min_samples_split)
        self.reg_lambda = float(reg_lambda)
        self.root: Union[RegSplit, RegLeaf, None] = None

    def fit(self, X: np.ndarray, g: np.ndarray, h: np.ndarray, w: np.ndarray) -> "GradientTree":
        X = np.asarray(X, dtype=np.float64)
        if X.shape[0] == 0:
            raise EmptyNodeError("cannot grow a tree from zero samples")
        self._d = X.shape[1]
        self.root = self._grow(X, g, h, w, np.arange(X.shape[0]), depth=0)
        return self

    def _leaf(self, g, h, w, idx) -> RegLeaf:
        num = float(np.sum(w[idx] * g[idx]))
        den = float(np.sum(w[idx] * h[idx])) + self.reg_lambda
        return RegLeaf(value=-num / den, n=len(idx))

    def _grow(self, X, g, h, w, idx, depth) -> Union[RegSplit, RegLeaf]:
        if len(idx) < self.min_samples_split or depth >= self.max_depth:
            return self._leaf(g, h, w, idx)
        found = self._best_split(X, g, w, idx)
        if found is None:
            return self._leaf(g, h, w, idx)
        feature, threshold = found
        mask = X[idx, feature] <= threshold
        left_idx = idx[mask]
        right_idx = idx[~mask]
        if len(left_idx) == 0 or len(right_idx) == 0:
            return self._leaf(g, h, w, idx)
        return RegSplit(
            feature=feature,
            threshold=threshold,
            left=self._grow(X, g, h, w, left_idx, depth + 1),
            right=self._grow(X, g, h, w, right_idx, depth + 1),
        )

    def _best_split(self, X, g, w, idx) -> Optional[tuple[int, float]]:
        best: Optional[tuple[float, int, float]] = None
        gv_all = g[idx]
        wv_all = w[idx]
        n = len(idx)
        for f in range(self._d):
            xs = X[idx, f]
            sort = np.argsort(xs, kind="stable")
            xv = xs[sort]
            if n < 2 or xv[0] == xv[-1]:
                continue
            wv = wv_all[sort]
            tv = gv_all[sort]
            cw = np.cumsum(wv)[:-1]
            cwt = np.cumsum(wv * tv)[:-1]
            cwt2 = np.cumsum(wv * tv * tv)[:-1]
            tw = cw[-1] + wv[-1]
            twt = cwt[-1] + wv[-1] * tv[-1]
            twt2 = cwt2[-1] + wv[-1] * tv[-1] * tv[-1]
            rw = tw - cw
            rwt = twt - cwt
            rwt2 = twt2 - cwt2
            left_counts = np.arange(1, n)
            valid = (
                (xv[1:] > xv[:-1])
                & (left_counts >= self.min_samples_leaf)
                & ((n - left_counts) >= self.min_samples_leaf)
            )
            if not valid.any():
                continue
            sse = (cwt2 - cwt * cwt / np.maximum(cw, EPS_W)) + (rwt2 - rwt * rwt / np.maximum(rw, EPS_W))
            sse = np.where(valid, sse, np.inf)
            i = int(np.argmin(sse))
            thr = (xv[i] + xv[i + 1]) / 2.0
            if thr >= xv[i + 1]:
                thr = float(xv[i])
            if best is None or sse[i] < best[0]:
                best = (float(sse[i]), f, float(thr))
        if best is None:
            return None
        return best[1], best[2]

    def predict_value(self, X: np.ndarray) -> np.ndarray:
        X = np.asarray(X, dtype=np.float64)
        out = np.empty(X.shape[0], dtype=np.float64)
        for i in range(X.shape[0]):
            node = self.root
            while isinstance(node, RegSplit):
                node = node.left if X[i, node.feature] <= node.threshold else node.right
            out[i] = node.value
        return out

    def to_state(self) -> dict:
        def enc(node):
            if isinstance(node, RegLeaf):
                return {"v": node.value, "n": node.n}
            return {"f": node.feature, "t": node.threshold, "l": enc(node.left), "r": enc(node.right)}

        return {"max_depth": self.max_depth, "reg_lambda": self.reg_lambda, "root": enc(self.root)}

    @classmethod
    def from_state(cls, state: dict) -> "GradientTree":
        def dec(doc):
            if "v" in doc:
                return RegLeaf(value=float(doc["v"]), n=int(doc["n"]))
            return RegSplit(feature=int(doc["f"]), threshold=float(doc["t"]), left=dec(doc["l"]), right=dec(doc["r"]))

        tree = cls(max_depth=state["max_depth"], reg_lambda=state["reg_lambda"])
        tree.root = dec(state["root"])
        return tree
