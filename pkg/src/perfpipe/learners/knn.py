"""k-nearest-neighbor classifier.

The ``algorithm`` parameter is accepted for interface compatibility and
treated as a lookup hint only: every choice computes the same brute-force
distances, so predictions never depend on it. Distance ties at the k-th
neighbor break by training index, which keeps predictions deterministic.
"""
from __future__ import annotations

import numpy as np

from ..errors import UnsupportedParamError

ALGORITHMS = ("auto", "ball_tree", "kd_tree", "brute")
WEIGHTINGS = ("uniform", "distance")


class KNN:
    def __init__(
        self,
        n_neighbors: int = 5,
        weights: str = "uniform",
        p: int = 2,
        algorithm: str = "auto",
    ):
        if int(n_neighbors) < 1:
            raise UnsupportedParamError("n_neighbors must be at least 1")
        if weights not in WEIGHTINGS:
            raise UnsupportedParamError(f"weights={weights!r} not supported")
        if p not in (1, 2):
            raise UnsupportedParamError(f"p={p!r} not supported, use 1 or 2")
        if algorithm not in ALGORITHMS:
            raise UnsupportedParamError(f"algorithm={algorithm!r} not supported")
        self.n_neighbors = int(n_neighbors)
        self.weights = weights
        self.p = int(p)
        self.algorithm = algorithm
        self.X: np.ndarray | None = None
        self.y: np.ndarray | None = None
        self.w: np.ndarray | None = None

    def fit(self, X: np.ndarray, y: np.ndarray, w: np.ndarray) -> "KNN":
        self.X = np.asarray(X, dtype=np.float64)
        self.y = np.asarray(y, dtype=np.int64)
        self.w = np.asarray(w, dtype=np.float64)
        return self

    def _distances(self, Q: np.ndarray) -> np.ndarray:
        diff = Q[:, None, :] - self.X[None, :, :]
        if self.p == 1:
            return np.abs(diff).sum(axis=2)
        return np.sqrt((diff * diff).sum(axis=2))

    def score01(self, Q: np.ndarray) -> np.ndarray:
        Q = np.asarray(Q, dtype=np.float64)
        # n_neighbors is clamped so leave-one-out on tiny sets stays defined
        k = min(self.n_neighbors, self.X.shape[0])
        dist = self._distances(Q)
        order = np.argsort(dist, axis=1, kind="stable")[:, :k]
        rows = np.arange(Q.shape[0])[:, None]
        nd = dist[rows, order]
        ny = self.y[order]
        nw = self.w[order]
        if self.weights == "uniform":
            kern = np.ones_like(nd)
        else:
            exact = nd == 0.0
            kern = np.where(exact.any(axis=1)[:, None], exact.astype(np.float64), 1.0 / np.maximum(nd, 1e-300))
        vote = kern * nw
        denom = vote.sum(axis=1)
        # zero-mass neighborhoods fall back to an unweighted neighbor vote
        fallback = (ny * kern).sum(axis=1) / np.maximum(kern.sum(axis=1), 1e-300)
        with np.errstate(invalid="ignore"):
            frac = (vote * ny).sum(axis=1) / denom
        return np.where(denom > 0.0, frac, fallback)

    def to_state(self) -> dict:
        return {
            "n_neighbors": self.n_neighbors,
            "weights": self.weights,
            "p": self.p,
            "algorithm": self.algorithm,
            "X": self.X.tolist(),
            "y": self.y.tolist(),
            "w": self.w.tolist(),
        }

    @classmethod
    def from_state(cls, state: dict) -> "KNN":
        knn = cls(
            n_neighbors=state["n_neighbors"],
            weights=state["weights"],
            p=state["p"],
            algorithm=state["algorithm"],
        )
        knn.X = np.asarray(state["X"], dtype=np.float64)
        knn.y = np.asarray(state["y"], dtype=np.int64)
        knn.w = np.asarray(state["w"], dtype=np.float64)
        return knn
