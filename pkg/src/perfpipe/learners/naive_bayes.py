"""Gaussian naive Bayes with weighted statistics."""
from __future__ import annotations

import numpy as np

from ..errors import UnsupportedParamError

VAR_FLOOR = 1e-30  # keeps densities finite on degenerate constant features


class GaussianNB:
    """Per-class diagonal Gaussians over weighted means and variances.

    All variances are widened by ``var_smoothing`` times the largest weighted
    per-feature variance of the pooled training matrix. The score is the
    exact two-class posterior of class 1.
    """

    def __init__(self, var_smoothing: float = 1e-9):
        if var_smoothing < 0.0:
            raise UnsupportedParamError("var_smoothing must be non-negative")
        self.var_smoothing = float(var_smoothing)
        self.log_priors: np.ndarray | None = None
        self.means: np.ndarray | None = None
        self.variances: np.ndarray | None = None

    def fit(self, X: np.ndarray, y: np.ndarray, w: np.ndarray) -> "GaussianNB":
        total = w.sum()
        global_mean = (w[:, None] * X).sum(axis=0) / total
        global_var = (w[:, None] * (X - global_mean) ** 2).sum(axis=0) / total
        eps = self.var_smoothing * float(global_var.max()) if X.shape[1] else 0.0
        means = np.empty((2, X.shape[1]))
        variances = np.empty((2, X.shape[1]))
        log_priors = np.empty(2)
        for c in (0, 1):
            mask = y == c
            wc = w[mask]
            mass = wc.sum()
            mu = (wc[:, None] * X[mask]).sum(axis=0) / mass
            var = (wc[:, None] * (X[mask] - mu) ** 2).sum(axis=0) / mass
            means[c] = mu
            variances[c] = np.maximum(var + eps, VAR_FLOOR)
            log_priors[c] = np.log(mass / total)
        self.means = means
        self.variances = variances
        self.log_priors = log_priors
        return self

    def _log_joint(self, X: np.ndarray) -> np.ndarray:
        out = np.empty((X.shape[0], 2))
        for c in (0, 1):
            var = self.variances[c]
            out[:, c] = self.log_priors[c] - 0.5 * np.sum(
                np.log(2.0 * np.pi * var) + (X - self.means[c]) ** 2 / var, axis=1
            )
        return out

    def score01(self, X: np.ndarray) -> np.ndarray:
        lj = self._log_joint(np.asarray(X, dtype=np.float64))
        # posterior of class 1 via a stable two-class softmax
        return 1.0 / (1.0 + np.exp(np.clip(lj[:, 0] - lj[:, 1], -745.0, 745.0)))

    def to_state(self) -> dict:
        return {
            "var_smoothing": self.var_smoothing,
            "log_priors": self.log_priors.tolist(),
            "means": self.means.tolist(),
            "variances": self.variances.tolist(),
        }

    @classmethod
    def from_state(cls, state: dict) -> "GaussianNB":
        nb = cls(var_smoothing=state["var_smoothing"])
        nb.log_priors = np.asarray(state["log_priors"], dtype=np.float64)
        nb.means = np.asarray(state["means"], dtype=np.float64)
        nb.variances = np.asarray(state["variances"], dtype=np.float64)
        return nb
