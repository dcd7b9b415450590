"""Pairwise kernel functions for the margin classifier."""
from __future__ import annotations

import numpy as np

from ..errors import UnsupportedParamError

KERNELS = ("rbf", "linear", "poly", "sigmoid")


def resolve_gamma(gamma: str | float, X: np.ndarray) -> float:
    """Resolve a gamma token against the training matrix.

    "auto" is 1/d; "scale" is 1/(d * v) where v is the mean per-feature
    population variance (1/d when v is zero).
    """
    d = X.shape[1]
    if gamma == "auto":
        return 1.0 / d
    if gamma == "scale":
        v = float(np.mean(np.var(X, axis=0)))
        return 1.0 / (d * v) if v > 0.0 else 1.0 / d
    g = float(gamma)
    if not g > 0.0:
        raise UnsupportedParamError(f"gamma must be positive, got {gamma!r}")
    return g


def kernel_matrix(
    kind: str,
    A: np.ndarray,
    B: np.ndarray,
    gamma: float,
    degree: int = 3,
    coef0: float = 0.0,
) -> np.ndarray:
    """Gram matrix K[i, j] = k(A[i], B[j])."""
    if kind == "linear":
        return A @ B.T
    if kind == "rbf":
        sq = (
            np.sum(A * A, axis=1)[:, None]
            + np.sum(B * B, axis=1)[None, :]
            - 2.0 * (A @ B.T)
        )
        np.maximum(sq, 0.0, out=sq)
        return np.exp(-gamma * sq)
    if kind == "poly":
        return (gamma * (A @ B.T) + coef0) ** degree
    if kind == "sigmoid":
        return np.tanh(gamma * (A @ B.T) + coef0)
    raise UnsupportedParamError(f"unknown kernel {kind!r}")
