"""Soft-margin kernel SVM trained by sequential minimal optimization.

The dual is solved pairwise: each step picks two multipliers, optimizes them
analytically under the box constraints 0 <= alpha_i <= C_i, and updates a
full error cache. Per-sample costs C_i = C * w_i carry both sample weights
and class weights. The raw margin is squashed through a unit-slope logistic
to give a probability-like score, so score >= 0.5 exactly when the margin is
non-negative.
"""
from __future__ import annotations

import numpy as np

from ..errors import ConvergenceError, UnsupportedParamError
from ..seeding import spawn_rng
from .kernels import KERNELS, kernel_matrix, resolve_gamma

ALPHA_TOL = 1e-12


class SVC:
    def __init__(
        self,
        kernel: str = "rbf",
        C: float = 1.0,
        gamma: str | float = "scale",
        degree: int = 3,
        coef0: float = 0.0,
        tol: float = 1e-3,
        seed: int = 0,
    ):
        if kernel not in KERNELS:
            raise UnsupportedParamError(f"kernel={kernel!r} not supported")
        if not C > 0.0:
            raise UnsupportedParamError("C must be positive")
        self.kernel = kernel
        self.C = float(C)
        self.gamma = gamma
        self.degree = int(degree)
        self.coef0 = float(coef0)
        self.tol = float(tol)
        self.seed = int(seed)
        self.gamma_value: float | None = None
        self.sv_X: np.ndarray | None = None
        self.sv_coef: np.ndarray | None = None  # alpha_i * y_i
        self.b: float = 0.0

    def fit(self, X: np.ndarray, y01: np.ndarray, w: np.ndarray) -> "SVC":
        n = X.shape[0]
        y = (2 * np.asarray(y01, dtype=np.float64) - 1.0)
        self.gamma_value = resolve_gamma(self.gamma, X)
        K = kernel_matrix(self.kernel, X, X, self.gamma_value, self.degree, self.coef0)
        Cs = self.C * np.asarray(w, dtype=np.float64)
        alpha = np.zeros(n, dtype=np.float64)
        b = 0.0
        E = -y.copy()  # error cache: f(x_i) - y_i with all alphas at zero
        rng = spawn_rng(self.seed)
        max_steps = max(10 * n * n, 2000)
        steps = 0

        def take_step(i: int, j: int) -> bool:
            nonlocal b
            if i == j:
                return False
            ai, aj = alpha[i], alpha[j]
            yi, yj = y[i], y[j]
            if yi == yj:
                gsum = ai + aj
                L = max(0.0, gsum - Cs[i])
                H = min(Cs[j], gsum)
            else:
                L = max(0.0, aj - ai)
                H = min(Cs[j], Cs[i] + aj - ai)
            if L >= H - ALPHA_TOL:
                return False
            eta = 2.0 * K[i, j] - K[i, i] - K[j, j]
            if eta >= 0.0:  # non-negative curvature (indefinite kernel); skip the pair
                return False
            aj_new = aj - yj * (E[i] - E[j]) / eta
            aj_new = min(max(aj_new, L), H)
            if abs(aj_new - aj) < ALPHA_TOL * (aj_new + aj + ALPHA_TOL):
                return False
            ai_new = ai + yi * yj * (aj - aj_new)
            di = yi * (ai_new - ai)
            dj = yj * (aj_new - aj)
            b1 = b - E[i] - di * K[i, i] - dj * K[i, j]
            b2 = b - E[j] - di * K[i, j] - dj * K[j, j]
            if ALPHA_TOL < ai_new < Cs[i] - ALPHA_TOL:
                b_new = b1
            elif ALPHA_TOL < aj_new < Cs[j] - ALPHA_TOL:
                b_new = b2
            else:
                b_new = (b1 + b2) / 2.0
            E[:] += di * K[i, :] + dj * K[j, :] + (b_new - b)
            alpha[i] = ai_new
            alpha[j] = aj_new
            b = b_new
            return True

        def examine(i: int) -> bool:
            nonlocal steps
            r = E[i] * y[i]
            if not ((r < -self.tol and alpha[i] < Cs[i]) or (r > self.tol and alpha[i] > 0.0)):
                return False
            non_bound = np.flatnonzero((alpha > ALPHA_TOL) & (alpha < Cs - ALPHA_TOL))
            candidates: list[int] = []
            if non_bound.size > 0:
                j_best = int(non_bound[np.argmax(np.abs(E[i] - E[non_bound]))])
                candidates.append(j_best)
                candidates.extend(int(j) for j in rng.permutation(non_bound) if j != j_best)
            rest = np.setdiff1d(np.arange(n), non_bound, assume_unique=False)
            candidates.extend(int(j) for j in rng.permutation(rest))
            for j in candidates:
                if j == i:
                    continue
                steps += 1
                if steps > max_steps:
                    raise ConvergenceError(f"SMO exceeded {max_steps} pair steps (n={n})")
                if take_step(i, j):
                    return True
            return False

        while True:
            num_changed = sum(examine(i) for i in range(n))
            if num_changed == 0:
                break

        sv = alpha > ALPHA_TOL
        self.sv_X = np.asarray(X, dtype=np.float64)[sv].copy()
        self.sv_coef = (alpha * y)[sv].copy()
        self.b = float(b)
        return self

    def decision_function(self, Q: np.ndarray) -> np.ndarray:
        Q = np.asarray(Q, dtype=np.float64)
        if self.sv_X.shape[0] == 0:
            return np.full(Q.shape[0], self.b)
        Kq = kernel_matrix(self.kernel, Q, self.sv_X, self.gamma_value, self.degree, self.coef0)
        return Kq @ self.sv_coef + self.b

    def score01(self, Q: np.ndarray) -> np.ndarray:
        f = self.decision_function(Q)
        return 1.0 / (1.0 + np.exp(np.clip(-f, -745.0, 745.0)))

    def to_state(self) -> dict:
        return {
            "kernel": self.kernel,
            "gamma_value": self.gamma_value,
            "degree": self.degree,
            "coef0": self.coef0,
            "b": self.b,
            "sv_X": self.sv_X.tolist(),
            "sv_coef": self.sv_coef.tolist(),
        }

    @classmethod
    def from_state(cls, state: dict) -> "SVC":
        svc = cls(kernel=state["kernel"], degree=state["degree"], coef0=state["coef0"])
        svc.gamma_value = float(state["gamma_value"])
        svc.b = float(state["b"])
        svc.sv_X = np.asarray(state["sv_X"], dtype=np.float64)
        svc.sv_coef = np.asarray(state["sv_coef"], dtype=np.float64)
        return svc
