"""Exhaustive parameter grids, grid search, and cost-weight search.

Built-in grids reproduce the published search tables verbatim, one axis per
table column, values in table order. Cells are enumerated row-major over
those axes and scored by mean LOOCV accuracy; ties keep the earliest cell.
A cell whose parameters name an unsupported variant stays on the leaderboard
with a score of -inf.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, replace
from typing import Any, Mapping, Optional, Sequence

import numpy as np

from .aggregate import AggregatedSample
from .errors import SchemaError, UnknownKindError, UnsupportedParamError
from .learners import (
    ADABOOST_RF,
    DECISION_TREE,
    GAUSSIAN_NB,
    GRADBOOST,
    KNN_KIND,
    RANDOM_FOREST,
    SVM,
    ClassifierSpec,
    spec_to_dict,
)
from .parallel import map_ordered

DATASETS = ("2018", "2021", "joined")

SEARCH_RUNS = 3  # cheap objective inside a search; final reports use 10


@dataclass(frozen=True)
class ParamGrid:
    """Ordered axes of a Cartesian parameter grid for one classifier kind."""

    kind: str
    axes: Mapping[str, tuple[Any, ...]]

    def n_cells(self) -> int:
        out = 1
        for values in self.axes.values():
            out *= len(values)
        return out


@dataclass(frozen=True)
class TuneResult:
    best_spec: ClassifierSpec
    best_score: float
    leaderboard: tuple[tuple[ClassifierSpec, float], ...]


@dataclass(frozen=True)
class CostWeightResult:
    minority_label: int
    best_weight: float
    best_score: float
    leaderboard: tuple[tuple[float, float], ...]


_BUILTIN_AXES: dict[str, dict[str, tuple[Any, ...]]] = {
    KNN_KIND: {
        "algorithm": ("auto", "ball_tree", "kd_tree", "brute"),
        "weights": ("uniform", "distance"),
        "p": (1, 2),
        "n_neighbors": (1, 2, 3, 4, 5, 6, 7),
    },
    GRADBOOST: {
        "booster": ("gbtree", "linear", "dart"),
        "n_estimators": (20, 50, 75, 100, 200),
        "learning_rate": (0.1, 0.5, 0.6, 0.7, 0.8, 1.0),
    },
    SVM: {
        "kernel": ("poly", "linear", "sigmoid", "rbf"),
        "C": (1, 10, 100, 1000),
        "gamma": ("auto", "scale"),
    },
    GAUSSIAN_NB: {
        "var_smoothing": (1e-5, 1e-6, 1e-7, 1e-8, 1e-9, 1e-10, 1e-11, 1e-12, 1e-15),
    },
    RANDOM_FOREST: {
        "bootstrap": (True, False),
        "n_estimators": (10, 50, 100, 200),
        "max_features": ("log2", "sqrt", None),
        "max_depth": (10, 20, 30, 40, 50, 60, 70, 80, 90, 100, None),
        "min_samples_leaf": (1, 2, 4),
        "min_samples_split": (2, 5, 10),
    },
    DECISION_TREE: {
        "criterion": ("gini", "entropy"),
        "max_depth": (5, 8, 10, 20, 30, 40, 50, 60, 70, 80, 90, 100, None),
        "max_features": (5, 6, 7, 8, 9, 10, 11, 12, 13, "sqrt", "log2", None),
        "min_samples_leaf": (1, 2, 4),
        "min_samples_split": (2, 5, 10),
    },
}

_RF_BEST: dict[str, dict[str, Any]] = {
    "2018": {
        "bootstrap": True,
        "n_estimators": 50,
        "max_features": None,
        "max_depth": None,
        "min_samples_leaf": 2,
        "min_samples_split": 10,
    },
    "2021": {
        "bootstrap": True,
        "n_estimators": 100,
        "max_features": "sqrt",
        "max_depth": 60,
        "min_samples_leaf": 2,
        "min_samples_split": 10,
    },
    "joined": {
        "bootstrap": False,
        "n_estimators": 100,
        "max_features": "sqrt",
        "max_depth": 90,
        "min_samples_leaf": 1,
        "min_samples_split": 10,
    },
}

_BUILTIN_BEST: dict[str, dict[str, dict[str, Any]]] = {
    SVM: {
        "2018": {"kernel": "rbf", "C": 1, "gamma": "auto"},
        "2021": {"kernel": "rbf", "C": 10, "gamma": "auto"},
        "joined": {"kernel": "rbf", "C": 1, "gamma": "auto"},
    },
    GAUSSIAN_NB: {ds: {"var_smoothing": 1e-11} for ds in DATASETS},
    KNN_KIND: {
        "2018": {"algorithm": "auto", "weights": "uniform", "p": 1, "n_neighbors": 2},
        "2021": {"algorithm": "auto", "weights": "distance", "p": 2, "n_neighbors": 4},
        "joined": {"algorithm": "auto", "weights": "distance", "p": 1, "n_neighbors": 6},
    },
    GRADBOOST: {
        "2018": {"booster": "gbtree", "n_estimators": 20, "learning_rate": 0.6},
        "2021": {"booster": "gbtree", "n_estimators": 50, "learning_rate": 0.6},
        "joined": {"booster": "gbtree", "n_estimators": 200, "learning_rate": 0.8},
    },
    RANDOM_FOREST: _RF_BEST,
    DECISION_TREE: {
        "2018": {
            "criterion": "gini",
            "max_depth": 90,
            "max_features": "sqrt",
            "min_samples_leaf": 1,
            "min_samples_split": 5,
        },
        "2021": {
            "criterion": "gini",
            "max_depth": 5,
            "max_features": "sqrt",
            "min_samples_leaf": 1,
            "min_samples_split": 5,
        },
        "joined": {
            "criterion": "gini",
            "max_depth": None,
            "max_features": 9,
            "min_samples_leaf": 4,
            "min_samples_split": 10,
        },
    },
    # the boosted ensemble reuses each dataset's selected forest as its base
    ADABOOST_RF: {ds: {"n_estimators": 10, "rf_params": dict(_RF_BEST[ds])} for ds in DATASETS},
}


def builtin_grid(kind: str) -> ParamGrid:
    """The published search grid for one of the six tabled kinds."""
    if kind not in _BUILTIN_AXES:
        raise UnknownKindError(f"no built-in grid for kind {kind!r}")
    return ParamGrid(kind=kind, axes={k: tuple(v) for k, v in _BUILTIN_AXES[kind].items()})


def builtin_best(kind: str, dataset: str) -> dict[str, Any]:
    """The selected configuration for a kind on one of the three datasets."""
    if kind not in _BUILTIN_BEST:
        raise UnknownKindError(f"no built-in selection for kind {kind!r}")
    if dataset not in DATASETS:
        raise UnknownKindError(f"unknown dataset {dataset!r}; expected one of {DATASETS}")
    return dict(_BUILTIN_BEST[kind][dataset])


def grid_from_dict(doc: Mapping[str, Any]) -> ParamGrid:
    """Build a grid from a JSON document {"kind": ..., "axes": {...}}."""
    try:
        kind = doc["kind"]
        axes = doc["axes"]
    except (KeyError, TypeError):
        raise SchemaError("grid document needs 'kind' and 'axes' entries") from None
    if not isinstance(axes, Mapping) or not axes:
        raise SchemaError("grid 'axes' must be a non-empty mapping")
    return ParamGrid(kind=kind, axes={k: tuple(v) for k, v in axes.items()})


def enumerate_cells(grid: ParamGrid) -> list[dict[str, Any]]:
    """Row-major Cartesian enumeration of the grid's axes."""
    names = list(grid.axes)
    out = []
    for combo in itertools.product(*(grid.axes[name] for name in names)):
        out.append(dict(zip(names, combo)))
    return out


def _eval_cell(task: tuple[tuple[AggregatedSample, ...], ClassifierSpec, int]) -> float:
    from .evaluate import loocv  # local import keeps module import acyclic

    samples, spec, n_runs = task
    try:
        return loocv(list(samples), spec, n_runs=n_runs).mean_accuracy
    except UnsupportedParamError:
        return float("-inf")


def grid_search(
    samples: Sequence[AggregatedSample],
    kind: str,
    grid: Optional[ParamGrid] = None,
    n_runs: int = SEARCH_RUNS,
    seed: int = 0,
    class_weight: Optional[Mapping[int, float]] = None,
) -> TuneResult:
    """Score every cell by mean LOOCV accuracy; first best cell wins.

    The searched data is also the data the winner will be reported on; there
    is no nested split, so treat the winning score as optimistic.
    """
    if grid is None:
        grid = builtin_grid(kind)
    if grid.kind != kind:
        raise UnsupportedParamError(f"grid is for kind {grid.kind!r}, not {kind!r}")
    cells = enumerate_cells(grid)
    if not cells:
        raise ValueError("grid has no cells")
    cw = dict(class_weight) if class_weight is not None else {0: 1.0, 1: 1.0}
    specs = [ClassifierSpec(kind=kind, params=cell, class_weight=cw, seed=seed) for cell in cells]
    frozen = tuple(samples)
    scores = map_ordered(_eval_cell, [(frozen, spec, n_runs) for spec in specs])
    best_i = int(np.argmax(scores))  # argmax keeps the first of tied cells
    return TuneResult(
        best_spec=specs[best_i],
        best_score=float(scores[best_i]),
        leaderboard=tuple(zip(specs, (float(s) for s in scores))),
    )


def cost_weight_search(
    samples: Sequence[AggregatedSample],
    spec: ClassifierSpec,
    weight_candidates: Sequence[float],
    n_runs: int = SEARCH_RUNS,
) -> CostWeightResult:
    """Search a class-weight multiplier for the minority class.

    The minority class is the less frequent label among the samples; an even
    split falls back to label 1. The candidate list must include 1.0 so the
    unweighted model is always on the leaderboard.
    """
    weights = [float(w) for w in weight_candidates]
    if not any(w == 1.0 for w in weights):
        raise ValueError("weight candidates must include 1.0")
    labels = [s.label for s in samples]
    n1 = sum(1 for v in labels if v == 1)
    n0 = len(labels) - n1
    minority = 1 if n1 <= n0 else 0
    from .evaluate import loocv

    board: list[tuple[float, float]] = []
    for w in weights:
        cw = {0: 1.0, 1: 1.0}
        cw[minority] = w
        trial_spec = replace(spec, class_weight=cw)
        board.append((w, loocv(list(samples), trial_spec, n_runs=n_runs).mean_accuracy))
    best_i = int(np.argmax([score for _, score in board]))
    return CostWeightResult(
        minority_label=minority,
        best_weight=board[best_i][0],
        best_score=board[best_i][1],
        leaderboard=tuple(board),
    )


def _json_score(score: float) -> Optional[float]:
    return None if score == float("-inf") else score


def tune_result_to_dict(result: TuneResult) -> dict:
    """JSON-ready form; unsupported cells carry a null score."""
    return {
        "best_spec": spec_to_dict(result.best_spec),
        "best_score": _json_score(result.best_score),
        "leaderboard": [
            {"params": dict(spec.params), "score": _json_score(score)}
            for spec, score in result.leaderboard
        ],
    }
