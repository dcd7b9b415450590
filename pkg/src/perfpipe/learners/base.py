"""Classifier specs, the shared fit/predict/score contract, and model I/O.

A ``ClassifierSpec`` names one of seven supported kinds with its parameters,
class weights, and a seed. Fitting always goes through the same pipeline:
validate inputs, fold class weights into per-sample weights (renormalized to
mean 1), then dispatch to the kind's implementation. Every trained model
exposes a decision score in [0, 1], and the predicted label is 1 exactly
when the score is at least 0.5.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Mapping, Optional

import numpy as np

from ..errors import (
    DimensionMismatchError,
    LengthMismatchError,
    SchemaError,
    SingleClassError,
    UnknownKindError,
    UnsupportedParamError,
)
from ..seeding import spawn_rng
from .forest import RandomForest
from .gradboost import GradBoost
from .knn import KNN
from .naive_bayes import GaussianNB
from .samme import SammeRF
from .svm import SVC
from .tree import DecisionTree

DECISION_TREE = "decision_tree"
RANDOM_FOREST = "random_forest"
SVM = "svm"
GAUSSIAN_NB = "gaussian_nb"
KNN_KIND = "knn"
ADABOOST_RF = "adaboost_rf"
GRADBOOST = "gradboost"

KINDS = (DECISION_TREE, RANDOM_FOREST, SVM, GAUSSIAN_NB, KNN_KIND, ADABOOST_RF, GRADBOOST)

MODEL_FORMAT = "model/v1"

_TREE_KEYS = ("max_depth", "max_features", "min_samples_leaf", "min_samples_split")

ALLOWED_PARAMS: dict[str, frozenset[str]] = {
    DECISION_TREE: frozenset(("criterion",) + _TREE_KEYS),
    RANDOM_FOREST: frozenset(("bootstrap", "n_estimators") + _TREE_KEYS),
    SVM: frozenset(("kernel", "C", "gamma", "degree", "coef0", "tol")),
    GAUSSIAN_NB: frozenset(("var_smoothing",)),
    KNN_KIND: frozenset(("n_neighbors", "weights", "p", "algorithm")),
    ADABOOST_RF: frozenset(("n_estimators", "rf_params")),
    GRADBOOST: frozenset(("booster", "n_estimators", "learning_rate", "max_depth")),
}

DEFAULT_PARAMS: dict[str, dict[str, Any]] = {
    DECISION_TREE: {
        "criterion": "gini",
        "max_depth": None,
        "max_features": None,
        "min_samples_leaf": 1,
        "min_samples_split": 2,
    },
    RANDOM_FOREST: {
        "bootstrap": True,
        "n_estimators": 100,
        "max_features": "sqrt",
        "max_depth": None,
        "min_samples_leaf": 1,
        "min_samples_split": 2,
    },
    SVM: {"kernel": "rbf", "C": 1.0, "gamma": "scale", "degree": 3, "coef0": 0.0, "tol": 1e-3},
    GAUSSIAN_NB: {"var_smoothing": 1e-9},
    KNN_KIND: {"n_neighbors": 5, "weights": "uniform", "p": 2, "algorithm": "auto"},
    # a small base forest keeps ten boosting stages tractable
    ADABOOST_RF: {"n_estimators": 10, "rf_params": {"n_estimators": 10}},
    GRADBOOST: {"booster": "gbtree", "n_estimators": 100, "learning_rate": 0.3, "max_depth": 3},
}


@dataclass(frozen=True)
class ClassifierSpec:
    """What to train: a kind, its parameters, class weights, and a seed."""

    kind: str
    params: Mapping[str, Any] = field(default_factory=dict)
    class_weight: Mapping[int, float] = field(default_factory=lambda: {0: 1.0, 1: 1.0})
    seed: int = 0


def normalize_class_weight(raw: Mapping[Any, Any]) -> dict[int, float]:
    out = {0: 1.0, 1: 1.0}
    for key, value in raw.items():
        k = int(key)
        if k not in (0, 1):
            raise UnsupportedParamError(f"class_weight key {key!r} is not a binary label")
        v = float(value)
        if not v > 0.0:
            raise UnsupportedParamError("class weights must be positive")
        out[k] = v
    return out


def validate_spec(spec: ClassifierSpec) -> None:
    """Check the kind, the parameter key surface, and the class weights."""
    if spec.kind not in KINDS:
        raise UnknownKindError(f"unknown classifier kind {spec.kind!r}")
    unknown = set(spec.params) - ALLOWED_PARAMS[spec.kind]
    if unknown:
        raise UnsupportedParamError(f"{spec.kind} does not take parameters {sorted(unknown)}")
    if spec.kind == ADABOOST_RF:
        rf_params = spec.params.get("rf_params") or {}
        bad = set(rf_params) - ALLOWED_PARAMS[RANDOM_FOREST]
        if bad:
            raise UnsupportedParamError(f"rf_params does not take parameters {sorted(bad)}")
    normalize_class_weight(spec.class_weight)


def merged_params(spec: ClassifierSpec) -> dict[str, Any]:
    merged = dict(DEFAULT_PARAMS[spec.kind])
    merged.update(spec.params)
    return merged


def _check_counts(p: dict[str, Any]) -> None:
    if p.get("max_depth") is not None and int(p["max_depth"]) < 1:
        raise UnsupportedParamError("max_depth must be at least 1")
    if int(p.get("min_samples_leaf", 1)) < 1:
        raise UnsupportedParamError("min_samples_leaf must be at least 1")
    if int(p.get("min_samples_split", 2)) < 2:
        raise UnsupportedParamError("min_samples_split must be at least 2")


@dataclass
class TrainedModel:
    """A fitted classifier plus the spec that produced it."""

    spec: ClassifierSpec
    n_features: int
    inner: Any

    def predict(self, X: np.ndarray) -> np.ndarray:
        return predict(self, X)

    def decision_score(self, X: np.ndarray) -> np.ndarray:
        return decision_score(self, X)


def _as_matrix(X: Any) -> np.ndarray:
    X = np.asarray(X, dtype=np.float64)
    if X.ndim != 2:
        raise DimensionMismatchError(f"feature matrix must be 2-d, got shape {X.shape}")
    if not np.isfinite(X).all():
        raise ValueError("feature matrix contains non-finite values")
    return X


def _as_labels(y: Any, n: int) -> np.ndarray:
    y = np.asarray(y)
    if y.shape != (n,):
        raise LengthMismatchError(f"labels have shape {y.shape}, expected ({n},)")
    yi = y.astype(np.int64)
    if not np.array_equal(yi, y) or not np.isin(yi, (0, 1)).all():
        raise ValueError("labels must be 0 or 1")
    return yi


def effective_weights(
    spec: ClassifierSpec, y: np.ndarray, sample_weight: Optional[np.ndarray]
) -> np.ndarray:
    """Sample weights times class weights, renormalized to mean 1."""
    n = y.shape[0]
    if sample_weight is None:
        sw = np.ones(n, dtype=np.float64)
    else:
        sw = np.asarray(sample_weight, dtype=np.float64)
        if sw.shape != (n,):
            raise LengthMismatchError(f"sample_weight has shape {sw.shape}, expected ({n},)")
        if not np.isfinite(sw).all() or (sw < 0.0).any():
            raise ValueError("sample weights must be finite and non-negative")
    cw = normalize_class_weight(spec.class_weight)
    w = sw * np.where(y == 1, cw[1], cw[0])
    for c in (0, 1):
        if w[y == c].sum() <= 0.0:
            raise SingleClassError(f"class {c} has zero total weight")
    return w * (n / w.sum())


def _fit_decision_tree(spec: ClassifierSpec, X, y, w) -> DecisionTree:
    p = merged_params(spec)
    _check_counts(p)
    tree = DecisionTree(
        criterion=p["criterion"],
        max_depth=p["max_depth"],
        max_features=p["max_features"],
        min_samples_leaf=p["min_samples_leaf"],
        min_samples_split=p["min_samples_split"],
        rng=spawn_rng(spec.seed),
    )
    return tree.fit(X, y, w)


def _fit_random_forest(spec: ClassifierSpec, X, y, w) -> RandomForest:
    p = merged_params(spec)
    _check_counts(p)
    if not isinstance(p["bootstrap"], (bool, np.bool_)):
        raise UnsupportedParamError("bootstrap must be a boolean")
    forest = RandomForest(
        n_estimators=p["n_estimators"],
        bootstrap=p["bootstrap"],
        max_features=p["max_features"],
        max_depth=p["max_depth"],
        min_samples_leaf=p["min_samples_leaf"],
        min_samples_split=p["min_samples_split"],
        seed=spec.seed,
    )
    return forest.fit(X, y, w)


def _fit_svm(spec: ClassifierSpec, X, y, w) -> SVC:
    p = merged_params(spec)
    svc = SVC(
        kernel=p["kernel"],
        C=p["C"],
        gamma=p["gamma"],
        degree=p["degree"],
        coef0=p["coef0"],
        tol=p["tol"],
        seed=spec.seed,
    )
    return svc.fit(X, y, w)


def _fit_gaussian_nb(spec: ClassifierSpec, X, y, w) -> GaussianNB:
    p = merged_params(spec)
    return GaussianNB(var_smoothing=p["var_smoothing"]).fit(X, y, w)


def _fit_knn(spec: ClassifierSpec, X, y, w) -> KNN:
    p = merged_params(spec)
    knn = KNN(
        n_neighbors=p["n_neighbors"],
        weights=p["weights"],
        p=p["p"],
        algorithm=p["algorithm"],
    )
    return knn.fit(X, y, w)


def _fit_adaboost_rf(spec: ClassifierSpec, X, y, w) -> SammeRF:
    p = merged_params(spec)
    model = SammeRF(n_estimators=p["n_estimators"], rf_params=p["rf_params"], seed=spec.seed)
    return model.fit(X, y, w)


def _fit_gradboost(spec: ClassifierSpec, X, y, w) -> GradBoost:
    p = merged_params(spec)
    model = GradBoost(
        booster=p["booster"],
        n_estimators=p["n_estimators"],
        learning_rate=p["learning_rate"],
        max_depth=p["max_depth"],
    )
    return model.fit(X, y, w)


_FITTERS = {
    DECISION_TREE: _fit_decision_tree,
    RANDOM_FOREST: _fit_random_forest,
    SVM: _fit_svm,
    GAUSSIAN_NB: _fit_gaussian_nb,
    KNN_KIND: _fit_knn,
    ADABOOST_RF: _fit_adaboost_rf,
    GRADBOOST: _fit_gradboost,
}

_STATE_CLASSES = {
    DECISION_TREE: DecisionTree,
    RANDOM_FOREST: RandomForest,
    SVM: SVC,
    GAUSSIAN_NB: GaussianNB,
    KNN_KIND: KNN,
    ADABOOST_RF: SammeRF,
    GRADBOOST: GradBoost,
}


def fit(
    spec: ClassifierSpec,
    X: np.ndarray,
    y: np.ndarray,
    sample_weight: Optional[np.ndarray] = None,
) -> TrainedModel:
    """Train the classifier described by ``spec`` on a binary dataset."""
    validate_spec(spec)
    X = _as_matrix(X)
    y = _as_labels(y, X.shape[0])
    if not (y == 0).any() or not (y == 1).any():
        raise SingleClassError("training data must contain both classes")
    w = effective_weights(spec, y, sample_weight)
    inner = _FITTERS[spec.kind](spec, X, y, w)
    return TrainedModel(spec=spec, n_features=X.shape[1], inner=inner)


def _check_query(model: TrainedModel, X: np.ndarray) -> np.ndarray:
    X = np.asarray(X, dtype=np.float64)
    if X.ndim == 1 and X.size == 0:  # an empty query is valid and yields no scores
        X = X.reshape(0, model.n_features)
    X = _as_matrix(X)
    if X.shape[1] != model.n_features:
        raise DimensionMismatchError(
            f"model was fit on {model.n_features} features, got {X.shape[1]}"
        )
    return X


def decision_score(model: TrainedModel, X: np.ndarray) -> np.ndarray:
    """Probability-like score for class 1, always in [0, 1]."""
    X = _check_query(model, X)
    score = np.asarray(model.inner.score01(X), dtype=np.float64)
    return np.clip(score, 0.0, 1.0)


def predict(model: TrainedModel, X: np.ndarray) -> np.ndarray:
    """Hard labels: 1 exactly where the decision score reaches 0.5."""
    return (decision_score(model, X) >= 0.5).astype(np.int64)


def spec_to_dict(spec: ClassifierSpec) -> dict:
    return {
        "kind": spec.kind,
        "params": dict(spec.params),
        "class_weight": {str(k): float(v) for k, v in normalize_class_weight(spec.class_weight).items()},
        "seed": int(spec.seed),
    }


def spec_from_dict(doc: Mapping[str, Any]) -> ClassifierSpec:
    if "kind" not in doc:
        raise SchemaError("classifier spec needs a 'kind' entry")
    spec = ClassifierSpec(
        kind=doc["kind"],
        params=dict(doc.get("params", {})),
        class_weight=normalize_class_weight(doc.get("class_weight", {})),
        seed=int(doc.get("seed", 0)),
    )
    validate_spec(spec)
    return spec


def model_to_dict(model: TrainedModel) -> dict:
    return {
        "format": MODEL_FORMAT,
        "spec": spec_to_dict(model.spec),
        "n_features": model.n_features,
        "state": model.inner.to_state(),
    }


def model_from_dict(doc: Mapping[str, Any]) -> TrainedModel:
    if doc.get("format") != MODEL_FORMAT:
        raise SchemaError(f"not a {MODEL_FORMAT} document")
    spec = spec_from_dict(doc["spec"])
    inner = _STATE_CLASSES[spec.kind].from_state(doc["state"])
    return TrainedModel(spec=spec, n_features=int(doc["n_features"]), inner=inner)


def save_model(model: TrainedModel, path: str | Path) -> None:
    Path(path).write_text(json.dumps(model_to_dict(model), sort_keys=True) + "\n")


def load_model(path: str | Path) -> TrainedModel:
    try:
        doc = json.loads(Path(path).read_text())
    except json.JSONDecodeError as exc:
        raise SchemaError(f"{path}: not valid JSON ({exc})") from None
    return model_from_dict(doc)
