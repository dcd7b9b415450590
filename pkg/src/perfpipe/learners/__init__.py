"""Native classifiers behind one fit/predict/score contract."""
from .base import (
    ADABOOST_RF,
    DECISION_TREE,
    GAUSSIAN_NB,
    GRADBOOST,
    KINDS,
    KNN_KIND,
    RANDOM_FOREST,
    SVM,
    ClassifierSpec,
    TrainedModel,
    decision_score,
    effective_weights,
    fit,
    load_model,
    model_from_dict,
    model_to_dict,
    predict,
    save_model,
    spec_from_dict,
    spec_to_dict,
    validate_spec,
)
from .forest import RandomForest
from .gradboost import GradBoost
from .kernels import kernel_matrix, resolve_gamma
from .knn import KNN
from .naive_bayes import GaussianNB
from .samme import ALPHA_CAP, SammeRF, samme_stage
from .svm import SVC
from .tree import DecisionTree, GradientTree, entropy_impurity, gini_impurity

__all__ = [
    "ADABOOST_RF",
    "ALPHA_CAP",
    "DECISION_TREE",
    "GAUSSIAN_NB",
    "GRADBOOST",
    "KINDS",
    "KNN_KIND",
    "RANDOM_FOREST",
    "SVM",
    "ClassifierSpec",
    "TrainedModel",
    "DecisionTree",
    "GradientTree",
    "GradBoost",
    "GaussianNB",
    "KNN",
    "RandomForest",
    "SVC",
    "SammeRF",
    "decision_score",
    "effective_weights",
    "entropy_impurity",
    "fit",
    "gini_impurity",
    "kernel_matrix",
    "load_model",
    "model_from_dict",
    "model_to_dict",
    "predict",
    "resolve_gamma",
    "samme_stage",
    "save_model",
    "spec_from_dict",
    "spec_to_dict",
    "validate_spec",
]
