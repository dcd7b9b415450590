"""Student-performance classification from daily behavioral records.

The pipeline: validate daily CSVs into trial bundles, average days into
weekly or monthly window samples, label students by a per-trial median
grade split, evaluate native classifiers with repeated leave-one-out
cross-validation, search parameter grids, and fuse each student's window
predictions by median vote. A synthetic generator with a Bayes oracle
stands in for the original trials.
"""
from __future__ import annotations

from .aggregate import (
    DROP_MISSING,
    MONTHLY,
    TRIAL_MEAN,
    WEEKLY,
    AggregatedSample,
    WindowPolicy,
    build_joined_samples,
    build_labeled_samples,
    daily_means,
    label_samples,
    median_split_labels,
    window_aggregate,
)
from .errors import (
    ConfigError,
    ConvergenceError,
    DateError,
    DegenerateStageError,
    DimensionMismatchError,
    DuplicateError,
    EmptyWindowSetError,
    InsufficientGradesError,
    LengthMismatchError,
    MissingLabelError,
    OrphanRecordError,
    PipelineError,
    RangeError,
    SchemaError,
    SingleClassError,
    UnknownKindError,
    UnsupportedParamError,
)
from .evaluate import (
    ConfusionMatrix,
    EvalReport,
    PredictionRecord,
    RunMetrics,
    confusion,
    cross_eval,
    loocv,
    report_to_dict,
    roc_auc,
    samples_to_xy,
)
from .ingest import (
    FEATURE_NAMES,
    DailyRecord,
    GradeRecord,
    Trial,
    build_trial,
    parse_daily_csv,
    parse_grades_csv,
    read_bundle,
    write_bundle,
    write_daily_csv,
    write_grades_csv,
)
from .learners import (
    KINDS,
    ClassifierSpec,
    TrainedModel,
    decision_score,
    fit,
    load_model,
    predict,
    save_model,
)
from .seeding import derive_seed, spawn_rng
from .synth import (
    BayesEstimate,
    GroundTruth,
    TrialConfig,
    bayes_accuracy,
    burst_separation,
    config_from_dict,
    generate,
)
from .tune import (
    CostWeightResult,
    ParamGrid,
    TuneResult,
    builtin_best,
    builtin_grid,
    cost_weight_search,
    enumerate_cells,
    grid_search,
)
from .vote import median_vote, vote_pipeline, vote_share

__version__ = "0.1.0"

__all__ = [
    "AggregatedSample",
    "BayesEstimate",
    "ClassifierSpec",
    "ConfigError",
    "ConfusionMatrix",
    "ConvergenceError",
    "CostWeightResult",
    "DROP_MISSING",
    "DailyRecord",
    "DateError",
    "DegenerateStageError",
    "DimensionMismatchError",
    "DuplicateError",
    "EmptyWindowSetError",
    "EvalReport",
    "FEATURE_NAMES",
    "GradeRecord",
    "GroundTruth",
    "InsufficientGradesError",
    "KINDS",
    "LengthMismatchError",
    "MONTHLY",
    "MissingLabelError",
    "OrphanRecordError",
    "ParamGrid",
    "PipelineError",
    "PredictionRecord",
    "RangeError",
    "RunMetrics",
    "SchemaError",
    "SingleClassError",
    "TRIAL_MEAN",
    "Trial",
    "TrialConfig",
    "TrainedModel",
    "TuneResult",
    "UnknownKindError",
    "UnsupportedParamError",
    "WEEKLY",
    "WindowPolicy",
    "bayes_accuracy",
    "build_joined_samples",
    "build_labeled_samples",
    "build_trial",
    "builtin_best",
    "builtin_grid",
    "burst_separation",
    "config_from_dict",
    "confusion",
    "cost_weight_search",
    "cross_eval",
    "daily_means",
    "decision_score",
    "derive_seed",
    "enumerate_cells",
    "fit",
    "generate",
    "grid_search",
    "label_samples",
    "load_model",
    "loocv",
    "median_split_labels",
    "median_vote",
    "parse_daily_csv",
    "parse_grades_csv",
    "predict",
    "read_bundle",
    "report_to_dict",
    "roc_auc",
    "samples_to_xy",
    "save_model",
    "spawn_rng",
    "vote_pipeline",
    "vote_share",
    "window_aggregate",
    "write_bundle",
    "write_daily_csv",
    "write_grades_csv",
    "__version__",
]
