"""Error taxonomy shared across the pipeline.

Every error carries an ``exit_code`` so the CLI can map failures onto its
exit-code contract: 1 usage, 2 schema, 3 semantic, 4 runtime.
"""
from __future__ import annotations


class PipelineError(Exception):
    """Base class for all pipeline errors. Semantic by default (exit 3)."""

    exit_code = 3


class SchemaError(PipelineError):
    """Input file header or structure does not match the documented schema."""

    exit_code = 2


class RangeError(PipelineError):
    """A field value lies outside its documented domain (carries row context)."""


class DuplicateError(PipelineError):
    """Two rows describe the same entity (student+date, or student grade)."""


class OrphanRecordError(PipelineError):
    """A daily record references a student with no grade row."""


class DateError(PipelineError):
    """A record date falls outside the trial period, or the period is invalid."""


class EmptyWindowSetError(PipelineError):
    """Aggregation produced no samples under the given window policy."""


class InsufficientGradesError(PipelineError):
    """Fewer than two grades; a median split is undefined."""


class MissingLabelError(PipelineError):
    """A sample's student does not appear in the label map."""


class SingleClassError(PipelineError):
    """A training set contains only one class."""


class DimensionMismatchError(PipelineError):
    """Feature matrix width differs between fit and predict."""


class LengthMismatchError(PipelineError):
    """Parallel arrays disagree in length."""


class UnknownKindError(PipelineError):
    """Classifier kind token is not one of the supported seven."""


class UnsupportedParamError(PipelineError):
    """A parameter key or value is outside the supported surface."""


class DegenerateStageError(PipelineError):
    """A boosting stage hit a degenerate weighted error (0 or too weak).

    ``err`` is the weighted stage error that triggered the condition so the
    caller can decide between the perfect-stage and weak-stage policies.
    """

    def __init__(self, message: str, err: float):
        super().__init__(message)
        self.err = err


class EmptyNodeError(PipelineError):
    """A tree node was constructed with zero samples."""


class ConvergenceError(PipelineError):
    """An iterative solver exceeded its iteration cap."""

    exit_code = 4


class ConfigError(PipelineError):
    """A generator or CLI configuration value is invalid."""
