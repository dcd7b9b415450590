"""Daily behavioral data ingestion.

Two CSV inputs describe a trial: one row per student per day of passive
sensing plus self-reported survey answers, and one final grade per student.
Survey cells may be empty (missing); passive cells must be present. Parsed
records are validated against their value domains and assembled into an
immutable, canonically ordered ``Trial``.
"""
from __future__ import annotations

import csv
import datetime as dt
import json
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Mapping, Optional, Sequence

from .errors import (
    DateError,
    DuplicateError,
    OrphanRecordError,
    RangeError,
    SchemaError,
)

# Feature columns in canonical order. The first seven are passively sensed
# fractions of the day; the rest come from the daily survey and may be missing.
PASSIVE_FIELDS = (
    "pct_other",
    "pct_house",
    "pct_still",
    "pct_exercise",
    "pct_in_vehicle",
    "pct_unknown",
    "pct_tilting",
)
SURVEY_FIELDS = (
    "arousal",
    "valence",
    "sociability",
    "sleep_quality",
    "sleep_hours",
    "exercise_hours",
    "study_hours",
)
FEATURE_NAMES = PASSIVE_FIELDS + SURVEY_FIELDS

DAILY_HEADER = ("student_id", "trial_id", "date") + FEATURE_NAMES
GRADES_HEADER = ("student_id", "trial_id", "grade")

# Location fractions partition the day, as do activity fractions.
LOCATION_FIELDS = ("pct_other", "pct_house")
ACTIVITY_FIELDS = ("pct_still", "pct_exercise", "pct_in_vehicle", "pct_unknown", "pct_tilting")

# Self-assessment mood answers live on a five-point grid.
MOOD_GRID = (-1.0, -0.5, 0.0, 0.5, 1.0)

SUM_TOL = 1e-9
GRADE_MIN, GRADE_MAX = 0.0, 20.0

BUNDLE_FORMAT = "trial-bundle/v1"


@dataclass(frozen=True)
class DailyRecord:
    """One student-day of behavioral features."""

    student_id: str
    trial_id: str
    date: dt.date
    pct_other: float
    pct_house: float
    pct_still: float
    pct_exercise: float
    pct_in_vehicle: float
    pct_unknown: float
    pct_tilting: float
    arousal: Optional[float] = None
    valence: Optional[float] = None
    sociability: Optional[float] = None
    sleep_quality: Optional[float] = None
    sleep_hours: Optional[float] = None
    exercise_hours: Optional[float] = None
    study_hours: Optional[float] = None

    def feature_values(self) -> tuple[Optional[float], ...]:
        """Feature tuple in ``FEATURE_NAMES`` order (``None`` where missing)."""
        return tuple(getattr(self, name) for name in FEATURE_NAMES)


@dataclass(frozen=True)
class GradeRecord:
    """Final grade of one student on the 0-20 scale."""

    student_id: str
    trial_id: str
    grade: float


@dataclass(frozen=True)
class Trial:
    """A validated observation period: daily records plus one grade each.

    Records and grades are stored in canonical sort order, so two trials
    built from the same rows in any order compare equal.
    """

    trial_id: str
    start_date: dt.date
    end_date: dt.date
    records: tuple[DailyRecord, ...]
    grades: tuple[GradeRecord, ...]

    def students(self) -> tuple[str, ...]:
        return tuple(g.student_id for g in self.grades)


def record_from_values(
    student_id: str,
    trial_id: str,
    date: dt.date,
    values: Mapping[str, Optional[float]],
) -> DailyRecord:
    """Build a record from a feature-name map (missing surveys omitted)."""
    kwargs = {name: values.get(name) for name in FEATURE_NAMES}
    for name in PASSIVE_FIELDS:
        if kwargs[name] is None:
            raise RangeError(f"passive field {name} is required")
    return DailyRecord(student_id=student_id, trial_id=trial_id, date=date, **kwargs)


def _domain_violation(record: DailyRecord) -> Optional[str]:
    """Return a description of the first violated value domain, if any."""
    for name in PASSIVE_FIELDS:
        v = getattr(record, name)
        if not math.isfinite(v):
            return f"{name} must be finite"
        if not 0.0 <= v <= 1.0:
            return f"{name}={v!r} outside [0, 1]"
    if sum(getattr(record, f) for f in LOCATION_FIELDS) > 1.0 + SUM_TOL:
        return "location fractions sum above 1"
    if sum(getattr(record, f) for f in ACTIVITY_FIELDS) > 1.0 + SUM_TOL:
        return "activity fractions sum above 1"
    for name in ("arousal", "valence"):
        v = getattr(record, name)
        if v is None:
            continue
        if not math.isfinite(v) or min(abs(v - g) for g in MOOD_GRID) > SUM_TOL:
            return f"{name}={v!r} not on the -1..1 half-step grid"
    for name in ("sociability", "sleep_quality", "sleep_hours", "exercise_hours", "study_hours"):
        v = getattr(record, name)
        if v is None:
            continue
        if not math.isfinite(v) or v < 0.0:
            return f"{name}={v!r} must be finite and non-negative"
    return None


def validate_daily_record(record: DailyRecord) -> None:
    """Raise ``RangeError`` if any feature value lies outside its domain."""
    problem = _domain_violation(record)
    if problem is not None:
        raise RangeError(problem)


def _check_header(got: Sequence[str], expected: Sequence[str], path: str) -> None:
    if tuple(got) == tuple(expected):
        return
    missing = [c for c in expected if c not in got]
    unknown = [c for c in got if c not in expected]
    if missing or unknown:
        parts = []
        if missing:
            parts.append(f"missing columns {missing}")
        if unknown:
            parts.append(f"unknown columns {unknown}")
        raise SchemaError(f"{path}: " + "; ".join(parts))
    raise SchemaError(f"{path}: columns out of order, expected {','.join(expected)}")


def _parse_float(cell: str, field: str, row_no: int) -> float:
    try:
        v = float(cell)
    except ValueError:
        raise RangeError(f"row {row_no}: {field}={cell!r} is not a number") from None
    if not math.isfinite(v):
        raise RangeError(f"row {row_no}: {field}={cell!r} is not finite")
    return v


def _parse_date(cell: str, row_no: int) -> dt.date:
    try:
        return dt.date.fromisoformat(cell)
    except ValueError:
        raise RangeError(f"row {row_no}: date={cell!r} is not an ISO date") from None


def parse_daily_csv(path: str | Path) -> list[DailyRecord]:
    """Parse and validate a daily-features CSV.

    Raises ``SchemaError`` for header problems, ``RangeError`` for value
    problems (with the 1-based data row number), and ``DuplicateError`` when
    two rows describe the same student-day.
    """
    path = Path(path)
    records: list[DailyRecord] = []
    seen: set[tuple[str, str, dt.date]] = set()
    with path.open(newline="") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise SchemaError(f"{path}: empty file") from None
        _check_header(header, DAILY_HEADER, str(path))
        for row_no, row in enumerate(reader, start=1):
            if not row:
                continue
            if len(row) != len(DAILY_HEADER):
                raise SchemaError(f"{path}: row {row_no} has {len(row)} cells, expected {len(DAILY_HEADER)}")
            cells = dict(zip(DAILY_HEADER, row))
            student_id = cells["student_id"].strip()
            trial_id = cells["trial_id"].strip()
            if not student_id:
                raise RangeError(f"row {row_no}: student_id is empty")
            if not trial_id:
                raise RangeError(f"row {row_no}: trial_id is empty")
            date = _parse_date(cells["date"].strip(), row_no)
            values: dict[str, Optional[float]] = {}
            for name in PASSIVE_FIELDS:
                if cells[name].strip() == "":
                    raise RangeError(f"row {row_no}: {name} is required but empty")
                values[name] = _parse_float(cells[name], name, row_no)
            for name in SURVEY_FIELDS:
                cell = cells[name].strip()
                values[name] = None if cell == "" else _parse_float(cell, name, row_no)
            record = DailyRecord(student_id=student_id, trial_id=trial_id, date=date, **values)
            problem = _domain_violation(record)
            if problem is not None:
                raise RangeError(f"row {row_no}: {problem}")
            key = (student_id, trial_id, date)
            if key in seen:
                raise DuplicateError(f"row {row_no}: duplicate record for student {student_id} on {date}")
            seen.add(key)
            records.append(record)
    return records


def parse_grades_csv(path: str | Path) -> list[GradeRecord]:
    """Parse and validate a grades CSV (one grade per student per trial)."""
    path = Path(path)
    grades: list[GradeRecord] = []
    seen: set[tuple[str, str]] = set()
    with path.open(newline="") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise SchemaError(f"{path}: empty file") from None
        _check_header(header, GRADES_HEADER, str(path))
        for row_no, row in enumerate(reader, start=1):
            if not row:
                continue
            if len(row) != len(GRADES_HEADER):
                raise SchemaError(f"{path}: row {row_no} has {len(row)} cells, expected {len(GRADES_HEADER)}")
            student_id, trial_id, grade_cell = (c.strip() for c in row)
            if not student_id:
                raise RangeError(f"row {row_no}: student_id is empty")
            if not trial_id:
                raise RangeError(f"row {row_no}: trial_id is empty")
            grade = _parse_float(grade_cell, "grade", row_no)
            if not GRADE_MIN <= grade <= GRADE_MAX:
                raise RangeError(f"row {row_no}: grade={grade!r} outside [{GRADE_MIN}, {GRADE_MAX}]")
            key = (student_id, trial_id)
            if key in seen:
                raise DuplicateError(f"row {row_no}: duplicate grade for student {student_id}")
            seen.add(key)
            grades.append(GradeRecord(student_id=student_id, trial_id=trial_id, grade=grade))
    return grades


def _fmt(value: Optional[float]) -> str:
    return "" if value is None else repr(float(value))


def write_daily_csv(records: Iterable[DailyRecord], path: str | Path) -> None:
    """Write records in the exact daily CSV schema (round-trips via repr)."""
    with Path(path).open("w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(DAILY_HEADER)
        for r in records:
            writer.writerow(
                [r.student_id, r.trial_id, r.date.isoformat()]
                + [_fmt(v) for v in r.feature_values()]
            )


def write_grades_csv(grades: Iterable[GradeRecord], path: str | Path) -> None:
    """Write grades in the exact grades CSV schema."""
    with Path(path).open("w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(GRADES_HEADER)
        for g in grades:
            writer.writerow([g.student_id, g.trial_id, _fmt(g.grade)])


def build_trial(
    records: Iterable[DailyRecord],
    grades: Iterable[GradeRecord],
    trial_id: str,
    start_date: dt.date,
    end_date: dt.date,
) -> Trial:
    """Assemble a validated trial.

    Every record date must fall inside the period and every record's student
    must hold a grade. Records are canonically sorted, so input order does
    not affect equality.
    """
    if end_date < start_date:
        raise DateError(f"trial period ends ({end_date}) before it starts ({start_date})")
    grade_list = sorted(grades, key=lambda g: g.student_id)
    graded: set[str] = set()
    for g in grade_list:
        if g.trial_id != trial_id:
            raise ValueError(f"grade for student {g.student_id} belongs to trial {g.trial_id!r}, not {trial_id!r}")
        if g.student_id in graded:
            raise DuplicateError(f"duplicate grade for student {g.student_id}")
        if not GRADE_MIN <= g.grade <= GRADE_MAX:
            raise RangeError(f"grade={g.grade!r} outside [{GRADE_MIN}, {GRADE_MAX}]")
        graded.add(g.student_id)
    rec_list = sorted(
        records,
        key=lambda r: (r.student_id, r.date, tuple(-1.0 if v is None else v for v in r.feature_values())),
    )
    for r in rec_list:
        if r.trial_id != trial_id:
            raise ValueError(f"record for student {r.student_id} belongs to trial {r.trial_id!r}, not {trial_id!r}")
        if not start_date <= r.date <= end_date:
            raise DateError(f"record for student {r.student_id} on {r.date} outside trial period")
        if r.student_id not in graded:
            raise OrphanRecordError(f"record for student {r.student_id} has no grade")
        validate_daily_record(r)
    return Trial(
        trial_id=trial_id,
        start_date=start_date,
        end_date=end_date,
        records=tuple(rec_list),
        grades=tuple(grade_list),
    )


def write_bundle(trial: Trial, path: str | Path) -> None:
    """Serialize a trial to a JSON bundle."""
    doc = {
        "format": BUNDLE_FORMAT,
        "trial_id": trial.trial_id,
        "start_date": trial.start_date.isoformat(),
        "end_date": trial.end_date.isoformat(),
        "records": [
            {
                "student_id": r.student_id,
                "date": r.date.isoformat(),
                "features": {name: v for name, v in zip(FEATURE_NAMES, r.feature_values())},
            }
            for r in trial.records
        ],
        "grades": [{"student_id": g.student_id, "grade": g.grade} for g in trial.grades],
    }
    Path(path).write_text(json.dumps(doc, indent=2, sort_keys=True) + "\n")


def read_bundle(path: str | Path) -> Trial:
    """Load a JSON bundle, revalidating all trial invariants."""
    try:
        doc = json.loads(Path(path).read_text())
    except json.JSONDecodeError as exc:
        raise SchemaError(f"{path}: not valid JSON ({exc})") from None
    if not isinstance(doc, dict) or doc.get("format") != BUNDLE_FORMAT:
        raise SchemaError(f"{path}: not a {BUNDLE_FORMAT} file")
    try:
        trial_id = doc["trial_id"]
        start = dt.date.fromisoformat(doc["start_date"])
        end = dt.date.fromisoformat(doc["end_date"])
        records = [
            record_from_values(r["student_id"], trial_id, dt.date.fromisoformat(r["date"]), r["features"])
            for r in doc["records"]
        ]
        grades = [GradeRecord(g["student_id"], trial_id, float(g["grade"])) for g in doc["grades"]]
    except (KeyError, TypeError, ValueError) as exc:
        raise SchemaError(f"{path}: malformed bundle ({exc})") from None
    return build_trial(records, grades, trial_id, start, end)
