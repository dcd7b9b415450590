"""CSV parsing, record validation, trial assembly, and bundle round trips."""
from __future__ import annotations

import csv
import datetime as dt

import pytest

from perfpipe.errors import (
    DateError,
    DuplicateError,
    OrphanRecordError,
    RangeError,
    SchemaError,
)
from perfpipe.ingest import (
    DAILY_HEADER,
    FEATURE_NAMES,
    GRADES_HEADER,
    DailyRecord,
    GradeRecord,
    build_trial,
    parse_daily_csv,
    parse_grades_csv,
    read_bundle,
    record_from_values,
    validate_daily_record,
    write_bundle,
    write_daily_csv,
    write_grades_csv,
)

VALID_VALUES = {
    "pct_other": 0.2,
    "pct_house": 0.3,
    "pct_still": 0.4,
    "pct_exercise": 0.1,
    "pct_in_vehicle": 0.1,
    "pct_unknown": 0.05,
    "pct_tilting": 0.05,
    "arousal": 0.5,
    "valence": -0.5,
    "sociability": 2.0,
    "sleep_quality": 3.0,
    "sleep_hours": 7.0,
    "exercise_hours": 1.0,
    "study_hours": 2.0,
}


def daily_row(student="s1", trial="t1", date="2026-01-05", **overrides) -> list[str]:
    cells = {**VALID_VALUES, **overrides}
    return [student, trial, date] + [str(cells[name]) for name in FEATURE_NAMES]


def write_rows(path, header, rows) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(header)
        writer.writerows(rows)


def make_record(student="s1", date=dt.date(2026, 1, 5), **overrides) -> DailyRecord:
    values = {**VALID_VALUES, **overrides}
    return record_from_values(student, "t1", date, values)


class TestParseDaily:
    def test_valid_rows_round_trip_values(self, tmp_path):
        p = tmp_path / "daily.csv"
        write_rows(p, DAILY_HEADER, [daily_row(), daily_row(date="2026-01-06")])
        records = parse_daily_csv(p)
        assert len(records) == 2
        assert records[0].arousal == 0.5
        assert records[0].valence == -0.5
        assert records[0].date == dt.date(2026, 1, 5)
        assert records[0].feature_values() == tuple(
            VALID_VALUES[name] for name in FEATURE_NAMES
        )

    def test_missing_column_cited(self, tmp_path):
        p = tmp_path / "daily.csv"
        header = [c for c in DAILY_HEADER if c != "sleep_hours"]
        write_rows(p, header, [])
        with pytest.raises(SchemaError, match="sleep_hours"):
            parse_daily_csv(p)

    def test_unknown_column_cited(self, tmp_path):
        p = tmp_path / "daily.csv"
        write_rows(p, list(DAILY_HEADER) + ["mood"], [])
        with pytest.raises(SchemaError, match="mood"):
            parse_daily_csv(p)

    def test_reordered_columns_rejected(self, tmp_path):
        p = tmp_path / "daily.csv"
        header = list(DAILY_HEADER)
        header[0], header[1] = header[1], header[0]
        write_rows(p, header, [])
        with pytest.raises(SchemaError, match="order"):
            parse_daily_csv(p)

    def test_empty_file(self, tmp_path):
        p = tmp_path / "daily.csv"
        p.write_text("")
        with pytest.raises(SchemaError, match="empty"):
            parse_daily_csv(p)

    def test_out_of_range_percentage_cites_row(self, tmp_path):
        p = tmp_path / "daily.csv"
        write_rows(p, DAILY_HEADER, [daily_row(), daily_row(date="2026-01-06", pct_still=1.2)])
        with pytest.raises(RangeError, match=r"row 2.*pct_still"):
            parse_daily_csv(p)

    def test_activity_simplex_enforced(self, tmp_path):
        p = tmp_path / "daily.csv"
        row = daily_row(pct_still=0.5, pct_exercise=0.3, pct_in_vehicle=0.3)
        write_rows(p, DAILY_HEADER, [row])
        with pytest.raises(RangeError, match="activity"):
            parse_daily_csv(p)

    def test_location_simplex_enforced(self, tmp_path):
        p = tmp_path / "daily.csv"
        write_rows(p, DAILY_HEADER, [daily_row(pct_other=0.6, pct_house=0.6)])
        with pytest.raises(RangeError, match="location"):
            parse_daily_csv(p)

    def test_mood_off_grid_rejected(self, tmp_path):
        p = tmp_path / "daily.csv"
        write_rows(p, DAILY_HEADER, [daily_row(arousal=0.3)])
        with pytest.raises(RangeError, match="arousal"):
            parse_daily_csv(p)

    def test_blank_survey_cell_is_missing(self, tmp_path):
        p = tmp_path / "daily.csv"
        write_rows(p, DAILY_HEADER, [daily_row(arousal="")])
        records = parse_daily_csv(p)
        assert records[0].arousal is None

    def test_blank_passive_cell_rejected(self, tmp_path):
        p = tmp_path / "daily.csv"
        write_rows(p, DAILY_HEADER, [daily_row(pct_house="")])
        with pytest.raises(RangeError, match="pct_house"):
            parse_daily_csv(p)

    def test_duplicate_student_day(self, tmp_path):
        p = tmp_path / "daily.csv"
        write_rows(p, DAILY_HEADER, [daily_row(), daily_row()])
        with pytest.raises(DuplicateError, match="s1"):
            parse_daily_csv(p)

    def test_bad_date(self, tmp_path):
        p = tmp_path / "daily.csv"
        write_rows(p, DAILY_HEADER, [daily_row(date="01/05/2026")])
        with pytest.raises(RangeError, match="date"):
            parse_daily_csv(p)

    def test_non_numeric_cell(self, tmp_path):
        p = tmp_path / "daily.csv"
        write_rows(p, DAILY_HEADER, [daily_row(study_hours="lots")])
        with pytest.raises(RangeError, match="study_hours"):
            parse_daily_csv(p)

    def test_counts_match_independent_scan(self, tmp_path):
        # oracle: the writer loop counts rows and blanked cells on its own
        p = tmp_path / "daily.csv"
        rows = []
        n_rows = 118
        blanked = 0
        for i in range(n_rows):
            student = f"s{i % 10}"
            date = (dt.date(2026, 1, 5) + dt.timedelta(days=i // 10)).isoformat()
            if i in (17, 63):
                rows.append(daily_row(student=student, date=date, valence=""))
                blanked += 1
            else:
                rows.append(daily_row(student=student, date=date))
        write_rows(p, DAILY_HEADER, rows)
        records = parse_daily_csv(p)
        assert len(records) == n_rows
        missing = sum(
            1 for r in records for v in r.feature_values() if v is None
        )
        assert missing == blanked == 2


class TestParseGrades:
    def test_valid(self, tmp_path):
        p = tmp_path / "grades.csv"
        write_rows(p, GRADES_HEADER, [["s1", "t1", "12.6"], ["s2", "t1", "9"]])
        grades = parse_grades_csv(p)
        assert grades[0].grade == 12.6
        assert grades[1].grade == 9.0

    def test_out_of_range(self, tmp_path):
        p = tmp_path / "grades.csv"
        write_rows(p, GRADES_HEADER, [["s1", "t1", "21"]])
        with pytest.raises(RangeError, match="grade"):
            parse_grades_csv(p)

    def test_duplicate_student(self, tmp_path):
        p = tmp_path / "grades.csv"
        write_rows(p, GRADES_HEADER, [["s1", "t1", "10"], ["s1", "t1", "11"]])
        with pytest.raises(DuplicateError, match="s1"):
            parse_grades_csv(p)

    def test_header_checked(self, tmp_path):
        p = tmp_path / "grades.csv"
        write_rows(p, ["student_id", "grade"], [])
        with pytest.raises(SchemaError, match="trial_id"):
            parse_grades_csv(p)


class TestValidateRecord:
    def test_good_record_passes(self):
        validate_daily_record(make_record())

    def test_half_step_grid_accepted(self):
        for v in (-1.0, -0.5, 0.0, 0.5, 1.0):
            validate_daily_record(make_record(arousal=v, valence=v))

    def test_negative_hours_rejected(self):
        with pytest.raises(RangeError, match="sleep_hours"):
            validate_daily_record(make_record(sleep_hours=-1.0))

    def test_missing_passive_field_rejected(self):
        values = dict(VALID_VALUES)
        del values["pct_still"]
        with pytest.raises(RangeError, match="pct_still"):
            record_from_values("s1", "t1", dt.date(2026, 1, 5), values)


class TestBuildTrial:
    START = dt.date(2026, 1, 5)
    END = dt.date(2026, 2, 1)

    def grades_for(self, students):
        return [GradeRecord(s, "t1", 8.0 + i % 10) for i, s in enumerate(students)]

    def test_valid_trial(self):
        students = [f"s{i:02d}" for i in range(28)]
        records = [make_record(student=s) for s in students]
        trial = build_trial(records, self.grades_for(students), "t1", self.START, self.END)
        assert len(trial.students()) == 28
        assert len(trial.records) == 28

    def test_record_before_start(self):
        records = [make_record(date=dt.date(2026, 1, 4))]
        with pytest.raises(DateError, match="outside"):
            build_trial(records, self.grades_for(["s1"]), "t1", self.START, self.END)

    def test_orphan_record(self):
        records = [make_record(student="ghost")]
        with pytest.raises(OrphanRecordError, match="ghost"):
            build_trial(records, self.grades_for(["s1"]), "t1", self.START, self.END)

    def test_period_inverted(self):
        with pytest.raises(DateError):
            build_trial([], self.grades_for(["s1"]), "t1", self.END, self.START)

    def test_record_order_does_not_matter(self):
        students = ["s1", "s2"]
        records = [make_record(student=s, date=d)
                   for s in students
                   for d in (dt.date(2026, 1, 5), dt.date(2026, 1, 6))]
        grades = self.grades_for(students)
        a = build_trial(records, grades, "t1", self.START, self.END)
        b = build_trial(records[::-1], grades[::-1], "t1", self.START, self.END)
        assert a == b

    def test_foreign_trial_id_rejected(self):
        records = [make_record()]
        grades = [GradeRecord("s1", "other", 10.0)]
        with pytest.raises(ValueError, match="other"):
            build_trial(records, grades, "t1", self.START, self.END)


class TestRoundTrips:
    def test_csv_round_trip(self, tmp_path, tiny_trial):
        trial, _, _ = tiny_trial
        daily = tmp_path / "daily.csv"
        grades = tmp_path / "grades.csv"
        write_daily_csv(trial.records, daily)
        write_grades_csv(trial.grades, grades)
        records = parse_daily_csv(daily)
        grade_records = parse_grades_csv(grades)
        rebuilt = build_trial(
            records, grade_records, trial.trial_id, trial.start_date, trial.end_date
        )
        assert rebuilt == trial

    def test_bundle_round_trip(self, tmp_path, tiny_trial):
        trial, _, _ = tiny_trial
        path = tmp_path / "trial.json"
        write_bundle(trial, path)
        assert read_bundle(path) == trial

    def test_bundle_rejects_other_json(self, tmp_path):
        path = tmp_path / "x.json"
        path.write_text('{"format": "something-else"}')
        with pytest.raises(SchemaError, match="trial-bundle"):
            read_bundle(path)

    def test_bundle_rejects_broken_json(self, tmp_path):
        path = tmp_path / "x.json"
        path.write_text("{не json")
        with pytest.raises(SchemaError, match="JSON"):
            read_bundle(path)
