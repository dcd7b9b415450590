"""Command-line front end for the trial pipeline.

Subcommands: ingest, aggregate, eval, tune, vote, cross, synth, report.
Exit codes: 0 success, 1 usage, 2 malformed input file, 3 semantic error in
otherwise well-formed input, 4 runtime failure (non-convergence, unexpected).

Reports are deterministic: they embed the classifier spec, master seed,
window policy, and sha256 of every input file, and never a timestamp, so a
rerun with the same inputs is byte-identical regardless of worker count.
"""
from __future__ import annotations

import argparse
import csv
import hashlib
import json
import sys
from pathlib import Path
from typing import Any, Optional, Sequence

from . import aggregate as agg
from .errors import ConvergenceError, PipelineError, SchemaError
from .evaluate import EvalReport, cross_eval, loocv, report_to_dict
from .ingest import FEATURE_NAMES, read_bundle, parse_daily_csv, parse_grades_csv
from .ingest import build_trial, write_bundle, write_daily_csv, write_grades_csv
from .learners import KINDS, ClassifierSpec, spec_to_dict, validate_spec
from .synth import config_from_dict, generate
from .tune import (
    DATASETS,
    builtin_best,
    builtin_grid,
    grid_from_dict,
    grid_search,
    tune_result_to_dict,
)
from .vote import TIE_RULES, median_vote, vote_pipeline, vote_share

PREDICTIONS_HEADER = ("student_id", "window_index", "true", "predicted")

EVAL_FORMAT = "eval-report/v1"
VOTE_FORMAT = "vote-report/v1"
TUNE_FORMAT = "tune-report/v1"


class _Parser(argparse.ArgumentParser):
    """argparse with usage failures remapped from exit status 2 to 1."""

    def exit(self, status: int = 0, message: Optional[str] = None) -> None:  # type: ignore[override]
        if message:
            sys.stderr.write(message)
        raise SystemExit(1 if status else 0)


def _sha256(path: str) -> str:
    return hashlib.sha256(Path(path).read_bytes()).hexdigest()


def _input_stamp(paths: Sequence[str]) -> list[dict[str, str]]:
    return [{"path": p, "sha256": _sha256(p)} for p in paths]


def _write_json(doc: dict, path: str) -> None:
    Path(path).write_text(json.dumps(doc, indent=2, sort_keys=True) + "\n", encoding="utf-8")


def _policy(args: argparse.Namespace) -> agg.WindowPolicy:
    return agg.WindowPolicy(
        kind=args.window, min_days=args.min_days, imputation=args.imputation
    )


def _load_samples(bundles: Sequence[str], policy: agg.WindowPolicy) -> list[agg.AggregatedSample]:
    trials = [read_bundle(p) for p in bundles]
    return agg.build_joined_samples(trials, policy)


def _minority_label(samples: Sequence[agg.AggregatedSample]) -> int:
    n1 = sum(1 for s in samples if s.label == 1)
    return 1 if n1 <= len(samples) - n1 else 0


def _resolve_params(kind: str, params_arg: Optional[str]) -> dict[str, Any]:
    if params_arg is None:
        return {}
    if params_arg.startswith("builtin-best:"):
        dataset = params_arg.split(":", 1)[1]
        return builtin_best(kind, dataset)
    try:
        doc = json.loads(Path(params_arg).read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise SchemaError(f"params file {params_arg}: {exc}") from None
    if not isinstance(doc, dict):
        raise SchemaError(f"params file {params_arg} must hold a JSON object")
    return doc


def _resolve_spec(
    args: argparse.Namespace, samples: Sequence[agg.AggregatedSample]
) -> ClassifierSpec:
    params = _resolve_params(args.model, args.params)
    class_weight = {0: 1.0, 1: 1.0}
    if args.cost_weight is not None:
        class_weight[_minority_label(samples)] = args.cost_weight
    spec = ClassifierSpec(
        kind=args.model, params=params, class_weight=class_weight, seed=args.seed
    )
    validate_spec(spec)
    return spec


def _policy_doc(policy: agg.WindowPolicy) -> dict[str, Any]:
    return {"kind": policy.kind, "min_days": policy.min_days, "imputation": policy.imputation}


def _report_doc(
    fmt: str,
    report: EvalReport,
    policy: agg.WindowPolicy,
    seed: int,
    inputs: Sequence[str],
) -> dict[str, Any]:
    return {
        "format": fmt,
        "spec": spec_to_dict(report.spec),
        "master_seed": seed,
        "window": _policy_doc(policy),
        "inputs": _input_stamp(inputs),
        "results": report_to_dict(report),
    }


def _write_roc_csv(report: EvalReport, out_json: str) -> str:
    path = Path(out_json)
    roc_path = path.with_suffix(".roc.csv") if path.suffix == ".json" else Path(str(path) + ".roc.csv")
    with open(roc_path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["fpr", "tpr"])
        for fpr, tpr in report.roc_points:
            writer.writerow([repr(float(fpr)), repr(float(tpr))])
    return str(roc_path)


def cmd_ingest(args: argparse.Namespace) -> int:
    records = parse_daily_csv(args.daily_csv)
    grades = parse_grades_csv(args.grades_csv)
    if args.trial_id is not None:
        trial_id = args.trial_id
    else:
        ids = sorted({r.trial_id for r in records})
        if len(ids) != 1:
            raise ValueError(f"daily file holds trial ids {ids}; pass --trial-id")
        trial_id = ids[0]
    import datetime as dt

    start = dt.date.fromisoformat(args.start) if args.start else min(r.date for r in records)
    end = dt.date.fromisoformat(args.end) if args.end else max(r.date for r in records)
    trial = build_trial(records, grades, trial_id, start, end)
    write_bundle(trial, args.out)
    print(
        f"wrote {args.out}: trial {trial.trial_id}, {len(trial.students())} students, "
        f"{len(trial.records)} records"
    )
    return 0


def cmd_aggregate(args: argparse.Namespace) -> int:
    policy = _policy(args)
    samples = _load_samples(args.bundle, policy)
    with open(args.out, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["student_id", "trial_id", "window_index", "n_days", *FEATURE_NAMES, "label"])
        for s in samples:
            writer.writerow(
                [s.student_id, s.trial_id, s.window_index, s.n_days]
                + [repr(float(v)) for v in s.features]
                + [s.label]
            )
    print(f"wrote {args.out}: {len(samples)} samples")
    return 0


def cmd_eval(args: argparse.Namespace) -> int:
    policy = _policy(args)
    samples = _load_samples(args.bundle, policy)
    spec = _resolve_spec(args, samples)
    report = loocv(samples, spec, n_runs=args.runs, standardize=args.standardize)
    doc = _report_doc(EVAL_FORMAT, report, policy, args.seed, args.bundle)
    _write_json(doc, args.out)
    roc_path = _write_roc_csv(report, args.out)
    print(
        f"wrote {args.out} and {roc_path}: accuracy {report.mean_accuracy:.3f}, "
        f"sensitivity {report.mean_sensitivity:.3f}, specificity {report.mean_specificity:.3f}, "
        f"auc {report.auc:.3f}"
    )
    return 0


def cmd_tune(args: argparse.Namespace) -> int:
    policy = _policy(args)
    samples = _load_samples(args.bundle, policy)
    if args.grid == "builtin":
        grid = builtin_grid(args.model)
    else:
        try:
            doc = json.loads(Path(args.grid).read_text(encoding="utf-8"))
        except json.JSONDecodeError as exc:
            raise SchemaError(f"grid file {args.grid}: {exc}") from None
        grid = grid_from_dict(doc)
    result = grid_search(samples, args.model, grid, n_runs=args.runs, seed=args.seed)
    doc = {
        "format": TUNE_FORMAT,
        "kind": args.model,
        "axes": {name: list(values) for name, values in grid.axes.items()},
        "master_seed": args.seed,
        "window": _policy_doc(policy),
        "inputs": _input_stamp(args.bundle),
        "result": tune_result_to_dict(result),
    }
    _write_json(doc, args.out)
    print(
        f"wrote {args.out}: {grid.n_cells()} cells, best score {result.best_score:.3f} "
        f"at {dict(result.best_spec.params)}"
    )
    return 0


def _vote_csv(args: argparse.Namespace) -> int:
    with open(args.predictions, "r", encoding="utf-8", newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None or tuple(header) != PREDICTIONS_HEADER:
            raise SchemaError(
                f"predictions header must be {','.join(PREDICTIONS_HEADER)}"
            )
        rows = list(reader)
    try:
        students = [r[0] for r in rows]
        windows = [int(r[1]) for r in rows]
        y_true = [int(r[2]) for r in rows]
        y_pred = [int(r[3]) for r in rows]
    except (IndexError, ValueError) as exc:
        raise SchemaError(f"bad predictions row: {exc}") from None
    if any(v not in (0, 1) for v in y_true + y_pred):
        raise ValueError("true and predicted entries must be 0 or 1")
    voted = median_vote(y_pred, students, tie=args.tie)
    share = vote_share(y_pred, students)
    with open(args.out, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow([*PREDICTIONS_HEADER, "voted"])
        for row, v in zip(rows, voted):
            writer.writerow([*row, int(v)])
    from .evaluate import PredictionRecord, RunMetrics, confusion, roc_auc
    import numpy as np

    preds = tuple(
        PredictionRecord(
            student_id=s, trial_id="", window_index=wi, y_true=t, y_pred=int(v), score=float(sh)
        )
        for s, wi, t, v, sh in zip(students, windows, y_true, voted, share)
    )
    y_true_arr = np.asarray(y_true, dtype=np.int64)
    cm = confusion(y_true_arr, np.asarray(voted))
    points, auc = roc_auc(y_true_arr, np.asarray(share))
    window_level = EvalReport(
        spec=None,
        n_runs=1,
        runs=(RunMetrics(cm=cm),),
        mean_sensitivity=cm.sensitivity,
        mean_specificity=cm.specificity,
        mean_accuracy=cm.accuracy,
        roc_points=points,
        auc=auc,
        predictions=preds,
    )
    from .vote import _collapse_students

    student_level = _collapse_students(window_level)
    doc = {
        "format": VOTE_FORMAT,
        "tie": args.tie,
        "source": "predictions-csv",
        "inputs": _input_stamp([args.predictions]),
        "window_level": report_to_dict(window_level),
        "student_level": report_to_dict(student_level),
    }
    _write_json(doc, args.report_out or args.out + ".report.json")
    print(
        f"wrote {args.out}: voted accuracy {cm.accuracy:.3f} over {len(rows)} predictions, "
        f"{len(set(students))} students"
    )
    return 0


def cmd_vote(args: argparse.Namespace) -> int:
    if args.predictions is not None:
        return _vote_csv(args)
    if args.bundle is None:
        raise ValueError("pass a bundle (--bundle) or a predictions CSV (--predictions)")
    if args.model is None:
        raise ValueError("--model is required when voting from a bundle")
    policy = _policy(args)
    samples = _load_samples(args.bundle, policy)
    spec = _resolve_spec(args, samples)
    window_level, student_level = vote_pipeline(
        samples, spec, n_runs=args.runs, standardize=args.standardize, tie=args.tie
    )
    doc = {
        "format": VOTE_FORMAT,
        "tie": args.tie,
        "source": "bundle",
        "spec": spec_to_dict(spec),
        "master_seed": args.seed,
        "window": _policy_doc(policy),
        "inputs": _input_stamp(args.bundle),
        "window_level": report_to_dict(window_level),
        "student_level": report_to_dict(student_level),
    }
    _write_json(doc, args.out)
    print(
        f"wrote {args.out}: voted window accuracy {window_level.mean_accuracy:.3f}, "
        f"by-student accuracy {student_level.mean_accuracy:.3f}"
    )
    return 0


def cmd_cross(args: argparse.Namespace) -> int:
    policy = _policy(args)
    train = _load_samples([args.bundle_train], policy)
    test = _load_samples([args.bundle_test], policy)
    spec = _resolve_spec(args, train)
    report = cross_eval(train, test, spec, n_runs=args.runs, standardize=args.standardize)
    doc = _report_doc(EVAL_FORMAT, report, policy, args.seed, [args.bundle_train, args.bundle_test])
    doc["cross"] = {"train": args.bundle_train, "test": args.bundle_test}
    _write_json(doc, args.out)
    roc_path = _write_roc_csv(report, args.out)
    print(
        f"wrote {args.out} and {roc_path}: accuracy {report.mean_accuracy:.3f} "
        f"on {len(test)} held-out samples"
    )
    return 0


def cmd_synth(args: argparse.Namespace) -> int:
    try:
        doc = json.loads(Path(args.config).read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise SchemaError(f"config file {args.config}: {exc}") from None
    if not isinstance(doc, dict):
        raise SchemaError("config file must hold a JSON object")
    config = config_from_dict(doc)
    trial, truth = generate(config, oracle_draws=args.oracle_draws)
    daily_out, grades_out = args.out
    write_daily_csv(trial.records, daily_out)
    write_grades_csv(trial.grades, grades_out)
    if args.truth:
        truth_doc = {
            "archetypes": dict(truth.archetypes),
            "true_grades": dict(truth.true_grades),
            "burst_weeks": {k: list(v) for k, v in truth.burst_weeks.items()},
            "bayes": {
                "estimate": truth.bayes.estimate,
                "stderr": truth.bayes.stderr,
                "n_draws": truth.bayes.n_draws,
            },
        }
        _write_json(truth_doc, args.truth)
    print(
        f"wrote {daily_out} and {grades_out}: {config.n_students} students x "
        f"{config.n_days} days, weekly oracle accuracy "
        f"{truth.bayes.estimate:.3f} +/- {truth.bayes.stderr:.3f}"
    )
    return 0


def cmd_report(args: argparse.Namespace) -> int:
    try:
        doc = json.loads(Path(args.report).read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise SchemaError(f"report file {args.report}: {exc}") from None
    fmt = doc.get("format")
    if fmt == EVAL_FORMAT:
        res = doc["results"]
        spec = doc["spec"]
        print(f"classifier: {spec['kind']} params={spec['params']}")
        print(f"window: {doc['window']['kind']}  runs: {res['n_runs']}  samples: {res['n_samples']}")
        print(f"mean accuracy:    {res['mean']['accuracy']:.4f}")
        print(f"mean sensitivity: {res['mean']['sensitivity']:.4f}")
        print(f"mean specificity: {res['mean']['specificity']:.4f}")
        print(f"auc:              {res['auc']:.4f}")
    elif fmt == VOTE_FORMAT:
        for level in ("window_level", "student_level"):
            res = doc[level]
            print(
                f"{level}: accuracy {res['mean']['accuracy']:.4f}, "
                f"sensitivity {res['mean']['sensitivity']:.4f}, "
                f"specificity {res['mean']['specificity']:.4f}, auc {res['auc']:.4f}"
            )
    elif fmt == TUNE_FORMAT:
        res = doc["result"]
        scored = [e for e in res["leaderboard"] if e["score"] is not None]
        print(f"kind: {doc['kind']}  cells: {len(res['leaderboard'])}  scored: {len(scored)}")
        print(f"best: {res['best_spec']['params']} score {res['best_score']:.4f}")
        for entry in sorted(scored, key=lambda e: -e["score"])[:5]:
            print(f"  {entry['score']:.4f}  {entry['params']}")
    else:
        raise SchemaError(f"unknown report format {fmt!r}")
    return 0


def _add_window_args(p: argparse.ArgumentParser) -> None:
    p.add_argument("--window", choices=[agg.WEEKLY, agg.MONTHLY], default=agg.WEEKLY)
    p.add_argument("--min-days", type=int, default=1, help="days required to keep a window")
    p.add_argument(
        "--imputation",
        choices=[agg.DROP_MISSING, agg.TRIAL_MEAN],
        default=agg.DROP_MISSING,
        help="treatment of windows with a feature entirely missing",
    )


def _add_model_args(p: argparse.ArgumentParser, required: bool = True) -> None:
    p.add_argument("--model", choices=list(KINDS), required=required, default=None)
    p.add_argument(
        "--params",
        default=None,
        help=f"JSON file of parameters, or builtin-best:<dataset> with dataset in {DATASETS}",
    )
    p.add_argument(
        "--cost-weight",
        type=float,
        default=None,
        help="class weight applied to the minority class (for example 1.125)",
    )
    p.add_argument("--runs", type=int, default=10, help="repeated evaluation runs")
    p.add_argument("--seed", type=int, default=0, help="master seed")
    p.add_argument(
        "--standardize",
        action="store_true",
        help="z-score features from training-fold statistics",
    )


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="perfpipe", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("ingest", help="validate CSVs into a trial bundle")
    p.add_argument("daily_csv")
    p.add_argument("grades_csv")
    p.add_argument("--out", required=True)
    p.add_argument("--trial-id", default=None, help="default: the single id in the daily file")
    p.add_argument("--start", default=None, help="trial start date, default: earliest record")
    p.add_argument("--end", default=None, help="trial end date, default: latest record")
    p.set_defaults(func=cmd_ingest)

    p = sub.add_parser("aggregate", help="write labeled window samples as CSV")
    p.add_argument("bundle", nargs="+")
    _add_window_args(p)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_aggregate)

    p = sub.add_parser("eval", help="leave-one-out evaluation of one classifier")
    p.add_argument("bundle", nargs="+", help="trial bundles; several are pooled after labeling")
    _add_window_args(p)
    _add_model_args(p)
    p.add_argument("--out", required=True, help="report JSON; ROC CSV written alongside")
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("tune", help="exhaustive grid search")
    p.add_argument("bundle", nargs="+")
    _add_window_args(p)
    p.add_argument("--model", choices=list(KINDS), required=True)
    p.add_argument("--grid", default="builtin", help="'builtin' or a grid JSON file")
    p.add_argument("--runs", type=int, default=3)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_tune)

    p = sub.add_parser("vote", help="median-vote fusion of per-window predictions")
    p.add_argument("--bundle", nargs="+", default=None)
    p.add_argument("--predictions", default=None, help="predictions CSV instead of a bundle")
    _add_window_args(p)
    _add_model_args(p, required=False)
    p.add_argument("--tie", choices=list(TIE_RULES), default="ge")
    p.add_argument("--out", required=True)
    p.add_argument("--report-out", default=None, help="report path for CSV voting")
    p.set_defaults(func=cmd_vote)

    p = sub.add_parser("cross", help="train on one bundle, test on another")
    p.add_argument("bundle_train")
    p.add_argument("bundle_test")
    _add_window_args(p)
    _add_model_args(p)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_cross)

    p = sub.add_parser("synth", help="generate a synthetic trial as CSV files")
    p.add_argument("config", help="generator config JSON")
    p.add_argument("--out", nargs=2, required=True, metavar=("DAILY", "GRADES"))
    p.add_argument("--truth", default=None, help="optional ground-truth JSON path")
    p.add_argument("--oracle-draws", type=int, default=10_000)
    p.set_defaults(func=cmd_synth)

    p = sub.add_parser("report", help="summarize a saved report JSON")
    p.add_argument("report")
    p.set_defaults(func=cmd_report)

    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return args.func(args)
    except ConvergenceError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 4
    except SchemaError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except PipelineError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.exit_code
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    raise SystemExit(main())
