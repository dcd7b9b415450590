"""Synthetic trial generator with known ground truth and a Bayes oracle.

Students come in two archetypes (high / low performer). Each archetype has
its own mean daily feature vector; days are Gaussian around it and then
post-processed into the legal domains (percentage clipping, simplex
renormalization, mood-grid snapping). Grades are Gaussian around archetype
means 15 and 11 on the 0-20 scale, so a median split recovers archetypes up
to a known flip rate.

`class_sep` is the Mahalanobis-style distance between the two archetype
mean vectors under the daily noise scales, so a 7-day window mean separates
the classes by about class_sep * sqrt(7) noise units.

A "burst" is a bad week: with probability `burst_prob` per student-week,
that week's daily means shift toward (and past) the opposite archetype by
`burst_scale` times the between-class gap. At the default scale 3.5, one
burst week inside a 4-week window drags the window mean most of the way
onto the opposite archetype, so month-level aggregates of the two classes
interleave, while week-level aggregates keep each burst isolated as one
far-out, recognizable sample.

The Bayes oracle Monte-Carlo-scores the generator's own likelihood-ratio
rule (the pre-clipping Gaussian mixture over burst patterns) on
post-processed draws, so it reflects what the pipeline actually sees; with
mild clipping it is the Bayes accuracy of the weekly feature distribution.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from datetime import date, timedelta
from typing import Mapping, Optional, Sequence, Union

import numpy as np

from .aggregate import WEEKLY, MONTHLY, WindowPolicy, daily_means, window_aggregate
from .errors import ConfigError
from .ingest import FEATURE_NAMES, GradeRecord, Trial, build_trial, record_from_values
from .seeding import spawn_rng

REGIMES = ("in_person", "remote")

N_FEATURES = len(FEATURE_NAMES)

GRADE_MEAN_HIGH = 15.0
GRADE_MEAN_LOW = 11.0

# archetype-neutral daily means, in-person cohort
BASE_MEANS_IN_PERSON = (
    0.20,  # pct_other
    0.45,  # pct_house
    0.55,  # pct_still
    0.08,  # pct_exercise
    0.12,  # pct_in_vehicle
    0.10,  # pct_unknown
    0.05,  # pct_tilting
    0.00,  # arousal
    0.10,  # valence
    2.50,  # sociability
    3.00,  # sleep_quality
    7.00,  # sleep_hours
    0.80,  # exercise_hours
    2.50,  # study_hours
)

# added to the base means for the remote cohort: location mass moves home,
# commuting and in-person socializing drop
REMOTE_SHIFT = (
    -0.05, 0.15, 0.04, -0.02, -0.06, 0.00, -0.01,
    0.00, 0.00, -0.80, 0.00, 0.30, -0.20, 0.30,
)

# daily standard deviation of each feature at noise=1.0
NOISE_PROFILE = (
    0.04, 0.06, 0.06, 0.03, 0.04, 0.03, 0.02,
    0.35, 0.35, 0.60, 0.70, 0.90, 0.35, 0.80,
)

# unnormalized high-performer direction in noise units; concentrated on
# study, sleep, and mood so the signal is visible per feature, not only in
# the full-vector Mahalanobis geometry
DIRECTION_RAW = (
    -0.3, 0.4, 0.2, 0.3, -0.25, -0.15, -0.1,
    0.2, 0.45, 0.3, 0.9, 0.8, 0.35, 1.6,
)


@dataclass(frozen=True)
class TrialConfig:
    n_students: int = 40
    n_days: int = 28
    trial_id: str = "synth-1"
    regime: str = "in_person"
    class_sep: float = 1.0
    noise: Union[float, Sequence[float]] = 1.0
    burst_prob: float = 0.0
    burst_scale: float = 3.5
    grade_noise: float = 0.5
    class_balance: float = 0.5
    seed: int = 0
    start_date: str = "2026-01-05"
    direction: Optional[Sequence[float]] = None
    base_means: Optional[Sequence[float]] = None


@dataclass(frozen=True)
class BayesEstimate:
    estimate: float
    stderr: float
    n_draws: int


@dataclass(frozen=True)
class GroundTruth:
    archetypes: Mapping[str, int]          # student_id -> 1 high / 0 low
    true_grades: Mapping[str, float]       # noiseless archetype grade means
    burst_weeks: Mapping[str, tuple[int, ...]]
    bayes: BayesEstimate                   # weekly-window oracle
    class_means: tuple[tuple[float, ...], tuple[float, ...]]  # (low, high)
    noise_sd: tuple[float, ...]


def _as_vector(values: Sequence[float], name: str) -> np.ndarray:
    arr = np.asarray(values, dtype=np.float64)
    if arr.shape != (N_FEATURES,):
        raise ConfigError(f"{name} must have {N_FEATURES} entries, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise ConfigError(f"{name} must be finite")
    return arr


def _validate(config: TrialConfig) -> None:
    if config.n_students < 4:
        raise ConfigError(f"n_students must be >= 4, got {config.n_students}")
    if config.n_days < 7:
        raise ConfigError(f"n_days must be >= 7, got {config.n_days}")
    if config.regime not in REGIMES:
        raise ConfigError(f"regime must be one of {REGIMES}, got {config.regime!r}")
    if not (config.class_sep >= 0.0 and math.isfinite(config.class_sep)):
        raise ConfigError(f"class_sep must be a finite value >= 0, got {config.class_sep}")
    if not (0.0 <= config.burst_prob <= 1.0):
        raise ConfigError(f"burst_prob must be in [0, 1], got {config.burst_prob}")
    if not (config.burst_scale >= 0.0 and math.isfinite(config.burst_scale)):
        raise ConfigError(f"burst_scale must be a finite value >= 0, got {config.burst_scale}")
    if not (config.grade_noise >= 0.0 and math.isfinite(config.grade_noise)):
        raise ConfigError(f"grade_noise must be a finite value >= 0, got {config.grade_noise}")
    if not (0.0 < config.class_balance < 1.0):
        raise ConfigError(f"class_balance must be in (0, 1), got {config.class_balance}")
    try:
        date.fromisoformat(config.start_date)
    except ValueError as exc:
        raise ConfigError(f"start_date: {exc}") from None


def _noise_sd(config: TrialConfig) -> np.ndarray:
    if isinstance(config.noise, (int, float)):
        if not (config.noise > 0 and math.isfinite(config.noise)):
            raise ConfigError(f"scalar noise must be a finite value > 0, got {config.noise}")
        sd = float(config.noise) * np.asarray(NOISE_PROFILE, dtype=np.float64)
    else:
        sd = _as_vector(config.noise, "noise")
        if not np.all(sd > 0):
            raise ConfigError("noise entries must all be > 0")
    return sd


def _direction(config: TrialConfig) -> np.ndarray:
    raw = _as_vector(
        config.direction if config.direction is not None else DIRECTION_RAW, "direction"
    )
    norm = float(np.linalg.norm(raw))
    if norm == 0.0:
        raise ConfigError("direction must not be the zero vector")
    return raw / norm


def class_means(config: TrialConfig) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Pre-clipping daily means for (low, high) plus the daily noise sd."""
    _validate(config)
    sd = _noise_sd(config)
    if config.base_means is not None:
        base = _as_vector(config.base_means, "base_means")
    else:
        base = np.asarray(BASE_MEANS_IN_PERSON, dtype=np.float64)
        if config.regime == "remote":
            base = base + np.asarray(REMOTE_SHIFT, dtype=np.float64)
    half = 0.5 * config.class_sep * sd * _direction(config)
    return base - half, base + half, sd


def burst_feature_index(config: TrialConfig) -> int:
    """Index of the feature the burst moves most, in noise units."""
    return int(np.argmax(np.abs(_direction(config))))


def _n_high(config: TrialConfig) -> int:
    n = round(config.n_students * config.class_balance)
    return min(max(int(n), 1), config.n_students - 1)


def _postprocess(days: np.ndarray) -> np.ndarray:
    """Force raw Gaussian day vectors (..., 14) into the legal domains."""
    out = np.array(days, dtype=np.float64)
    pct = np.clip(out[..., 0:7], 0.0, 1.0)
    loc_sum = pct[..., 0:2].sum(axis=-1, keepdims=True)
    pct[..., 0:2] = np.where(loc_sum > 1.0, pct[..., 0:2] / loc_sum, pct[..., 0:2])
    act_sum = pct[..., 2:7].sum(axis=-1, keepdims=True)
    pct[..., 2:7] = np.where(act_sum > 1.0, pct[..., 2:7] / act_sum, pct[..., 2:7])
    out[..., 0:7] = pct
    moods = np.clip(out[..., 7:9], -1.0, 1.0)
    out[..., 7:9] = np.round(moods * 2.0) / 2.0
    out[..., 9:14] = np.clip(out[..., 9:14], 0.0, None)
    return out


def _student_ids(n: int) -> list[str]:
    width = max(3, len(str(n - 1)))
    return [f"s{i:0{width}d}" for i in range(n)]


def generate(config: TrialConfig, oracle_draws: int = 100_000) -> tuple[Trial, GroundTruth]:
    """Draw one trial; deterministic per config.

    Students are generated from independent per-student seed streams, so the
    result does not depend on generation order; records merge by student
    index. `oracle_draws` sizes the Monte-Carlo Bayes estimate stored in the
    ground truth.
    """
    low, high, sd = class_means(config)
    n = config.n_students
    n_high = _n_high(config)
    n_weeks = (config.n_days + 6) // 7
    start = date.fromisoformat(config.start_date)
    end = start + timedelta(days=config.n_days - 1)
    ids = _student_ids(n)

    records = []
    grades = []
    archetypes: dict[str, int] = {}
    true_grades: dict[str, float] = {}
    burst_weeks: dict[str, tuple[int, ...]] = {}
    for i, sid in enumerate(ids):
        rng = spawn_rng(config.seed, "student", i)
        label = 1 if i < n_high else 0
        mu_own = high if label == 1 else low
        mu_other = low if label == 1 else high
        grade_mean = GRADE_MEAN_HIGH if label == 1 else GRADE_MEAN_LOW
        grade = float(np.clip(grade_mean + config.grade_noise * rng.standard_normal(), 0.0, 20.0))
        bursts = tuple(int(w) for w in np.nonzero(rng.random(n_weeks) < config.burst_prob)[0])
        day_means = np.tile(mu_own, (config.n_days, 1))
        for w in bursts:
            rows = slice(7 * w, min(7 * (w + 1), config.n_days))
            day_means[rows] = mu_own + config.burst_scale * (mu_other - mu_own)
        days = _postprocess(day_means + sd * rng.standard_normal((config.n_days, N_FEATURES)))
        for t in range(config.n_days):
            values = dict(zip(FEATURE_NAMES, days[t].tolist()))
            records.append(
                record_from_values(sid, config.trial_id, start + timedelta(days=t), values)
            )
        grades.append(GradeRecord(student_id=sid, trial_id=config.trial_id, grade=grade))
        archetypes[sid] = label
        true_grades[sid] = grade_mean
        burst_weeks[sid] = bursts

    trial = build_trial(records, grades, config.trial_id, start, end)
    truth = GroundTruth(
        archetypes=archetypes,
        true_grades=true_grades,
        burst_weeks=burst_weeks,
        bayes=bayes_accuracy(config, n_draws=oracle_draws),
        class_means=(tuple(low.tolist()), tuple(high.tolist())),
        noise_sd=tuple(sd.tolist()),
    )
    return trial, truth


def _burst_components(
    day_counts: Sequence[int], burst_prob: float
) -> list[tuple[float, int]]:
    """(probability, burst day count) mixture over week-burst patterns.

    Full 7-day weeks are exchangeable, so the mixture collapses to a
    binomial over full weeks crossed with the optional partial week.
    """
    full = sum(1 for c in day_counts if c == 7)
    partial = [c for c in day_counts if c != 7]
    p = burst_prob
    comps: list[tuple[float, int]] = []
    for k in range(full + 1):
        pk = math.comb(full, k) * p**k * (1.0 - p) ** (full - k)
        if not partial:
            comps.append((pk, 7 * k))
            continue
        comps.append((pk * (1.0 - p), 7 * k))
        comps.append((pk * p, 7 * k + partial[0]))
    return [(w, bd) for w, bd in comps if w > 0.0]


def _mixture_loglik(
    x: np.ndarray,
    mu_own: np.ndarray,
    mu_other: np.ndarray,
    var: np.ndarray,
    comps: Sequence[tuple[float, int]],
    scale: float,
    n_days: int,
) -> np.ndarray:
    parts = np.empty((len(comps), x.shape[0]))
    log_norm = -0.5 * float(np.sum(np.log(2.0 * np.pi * var)))
    for c, (w, bd) in enumerate(comps):
        m = mu_own + (bd / n_days) * scale * (mu_other - mu_own)
        parts[c] = math.log(w) + log_norm - 0.5 * np.sum((x - m) ** 2 / var, axis=1)
    top = parts.max(axis=0)
    return top + np.log(np.sum(np.exp(parts - top), axis=0))


def bayes_accuracy(
    config: TrialConfig, n_draws: int = 100_000, kind: str = WEEKLY
) -> BayesEstimate:
    """Monte-Carlo accuracy of the generator's own likelihood-ratio rule.

    One draw = one aggregation window of fresh post-processed days,
    classified by the exact pre-clipping window-mean mixture likelihoods
    with the archetype shares as priors. For weekly windows this is the
    oracle ceiling the pipeline's per-window classifiers are measured
    against.
    """
    low, high, sd = class_means(config)
    if n_draws < 1:
        raise ConfigError(f"n_draws must be >= 1, got {n_draws}")
    if kind not in (WEEKLY, MONTHLY):
        raise ConfigError(f"kind must be {WEEKLY!r} or {MONTHLY!r}, got {kind!r}")
    length = 7 if kind == WEEKLY else config.n_days
    day_counts = [7] * (length // 7)
    if length % 7:
        day_counts.append(length % 7)
    comps = _burst_components(day_counts, config.burst_prob)
    var = sd**2 / length
    p1 = _n_high(config) / config.n_students
    week_of_day = np.arange(length) // 7

    rng = spawn_rng(config.seed, "bayes-oracle")
    chunk = max(1, min(n_draws, 8_000_000 // (length * N_FEATURES)))
    n_correct = 0
    remaining = n_draws
    while remaining > 0:
        m = min(chunk, remaining)
        remaining -= m
        cls = (rng.random(m) < p1).astype(np.int64)
        flags = rng.random((m, len(day_counts))) < config.burst_prob
        z = rng.standard_normal((m, length, N_FEATURES))
        mu_own = np.where(cls[:, None] == 1, high[None, :], low[None, :])
        mu_other = np.where(cls[:, None] == 1, low[None, :], high[None, :])
        shift = config.burst_scale * (mu_other - mu_own)
        day_mu = mu_own[:, None, :] + flags[:, week_of_day, None] * shift[:, None, :]
        x = _postprocess(day_mu + sd * z).mean(axis=1)
        ll1 = _mixture_loglik(x, high, low, var, comps, config.burst_scale, length)
        ll0 = _mixture_loglik(x, low, high, var, comps, config.burst_scale, length)
        pred = (ll1 + math.log(p1) >= ll0 + math.log(1.0 - p1)).astype(np.int64)
        n_correct += int(np.sum(pred == cls))
    est = n_correct / n_draws
    return BayesEstimate(
        estimate=est, stderr=math.sqrt(est * (1.0 - est) / n_draws), n_draws=n_draws
    )


def burst_separation(
    trial: Trial, truth: GroundTruth, config: TrialConfig, kind: str = WEEKLY
) -> float:
    """Between-archetype Cohen's d of each student's median window value.

    Measured on the feature the class direction weights most. The median
    over a student's windows shrugs off one burst week under weekly
    aggregation but not under monthly, so bursts should leave this larger
    for weekly than for monthly aggregation.
    """
    feat = burst_feature_index(config)
    daily = daily_means(trial)
    samples = window_aggregate(daily, WindowPolicy(kind=kind), trial.trial_id, trial.start_date)
    per_student: dict[str, list[float]] = {}
    for s in samples:
        per_student.setdefault(s.student_id, []).append(s.features[feat])
    reps = {sid: float(np.median(vals)) for sid, vals in per_student.items()}
    g1 = np.asarray([reps[sid] for sid in reps if truth.archetypes[sid] == 1])
    g0 = np.asarray([reps[sid] for sid in reps if truth.archetypes[sid] == 0])
    if len(g1) < 2 or len(g0) < 2:
        raise ValueError("need at least two students per archetype")
    pooled = ((len(g1) - 1) * g1.var(ddof=1) + (len(g0) - 1) * g0.var(ddof=1)) / (
        len(g1) + len(g0) - 2
    )
    if pooled == 0.0:
        return math.inf if g1.mean() != g0.mean() else 0.0
    return float((g1.mean() - g0.mean()) / math.sqrt(pooled))


def config_from_dict(doc: Mapping[str, object]) -> TrialConfig:
    """Build a config from a JSON document; unknown keys are rejected."""
    allowed = {f.name for f in TrialConfig.__dataclass_fields__.values()}
    unknown = sorted(set(doc) - allowed)
    if unknown:
        raise ConfigError(f"unknown config keys: {', '.join(unknown)}")
    kwargs = dict(doc)
    for key in ("noise", "direction", "base_means"):
        if isinstance(kwargs.get(key), list):
            kwargs[key] = tuple(kwargs[key])
    try:
        config = TrialConfig(**kwargs)
        _validate(config)
        _noise_sd(config)
        _direction(config)
    except TypeError as exc:
        raise ConfigError(str(exc)) from None
    return config
