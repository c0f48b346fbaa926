"""Evaluation experiments over the observation sample.

Every function here is a pure, deterministic map from observations to
table rows: interval-width sweeps, diversity-order sweeps, the
three-feature comparison, per-closeness distribution summaries, and the
evolution of temporal diversity as the common-day horizon grows.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .features import (
    DEFAULT_WIDTH_T,
    Observation,
    location_diversity,
    mean_encounters,
    temporal_diversity,
)
from .stats import RegressionResult, StatsError, evaluate_feature

DEFAULT_WIDTH_GRID = (5, 15, 30, 60, 90, 120, 180, 240, 360, 720)
DEFAULT_Q_GRID = tuple(round(i / 10, 1) for i in range(1, 21) if i != 10)
DEFAULT_MAX_HORIZON = 11

CLOSENESS_LABELS = (0, 1, 2, 3, 4)
FEATURE_NAMES = ("location_diversity", "mean_encounters", "temporal_diversity")


@dataclass(frozen=True)
class SweepRow:
    """F-test outcome at one sweep point (interval width or order q)."""

    parameter: float
    f_value: float | None
    p_value: float | None
    error: str | None = None


@dataclass(frozen=True)
class FeatureResult:
    """One feature's regression outcome, or the reason it has none."""

    feature: str
    result: RegressionResult | None = None
    error: str | None = None


@dataclass(frozen=True)
class SubgroupSummary:
    """Distribution of one feature within one closeness subgroup."""

    feature: str
    closeness: int
    count: int
    mean: float | None
    minimum: float | None
    q1: float | None
    median: float | None
    q3: float | None
    maximum: float | None
    outliers: tuple[float, ...] = ()


@dataclass(frozen=True)
class EvolutionRow:
    """Mean temporal diversity of a subgroup at a common-day horizon d."""

    closeness: int
    d: int
    mean_temporal_diversity: float | None
    n: int


def _closeness_vector(observations: Sequence[Observation]) -> list[float]:
    return [float(obs.closeness) for obs in observations]


def _evaluate(
    name: str, values: Sequence[float], target: Sequence[float]
) -> tuple[RegressionResult | None, str | None]:
    try:
        return evaluate_feature(name, values, target), None
    except StatsError as exc:
        return None, str(exc)


def sweep_width(
    observations: Sequence[Observation],
    widths: Iterable[int] = DEFAULT_WIDTH_GRID,
) -> list[SweepRow]:
    """F-test temporal diversity (Shannon) against closeness per width."""
    target = _closeness_vector(observations)
    rows = []
    for width in sorted(set(widths)):
        values = [temporal_diversity(o.encounters, width) for o in observations]
        result, error = _evaluate(f"temporal_diversity(t={width})", values, target)
        if result is None:
            rows.append(SweepRow(parameter=float(width), f_value=None, p_value=None, error=error))
        else:
            rows.append(
                SweepRow(parameter=float(width), f_value=result.f_value, p_value=result.p_value)
            )
    return rows


def sweep_q(
    observations: Sequence[Observation],
    orders: Iterable[float] = DEFAULT_Q_GRID,
    width_t: int = DEFAULT_WIDTH_T,
) -> list[SweepRow]:
    """F-test Renyi temporal diversity against closeness per order q."""
    target = _closeness_vector(observations)
    rows = []
    for q in sorted(set(orders)):
        values = [temporal_diversity(o.encounters, width_t, q) for o in observations]
        result, error = _evaluate(f"temporal_diversity(q={q})", values, target)
        if result is None:
            rows.append(SweepRow(parameter=q, f_value=None, p_value=None, error=error))
        else:
            rows.append(SweepRow(parameter=q, f_value=result.f_value, p_value=result.p_value))
    return rows


def _feature_values(
    observations: Sequence[Observation], feature: str, width_t: int
) -> list[float]:
    if feature == "location_diversity":
        return [location_diversity(o.encounters) for o in observations]
    if feature == "mean_encounters":
        return [
            mean_encounters(o.encounters, o.encounters.n_common_days)
            for o in observations
        ]
    if feature == "temporal_diversity":
        return [temporal_diversity(o.encounters, width_t) for o in observations]
    raise ValueError(f"unknown feature: {feature}")


def compare_features(
    observations: Sequence[Observation], width_t: int = DEFAULT_WIDTH_T
) -> list[FeatureResult]:
    """Regress each of the three features against reported closeness.

    A degenerate feature column yields an error row; the other features
    are still evaluated.
    """
    target = _closeness_vector(observations)
    rows = []
    for feature in FEATURE_NAMES:
        values = _feature_values(observations, feature, width_t)
        result, error = _evaluate(feature, values, target)
        rows.append(FeatureResult(feature=feature, result=result, error=error))
    return rows


def subgroup_distributions(
    observations: Sequence[Observation], width_t: int = DEFAULT_WIDTH_T
) -> list[SubgroupSummary]:
    """Five-number summary plus 1.5*IQR outliers per (closeness, feature)."""
    summaries = []
    for feature in FEATURE_NAMES:
        values_by_label: dict[int, list[float]] = {c: [] for c in CLOSENESS_LABELS}
        feature_values = _feature_values(observations, feature, width_t)
        for obs, value in zip(observations, feature_values):
            values_by_label[obs.closeness].append(value)
        for label in CLOSENESS_LABELS:
            values = values_by_label[label]
            if not values:
                summaries.append(
                    SubgroupSummary(
                        feature=feature,
                        closeness=label,
                        count=0,
                        mean=None,
                        minimum=None,
                        q1=None,
                        median=None,
                        q3=None,
                        maximum=None,
                    )
                )
                continue
            arr = np.asarray(values, dtype=float)
            q1, median, q3 = np.percentile(arr, [25.0, 50.0, 75.0])
            iqr = q3 - q1
            lo_fence = q1 - 1.5 * iqr
            hi_fence = q3 + 1.5 * iqr
            outliers = tuple(sorted(float(v) for v in arr if v < lo_fence or v > hi_fence))
            summaries.append(
                SubgroupSummary(
                    feature=feature,
                    closeness=label,
                    count=len(values),
                    mean=float(arr.mean()),
                    minimum=float(arr.min()),
                    q1=float(q1),
                    median=float(median),
                    q3=float(q3),
                    maximum=float(arr.max()),
                    outliers=outliers,
                )
            )
    return summaries


def evolution(
    observations: Sequence[Observation],
    horizons: Iterable[int] = range(1, DEFAULT_MAX_HORIZON + 1),
    width_t: int = DEFAULT_WIDTH_T,
) -> list[EvolutionRow]:
    """Mean temporal diversity per subgroup using only the first d common days.

    Observations whose pair has fewer than d common days are excluded at
    that horizon.
    """
    rows = []
    for label in CLOSENESS_LABELS:
        subgroup = [o for o in observations if o.closeness == label]
        for d in sorted(set(horizons)):
            if d < 1:
                raise ValueError(f"horizon must be >= 1, got {d}")
            diversities = []
            for obs in subgroup:
                restricted = obs.encounters.first_days(d)
                if restricted is not None:
                    diversities.append(temporal_diversity(restricted, width_t))
            mean = sum(diversities) / len(diversities) if diversities else None
            rows.append(
                EvolutionRow(
                    closeness=label,
                    d=d,
                    mean_temporal_diversity=mean,
                    n=len(diversities),
                )
            )
    return rows
