"""User-face identification, per-user weekday aggregation, and group statistics.

A user's identity within a timeline is the largest-bounding-box face per
post, double-checked by modal gender and race across the timeline. Weekday
statistics weight every user equally: a user's faces on one weekday collapse
to a single mean before any group comparison.
"""

from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass, replace
from datetime import datetime, timezone
from itertools import combinations
from typing import Mapping, Sequence

import numpy as np
from scipy import stats as _scipy_stats

from .core import DetectionRecord, Gender, KNOWN_RACES
from .ingestion import TimelineCorpus, age_bucket, age_bucket_labels

WEEKDAYS = ("Sun", "Mon", "Tue", "Wed", "Thu", "Fri", "Sat")

GROUP_DIMENSIONS = ("age", "gender", "race")

DEFAULT_MIN_GROUP_SIZE = 20


class AmbiguousUserError(ValueError):
    """Modal gender or race is tied; the user is excluded from analytics."""

    def __init__(self, user_id: str, dimension: str) -> None:
        super().__init__(f"user {user_id!r}: modal {dimension} is tied")
        self.user_id = user_id
        self.dimension = dimension


class DegenerateSampleError(ValueError):
    """Samples too small or with zero variance for a t-test."""


@dataclass(frozen=True)
class UserProfile:
    user_id: str
    modal_gender: Gender
    modal_race: str
    modal_age_bucket: str
    face_ids: tuple[str, ...]


@dataclass(frozen=True)
class WeekdayFatigue:
    """Per-weekday mean fatigue rate and contributing face count for one user."""

    user_id: str
    means: Mapping[str, float]
    counts: Mapping[str, int]


@dataclass(frozen=True)
class ComparisonResult:
    group_labels: tuple[str, str]
    means: tuple[float, float]
    difference: float
    ci_low: float
    ci_high: float
    p_value: float
    test_kind: str
    sample_sizes: tuple[int, int]
    t_statistic: float
    df: float
    p_bonferroni: float | None = None
    significant: bool | None = None


def weekday_of(timestamp: int) -> str:
    d = datetime.fromtimestamp(timestamp, tz=timezone.utc)
    return WEEKDAYS[(d.weekday() + 1) % 7]


def identify_user_faces(timeline: Sequence[DetectionRecord]) -> UserProfile:
    """Pick the user's face per post and keep those matching the modal identity.

    Records sharing a post_timestamp form one post; its candidate is the face
    with the largest bbox area (ties: larger width, then first in record
    order). Candidates whose gender AND race match the timeline's modal
    values are accepted. A modal tie raises AmbiguousUserError.
    """
    if not timeline:
        raise ValueError("empty timeline")
    user_ids = {r.user_id for r in timeline}
    if len(user_ids) != 1:
        raise ValueError(f"timeline mixes users: {sorted(user_ids)}")
    user_id = timeline[0].user_id

    posts: dict[int, list[DetectionRecord]] = {}
    order: list[int] = []
    for record in timeline:
        if record.post_timestamp not in posts:
            order.append(record.post_timestamp)
        posts.setdefault(record.post_timestamp, []).append(record)

    candidates: list[DetectionRecord] = []
    for ts in order:
        best = posts[ts][0]
        for face in posts[ts][1:]:
            if face.bbox.area > best.bbox.area or (
                face.bbox.area == best.bbox.area and face.bbox.width > best.bbox.width
            ):
                best = face
        candidates.append(best)

    def modal(values: list[str], dimension: str) -> str:
        ranked = Counter(values).most_common()
        if len(ranked) > 1 and ranked[0][1] == ranked[1][1]:
            raise AmbiguousUserError(user_id, dimension)
        return ranked[0][0]

    modal_gender = Gender(modal([c.demographics.gender.value for c in candidates], "gender"))
    modal_race = modal([c.demographics.race for c in candidates], "race")

    accepted = [
        c
        for c in candidates
        if c.demographics.gender is modal_gender and c.demographics.race == modal_race
    ]

    buckets = Counter(age_bucket(c.demographics.age) for c in accepted).most_common()
    top = buckets[0][1]
    modal_bucket = min(
        (b for b, n in buckets if n == top),
        key=lambda b: int(b.rstrip("+").split("-")[0]),
    )
    return UserProfile(
        user_id=user_id,
        modal_gender=modal_gender,
        modal_race=modal_race,
        modal_age_bucket=modal_bucket,
        face_ids=tuple(c.face_id for c in accepted),
    )


def weekday_aggregate(
    profile: UserProfile,
    rates: Mapping[str, float],
    timestamps: Mapping[str, int],
) -> WeekdayFatigue:
    """Arithmetic mean fatigue rate per UTC weekday over the user's faces."""
    sums: dict[str, float] = {}
    counts: dict[str, int] = {}
    for face_id in profile.face_ids:
        if face_id not in rates:
            raise KeyError(f"no fatigue rate for accepted face {face_id!r}")
        day = weekday_of(timestamps[face_id])
        sums[day] = sums.get(day, 0.0) + rates[face_id]
        counts[day] = counts.get(day, 0) + 1
    means = {day: sums[day] / counts[day] for day in sums}
    return WeekdayFatigue(
        user_id=profile.user_id,
        means={d: means[d] for d in WEEKDAYS if d in means},
        counts={d: counts[d] for d in WEEKDAYS if d in counts},
    )


def two_sample_ttest(
    a: Sequence[float], b: Sequence[float], alpha: float = 0.05
) -> ComparisonResult:
    """Welch unequal-variance two-sample t-test with a (1-alpha) CI for mean(a)-mean(b)."""
    a_arr = np.asarray(a, dtype=float)
    b_arr = np.asarray(b, dtype=float)
    if len(a_arr) < 2 or len(b_arr) < 2:
        raise DegenerateSampleError("both samples need >= 2 observations")
    var_a = float(np.var(a_arr, ddof=1))
    var_b = float(np.var(b_arr, ddof=1))
    if var_a == 0.0 and var_b == 0.0:
        raise DegenerateSampleError("both samples have zero variance")
    na, nb = len(a_arr), len(b_arr)
    mean_a, mean_b = float(np.mean(a_arr)), float(np.mean(b_arr))
    se_a = var_a / na
    se_b = var_b / nb
    se = math.sqrt(se_a + se_b)
    t_stat = (mean_a - mean_b) / se
    df = (se_a + se_b) ** 2 / (se_a**2 / (na - 1) + se_b**2 / (nb - 1))
    p_value = 2.0 * float(_scipy_stats.t.sf(abs(t_stat), df))
    margin = float(_scipy_stats.t.ppf(1.0 - alpha / 2.0, df)) * se
    difference = mean_a - mean_b
    return ComparisonResult(
        group_labels=("a", "b"),
        means=(mean_a, mean_b),
        difference=difference,
        ci_low=difference - margin,
        ci_high=difference + margin,
        p_value=p_value,
        test_kind="welch-t",
        sample_sizes=(na, nb),
        t_statistic=t_stat,
        df=df,
    )


def pairwise_group_comparison(
    groups: Mapping[str, Sequence[float]], alpha: float = 0.05
) -> tuple[list[ComparisonResult], list[tuple[str, str, str]]]:
    """Welch tests over all unordered group pairs, with a Bonferroni column.

    Raw p-values stay primary; p_bonferroni = min(1, p * #comparisons) and
    the significant flag uses the adjusted value. Degenerate pairs are
    skipped and reported as (label_a, label_b, reason).
    """
    if len(groups) < 2:
        raise ValueError("need at least two groups")
    labels = list(groups)  # mapping insertion order keeps reports deterministic
    results: list[ComparisonResult] = []
    skipped: list[tuple[str, str, str]] = []
    for la, lb in combinations(labels, 2):
        try:
            res = two_sample_ttest(groups[la], groups[lb], alpha=alpha)
        except DegenerateSampleError as exc:
            skipped.append((la, lb, str(exc)))
            continue
        results.append(replace(res, group_labels=(la, lb)))
    m = len(results)
    adjusted = [
        replace(
            r,
            p_bonferroni=min(1.0, r.p_value * m),
            significant=min(1.0, r.p_value * m) < alpha,
        )
        for r in results
    ]
    return adjusted, skipped


# ---------------------------------------------------------------------------
# Cohort report
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class GroupRow:
    key: tuple[str, ...]  # values for the selected dimensions (+ weekday last)
    n: int
    mean: float
    std: float


@dataclass(frozen=True)
class CohortReport:
    dimensions: tuple[str, ...]
    weekday: bool
    groups: tuple[GroupRow, ...]
    excluded: tuple[GroupRow, ...]       # below min_group_size
    comparisons: tuple[ComparisonResult, ...]
    skipped_comparisons: tuple[tuple[str, str, str], ...]
    histogram: tuple[tuple[float, float], ...]  # (bin lower edge, fraction)
    ambiguous_users: int
    unknown_race_users: int


def fatigue_histogram(
    values: Sequence[float], bin_width: float = 1.0, lo: float = 0.0, hi: float = 100.0
) -> tuple[tuple[float, float], ...]:
    """Normalized histogram over [lo, hi]; the top edge folds into the last bin."""
    edges = np.arange(lo, hi + bin_width, bin_width)
    counts, _ = np.histogram(np.asarray(values, dtype=float), bins=edges)
    total = counts.sum()
    fractions = counts / total if total else counts.astype(float)
    return tuple((float(edges[i]), float(fractions[i])) for i in range(len(counts)))


def _dimension_sort_key(dim: str, value: str) -> tuple:
    if dim == "age":
        return (age_bucket_labels().index(value),)
    if dim == "gender":
        return ([g.value for g in Gender].index(value),)
    if dim == "race":
        return (value,)
    if dim == "weekday":
        return (WEEKDAYS.index(value),)
    return (value,)


def _group_label(key: tuple[str, ...]) -> str:
    return "/".join(key)


def cohort_report(
    corpus: TimelineCorpus,
    rates: Mapping[str, float],
    dimensions: Sequence[str] = GROUP_DIMENSIONS,
    weekday: bool = False,
    min_group_size: int = DEFAULT_MIN_GROUP_SIZE,
    alpha: float = 0.05,
) -> CohortReport:
    """Group mean fatigue rates by demographics (optionally x weekday).

    Every user contributes one value per group: the mean over their accepted
    faces (per weekday when weekday=True). Groups smaller than min_group_size
    are excluded from comparison and listed. Comparisons run between groups
    differing in exactly one dimension.
    """
    if not corpus.users:
        raise ValueError("corpus has no users")
    for dim in dimensions:
        if dim not in GROUP_DIMENSIONS:
            raise ValueError(f"unknown grouping dimension {dim!r}")
    dims = tuple(d for d in GROUP_DIMENSIONS if d in dimensions)

    samples: dict[tuple[str, ...], list[float]] = {}
    ambiguous = 0
    unknown_race = 0
    histogram_values: list[float] = []

    for user_id in sorted(corpus.users):
        timeline = corpus.users[user_id]
        try:
            profile = identify_user_faces(list(timeline))
        except AmbiguousUserError:
            ambiguous += 1
            continue
        if "race" in dims and profile.modal_race not in KNOWN_RACES:
            unknown_race += 1
            continue
        rated = [f for f in profile.face_ids if f in rates]
        if not rated:
            continue
        base_key = tuple(
            {
                "age": profile.modal_age_bucket,
                "gender": profile.modal_gender.value,
                "race": profile.modal_race,
            }[d]
            for d in dims
        )
        if weekday:
            timestamps = {r.face_id: r.post_timestamp for r in timeline}
            profile_rated = replace(profile, face_ids=tuple(rated))
            wf = weekday_aggregate(profile_rated, rates, timestamps)
            for day, mean in wf.means.items():
                samples.setdefault(base_key + (day,), []).append(mean)
                histogram_values.append(mean)
        else:
            value = sum(rates[f] for f in rated) / len(rated)
            samples.setdefault(base_key, []).append(value)
            histogram_values.append(value)

    key_dims = dims + (("weekday",) if weekday else ())

    def sort_key(key: tuple[str, ...]) -> tuple:
        return tuple(_dimension_sort_key(d, v) for d, v in zip(key_dims, key))

    rows: list[GroupRow] = []
    excluded: list[GroupRow] = []
    for key in sorted(samples, key=sort_key):
        values = np.asarray(samples[key])
        row = GroupRow(
            key=key,
            n=len(values),
            mean=float(np.mean(values)),
            std=float(np.std(values, ddof=1)) if len(values) > 1 else 0.0,
        )
        (rows if row.n >= min_group_size else excluded).append(row)

    # Families of groups differing in exactly one dimension, in row order.
    comparable: dict[str, dict[str, list[float]]] = {}
    for row in rows:
        for pos in range(len(key_dims)):
            context = row.key[:pos] + ("*",) + row.key[pos + 1 :]
            comparable.setdefault("|".join(context), {})[_group_label(row.key)] = samples[
                row.key
            ]

    comparisons: list[ComparisonResult] = []
    skipped: list[tuple[str, str, str]] = []
    for groups in comparable.values():
        if len(groups) < 2:
            continue
        results, skips = pairwise_group_comparison(groups, alpha=alpha)
        comparisons.extend(results)
        skipped.extend(skips)

    return CohortReport(
        dimensions=dims,
        weekday=weekday,
        groups=tuple(rows),
        excluded=tuple(excluded),
        comparisons=tuple(comparisons),
        skipped_comparisons=tuple(skipped),
        histogram=fatigue_histogram(histogram_values),
        ambiguous_users=ambiguous,
        unknown_race_users=unknown_race,
    )
