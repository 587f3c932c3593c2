"""Timeline corpus loading and the three-criteria face quality filter.

Records come in as DetectionRecord JSONL. A record is kept when both eyes
hold the required status, blur is strictly below its threshold, and face
quality is strictly above its threshold; users with too few kept posts are
dropped. Malformed lines are counted and skipped, never fatal.
"""

from __future__ import annotations

import json
from collections import Counter
from dataclasses import dataclass, field
from enum import Enum
from pathlib import Path
from typing import IO, Iterable, Mapping

from .core import (
    DetectionRecord,
    EyeState,
    Gender,
    KNOWN_RACES,
    RecordDecodeError,
    record_from_json,
    record_to_json,
)

AGE_BUCKET_WIDTH = 10
AGE_BUCKET_MAX = 80  # ages >= 80 fall into the open-ended "80+" bucket

# Hashtags the source corpus was collected under, kept as corpus metadata
# only (crawling is out of scope). The collection protocol announces nine
# keywords but lists these ten; both are preserved as-is.
COLLECTION_TAGS = (
    "#selfie",
    "#me",
    "#happy",
    "#fun",
    "#smile",
    "#nomakeup",
    "#friend",
    "#family",
    "#fashion",
    "#summer",
)


class RejectReason(Enum):
    MALFORMED = "malformed"
    EYE_STATUS = "eye-status"
    BLUR = "blur"
    FACE_QUALITY = "face-quality"
    MIN_POSTS = "min-posts"


@dataclass(frozen=True)
class FilterPolicy:
    min_posts: int = 20
    require_eye_status: EyeState = EyeState.NO_GLASSES_EYE_OPEN
    enforce_blur: bool = True
    enforce_face_quality: bool = True

    def validate(self) -> None:
        if self.min_posts < 1:
            raise ValueError("min_posts must be >= 1")


@dataclass(frozen=True)
class TimelineCorpus:
    users: Mapping[str, tuple[DetectionRecord, ...]]
    provenance: str = ""
    collected_tags: tuple[str, ...] = ()

    @property
    def record_count(self) -> int:
        return sum(len(v) for v in self.users.values())

    def all_records(self) -> Iterable[DetectionRecord]:
        for records in self.users.values():
            yield from records


@dataclass
class IngestStats:
    records_read: int = 0
    kept: int = 0
    rejected: Counter = field(default_factory=Counter)
    malformed_lines: list[tuple[int, str]] = field(default_factory=list)

    def check_conservation(self) -> None:
        total = self.kept + sum(self.rejected.values())
        if total != self.records_read:
            raise AssertionError(
                f"stats do not sum: kept {self.kept} + rejected "
                f"{sum(self.rejected.values())} != read {self.records_read}"
            )

    def to_obj(self) -> dict:
        return {
            "records_read": self.records_read,
            "kept": self.kept,
            "rejected": {reason.value: self.rejected.get(reason, 0) for reason in RejectReason},
            "malformed_lines": [[line, msg] for line, msg in self.malformed_lines],
        }


def quality_filter(record: DetectionRecord, policy: FilterPolicy) -> RejectReason | None:
    """None to keep, or the first failed criterion (eye-status, blur, face-quality).

    Blur passes only strictly below its threshold and face quality only
    strictly above its threshold: boundary equality rejects.
    """
    if (
        record.left_eye_status.status is not policy.require_eye_status
        or record.right_eye_status.status is not policy.require_eye_status
    ):
        return RejectReason.EYE_STATUS
    if policy.enforce_blur and not record.quality.blur_value < record.quality.blur_threshold:
        return RejectReason.BLUR
    if (
        policy.enforce_face_quality
        and not record.quality.face_quality_value > record.quality.face_quality_threshold
    ):
        return RejectReason.FACE_QUALITY
    return None


def ingest_lines(
    lines: Iterable[str],
    policy: FilterPolicy,
    provenance: str = "",
    collected_tags: Iterable[str] = (),
) -> tuple[TimelineCorpus, IngestStats]:
    policy.validate()
    stats = IngestStats()
    per_user: dict[str, list[DetectionRecord]] = {}

    for line_no, line in enumerate(lines, start=1):
        if not line.strip():
            continue
        stats.records_read += 1
        try:
            record = record_from_json(line)
        except RecordDecodeError as exc:
            stats.rejected[RejectReason.MALFORMED] += 1
            stats.malformed_lines.append((line_no, str(exc)))
            continue
        reason = quality_filter(record, policy)
        if reason is not None:
            stats.rejected[reason] += 1
            continue
        per_user.setdefault(record.user_id, []).append(record)

    users: dict[str, tuple[DetectionRecord, ...]] = {}
    for user_id in sorted(per_user):
        records = per_user[user_id]
        if len(records) < policy.min_posts:
            stats.rejected[RejectReason.MIN_POSTS] += len(records)
        else:
            users[user_id] = tuple(records)
            stats.kept += len(records)

    stats.check_conservation()
    corpus = TimelineCorpus(
        users=users, provenance=provenance, collected_tags=tuple(collected_tags)
    )
    return corpus, stats


def ingest(path: str | Path, policy: FilterPolicy) -> tuple[TimelineCorpus, IngestStats]:
    """Load, filter, and group a DetectionRecord JSONL file."""
    path = Path(path)
    with path.open("r", encoding="utf-8") as fh:
        return ingest_lines(
            fh, policy, provenance=str(path), collected_tags=COLLECTION_TAGS
        )


def write_corpus(corpus: TimelineCorpus, fh: IO[str]) -> None:
    for record in corpus.all_records():
        fh.write(record_to_json(record) + "\n")


def age_bucket(age: int) -> str:
    """Decade bucket label, left-closed right-open: 40 -> \"40-50\"."""
    if age >= AGE_BUCKET_MAX:
        return f"{AGE_BUCKET_MAX}+"
    lo = (age // AGE_BUCKET_WIDTH) * AGE_BUCKET_WIDTH
    return f"{lo}-{lo + AGE_BUCKET_WIDTH}"


def age_bucket_labels() -> list[str]:
    return [
        f"{lo}-{lo + AGE_BUCKET_WIDTH}" for lo in range(0, AGE_BUCKET_MAX, AGE_BUCKET_WIDTH)
    ] + [f"{AGE_BUCKET_MAX}+"]


def _modal(values: list[str]) -> str | None:
    """Most frequent value, or None on a tie for the top count."""
    counts = Counter(values)
    ranked = counts.most_common()
    if len(ranked) > 1 and ranked[0][1] == ranked[1][1]:
        return None
    return ranked[0][0]


@dataclass(frozen=True)
class DemographicHistogram:
    age_buckets: Mapping[str, int]
    gender: Mapping[str, int]
    race: Mapping[str, int]
    mean_gender_confidence: float
    mean_race_confidence: float
    ambiguous_users: Mapping[str, int]  # dimension -> users excluded by modal ties
    unknown_race_users: int

    def to_obj(self) -> dict:
        return {
            "age_buckets": dict(self.age_buckets),
            "gender": dict(self.gender),
            "race": dict(self.race),
            "mean_gender_confidence": self.mean_gender_confidence,
            "mean_race_confidence": self.mean_race_confidence,
            "ambiguous_users": dict(self.ambiguous_users),
            "unknown_race_users": self.unknown_race_users,
        }


def demographic_histogram(corpus: TimelineCorpus) -> DemographicHistogram:
    """Per-user demographic counts: one count per user via modal record values.

    Modal ties exclude the user from that dimension (counted). Unknown race
    strings are excluded from the race histogram.
    """
    if not corpus.users:
        raise ValueError("corpus has no users")

    ages: Counter = Counter()
    genders: Counter = Counter()
    races: Counter = Counter()
    ambiguous: Counter = Counter()
    unknown_race = 0
    gender_confidences: list[float] = []
    race_confidences: list[float] = []

    for user_id in sorted(corpus.users):
        records = corpus.users[user_id]
        demos = [r.demographics for r in records]
        gender_confidences.append(sum(d.gender_confidence for d in demos) / len(demos))
        race_confidences.append(sum(d.race_confidence for d in demos) / len(demos))

        bucket = _modal([age_bucket(d.age) for d in demos])
        if bucket is None:
            # Age ties resolve to the youngest tied bucket rather than excluding.
            tied = Counter(age_bucket(d.age) for d in demos).most_common()
            top = tied[0][1]
            bucket = min(
                (b for b, c in tied if c == top),
                key=lambda b: int(b.rstrip("+").split("-")[0]),
            )
        ages[bucket] += 1

        gender = _modal([d.gender.value for d in demos])
        if gender is None:
            ambiguous["gender"] += 1
        else:
            genders[gender] += 1

        race = _modal([d.race for d in demos])
        if race is None:
            ambiguous["race"] += 1
        elif race not in KNOWN_RACES:
            unknown_race += 1
        else:
            races[race] += 1

    return DemographicHistogram(
        age_buckets={b: ages[b] for b in age_bucket_labels() if ages[b]},
        gender={g.value: genders[g.value] for g in Gender if genders[g.value]},
        race={r: races[r] for r in KNOWN_RACES if races[r]},
        mean_gender_confidence=sum(gender_confidences) / len(gender_confidences),
        mean_race_confidence=sum(race_confidences) / len(race_confidences),
        ambiguous_users=dict(ambiguous),
        unknown_race_users=unknown_race,
    )
