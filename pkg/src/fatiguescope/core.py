"""Domain types shared by every pipeline stage, plus validation and the JSONL codec.

All types are immutable values: safe to share between concurrent workers.
The canonical on-disk encoding is one JSON object per line (JSONL) with the
field names used in the dataclass definitions below.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field, fields
from datetime import datetime, timezone
from enum import Enum
from typing import Any, Iterable, Mapping

LANDMARK_COUNT = 83

# Fixed 83-point index table. Indices are half-open [start, stop) ranges into
# LandmarkSet.points. Eye groups carry exactly 10 points each; names follow the
# viewer's perspective (left_eye sits on the left side of the image).
LANDMARK_GROUPS: dict[str, range] = {
    "contour": range(0, 19),
    "brows": range(19, 35),
    "left_eye": range(35, 45),
    "right_eye": range(45, 55),
    "nose": range(55, 65),
    "mouth": range(65, 83),
}


class EyeState(Enum):
    """Detector eye/eyewear classification. Declaration order breaks confidence ties."""

    NO_GLASSES_EYE_OPEN = "no_glasses_eye_open"
    NO_GLASSES_EYE_CLOSE = "no_glasses_eye_close"
    NORMAL_GLASSES_EYE_OPEN = "normal_glasses_eye_open"
    NORMAL_GLASSES_EYE_CLOSE = "normal_glasses_eye_close"
    DARK_GLASSES = "dark_glasses"


class Gender(Enum):
    MALE = "male"
    FEMALE = "female"


# Race classes covered by the analytics; other values are preserved as raw
# strings on the record and excluded from race analytics.
KNOWN_RACES = ("african_american", "asian", "caucasian")


class RatingScale(Enum):
    RATER_0_4 = "rater_0_4"
    PERCENT_0_100 = "percent_0_100"


_SCALE_RANGES = {
    RatingScale.RATER_0_4: (0.0, 4.0),
    RatingScale.PERCENT_0_100: (0.0, 100.0),
}

# The eight facial cues, in estimator input order.
CUE_FIELDS = (
    "hanging_eyelids",
    "red_eyes",
    "dark_circles",
    "pale_skin",
    "droopy_corner_mouth",
    "swollen_eyes",
    "glazed_eyes",
    "wrinkles",
)


@dataclass(frozen=True)
class LandmarkSet:
    """83 named 2-D points in normalized image coordinates ([0,1] x [0,1])."""

    points: tuple[tuple[float, float], ...]

    def group(self, name: str) -> tuple[tuple[float, float], ...]:
        idx = LANDMARK_GROUPS[name]
        return self.points[idx.start : idx.stop]

    def violations(self) -> list[str]:
        out: list[str] = []
        if len(self.points) != LANDMARK_COUNT:
            out.append(f"landmark count != {LANDMARK_COUNT} (got {len(self.points)})")
            return out
        for i, (x, y) in enumerate(self.points):
            if not (math.isfinite(x) and math.isfinite(y)):
                out.append(f"landmark coordinate not finite at index {i}")
            elif not (0.0 <= x <= 1.0 and 0.0 <= y <= 1.0):
                out.append(f"landmark coordinate outside [0,1] at index {i}")
        return out


@dataclass(frozen=True)
class EyeStatus:
    """One eye's status plus the detector's per-status confidence scores."""

    status: EyeState
    confidences: Mapping[EyeState, float]

    @classmethod
    def from_confidences(cls, confidences: Mapping[EyeState, float]) -> "EyeStatus":
        """Build with status = argmax confidence, ties broken by enum order."""
        best = max(EyeState, key=lambda s: (confidences.get(s, 0.0), -list(EyeState).index(s)))
        return cls(status=best, confidences=dict(confidences))

    def violations(self, prefix: str = "eye_status") -> list[str]:
        out: list[str] = []
        for state, score in self.confidences.items():
            if not (math.isfinite(score) and 0.0 <= score <= 100.0):
                out.append(f"{prefix} confidence for {state.value} outside [0,100]")
        argmax = max(
            EyeState,
            key=lambda s: (self.confidences.get(s, 0.0), -list(EyeState).index(s)),
        )
        if self.status is not argmax:
            out.append(f"{prefix} not argmax of confidences")
        return out


@dataclass(frozen=True)
class Demographics:
    """Detector-estimated age, gender, and race with prediction confidences."""

    age: int
    gender: Gender
    gender_confidence: float
    race: str
    race_confidence: float

    def violations(self) -> list[str]:
        out: list[str] = []
        if self.age < 0:
            out.append("age must be >= 0")
        for name, conf in (
            ("gender_confidence", self.gender_confidence),
            ("race_confidence", self.race_confidence),
        ):
            if not (math.isfinite(conf) and 0.0 <= conf <= 100.0):
                out.append(f"{name} outside [0,100]")
        return out


@dataclass(frozen=True)
class QualityReport:
    """Detector blur / face-quality scores with their decision thresholds."""

    blur_value: float
    blur_threshold: float
    face_quality_value: float
    face_quality_threshold: float

    def violations(self) -> list[str]:
        out: list[str] = []
        for f in fields(self):
            v = getattr(self, f.name)
            if not math.isfinite(v) or v < 0.0:
                out.append(f"{f.name} must be finite and >= 0")
        return out


@dataclass(frozen=True)
class BBox:
    """Face bounding box in pixel coordinates."""

    x: float
    y: float
    width: float
    height: float

    @property
    def area(self) -> float:
        return self.width * self.height


@dataclass(frozen=True)
class DetectionRecord:
    """One detected face from a timeline post, as supplied by the face detector."""

    face_id: str
    user_id: str
    post_timestamp: int
    bbox: BBox
    landmarks: LandmarkSet
    demographics: Demographics
    left_eye_status: EyeStatus
    right_eye_status: EyeStatus
    quality: QualityReport
    source_tags: tuple[str, ...] = ()

    def post_date(self) -> datetime:
        return datetime.fromtimestamp(self.post_timestamp, tz=timezone.utc)


@dataclass(frozen=True)
class CueRatings:
    """The eight facial-cue scores on a declared scale."""

    hanging_eyelids: float
    red_eyes: float
    dark_circles: float
    pale_skin: float
    droopy_corner_mouth: float
    swollen_eyes: float
    glazed_eyes: float
    wrinkles: float
    scale: RatingScale = RatingScale.RATER_0_4

    def as_tuple(self) -> tuple[float, ...]:
        return tuple(getattr(self, name) for name in CUE_FIELDS)

    @classmethod
    def from_values(
        cls, values: Iterable[float], scale: RatingScale = RatingScale.RATER_0_4
    ) -> "CueRatings":
        vals = tuple(float(v) for v in values)
        if len(vals) != len(CUE_FIELDS):
            raise ValueError(f"expected {len(CUE_FIELDS)} cue values, got {len(vals)}")
        return cls(*vals, scale=scale)

    def violations(self, integral: bool = False) -> list[str]:
        """Range violations; with integral=True also flag non-integer values.

        Single-rater 0-4 ratings must be integers; cross-rater averages may be
        fractional, so integrality is opt-in.
        """
        lo, hi = _SCALE_RANGES[self.scale]
        out: list[str] = []
        for name in CUE_FIELDS:
            v = getattr(self, name)
            if not (math.isfinite(v) and lo <= v <= hi):
                out.append(f"{name} outside [{lo:g},{hi:g}]")
            elif integral and v != int(v):
                out.append(f"{name} must be an integer on scale {self.scale.value}")
        return out


@dataclass(frozen=True)
class FatigueRate:
    """Overall fatigue rate on the 0-100 axis."""

    value: float

    def violations(self) -> list[str]:
        if not (math.isfinite(self.value) and 0.0 <= self.value <= 100.0):
            return ["fatigue rate outside [0,100]"]
        return []


def validate_record(record: DetectionRecord) -> list[str]:
    """Return every violated invariant of `record`; an empty list means ok."""
    out: list[str] = []
    out.extend(record.landmarks.violations())
    out.extend(record.demographics.violations())
    out.extend(record.left_eye_status.violations("left_eye_status"))
    out.extend(record.right_eye_status.violations("right_eye_status"))
    out.extend(record.quality.violations())
    if not record.bbox.width > 0:
        out.append("bbox width must be > 0")
    if not record.bbox.height > 0:
        out.append("bbox height must be > 0")
    try:
        record.post_date()
    except (OverflowError, OSError, ValueError):
        out.append("post_timestamp does not map to a valid calendar date")
    return out


# ---------------------------------------------------------------------------
# JSONL codec
# ---------------------------------------------------------------------------


class RecordDecodeError(ValueError):
    """Raised when a JSON object cannot be decoded into a DetectionRecord."""


def encode_record(record: DetectionRecord) -> dict[str, Any]:
    return {
        "face_id": record.face_id,
        "user_id": record.user_id,
        "post_timestamp": record.post_timestamp,
        "bbox": {
            "x": record.bbox.x,
            "y": record.bbox.y,
            "width": record.bbox.width,
            "height": record.bbox.height,
        },
        "landmarks": [[x, y] for x, y in record.landmarks.points],
        "demographics": {
            "age": record.demographics.age,
            "gender": record.demographics.gender.value,
            "gender_confidence": record.demographics.gender_confidence,
            "race": record.demographics.race,
            "race_confidence": record.demographics.race_confidence,
        },
        "left_eye_status": _encode_eye_status(record.left_eye_status),
        "right_eye_status": _encode_eye_status(record.right_eye_status),
        "quality": {
            "blur_value": record.quality.blur_value,
            "blur_threshold": record.quality.blur_threshold,
            "face_quality_value": record.quality.face_quality_value,
            "face_quality_threshold": record.quality.face_quality_threshold,
        },
        "source_tags": list(record.source_tags),
    }


def _encode_eye_status(es: EyeStatus) -> dict[str, Any]:
    return {
        "status": es.status.value,
        "confidences": {s.value: es.confidences[s] for s in EyeState if s in es.confidences},
    }


def _decode_eye_status(obj: Mapping[str, Any], where: str) -> EyeStatus:
    try:
        status = EyeState(obj["status"])
        confidences = {EyeState(k): float(v) for k, v in obj["confidences"].items()}
    except (KeyError, TypeError, ValueError) as exc:
        raise RecordDecodeError(f"bad {where}: {exc}") from exc
    return EyeStatus(status=status, confidences=confidences)


def decode_record(obj: Mapping[str, Any]) -> DetectionRecord:
    try:
        bbox = BBox(
            x=float(obj["bbox"]["x"]),
            y=float(obj["bbox"]["y"]),
            width=float(obj["bbox"]["width"]),
            height=float(obj["bbox"]["height"]),
        )
        landmarks = LandmarkSet(
            points=tuple((float(p[0]), float(p[1])) for p in obj["landmarks"])
        )
        demo = obj["demographics"]
        demographics = Demographics(
            age=int(demo["age"]),
            gender=Gender(demo["gender"]),
            gender_confidence=float(demo["gender_confidence"]),
            race=str(demo["race"]),
            race_confidence=float(demo["race_confidence"]),
        )
        quality = QualityReport(
            blur_value=float(obj["quality"]["blur_value"]),
            blur_threshold=float(obj["quality"]["blur_threshold"]),
            face_quality_value=float(obj["quality"]["face_quality_value"]),
            face_quality_threshold=float(obj["quality"]["face_quality_threshold"]),
        )
        return DetectionRecord(
            face_id=str(obj["face_id"]),
            user_id=str(obj["user_id"]),
            post_timestamp=int(obj["post_timestamp"]),
            bbox=bbox,
            landmarks=landmarks,
            demographics=demographics,
            left_eye_status=_decode_eye_status(obj["left_eye_status"], "left_eye_status"),
            right_eye_status=_decode_eye_status(obj["right_eye_status"], "right_eye_status"),
            quality=quality,
            source_tags=tuple(str(t) for t in obj.get("source_tags", [])),
        )
    except RecordDecodeError:
        raise
    except (KeyError, TypeError, ValueError, IndexError) as exc:
        raise RecordDecodeError(str(exc)) from exc


def record_to_json(record: DetectionRecord) -> str:
    return json.dumps(encode_record(record), separators=(",", ":"))


def record_from_json(line: str) -> DetectionRecord:
    try:
        obj = json.loads(line)
    except json.JSONDecodeError as exc:
        raise RecordDecodeError(f"invalid JSON: {exc}") from exc
    if not isinstance(obj, dict):
        raise RecordDecodeError("record line is not a JSON object")
    return decode_record(obj)
