"""Deterministic synthetic faces for fixtures, demos, and tests.

Landmarks are laid out as ellipse rings in the canonical 83-point index
table; images are seeded gradients with darkened eye/mouth patches. Nothing
here is statistical: every output is a pure function of its arguments.
"""

from __future__ import annotations

import math

import numpy as np

from .core import (
    BBox,
    Demographics,
    DetectionRecord,
    EyeState,
    EyeStatus,
    Gender,
    LandmarkSet,
    QualityReport,
)


def _ring(cx: float, cy: float, rx: float, ry: float, count: int) -> list[tuple[float, float]]:
    pts = []
    for k in range(count):
        theta = 2.0 * math.pi * k / count
        pts.append((cx + rx * math.cos(theta), cy + ry * math.sin(theta)))
    return pts


def make_landmarks(cx: float = 0.5, cy: float = 0.45, scale: float = 1.0) -> LandmarkSet:
    """A plausible, mirror-symmetric 83-point face around (cx, cy)."""
    s = scale
    contour = _ring(cx, cy + 0.05 * s, 0.30 * s, 0.38 * s, 19)
    brows = _ring(cx - 0.15 * s, cy - 0.12 * s, 0.07 * s, 0.015 * s, 8) + _ring(
        cx + 0.15 * s, cy - 0.12 * s, 0.07 * s, 0.015 * s, 8
    )
    left_eye = _ring(cx - 0.15 * s, cy - 0.05 * s, 0.05 * s, 0.02 * s, 10)
    right_eye = [(2.0 * cx - x, y) for x, y in left_eye]
    nose = _ring(cx, cy + 0.05 * s, 0.03 * s, 0.06 * s, 10)
    mouth = _ring(cx, cy + 0.20 * s, 0.08 * s, 0.03 * s, 18)
    points = tuple(contour + brows + left_eye + right_eye + nose + mouth)
    return LandmarkSet(points=points)


def open_eye_status(confidence: float = 96.0) -> EyeStatus:
    confidences = {state: 1.0 for state in EyeState}
    confidences[EyeState.NO_GLASSES_EYE_OPEN] = confidence
    return EyeStatus(status=EyeState.NO_GLASSES_EYE_OPEN, confidences=confidences)


def eye_status_of(state: EyeState, confidence: float = 90.0) -> EyeStatus:
    confidences = {s: 1.0 for s in EyeState}
    confidences[state] = confidence
    return EyeStatus(status=state, confidences=confidences)


def make_record(
    face_id: str,
    user_id: str = "user",
    post_timestamp: int = 1_600_000_000,
    age: int = 30,
    gender: Gender = Gender.FEMALE,
    race: str = "caucasian",
    bbox: BBox | None = None,
    landmarks: LandmarkSet | None = None,
    left_eye: EyeStatus | None = None,
    right_eye: EyeStatus | None = None,
    blur_value: float = 5.0,
    blur_threshold: float = 50.0,
    face_quality_value: float = 80.0,
    face_quality_threshold: float = 70.0,
    source_tags: tuple[str, ...] = ("#selfie",),
) -> DetectionRecord:
    """A valid record that passes the default quality filter unless overridden."""
    return DetectionRecord(
        face_id=face_id,
        user_id=user_id,
        post_timestamp=post_timestamp,
        bbox=bbox or BBox(x=10.0, y=12.0, width=100.0, height=120.0),
        landmarks=landmarks or make_landmarks(),
        demographics=Demographics(
            age=age,
            gender=gender,
            gender_confidence=95.0,
            race=race,
            race_confidence=90.0,
        ),
        left_eye_status=left_eye or open_eye_status(),
        right_eye_status=right_eye or open_eye_status(),
        quality=QualityReport(
            blur_value=blur_value,
            blur_threshold=blur_threshold,
            face_quality_value=face_quality_value,
            face_quality_threshold=face_quality_threshold,
        ),
        source_tags=source_tags,
    )


def make_face_image(seed: int, size: int = 64) -> np.ndarray:
    """Seeded uint8 grayscale face stand-in: gradient + darker eye/mouth patches."""
    rng = np.random.default_rng(seed)
    ys, xs = np.mgrid[0:size, 0:size].astype(float) / (size - 1)
    img = 0.45 + 0.25 * xs + 0.10 * ys + rng.normal(0.0, 0.02, size=(size, size))

    def darken(cx: float, cy: float, rx: float, ry: float, amount: float) -> None:
        mask = ((xs - cx) / rx) ** 2 + ((ys - cy) / ry) ** 2 <= 1.0
        img[mask] -= amount

    darken(0.35, 0.40, 0.10, 0.05, 0.25)
    darken(0.65, 0.40, 0.10, 0.05, 0.25)
    darken(0.50, 0.65, 0.14, 0.05, 0.20)
    return (np.clip(img, 0.0, 1.0) * 255.0).astype(np.uint8)
