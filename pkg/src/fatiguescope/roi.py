"""Landmark-driven face regions: six areas of interest for the cue descriptors.

Geometry conventions (all in normalized image coordinates):
  - eye ROI: bounding box of that eye's 10 landmarks, expanded on each side by
    margin * the box's own extent in that axis;
  - eye-bottom ROI: the expanded eye width, hung directly beneath the raw eye
    box with height = h_frac * the eye box height;
  - cheek ROI: from the lower edge of the eye-bottom ROIs down to the top of
    the mouth box, horizontally over the configured cheek side between the
    two eye centers (default: left half, i.e. left eye center to the midline);
  - mouth ROI: mouth landmark box expanded like the eyes with its own margin.

The ROI-to-cue coverage is fixed: eyes carry hanging eyelids, red eyes,
swollen eyes, glazed eyes, and wrinkles; eye-bottoms carry dark circles;
cheek carries pale skin; mouth carries droopy corner mouth.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

from .core import LandmarkSet


class RoiKind(Enum):
    LEFT_EYE = "left_eye"
    RIGHT_EYE = "right_eye"
    LEFT_EYE_BOTTOM = "left_eye_bottom"
    RIGHT_EYE_BOTTOM = "right_eye_bottom"
    CHEEK = "cheek"
    MOUTH = "mouth"


# Descriptor kinds after left/right pairing, in feature-vector order.
PAIRED_KINDS = ("eye", "eye_bottom", "cheek", "mouth")

CUE_ROI_MAP: dict[str, tuple[str, ...]] = {
    "eye": ("hanging_eyelids", "red_eyes", "swollen_eyes", "glazed_eyes", "wrinkles"),
    "eye_bottom": ("dark_circles",),
    "cheek": ("pale_skin",),
    "mouth": ("droopy_corner_mouth",),
}


class RoiError(ValueError):
    """A region could not be constructed from the landmarks."""

    def __init__(self, kind: RoiKind, message: str) -> None:
        super().__init__(f"{kind.value}: {message}")
        self.kind = kind


@dataclass(frozen=True)
class Rect:
    """Axis-aligned rectangle, normalized coordinates."""

    x: float
    y: float
    w: float
    h: float

    @property
    def x1(self) -> float:
        return self.x + self.w

    @property
    def y1(self) -> float:
        return self.y + self.h

    def clamped(self) -> "Rect":
        x0 = min(max(self.x, 0.0), 1.0)
        y0 = min(max(self.y, 0.0), 1.0)
        x1 = min(max(self.x1, 0.0), 1.0)
        y1 = min(max(self.y1, 0.0), 1.0)
        return Rect(x=x0, y=y0, w=x1 - x0, h=y1 - y0)


@dataclass(frozen=True)
class RoiSpec:
    kind: RoiKind
    rect: Rect


@dataclass(frozen=True)
class MarginConfig:
    m_eye: float = 0.5
    h_frac: float = 1.0
    m_mouth: float = 0.3
    cheek_side: str = "left"  # "left" | "right" | "full"

    def validate(self) -> None:
        if self.m_eye < 0 or self.m_mouth < 0 or self.h_frac <= 0:
            raise ValueError("margins must be non-negative and h_frac positive")
        if self.cheek_side not in ("left", "right", "full"):
            raise ValueError(f"unknown cheek_side {self.cheek_side!r}")


def _bbox(points: tuple[tuple[float, float], ...]) -> tuple[float, float, float, float]:
    xs = [p[0] for p in points]
    ys = [p[1] for p in points]
    return min(xs), min(ys), max(xs), max(ys)


def _expanded(box: tuple[float, float, float, float], margin: float) -> Rect:
    x0, y0, x1, y1 = box
    w = x1 - x0
    h = y1 - y0
    return Rect(x=x0 - margin * w, y=y0 - margin * h, w=w * (1 + 2 * margin), h=h * (1 + 2 * margin))


def locate_rois(
    landmarks: LandmarkSet,
    margins: MarginConfig | None = None,
    clamp: bool = True,
) -> tuple[RoiSpec, ...]:
    """The six areas of interest for a face, in fixed order.

    Order: left_eye, right_eye, left_eye_bottom, right_eye_bottom, cheek,
    mouth. With clamp=True every rect is intersected with the unit square;
    with clamp=False raw rects are returned (they shift rigidly with the
    landmarks). Degenerate geometry raises RoiError naming the region.
    """
    margins = margins or MarginConfig()
    margins.validate()
    bad = landmarks.violations()
    if bad:
        raise ValueError(f"invalid landmarks: {bad[0]}")

    boxes: dict[str, tuple[float, float, float, float]] = {}
    for name, kind in (
        ("left_eye", RoiKind.LEFT_EYE),
        ("right_eye", RoiKind.RIGHT_EYE),
        ("mouth", RoiKind.MOUTH),
    ):
        box = _bbox(landmarks.group(name))
        if box[2] - box[0] <= 0.0 or box[3] - box[1] <= 0.0:
            raise RoiError(kind, "zero-area landmark bounding box")
        boxes[name] = box

    left_eye = _expanded(boxes["left_eye"], margins.m_eye)
    right_eye = _expanded(boxes["right_eye"], margins.m_eye)
    mouth = _expanded(boxes["mouth"], margins.m_mouth)

    def eye_bottom(eye_rect: Rect, raw: tuple[float, float, float, float], kind: RoiKind) -> Rect:
        x0, y0, x1, y1 = raw
        h = (y1 - y0) * margins.h_frac
        if h <= 0:
            raise RoiError(kind, "zero-height eye-bottom strip")
        return Rect(x=eye_rect.x, y=y1, w=eye_rect.w, h=h)

    left_bottom = eye_bottom(left_eye, boxes["left_eye"], RoiKind.LEFT_EYE_BOTTOM)
    right_bottom = eye_bottom(right_eye, boxes["right_eye"], RoiKind.RIGHT_EYE_BOTTOM)

    lx0, ly0, lx1, ly1 = boxes["left_eye"]
    rx0, ry0, rx1, ry1 = boxes["right_eye"]
    left_center = (lx0 + lx1) / 2.0
    right_center = (rx0 + rx1) / 2.0
    if right_center <= left_center:
        raise RoiError(RoiKind.CHEEK, "eye centers do not span a horizontal range")
    midline = (left_center + right_center) / 2.0
    if margins.cheek_side == "left":
        cx0, cx1 = left_center, midline
    elif margins.cheek_side == "right":
        cx0, cx1 = midline, right_center
    else:
        cx0, cx1 = left_center, right_center
    cy0 = max(left_bottom.y1, right_bottom.y1)
    cy1 = boxes["mouth"][1]
    if cy1 <= cy0:
        raise RoiError(RoiKind.CHEEK, "mouth overlaps the eye-bottom region")
    cheek = Rect(x=cx0, y=cy0, w=cx1 - cx0, h=cy1 - cy0)

    rois = (
        RoiSpec(RoiKind.LEFT_EYE, left_eye),
        RoiSpec(RoiKind.RIGHT_EYE, right_eye),
        RoiSpec(RoiKind.LEFT_EYE_BOTTOM, left_bottom),
        RoiSpec(RoiKind.RIGHT_EYE_BOTTOM, right_bottom),
        RoiSpec(RoiKind.CHEEK, cheek),
        RoiSpec(RoiKind.MOUTH, mouth),
    )
    if not clamp:
        return rois

    clamped: list[RoiSpec] = []
    for spec in rois:
        rect = spec.rect.clamped()
        if rect.w <= 0.0 or rect.h <= 0.0:
            raise RoiError(spec.kind, "region lies entirely outside the image")
        clamped.append(RoiSpec(spec.kind, rect))
    return tuple(clamped)
