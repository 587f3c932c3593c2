import numpy as np
import pytest

from fatiguescope.core import CUE_FIELDS, LANDMARK_GROUPS, LandmarkSet
from fatiguescope.roi import (
    CUE_ROI_MAP,
    MarginConfig,
    RoiError,
    RoiKind,
    locate_rois,
)
from fatiguescope.synthetic import make_landmarks


def with_left_eye_span(x0, y0, x1, y1):
    """Fixture landmarks whose left-eye block spans exactly the given box."""
    pts = list(make_landmarks().points)
    idx = LANDMARK_GROUPS["left_eye"]
    pts[idx.start : idx.stop] = [(x0, y0), (x1, y1)] + [
        ((x0 + x1) / 2, (y0 + y1) / 2)
    ] * 8
    return LandmarkSet(points=tuple(pts))


def rect_of(rois, kind):
    return next(spec.rect for spec in rois if spec.kind is kind)


def test_six_rois_one_per_kind():
    rois = locate_rois(make_landmarks())
    assert [spec.kind for spec in rois] == list(RoiKind)


def test_eye_expansion_hand_computed():
    lm = with_left_eye_span(0.30, 0.45, 0.40, 0.50)
    rois = locate_rois(lm, MarginConfig(m_eye=0.5), clamp=False)
    rect = rect_of(rois, RoiKind.LEFT_EYE)
    assert rect.x == pytest.approx(0.25, abs=1e-12)
    assert rect.x1 == pytest.approx(0.45, abs=1e-12)
    assert rect.y == pytest.approx(0.425, abs=1e-12)
    assert rect.y1 == pytest.approx(0.525, abs=1e-12)


def test_eye_bottom_geometry():
    lm = with_left_eye_span(0.30, 0.45, 0.40, 0.50)
    rois = locate_rois(lm, MarginConfig(m_eye=0.5, h_frac=1.0), clamp=False)
    eye = rect_of(rois, RoiKind.LEFT_EYE)
    bottom = rect_of(rois, RoiKind.LEFT_EYE_BOTTOM)
    assert bottom.x == eye.x and bottom.w == eye.w
    assert bottom.y == pytest.approx(0.50, abs=1e-12)   # raw eye box bottom
    assert bottom.h == pytest.approx(0.05, abs=1e-12)   # h_frac * eye box height


def test_clamped_inside_unit_square():
    # Oversized margins push raw rects outside the image; clamping reins them in.
    lm = make_landmarks(cx=0.35, cy=0.45)
    margins = MarginConfig(m_eye=5.0, m_mouth=4.0)
    unclamped = locate_rois(lm, margins, clamp=False)
    assert any(
        s.rect.x < 0 or s.rect.y < 0 or s.rect.x1 > 1 or s.rect.y1 > 1 for s in unclamped
    )
    for spec in locate_rois(lm, margins, clamp=True):
        rect = spec.rect
        assert 0.0 <= rect.x <= rect.x1 <= 1.0
        assert 0.0 <= rect.y <= rect.y1 <= 1.0
        assert rect.w > 0 and rect.h > 0


def test_mirror_symmetry():
    rois = locate_rois(make_landmarks(), clamp=False)
    left = rect_of(rois, RoiKind.LEFT_EYE)
    right = rect_of(rois, RoiKind.RIGHT_EYE)
    assert right.x == pytest.approx(1.0 - left.x1, abs=1e-12)
    assert right.x1 == pytest.approx(1.0 - left.x, abs=1e-12)
    assert right.y == pytest.approx(left.y, abs=1e-12)
    assert right.h == pytest.approx(left.h, abs=1e-12)


def test_translation_equivariance_unclamped():
    dx, dy = 0.02, -0.015
    base = make_landmarks()
    shifted = LandmarkSet(points=tuple((x + dx, y + dy) for x, y in base.points))
    rois_a = locate_rois(base, clamp=False)
    rois_b = locate_rois(shifted, clamp=False)
    for a, b in zip(rois_a, rois_b):
        assert b.rect.x == pytest.approx(a.rect.x + dx, abs=1e-12)
        assert b.rect.y == pytest.approx(a.rect.y + dy, abs=1e-12)
        assert b.rect.w == pytest.approx(a.rect.w, abs=1e-12)
        assert b.rect.h == pytest.approx(a.rect.h, abs=1e-12)


def test_degenerate_eye_raises_with_kind():
    pts = list(make_landmarks().points)
    idx = LANDMARK_GROUPS["right_eye"]
    pts[idx.start : idx.stop] = [(0.6, 0.4)] * 10
    with pytest.raises(RoiError) as err:
        locate_rois(LandmarkSet(points=tuple(pts)))
    assert err.value.kind is RoiKind.RIGHT_EYE


def test_cheek_between_eye_centers_left_half():
    rois = locate_rois(make_landmarks(), MarginConfig(cheek_side="left"), clamp=False)
    cheek = rect_of(rois, RoiKind.CHEEK)
    assert cheek.x == pytest.approx(0.35, abs=1e-9)   # left eye center
    assert cheek.x1 == pytest.approx(0.50, abs=1e-9)  # midline
    full = rect_of(
        locate_rois(make_landmarks(), MarginConfig(cheek_side="full"), clamp=False),
        RoiKind.CHEEK,
    )
    assert full.x1 == pytest.approx(0.65, abs=1e-9)   # right eye center


def test_cheek_degenerate_when_mouth_overlaps():
    pts = list(make_landmarks().points)
    idx = LANDMARK_GROUPS["mouth"]
    # Hoist the mouth up into the eye region.
    pts[idx.start : idx.stop] = [(x, y - 0.25) for x, y in pts[idx.start : idx.stop]]
    with pytest.raises(RoiError) as err:
        locate_rois(LandmarkSet(points=tuple(pts)))
    assert err.value.kind is RoiKind.CHEEK


def test_invalid_margins():
    with pytest.raises(ValueError):
        locate_rois(make_landmarks(), MarginConfig(m_eye=-0.1))
    with pytest.raises(ValueError):
        locate_rois(make_landmarks(), MarginConfig(cheek_side="nose"))


def test_cue_roi_map_covers_all_cues_exactly_once():
    mapped = [cue for cues in CUE_ROI_MAP.values() for cue in cues]
    assert sorted(mapped) == sorted(CUE_FIELDS)
    assert set(CUE_ROI_MAP) == {"eye", "eye_bottom", "cheek", "mouth"}
