import dataclasses

import pytest

from fatiguescope.core import (
    CUE_FIELDS,
    LANDMARK_COUNT,
    LANDMARK_GROUPS,
    CueRatings,
    EyeState,
    EyeStatus,
    FatigueRate,
    LandmarkSet,
    RatingScale,
    RecordDecodeError,
    record_from_json,
    record_to_json,
    validate_record,
)
from fatiguescope.synthetic import make_landmarks, make_record


def test_landmark_group_table_covers_83_points():
    covered = sorted(i for r in LANDMARK_GROUPS.values() for i in r)
    assert covered == list(range(LANDMARK_COUNT))
    assert len(LANDMARK_GROUPS["left_eye"]) == 10
    assert len(LANDMARK_GROUPS["right_eye"]) == 10


def test_valid_record_passes(valid_record):
    assert validate_record(valid_record) == []


def test_landmark_count_violation(valid_record):
    short = LandmarkSet(points=valid_record.landmarks.points[:82])
    record = dataclasses.replace(valid_record, landmarks=short)
    violations = validate_record(record)
    assert any("landmark count" in v for v in violations)


def test_coordinate_range_violation(valid_record):
    pts = list(valid_record.landmarks.points)
    pts[5] = (1.5, 0.5)
    record = dataclasses.replace(valid_record, landmarks=LandmarkSet(points=tuple(pts)))
    assert any("outside [0,1]" in v for v in validate_record(record))


def test_bbox_violations(valid_record):
    record = dataclasses.replace(
        valid_record, bbox=dataclasses.replace(valid_record.bbox, width=0.0)
    )
    assert any("bbox width" in v for v in validate_record(record))


def test_eye_status_argmax_consistency(valid_record):
    broken = EyeStatus(
        status=EyeState.DARK_GLASSES,
        confidences=dict(valid_record.left_eye_status.confidences),
    )
    record = dataclasses.replace(valid_record, left_eye_status=broken)
    assert any("argmax" in v for v in validate_record(record))


def test_eye_status_tie_breaks_by_declaration_order():
    scores = {state: 50.0 for state in EyeState}
    status = EyeStatus.from_confidences(scores)
    assert status.status is EyeState.NO_GLASSES_EYE_OPEN


def test_timestamp_must_map_to_calendar_date(valid_record):
    record = dataclasses.replace(valid_record, post_timestamp=2**62)
    assert any("calendar" in v for v in validate_record(record))


def test_cue_ratings_integrality_and_range():
    single = CueRatings.from_values([0, 1, 2, 3, 4, 0, 1, 2])
    assert single.violations(integral=True) == []
    fractional = CueRatings.from_values([0.5] * 8)
    assert fractional.violations() == []
    assert any("integer" in v for v in fractional.violations(integral=True))
    out_of_range = CueRatings.from_values([5] + [0] * 7)
    assert any("hanging_eyelids" in v for v in out_of_range.violations())


def test_cue_field_order():
    assert CUE_FIELDS == (
        "hanging_eyelids",
        "red_eyes",
        "dark_circles",
        "pale_skin",
        "droopy_corner_mouth",
        "swollen_eyes",
        "glazed_eyes",
        "wrinkles",
    )


def test_fatigue_rate_bounds():
    assert FatigueRate(50.0).violations() == []
    assert FatigueRate(100.5).violations()
    assert FatigueRate(-0.1).violations()


def test_record_roundtrip_bit_for_bit(valid_record):
    # Exercise non-default float values everywhere.
    record = dataclasses.replace(
        valid_record,
        landmarks=make_landmarks(cx=0.5123456789, cy=0.447, scale=0.93),
    )
    line = record_to_json(record)
    decoded = record_from_json(line)
    assert decoded == record
    assert record_to_json(decoded) == line


def test_roundtrip_preserves_eye_status_argmax(valid_record):
    decoded = record_from_json(record_to_json(valid_record))
    assert decoded.left_eye_status.violations("left_eye_status") == []


def test_malformed_json_raises():
    with pytest.raises(RecordDecodeError):
        record_from_json("{not json")
    with pytest.raises(RecordDecodeError):
        record_from_json('{"face_id": "x"}')
    with pytest.raises(RecordDecodeError):
        record_from_json('["array", "not", "object"]')


def test_scale_enum_values():
    assert RatingScale("rater_0_4") is RatingScale.RATER_0_4
    assert RatingScale("percent_0_100") is RatingScale.PERCENT_0_100


def test_make_record_is_valid_fixture():
    assert validate_record(make_record("any", user_id="u")) == []
