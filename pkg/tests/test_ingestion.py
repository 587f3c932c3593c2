import itertools
import json

import pytest

from fatiguescope.core import EyeState, Gender, record_to_json
from fatiguescope.ingestion import (
    FilterPolicy,
    RejectReason,
    age_bucket,
    demographic_histogram,
    ingest,
    ingest_lines,
    quality_filter,
)
from fatiguescope.synthetic import eye_status_of, make_record, open_eye_status

from conftest import record_batch


def lines_for(records):
    return [record_to_json(r) for r in records]


def test_keep_when_all_criteria_hold(valid_record):
    assert quality_filter(valid_record, FilterPolicy()) is None


def test_dark_glasses_rejects_eye_status(valid_record):
    record = make_record("f", left_eye=eye_status_of(EyeState.DARK_GLASSES))
    assert quality_filter(record, FilterPolicy()) is RejectReason.EYE_STATUS


def test_blur_boundary_equality_rejects():
    record = make_record("f", blur_value=50.0, blur_threshold=50.0)
    assert quality_filter(record, FilterPolicy()) is RejectReason.BLUR


def test_face_quality_boundary_equality_rejects():
    record = make_record("f", face_quality_value=70.0, face_quality_threshold=70.0)
    assert quality_filter(record, FilterPolicy()) is RejectReason.FACE_QUALITY


def test_reject_reason_order_eye_status_first():
    record = make_record(
        "f",
        left_eye=eye_status_of(EyeState.NO_GLASSES_EYE_CLOSE),
        blur_value=99.0,
        blur_threshold=50.0,
        face_quality_value=1.0,
    )
    assert quality_filter(record, FilterPolicy()) is RejectReason.EYE_STATUS


def test_filter_truth_table_exhaustive():
    """Every (left, right, blur, quality) combination matches the predicate."""
    policy = FilterPolicy()
    states = list(EyeState)
    for left, right, blur_ok, quality_ok in itertools.product(
        states, states, (True, False), (True, False)
    ):
        record = make_record(
            "f",
            left_eye=eye_status_of(left),
            right_eye=eye_status_of(right),
            blur_value=5.0 if blur_ok else 60.0,
            blur_threshold=50.0,
            face_quality_value=80.0 if quality_ok else 60.0,
            face_quality_threshold=70.0,
        )
        eyes_ok = left is EyeState.NO_GLASSES_EYE_OPEN and right is EyeState.NO_GLASSES_EYE_OPEN
        expected = None
        if not eyes_ok:
            expected = RejectReason.EYE_STATUS
        elif not blur_ok:
            expected = RejectReason.BLUR
        elif not quality_ok:
            expected = RejectReason.FACE_QUALITY
        assert quality_filter(record, policy) is expected


def test_filter_monotone_in_policy():
    """Disabling a criterion never converts keep into reject."""
    policies = [
        FilterPolicy(enforce_blur=blur, enforce_face_quality=quality)
        for blur in (True, False)
        for quality in (True, False)
    ]
    samples = [
        make_record("a"),
        make_record("b", blur_value=60.0),
        make_record("c", face_quality_value=60.0),
        make_record("d", left_eye=eye_status_of(EyeState.DARK_GLASSES)),
    ]
    strict = FilterPolicy()
    for record in samples:
        if quality_filter(record, strict) is None:
            for relaxed in policies:
                assert quality_filter(record, relaxed) is None


def test_min_posts_drops_small_users():
    records = (
        record_batch("u1", 25) + record_batch("u2", 19) + record_batch("u3", 30)
    )
    corpus, stats = ingest_lines(lines_for(records), FilterPolicy(min_posts=20))
    assert sorted(corpus.users) == ["u1", "u3"]
    assert stats.rejected[RejectReason.MIN_POSTS] == 19
    assert stats.kept == 55
    assert stats.records_read == 74


def test_empty_file(tmp_path):
    path = tmp_path / "empty.jsonl"
    path.write_text("")
    corpus, stats = ingest(path, FilterPolicy())
    assert corpus.users == {}
    assert stats.records_read == 0
    assert stats.kept == 0


def test_collection_tags_recorded_as_metadata(tmp_path):
    from fatiguescope.ingestion import COLLECTION_TAGS

    path = tmp_path / "c.jsonl"
    path.write_text("\n".join(lines_for(record_batch("u1", 2))) + "\n")
    corpus, _ = ingest(path, FilterPolicy(min_posts=1))
    assert corpus.collected_tags == COLLECTION_TAGS
    assert len(COLLECTION_TAGS) == 10


def test_malformed_line_counted_with_line_number():
    records = record_batch("u1", 10)
    lines = lines_for(records)
    lines.insert(4, "{broken json")
    corpus, stats = ingest_lines(lines, FilterPolicy(min_posts=1))
    assert stats.records_read == 11
    assert stats.kept == 10
    assert stats.rejected[RejectReason.MALFORMED] == 1
    assert stats.malformed_lines[0][0] == 5


def test_counts_always_sum():
    records = (
        record_batch("u1", 5)
        + record_batch("u2", 2)
        + [make_record("bad-blur", user_id="u1", blur_value=99.0)]
    )
    lines = lines_for(records) + ["not json"]
    corpus, stats = ingest_lines(lines, FilterPolicy(min_posts=3))
    stats.check_conservation()
    assert stats.records_read == 9


def test_filtering_is_order_independent():
    records = (
        record_batch("u1", 4)
        + record_batch("u2", 6)
        + [make_record("x", user_id="u2", blur_value=99.0)]
    )
    lines = lines_for(records)
    corpus_a, stats_a = ingest_lines(lines, FilterPolicy(min_posts=5))
    corpus_b, stats_b = ingest_lines(list(reversed(lines)), FilterPolicy(min_posts=5))
    assert sorted(corpus_a.users) == sorted(corpus_b.users)
    assert stats_a.kept == stats_b.kept
    assert stats_a.rejected == stats_b.rejected


def test_policy_validation():
    with pytest.raises(ValueError):
        ingest_lines([], FilterPolicy(min_posts=0))


def test_unreadable_file():
    with pytest.raises(OSError):
        ingest("/nonexistent/never.jsonl", FilterPolicy())


# ---------------------------------------------------------------------------
# demographic histogram
# ---------------------------------------------------------------------------


def test_age_bucket_boundaries():
    assert age_bucket(0) == "0-10"
    assert age_bucket(15) == "10-20"
    assert age_bucket(34) == "30-40"
    assert age_bucket(40) == "40-50"
    assert age_bucket(79) == "70-80"
    assert age_bucket(80) == "80+"


def test_histogram_buckets_users_by_age():
    records = record_batch("u1", 3, age=15) + record_batch("u2", 3, age=34)
    corpus, _ = ingest_lines(lines_for(records), FilterPolicy(min_posts=1))
    hist = demographic_histogram(corpus)
    assert hist.age_buckets == {"10-20": 1, "30-40": 1}


def test_histogram_majority_vote_gender():
    records = [
        make_record("a", user_id="u1", gender=Gender.MALE, post_timestamp=1_600_000_000),
        make_record("b", user_id="u1", gender=Gender.MALE, post_timestamp=1_600_086_400),
        make_record("c", user_id="u1", gender=Gender.FEMALE, post_timestamp=1_600_172_800),
    ]
    corpus, _ = ingest_lines(lines_for(records), FilterPolicy(min_posts=1))
    hist = demographic_histogram(corpus)
    assert hist.gender == {"male": 1}


def test_histogram_gender_tie_counted_ambiguous():
    records = [
        make_record("a", user_id="u1", gender=Gender.MALE),
        make_record("b", user_id="u1", gender=Gender.FEMALE, post_timestamp=1_600_086_400),
    ]
    corpus, _ = ingest_lines(lines_for(records), FilterPolicy(min_posts=1))
    hist = demographic_histogram(corpus)
    assert hist.gender == {}
    assert hist.ambiguous_users == {"gender": 1}


def test_histogram_population_shape():
    # 30 male / 65 female single-record users.
    records = [
        make_record(f"m{i}", user_id=f"um{i}", gender=Gender.MALE) for i in range(30)
    ] + [
        make_record(f"f{i}", user_id=f"uf{i}", gender=Gender.FEMALE) for i in range(65)
    ]
    corpus, _ = ingest_lines(lines_for(records), FilterPolicy(min_posts=1))
    hist = demographic_histogram(corpus)
    assert hist.gender == {"male": 30, "female": 65}


def test_histogram_unknown_race_excluded():
    records = [make_record("a", user_id="u1", race="unknown_species")]
    corpus, _ = ingest_lines(lines_for(records), FilterPolicy(min_posts=1))
    hist = demographic_histogram(corpus)
    assert hist.race == {}
    assert hist.unknown_race_users == 1


def test_histogram_empty_corpus_raises():
    corpus, _ = ingest_lines([], FilterPolicy())
    with pytest.raises(ValueError):
        demographic_histogram(corpus)


def test_histogram_mean_confidences():
    records = record_batch("u1", 2)
    corpus, _ = ingest_lines(lines_for(records), FilterPolicy(min_posts=1))
    hist = demographic_histogram(corpus)
    assert hist.mean_gender_confidence == pytest.approx(95.0)
    assert hist.mean_race_confidence == pytest.approx(90.0)


def test_stats_json_shape():
    records = record_batch("u1", 3)
    _, stats = ingest_lines(lines_for(records), FilterPolicy(min_posts=1))
    obj = stats.to_obj()
    parsed = json.loads(json.dumps(obj))
    assert parsed["records_read"] == 3
    assert set(parsed["rejected"]) == {r.value for r in RejectReason}
