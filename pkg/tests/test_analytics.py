import dataclasses

import numpy as np
import pytest

from fatiguescope.core import BBox, Gender
from fatiguescope.analytics import (
    AmbiguousUserError,
    DegenerateSampleError,
    WEEKDAYS,
    cohort_report,
    fatigue_histogram,
    identify_user_faces,
    pairwise_group_comparison,
    two_sample_ttest,
    weekday_aggregate,
    weekday_of,
)
from fatiguescope.ingestion import TimelineCorpus
from fatiguescope.synthetic import make_record

# 2021-03-07 00:00 UTC is a Sunday.
SUNDAY = 1_615_075_200
DAY = 86_400


def ts(day_index: int) -> int:
    return SUNDAY + day_index * DAY


def test_weekday_of_utc():
    assert weekday_of(SUNDAY) == "Sun"
    assert weekday_of(ts(1)) == "Mon"
    assert weekday_of(ts(6)) == "Sat"


def test_largest_bbox_wins():
    big = make_record("big", user_id="u", bbox=BBox(0, 0, 100, 100))
    small = make_record("small", user_id="u", bbox=BBox(0, 0, 50, 50))
    profile = identify_user_faces([small, big])  # same post_timestamp: one post
    assert profile.face_ids == ("big",)


def test_bbox_tie_breaks_on_width_then_order():
    wide = make_record("wide", user_id="u", bbox=BBox(0, 0, 200, 50))
    tall = make_record("tall", user_id="u", bbox=BBox(0, 0, 50, 200))
    assert identify_user_faces([tall, wide]).face_ids == ("wide",)
    first = make_record("first", user_id="u", bbox=BBox(0, 0, 100, 100))
    second = make_record("second", user_id="u", bbox=BBox(5, 5, 100, 100))
    assert identify_user_faces([first, second]).face_ids == ("first",)


def test_modal_majority_rejects_mismatched_candidate():
    records = [
        make_record("a", user_id="u", gender=Gender.MALE, post_timestamp=ts(0)),
        make_record("b", user_id="u", gender=Gender.MALE, post_timestamp=ts(1)),
        make_record("c", user_id="u", gender=Gender.FEMALE, post_timestamp=ts(2)),
    ]
    profile = identify_user_faces(records)
    assert profile.modal_gender is Gender.MALE
    assert profile.modal_race == "caucasian"
    assert profile.face_ids == ("a", "b")


def test_modal_tie_raises_ambiguous():
    records = [
        make_record("a", user_id="u", gender=Gender.MALE, post_timestamp=ts(0)),
        make_record("b", user_id="u", gender=Gender.FEMALE, post_timestamp=ts(1)),
    ]
    with pytest.raises(AmbiguousUserError) as err:
        identify_user_faces(records)
    assert err.value.dimension == "gender"


def test_single_face_timeline_accepted():
    profile = identify_user_faces([make_record("only", user_id="u")])
    assert profile.face_ids == ("only",)


def test_mixed_users_rejected():
    with pytest.raises(ValueError):
        identify_user_faces(
            [make_record("a", user_id="u1"), make_record("b", user_id="u2")]
        )


def test_weekday_aggregate_means():
    records = [
        make_record("m1", user_id="u", post_timestamp=ts(1)),
        make_record("m2", user_id="u", post_timestamp=ts(8)),  # next Monday
        make_record("s1", user_id="u", post_timestamp=ts(0)),
    ]
    profile = identify_user_faces(records)
    rates = {"m1": 50.0, "m2": 60.0, "s1": 47.0}
    timestamps = {r.face_id: r.post_timestamp for r in records}
    wf = weekday_aggregate(profile, rates, timestamps)
    assert wf.means["Mon"] == 55.0
    assert wf.counts["Mon"] == 2
    assert wf.means["Sun"] == 47.0
    assert set(wf.means) == {"Sun", "Mon"}


def test_weekday_aggregate_one_face_per_day():
    records = [
        make_record(f"f{i}", user_id="u", post_timestamp=ts(i)) for i in range(7)
    ]
    profile = identify_user_faces(records)
    rates = {f"f{i}": 40.0 + i for i in range(7)}
    wf = weekday_aggregate(profile, rates, {r.face_id: r.post_timestamp for r in records})
    assert list(wf.means) == list(WEEKDAYS)
    assert all(wf.counts[d] == 1 for d in WEEKDAYS)
    assert wf.means["Sun"] == 40.0 and wf.means["Sat"] == 46.0


def test_weekday_aggregate_missing_rate():
    profile = identify_user_faces([make_record("x", user_id="u")])
    with pytest.raises(KeyError):
        weekday_aggregate(profile, {}, {"x": ts(0)})


# ---------------------------------------------------------------------------
# Welch t-test
# ---------------------------------------------------------------------------


def test_welch_hand_derived_example():
    r = two_sample_ttest([1, 2, 3, 4, 5], [3, 4, 5, 6, 7])
    assert r.difference == pytest.approx(-2.0, abs=1e-12)
    assert r.t_statistic == pytest.approx(-2.0, abs=1e-12)
    assert r.df == pytest.approx(8.0, abs=1e-12)
    assert r.p_value == pytest.approx(0.0805, abs=0.002)
    assert r.ci_low == pytest.approx(-4.306, abs=0.01)
    assert r.ci_high == pytest.approx(0.306, abs=0.01)
    assert r.test_kind == "welch-t"
    assert r.sample_sizes == (5, 5)


def test_identical_samples_p_one():
    r = two_sample_ttest([1.0, 2.0, 3.0], [1.0, 2.0, 3.0])
    assert r.difference == 0.0
    assert r.p_value == pytest.approx(1.0, abs=1e-9)


def test_welch_symmetry_seeded():
    rng = np.random.default_rng(12)
    for _ in range(1000):
        a = rng.normal(0, 1, rng.integers(3, 8))
        b = rng.normal(0.5, 2, rng.integers(3, 8))
        fwd = two_sample_ttest(a, b)
        rev = two_sample_ttest(b, a)
        assert fwd.difference == pytest.approx(-rev.difference, abs=1e-12)
        assert fwd.ci_low == pytest.approx(-rev.ci_high, abs=1e-12)
        assert fwd.ci_high == pytest.approx(-rev.ci_low, abs=1e-12)
        assert fwd.p_value == pytest.approx(rev.p_value, abs=1e-12)


def test_welch_scale_equivariance_seeded():
    rng = np.random.default_rng(13)
    for _ in range(1000):
        a = rng.normal(10, 3, 6)
        b = rng.normal(12, 1, 5)
        c = float(rng.uniform(0.1, 10))
        base = two_sample_ttest(a, b)
        scaled = two_sample_ttest(c * a, c * b)
        assert scaled.difference == pytest.approx(c * base.difference, rel=1e-9)
        assert scaled.ci_low == pytest.approx(c * base.ci_low, rel=1e-9)
        assert scaled.ci_high == pytest.approx(c * base.ci_high, rel=1e-9)
        assert scaled.p_value == pytest.approx(base.p_value, abs=1e-9)


def test_welch_degenerate_inputs():
    with pytest.raises(DegenerateSampleError):
        two_sample_ttest([1.0], [1.0, 2.0])
    with pytest.raises(DegenerateSampleError):
        two_sample_ttest([2.0, 2.0], [3.0, 3.0])


def test_pairwise_counts_and_significance():
    rng = np.random.default_rng(21)
    groups = {
        "g50": list(rng.normal(50, 1, 100)),
        "g55": list(rng.normal(55, 1, 100)),
        "g50b": list(rng.normal(50, 1, 100)),
    }
    results, skipped = pairwise_group_comparison(groups)
    assert len(results) == 3
    assert not skipped
    by_pair = {r.group_labels: r for r in results}
    separated = by_pair[("g50", "g55")]
    assert separated.significant is True
    assert not (separated.ci_low <= 0.0 <= separated.ci_high)
    overlapping = by_pair[("g50", "g50b")]
    assert overlapping.significant is False


def test_pairwise_identical_groups_not_significant():
    base = list(np.random.default_rng(3).normal(50, 1, 40))
    results, _ = pairwise_group_comparison({"a": base, "b": list(base)})
    assert results[0].significant is False
    assert results[0].p_value == pytest.approx(1.0, abs=1e-9)


def test_pairwise_degenerate_group_skipped():
    # Two flat groups cannot be Welch-compared with each other (zero variance
    # on both sides) and one is too small to compare with anything.
    results, skipped = pairwise_group_comparison(
        {"ok": [1.0, 2.0, 3.0], "flat1": [5.0, 5.0], "flat2": [6.0, 6.0], "tiny": [1.0]}
    )
    assert {r.group_labels for r in results} == {("ok", "flat1"), ("ok", "flat2")}
    assert len(skipped) == 4


# ---------------------------------------------------------------------------
# cohort report
# ---------------------------------------------------------------------------


def corpus_of(records_by_user):
    return TimelineCorpus(users={u: tuple(rs) for u, rs in records_by_user.items()})


def test_equal_weight_per_user_weekday_property():
    """100 Monday faces from one user weigh the same as 1 from another."""
    heavy = [
        make_record(f"h{i}", user_id="heavy", post_timestamp=ts(1) + i * 60)
        for i in range(100)
    ]
    light = [make_record("l0", user_id="light", post_timestamp=ts(8))]
    rates = {f"h{i}": 80.0 for i in range(100)}
    rates["l0"] = 40.0
    report = cohort_report(
        corpus_of({"heavy": heavy, "light": light}),
        rates,
        dimensions=["gender"],
        weekday=True,
        min_group_size=1,
    )
    monday = next(row for row in report.groups if row.key[-1] == "Mon")
    assert monday.n == 2
    assert monday.mean == pytest.approx((80.0 + 40.0) / 2.0)


def test_two_gender_groups_detected():
    rng = np.random.default_rng(5)
    users = {}
    rates = {}
    for i in range(20):
        uid = f"m{i}"
        users[uid] = [make_record(f"{uid}-f", user_id=uid, gender=Gender.MALE)]
        rates[f"{uid}-f"] = float(50.0 + rng.normal(0, 0.5))
    for i in range(20):
        uid = f"f{i}"
        users[uid] = [make_record(f"{uid}-f", user_id=uid, gender=Gender.FEMALE)]
        rates[f"{uid}-f"] = float(55.0 + rng.normal(0, 0.5))
    report = cohort_report(corpus_of(users), rates, dimensions=["gender"], min_group_size=20)
    assert [row.key for row in report.groups] == [("male",), ("female",)]
    means = {row.key[0]: row.mean for row in report.groups}
    assert means["male"] == pytest.approx(50.0, abs=0.5)
    assert means["female"] == pytest.approx(55.0, abs=0.5)
    assert len(report.comparisons) == 1
    assert report.comparisons[0].significant is True


def test_small_groups_excluded_and_listed():
    users = {"solo": [make_record("s", user_id="solo")]}
    report = cohort_report(corpus_of(users), {"s": 50.0}, dimensions=["gender"])
    assert report.groups == ()
    assert len(report.excluded) == 1
    assert report.excluded[0].n == 1


def test_age_boundary_bucket():
    users = {"u": [make_record("f", user_id="u", age=40)]}
    report = cohort_report(
        corpus_of(users), {"f": 50.0}, dimensions=["age"], min_group_size=1
    )
    assert report.groups[0].key == ("40-50",)


def test_ambiguous_users_counted():
    users = {
        "amb": [
            make_record("a", user_id="amb", gender=Gender.MALE, post_timestamp=ts(0)),
            make_record("b", user_id="amb", gender=Gender.FEMALE, post_timestamp=ts(1)),
        ],
        "ok": [make_record("c", user_id="ok")],
    }
    report = cohort_report(
        corpus_of(users), {"a": 1.0, "b": 2.0, "c": 3.0},
        dimensions=["gender"], min_group_size=1,
    )
    assert report.ambiguous_users == 1
    assert len(report.groups) == 1


def test_unknown_race_excluded_from_race_grouping():
    users = {
        "u1": [make_record("a", user_id="u1", race="martian")],
        "u2": [make_record("b", user_id="u2")],
    }
    report = cohort_report(
        corpus_of(users), {"a": 1.0, "b": 2.0}, dimensions=["race"], min_group_size=1
    )
    assert report.unknown_race_users == 1
    assert [row.key for row in report.groups] == [("caucasian",)]


def test_histogram_normalized_unit_bins():
    hist = fatigue_histogram([44.2, 44.9, 50.0, 100.0])
    assert len(hist) == 100
    assert sum(frac for _, frac in hist) == pytest.approx(1.0)
    by_lo = dict(hist)
    assert by_lo[44.0] == pytest.approx(0.5)
    assert by_lo[50.0] == pytest.approx(0.25)
    assert by_lo[99.0] == pytest.approx(0.25)  # top edge folds into last bin


def test_report_row_ordering():
    users = {}
    rates = {}
    i = 0
    for age in (35, 15):
        for gender in (Gender.FEMALE, Gender.MALE):
            uid = f"u{i}"
            users[uid] = [make_record(f"{uid}-f", user_id=uid, age=age, gender=gender)]
            rates[f"{uid}-f"] = 50.0 + i
            i += 1
    report = cohort_report(
        corpus_of(users), rates, dimensions=["age", "gender"], min_group_size=1
    )
    keys = [row.key for row in report.groups]
    assert keys == [
        ("10-20", "male"),
        ("10-20", "female"),
        ("30-40", "male"),
        ("30-40", "female"),
    ]


def test_empty_corpus_rejected():
    with pytest.raises(ValueError):
        cohort_report(corpus_of({}), {}, dimensions=["gender"])
