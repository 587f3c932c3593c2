import pytest

from fatiguescope.core import BBox, Gender
from fatiguescope.synthetic import make_record


@pytest.fixture
def valid_record():
    return make_record("f1", user_id="u1")


def record_batch(user_id: str, count: int, start_ts: int = 1_600_000_000, **kwargs):
    """count records for one user, one post per day."""
    return [
        make_record(
            f"{user_id}-{i}",
            user_id=user_id,
            post_timestamp=start_ts + i * 86_400,
            **kwargs,
        )
        for i in range(count)
    ]


def sized_bbox(width: float, height: float) -> BBox:
    return BBox(x=0.0, y=0.0, width=width, height=height)


GENDERS = {"male": Gender.MALE, "female": Gender.FEMALE}
