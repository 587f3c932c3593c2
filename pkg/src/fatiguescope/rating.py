"""Multi-rater cue-rating sessions and label synthesis.

Each rater receives the training faces in a per-rater randomized order
(Fisher-Yates over the sorted face set, driven by CPython's Mersenne Twister
seeded with the session seed) and rates the eight cues with integers 0-4.
Completed sessions are averaged per cue and pushed through the combined
estimator to produce fatigue labels. Session events append to a JSONL
journal so an interrupted run never loses submitted ratings.
"""

from __future__ import annotations

import json
import random
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Mapping, Sequence

from .core import CUE_FIELDS, CueRatings, FatigueRate, RatingScale
from .estimator import (
    RATER_TO_PERCENT_FACTOR,
    CombinedEstimator,
    rescale_to_percent,
)


class SessionError(ValueError):
    pass


class OutOfOrderError(SessionError):
    def __init__(self, expected: str, got: str) -> None:
        super().__init__(f"expected face {expected!r} next, got {got!r}")
        self.expected = expected
        self.got = got


class RatingValueError(SessionError):
    def __init__(self, cue: str, reason: str) -> None:
        super().__init__(f"{cue}: {reason}")
        self.cue = cue
        self.reason = reason


class ResubmitConflictError(SessionError):
    def __init__(self, face_id: str) -> None:
        super().__init__(f"face {face_id!r} already rated with a different payload")
        self.face_id = face_id


@dataclass
class RatingSession:
    """One rater's pass over the face set. Mutated only through submit/skip."""

    rater_id: str
    seed: int
    order: tuple[str, ...]
    cursor: int = 0
    submitted: dict[str, CueRatings] = field(default_factory=dict)
    skipped: set[str] = field(default_factory=set)

    @property
    def total(self) -> int:
        return len(self.order)

    @property
    def complete(self) -> bool:
        return self.cursor >= len(self.order)

    def current_face(self) -> str | None:
        return None if self.complete else self.order[self.cursor]

    def face_set(self) -> frozenset[str]:
        return frozenset(self.order)


def shuffle_faces(face_ids: Iterable[str], seed: int) -> tuple[str, ...]:
    """Deterministic display order: Fisher-Yates over the sorted face set.

    PRNG: CPython random.Random (Mersenne Twister) seeded with `seed`,
    descending swap indices drawn with randrange.
    """
    items = sorted(face_ids)
    rng = random.Random(seed)
    for i in range(len(items) - 1, 0, -1):
        j = rng.randrange(i + 1)
        items[i], items[j] = items[j], items[i]
    return tuple(items)


def open_session(rater_id: str, face_ids: Iterable[str], seed: int) -> RatingSession:
    order = shuffle_faces(face_ids, seed)
    if not order:
        raise SessionError("face set is empty")
    if len(set(order)) != len(order):
        raise SessionError("face set contains duplicates")
    return RatingSession(rater_id=rater_id, seed=seed, order=order)


@dataclass(frozen=True)
class FaceBundle:
    """What a rater sees for one face: the primary image plus references."""

    face_id: str
    primary: str
    references: tuple[str, ...]
    cues: tuple[str, ...]
    insufficient_references: bool


class ImageStore:
    """Face images on disk: <root>/<face_id>/0.png is primary, 1..n references."""

    def __init__(self, root: str | Path) -> None:
        self.root = Path(root)

    def refs(self, face_id: str) -> list[str]:
        face_dir = self.root / face_id
        if not face_dir.is_dir():
            return []
        names = sorted(
            (p.name for p in face_dir.iterdir() if p.is_file()),
            key=lambda n: (len(n.split(".")[0]), n),
        )
        return names

    def path(self, face_id: str, name: str) -> Path:
        return self.root / face_id / name


MIN_REFERENCE_IMAGES = 4


def next_face(session: RatingSession, store: ImageStore | None = None) -> FaceBundle | None:
    """Bundle for the face at the cursor (None when the session is complete).

    Never advances the cursor; only submit_rating does. A face with fewer
    than four reference images is still served, flagged insufficient.
    """
    face_id = session.current_face()
    if face_id is None:
        return None
    names = store.refs(face_id) if store else []
    primary = names[0] if names else "0"
    references = tuple(names[1:])
    return FaceBundle(
        face_id=face_id,
        primary=primary,
        references=references,
        cues=CUE_FIELDS,
        insufficient_references=len(references) < MIN_REFERENCE_IMAGES,
    )


def validate_rater_cues(ratings: CueRatings) -> None:
    if ratings.scale is not RatingScale.RATER_0_4:
        raise RatingValueError("scale", f"expected rater_0_4, got {ratings.scale.value}")
    for cue in CUE_FIELDS:
        v = getattr(ratings, cue)
        if v != int(v):
            raise RatingValueError(cue, f"value {v!r} is not an integer")
        if not 0 <= v <= 4:
            raise RatingValueError(cue, f"value {v!r} outside 0..4")


def submit_rating(session: RatingSession, face_id: str, ratings: CueRatings) -> bool:
    """Store a rating and advance the cursor.

    Returns True for a fresh submission, False for an idempotent re-submit of
    an identical payload. A re-submit with a different payload or a face out
    of order raises.
    """
    if face_id in session.submitted:
        if session.submitted[face_id] == ratings:
            return False
        raise ResubmitConflictError(face_id)
    expected = session.current_face()
    if expected is None:
        raise SessionError("session already complete")
    if face_id != expected:
        raise OutOfOrderError(expected=expected, got=face_id)
    validate_rater_cues(ratings)
    session.submitted[face_id] = ratings
    session.cursor += 1
    return True


def skip_face(session: RatingSession, face_id: str) -> None:
    """Mark the cursor face skipped (excluded from training) and advance."""
    expected = session.current_face()
    if expected is None:
        raise SessionError("session already complete")
    if face_id != expected:
        raise OutOfOrderError(expected=expected, got=face_id)
    session.skipped.add(face_id)
    session.cursor += 1


@dataclass(frozen=True)
class LabeledFace:
    face_id: str
    mean_cues: CueRatings
    rater_count: int
    fatigue_label: FatigueRate


def aggregate_labels(
    sessions: Sequence[RatingSession],
    scale_factor: float = RATER_TO_PERCENT_FACTOR,
    model: CombinedEstimator | None = None,
) -> list[LabeledFace]:
    """Average completed sessions per cue and synthesize fatigue labels.

    All sessions must be complete and cover the same face set. Faces skipped
    in any session are excluded. The label is the combined estimator applied
    to the mean ratings mapped onto the 0-100 cue axes.
    """
    if not sessions:
        raise SessionError("no sessions to aggregate")
    for s in sessions:
        if not s.complete:
            raise SessionError(f"session for rater {s.rater_id!r} is incomplete")
    face_set = sessions[0].face_set()
    for s in sessions[1:]:
        if s.face_set() != face_set:
            raise SessionError("sessions cover different face sets")
    excluded = set().union(*(s.skipped for s in sessions))
    model = model or CombinedEstimator()

    out: list[LabeledFace] = []
    for face_id in sorted(face_set - excluded):
        per_rater = [s.submitted[face_id] for s in sessions]
        means = [
            sum(getattr(r, cue) for r in per_rater) / len(per_rater) for cue in CUE_FIELDS
        ]
        mean_cues = CueRatings.from_values(means, scale=RatingScale.RATER_0_4)
        label = model.evaluate(rescale_to_percent(mean_cues, factor=scale_factor))
        out.append(
            LabeledFace(
                face_id=face_id,
                mean_cues=mean_cues,
                rater_count=len(per_rater),
                fatigue_label=label,
            )
        )
    return out


def labels_to_csv(labels: Sequence[LabeledFace]) -> str:
    header = "face_id," + ",".join(CUE_FIELDS) + ",fatigue_label"
    lines = [header]
    for lf in labels:
        cues = ",".join(repr(v) for v in lf.mean_cues.as_tuple())
        lines.append(f"{lf.face_id},{cues},{lf.fatigue_label.value!r}")
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------------------
# Journal-backed session manager
# ---------------------------------------------------------------------------


class SessionManager:
    """Holds live sessions, enforces rater uniqueness, journals every event."""

    def __init__(
        self,
        face_ids: Sequence[str],
        journal_path: str | Path | None = None,
        allow_skip: bool = False,
    ) -> None:
        self.face_ids = tuple(sorted(face_ids))
        self.journal_path = Path(journal_path) if journal_path else None
        self.allow_skip = allow_skip
        self.sessions: dict[str, RatingSession] = {}
        self._counter = 0
        if self.journal_path and self.journal_path.exists():
            self._replay(self.journal_path)

    def _journal(self, event: Mapping) -> None:
        if self.journal_path is None:
            return
        with self.journal_path.open("a", encoding="utf-8") as fh:
            fh.write(json.dumps(event, separators=(",", ":")) + "\n")

    def _replay(self, path: Path) -> None:
        with path.open("r", encoding="utf-8") as fh:
            for line in fh:
                if not line.strip():
                    continue
                event = json.loads(line)
                kind = event["event"]
                if kind == "open":
                    session = RatingSession(
                        rater_id=event["rater_id"],
                        seed=int(event["seed"]),
                        order=tuple(event["order"]),
                    )
                    self.sessions[event["session_id"]] = session
                    self._counter += 1
                elif kind == "rating":
                    session = self.sessions[event["session_id"]]
                    ratings = CueRatings.from_values(
                        [event["cues"][c] for c in CUE_FIELDS],
                        scale=RatingScale.RATER_0_4,
                    )
                    submit_rating(session, event["face_id"], ratings)
                elif kind == "skip":
                    skip_face(self.sessions[event["session_id"]], event["face_id"])

    def open(self, rater_id: str, seed: int) -> tuple[str, RatingSession]:
        for session in self.sessions.values():
            if session.rater_id == rater_id and not session.complete:
                raise SessionError(f"rater {rater_id!r} already has an open session")
        session = open_session(rater_id, self.face_ids, seed)
        self._counter += 1
        session_id = f"s{self._counter:04d}"
        self.sessions[session_id] = session
        self._journal(
            {
                "event": "open",
                "session_id": session_id,
                "rater_id": rater_id,
                "seed": seed,
                "order": list(session.order),
            }
        )
        return session_id, session

    def submit(self, session_id: str, face_id: str, ratings: CueRatings) -> bool:
        session = self.sessions[session_id]
        fresh = submit_rating(session, face_id, ratings)
        if fresh:
            self._journal(
                {
                    "event": "rating",
                    "session_id": session_id,
                    "face_id": face_id,
                    "cues": {c: getattr(ratings, c) for c in CUE_FIELDS},
                }
            )
        return fresh

    def skip(self, session_id: str, face_id: str) -> None:
        if not self.allow_skip:
            raise SessionError("skipping is disabled for this run")
        session = self.sessions[session_id]
        skip_face(session, face_id)
        self._journal({"event": "skip", "session_id": session_id, "face_id": face_id})

    def completed_sessions(self) -> list[RatingSession]:
        return [s for s in self.sessions.values() if s.complete]


def load_journal_sessions(path: str | Path) -> list[RatingSession]:
    """Rebuild all sessions recorded in a journal file."""
    path = Path(path)
    manager = SessionManager(face_ids=[], journal_path=None)
    manager._replay(path)
    return list(manager.sessions.values())
