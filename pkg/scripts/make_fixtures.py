#!/usr/bin/env python3
"""Regenerate the bundled fixture corpus, images, frozen model, and configs.

Everything is seeded; re-running reproduces the committed fixtures byte for
byte (the frozen model is only rewritten when --retrain is passed).
"""

from __future__ import annotations

import argparse
import json
from pathlib import Path

import numpy as np
from PIL import Image

from fatiguescope.boosting import BoostConfig, fit_lsboost, model_to_obj
from fatiguescope.core import Gender, record_to_json
from fatiguescope.features import ToyStatsBackend, extract_features
from fatiguescope.roi import MarginConfig, locate_rois
from fatiguescope.synthetic import make_face_image, make_landmarks, make_record

ROOT = Path(__file__).resolve().parent.parent
FIXTURES = ROOT / "fixtures"

# 2021-03-07 00:00 UTC (a Sunday).
SUNDAY = 1_615_075_200
DAY = 86_400

USERS = [
    ("u-ada", Gender.FEMALE, "caucasian", 34),
    ("u-bo", Gender.MALE, "asian", 27),
    ("u-cleo", Gender.FEMALE, "african_american", 41),
    ("u-dev", Gender.MALE, "caucasian", 19),
]


def build_records():
    records = []
    for u_idx, (user_id, gender, race, age) in enumerate(USERS):
        for post in range(5):
            face_id = f"{user_id}-p{post}"
            landmarks = make_landmarks(
                cx=0.48 + 0.01 * ((u_idx + post) % 3),
                cy=0.44 + 0.008 * (post % 2),
                scale=0.95 + 0.02 * (u_idx % 2),
            )
            records.append(
                make_record(
                    face_id,
                    user_id=user_id,
                    post_timestamp=SUNDAY + (u_idx * 3 + post * 2) % 7 * DAY + post * 3600,
                    age=age,
                    gender=gender,
                    race=race,
                    landmarks=landmarks,
                    blur_value=4.0 + post,
                    face_quality_value=82.0 + u_idx,
                    source_tags=("#selfie", "#me"),
                )
            )
    return records


def write_images(records) -> None:
    images_dir = FIXTURES / "images"
    images_dir.mkdir(parents=True, exist_ok=True)
    rating_dir = FIXTURES / "rating_images"
    for i, record in enumerate(records):
        arr = make_face_image(seed=1000 + i, size=64)
        Image.fromarray(arr, mode="L").save(images_dir / f"{record.face_id}.png")
        # Primary + 4 references per face for the rating workflow.
        face_dir = rating_dir / record.face_id
        face_dir.mkdir(parents=True, exist_ok=True)
        for n in range(5):
            ref = make_face_image(seed=1000 + i + 97 * n, size=64)
            Image.fromarray(ref, mode="L").save(face_dir / f"{n}.png")


def train_frozen_model(records) -> None:
    backend = ToyStatsBackend()
    X = []
    for i, record in enumerate(records):
        image = make_face_image(seed=1000 + i, size=64)
        vector = extract_features(image, locate_rois(record.landmarks, MarginConfig()), backend)
        X.append(vector.values)
    X = np.asarray(X)
    rng = np.random.default_rng(2024)
    weights = rng.normal(0, 8.0, X.shape[1])
    y = np.clip(52.0 + X @ weights + rng.normal(0, 1.0, len(X)), 0, 100)
    model = fit_lsboost(
        X, y, BoostConfig(cycles=60, learn_rate=0.1, min_leaf_size=2, max_depth=3, seed=7)
    )
    (FIXTURES / "model.json").write_text(
        json.dumps(model_to_obj(model), indent=1) + "\n"
    )


def main() -> None:
    parser = argparse.ArgumentParser()
    parser.add_argument("--retrain", action="store_true", help="rewrite model.json")
    args = parser.parse_args()

    FIXTURES.mkdir(exist_ok=True)
    records = build_records()
    corpus_path = FIXTURES / "corpus.jsonl"
    corpus_path.write_text("".join(record_to_json(r) + "\n" for r in records))
    write_images(records)
    if args.retrain or not (FIXTURES / "model.json").exists():
        train_frozen_model(records)

    pipeline_config = {
        "corpus": "fixtures/corpus.jsonl",
        "images": "fixtures/images",
        "model": "fixtures/model.json",
        "out_dir": "out/pipeline",
        "backend": "toy",
        "filter": {"min_posts": 3},
        "analytics": {"group_by": ["gender"], "weekday": True, "min_group_size": 2},
    }
    (FIXTURES / "pipeline.json").write_text(json.dumps(pipeline_config, indent=1) + "\n")
    print(f"fixtures: {len(records)} records under {FIXTURES}")


if __name__ == "__main__":
    main()
