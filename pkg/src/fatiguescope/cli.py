"""fatiguescope command line: pipeline stages behind one executable.

Subcommands: ingest, extract, rate-serve, labels, train, tune, predict,
analyze, pipeline. Every run writes a manifest (input SHA-256 hashes, the
effective config, versions) next to its outputs; outputs are written
atomically. Errors exit non-zero with one machine-parsable line on stderr:
    fatiguescope: <category>: <message>
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from pathlib import Path
from typing import Sequence

import numpy as np

from . import analytics, boosting, ingestion, manifest, metrics, rating, tuner
from .core import DetectionRecord, EyeState, RecordDecodeError, record_from_json
from .features import (
    DescriptorFileError,
    FeatureVector,
    ToyStatsBackend,
    extract_features,
    load_image,
    load_precomputed,
    save_precomputed,
)
from .roi import MarginConfig, RoiError, locate_rois


class CliError(Exception):
    def __init__(self, category: str, message: str) -> None:
        super().__init__(message)
        self.category = category


def _read_corpus(path: Path) -> dict[str, list[DetectionRecord]]:
    users: dict[str, list[DetectionRecord]] = {}
    try:
        lines = path.read_text(encoding="utf-8").splitlines()
    except OSError as exc:
        raise CliError("io-error", f"cannot read {path}: {exc}") from exc
    for line_no, line in enumerate(lines, start=1):
        if not line.strip():
            continue
        try:
            record = record_from_json(line)
        except RecordDecodeError as exc:
            raise CliError("bad-record", f"{path}:{line_no}: {exc}") from exc
        users.setdefault(record.user_id, []).append(record)
    return users


def _load_features(path: Path):
    try:
        return load_precomputed(path)
    except (DescriptorFileError, OSError, UnicodeDecodeError) as exc:
        raise CliError("io-error", f"cannot load features {path}: {exc}") from exc


def _load_labels(path: Path) -> dict[str, float]:
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise CliError("io-error", f"cannot read {path}: {exc}") from exc
    rows = list(csv.reader(io.StringIO(text)))
    if not rows or rows[0][0] != "face_id" or rows[0][-1] != "fatigue_label":
        raise CliError("bad-config", f"{path}: not a labels CSV")
    return {row[0]: float(row[-1]) for row in rows[1:] if row}


def _join_features_labels(
    features, labels: dict[str, float]
) -> tuple[np.ndarray, np.ndarray, list[str]]:
    face_ids = sorted(set(features.vectors) & set(labels))
    only_features = sorted(set(features.vectors) - set(labels))
    only_labels = sorted(set(labels) - set(features.vectors))
    if only_features or only_labels:
        raise CliError(
            "input-mismatch",
            f"features/labels disagree: {len(only_features)} unlabeled vectors, "
            f"{len(only_labels)} labels without vectors",
        )
    X = np.array([features[fid].values for fid in face_ids])
    y = np.array([labels[fid] for fid in face_ids])
    return X, y, face_ids


# ---------------------------------------------------------------------------
# Subcommands
# ---------------------------------------------------------------------------


def cmd_ingest(args: argparse.Namespace) -> int:
    policy = ingestion.FilterPolicy(
        min_posts=args.min_posts,
        require_eye_status=EyeState(args.require_eye_status),
        enforce_blur=not args.no_blur_check,
        enforce_face_quality=not args.no_quality_check,
    )
    try:
        corpus, stats = ingestion.ingest(args.input, policy)
    except OSError as exc:
        raise CliError("io-error", f"cannot read {args.input}: {exc}") from exc

    out = Path(args.out)
    buf = io.StringIO()
    ingestion.write_corpus(corpus, buf)
    manifest.atomic_write_text(out, buf.getvalue())
    stats_path = Path(args.stats) if args.stats else out.with_suffix(".stats.json")
    manifest.atomic_write_text(stats_path, json.dumps(stats.to_obj(), indent=1) + "\n")

    hist_obj = None
    if corpus.users:
        hist_obj = ingestion.demographic_histogram(corpus).to_obj()
        manifest.atomic_write_text(
            out.with_suffix(".demographics.json"), json.dumps(hist_obj, indent=1) + "\n"
        )
    manifest.write_manifest(
        out.parent,
        "ingest",
        {
            "min_posts": policy.min_posts,
            "require_eye_status": policy.require_eye_status.value,
            "enforce_blur": policy.enforce_blur,
            "enforce_face_quality": policy.enforce_face_quality,
        },
        [args.input],
        [out.name, stats_path.name],
        name=f"{out.stem}.manifest.json",
    )
    print(
        f"ingest: read {stats.records_read}, kept {stats.kept} "
        f"across {len(corpus.users)} users"
    )
    return 0


def _make_margins(args: argparse.Namespace) -> MarginConfig:
    return MarginConfig(
        m_eye=args.m_eye, h_frac=args.h_frac, m_mouth=args.m_mouth, cheek_side=args.cheek_side
    )


def _find_image(images_dir: Path, face_id: str) -> Path:
    for ext in (".png", ".npy", ".jpg", ".jpeg"):
        candidate = images_dir / f"{face_id}{ext}"
        if candidate.is_file():
            return candidate
    raise CliError("io-error", f"no image for face {face_id!r} under {images_dir}")


def _extract_all(
    records: Sequence[DetectionRecord],
    images_dir: Path,
    margins: MarginConfig,
    backend: ToyStatsBackend,
) -> dict[str, FeatureVector]:
    vectors: dict[str, FeatureVector] = {}
    for record in records:
        image = load_image(_find_image(images_dir, record.face_id))
        try:
            rois = locate_rois(record.landmarks, margins)
            vectors[record.face_id] = extract_features(image, rois, backend)
        except (RoiError, ValueError, RuntimeError) as exc:
            raise CliError("bad-record", f"face {record.face_id!r}: {exc}") from exc
    return vectors


def cmd_extract(args: argparse.Namespace) -> int:
    users = _read_corpus(Path(args.records))
    records = [r for recs in users.values() for r in recs]
    out = Path(args.out)
    if args.backend == "toy":
        backend = ToyStatsBackend()
        vectors = _extract_all(records, Path(args.images), _make_margins(args), backend)
        save_precomputed(out, vectors, backend.backend_id, backend.base_dim)
        inputs = [args.records]
    elif args.backend.startswith("file:"):
        source = Path(args.backend[len("file:") :])
        precomputed = _load_features(source)
        missing = [r.face_id for r in records if r.face_id not in precomputed]
        if missing:
            raise CliError(
                "input-mismatch",
                f"descriptor file lacks {len(missing)} faces (first: {missing[0]!r})",
            )
        vectors = {r.face_id: precomputed[r.face_id] for r in records}
        save_precomputed(out, vectors, precomputed.backend_id, precomputed.base_dim)
        inputs = [args.records, str(source)]
    else:
        raise CliError("bad-config", f"unknown backend {args.backend!r}")
    manifest.write_manifest(
        out.parent,
        "extract",
        {"backend": args.backend, "faces": len(vectors)},
        inputs,
        [out.name],
        name=f"{out.stem}.manifest.json",
    )
    print(f"extract: wrote {len(vectors)} vectors to {out}")
    return 0


def cmd_train(args: argparse.Namespace) -> int:
    features = _load_features(Path(args.features))
    labels = _load_labels(Path(args.labels))
    X, y, _ = _join_features_labels(features, labels)
    if args.config:
        try:
            config = boosting.config_from_obj(json.loads(Path(args.config).read_text()))
        except (OSError, ValueError, TypeError) as exc:
            raise CliError("bad-config", f"bad boost config {args.config}: {exc}") from exc
    else:
        config = boosting.BoostConfig(seed=args.seed)
    model = boosting.fit_ensemble(X, y, config)
    out = Path(args.out)
    manifest.atomic_write_text(
        out, json.dumps(boosting.model_to_obj(model), indent=1) + "\n"
    )
    train_rmse = metrics.rmse(model.predict_raw(X), y)
    manifest.write_manifest(
        out.parent,
        "train",
        {"config": boosting.config_to_obj(model.config)},
        [args.features, args.labels] + ([args.config] if args.config else []),
        [out.name],
        name=f"{out.stem}.manifest.json",
    )
    print(f"train: {len(model.trees)} trees, training RMSE {train_rmse:.4f} -> {out}")
    return 0


def cmd_tune(args: argparse.Namespace) -> int:
    features = _load_features(Path(args.features))
    labels = _load_labels(Path(args.labels))
    X, y, _ = _join_features_labels(features, labels)
    space = tuner.SearchSpace(max_depth=args.max_depth)
    best, log = tuner.tune_ensemble(X, y, space, budget=args.budget, k=args.k, seed=args.seed)
    out = Path(args.out)
    manifest.atomic_write_text(
        out, json.dumps(boosting.config_to_obj(best), indent=1) + "\n"
    )
    if args.log:
        rows = ["method,cycles,learn_rate,min_leaf_size,objective,wall_time"]
        for t in log.trials:
            rows.append(
                f"{t.config.method.value},{t.config.cycles},{t.config.learn_rate!r},"
                f"{t.config.min_leaf_size},{t.objective!r},{t.wall_time!r}"
            )
        manifest.atomic_write_text(Path(args.log), "\n".join(rows) + "\n")
    manifest.write_manifest(
        out.parent,
        "tune",
        {"budget": args.budget, "k": args.k, "seed": args.seed},
        [args.features, args.labels],
        [out.name] + ([Path(args.log).name] if args.log else []),
        name=f"{out.stem}.manifest.json",
    )
    print(
        f"tune: incumbent {best.method.value} cycles={best.cycles} "
        f"rate={best.learn_rate:.4g} leaf={best.min_leaf_size} "
        f"objective={log.incumbent.objective:.4f}"
    )
    return 0


def cmd_predict(args: argparse.Namespace) -> int:
    try:
        model = boosting.load_model(args.model)
    except (OSError, ValueError, KeyError) as exc:
        raise CliError("bad-config", f"cannot load model {args.model}: {exc}") from exc
    features = _load_features(Path(args.features))
    face_ids = sorted(features.vectors)
    if features.total_dim != model.feature_dimension:
        raise CliError(
            "input-mismatch",
            f"feature dimension {features.total_dim} != model dimension "
            f"{model.feature_dimension}",
        )
    X = np.array([features[fid].values for fid in face_ids])
    raw = model.predict_raw(X)
    clamped = np.clip(raw, 0.0, 100.0)
    lines = ["face_id,fatigue_rate,raw_prediction"]
    for fid, rate, r in zip(face_ids, clamped, raw):
        lines.append(f"{fid},{float(rate)!r},{float(r)!r}")
    out = Path(args.out)
    manifest.atomic_write_text(out, "\n".join(lines) + "\n")
    manifest.write_manifest(
        out.parent,
        "predict",
        {"model": str(args.model)},
        [args.model, args.features],
        [out.name],
        name=f"{out.stem}.manifest.json",
    )
    print(f"predict: {len(face_ids)} rates -> {out}")
    return 0


def _read_predictions(path: Path) -> dict[str, float]:
    try:
        rows = list(csv.reader(io.StringIO(path.read_text(encoding="utf-8"))))
    except OSError as exc:
        raise CliError("io-error", f"cannot read {path}: {exc}") from exc
    if not rows or rows[0][:2] != ["face_id", "fatigue_rate"]:
        raise CliError("bad-config", f"{path}: not a predictions CSV")
    return {row[0]: float(row[1]) for row in rows[1:] if row}


def _report_csvs(report: analytics.CohortReport) -> dict[str, str]:
    dims = list(report.dimensions) + (["weekday"] if report.weekday else [])
    key_header = ",".join(dims)

    def group_rows(rows) -> str:
        lines = [f"{key_header},n,mean,std"]
        for row in rows:
            lines.append(",".join(row.key) + f",{row.n},{row.mean!r},{row.std!r}")
        return "\n".join(lines) + "\n"

    comp_lines = [
        "group_a,group_b,mean_a,mean_b,difference,ci_low,ci_high,"
        "t,df,p_value,p_bonferroni,significant"
    ]
    for c in report.comparisons:
        comp_lines.append(
            f"{c.group_labels[0]},{c.group_labels[1]},{c.means[0]!r},{c.means[1]!r},"
            f"{c.difference!r},{c.ci_low!r},{c.ci_high!r},{c.t_statistic!r},{c.df!r},"
            f"{c.p_value!r},{c.p_bonferroni!r},{str(c.significant).lower()}"
        )
    hist_lines = ["bin_lo,fraction"]
    for lo, frac in report.histogram:
        hist_lines.append(f"{lo!r},{frac!r}")
    return {
        "means.csv": group_rows(report.groups),
        "excluded_groups.csv": group_rows(report.excluded),
        "comparisons.csv": "\n".join(comp_lines) + "\n",
        "histogram.csv": "\n".join(hist_lines) + "\n",
        "summary.json": json.dumps(
            {
                "dimensions": dims,
                "groups": len(report.groups),
                "excluded_groups": len(report.excluded),
                "comparisons": len(report.comparisons),
                "skipped_comparisons": [list(s) for s in report.skipped_comparisons],
                "ambiguous_users": report.ambiguous_users,
                "unknown_race_users": report.unknown_race_users,
            },
            indent=1,
        )
        + "\n",
    }


def cmd_analyze(args: argparse.Namespace) -> int:
    users = _read_corpus(Path(args.corpus))
    if not users:
        raise CliError("degenerate-input", f"{args.corpus}: empty corpus")
    corpus = ingestion.TimelineCorpus(
        users={u: tuple(rs) for u, rs in users.items()}, provenance=str(args.corpus)
    )
    rates = _read_predictions(Path(args.predictions))
    dims = [d.strip() for d in args.group_by.split(",") if d.strip()]
    try:
        report = analytics.cohort_report(
            corpus,
            rates,
            dimensions=dims,
            weekday=args.weekday,
            min_group_size=args.min_group_size,
        )
    except ValueError as exc:
        raise CliError("bad-config", str(exc)) from exc
    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    files = _report_csvs(report)
    for name, text in files.items():
        manifest.atomic_write_text(out_dir / name, text)
    manifest.write_manifest(
        out_dir,
        "analyze",
        {
            "group_by": dims,
            "weekday": args.weekday,
            "min_group_size": args.min_group_size,
        },
        [args.corpus, args.predictions],
        list(files),
    )
    print(
        f"analyze: {len(report.groups)} groups, {len(report.comparisons)} comparisons "
        f"-> {out_dir}"
    )
    return 0


def cmd_rate_serve(args: argparse.Namespace) -> int:
    users = _read_corpus(Path(args.records))
    face_ids = [r.face_id for recs in users.values() for r in recs]
    if not face_ids:
        raise CliError("degenerate-input", "no faces in corpus")
    from .rating import ImageStore, SessionManager
    from .server import serve

    store = ImageStore(args.images)
    manager = SessionManager(
        face_ids=face_ids, journal_path=args.journal, allow_skip=args.allow_skip
    )
    print(f"rate-serve: {len(face_ids)} faces on http://{args.host}:{args.port}")
    serve(manager, store, host=args.host, port=args.port)
    return 0


def cmd_labels(args: argparse.Namespace) -> int:
    try:
        sessions = rating.load_journal_sessions(args.journal)
    except (OSError, json.JSONDecodeError, KeyError) as exc:
        raise CliError("io-error", f"cannot load journal {args.journal}: {exc}") from exc
    complete = [s for s in sessions if s.complete]
    if not complete:
        raise CliError("no-complete-sessions", "journal holds no completed sessions")
    labels = rating.aggregate_labels(complete, scale_factor=args.scale_factor)
    out = Path(args.out)
    manifest.atomic_write_text(out, rating.labels_to_csv(labels))
    if args.histogram:
        hist = analytics.fatigue_histogram([lf.fatigue_label.value for lf in labels])
        lines = ["bin_lo,fraction"] + [f"{lo!r},{frac!r}" for lo, frac in hist]
        manifest.atomic_write_text(Path(args.histogram), "\n".join(lines) + "\n")
    manifest.write_manifest(
        out.parent,
        "labels",
        {"scale_factor": args.scale_factor, "raters": len(complete)},
        [args.journal],
        [out.name],
        name=f"{out.stem}.manifest.json",
    )
    print(f"labels: {len(labels)} faces from {len(complete)} raters -> {out}")
    return 0


def cmd_pipeline(args: argparse.Namespace) -> int:
    try:
        config = json.loads(Path(args.config).read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise CliError("bad-config", f"cannot load pipeline config: {exc}") from exc

    def override(key: str, value):
        if value is not None:
            config[key] = value

    override("corpus", args.corpus)
    override("images", args.images)
    override("model", args.model)
    override("out_dir", args.out)

    for key in ("corpus", "images", "model", "out_dir"):
        if key not in config:
            raise CliError("bad-config", f"pipeline config lacks {key!r}")

    # Relative input paths resolve against the config file's directory; the
    # repo root is the natural anchor for committed fixture configs.
    base = Path(args.config).resolve().parent
    for key in ("corpus", "images", "model"):
        path = Path(config[key])
        if not path.is_absolute():
            for anchor in (base, base.parent):
                if (anchor / path).exists():
                    config[key] = str(anchor / path)
                    break

    out_dir = Path(config["out_dir"])
    out_dir.mkdir(parents=True, exist_ok=True)
    filt = config.get("filter", {})
    policy = ingestion.FilterPolicy(
        min_posts=int(filt.get("min_posts", 20)),
        require_eye_status=EyeState(filt.get("require_eye_status", "no_glasses_eye_open")),
        enforce_blur=bool(filt.get("enforce_blur", True)),
        enforce_face_quality=bool(filt.get("enforce_face_quality", True)),
    )
    try:
        corpus, stats = ingestion.ingest(config["corpus"], policy)
    except OSError as exc:
        raise CliError("io-error", f"cannot read corpus: {exc}") from exc
    buf = io.StringIO()
    ingestion.write_corpus(corpus, buf)
    manifest.atomic_write_text(out_dir / "filtered.jsonl", buf.getvalue())
    manifest.atomic_write_text(
        out_dir / "ingest_stats.json", json.dumps(stats.to_obj(), indent=1) + "\n"
    )

    margins_cfg = config.get("margins", {})
    margins = MarginConfig(
        m_eye=float(margins_cfg.get("m_eye", 0.5)),
        h_frac=float(margins_cfg.get("h_frac", 1.0)),
        m_mouth=float(margins_cfg.get("m_mouth", 0.3)),
        cheek_side=margins_cfg.get("cheek_side", "left"),
    )
    records = list(corpus.all_records())
    backend_name = config.get("backend", "toy")
    if backend_name == "toy":
        backend = ToyStatsBackend()
        vectors = _extract_all(records, Path(config["images"]), margins, backend)
        save_precomputed(out_dir / "features.csv", vectors, backend.backend_id, backend.base_dim)
    elif isinstance(backend_name, str) and backend_name.startswith("file:"):
        precomputed = _load_features(Path(backend_name[len("file:") :]))
        vectors = {r.face_id: precomputed[r.face_id] for r in records}
        save_precomputed(
            out_dir / "features.csv", vectors, precomputed.backend_id, precomputed.base_dim
        )
    else:
        raise CliError("bad-config", f"unknown backend {backend_name!r}")

    try:
        model = boosting.load_model(config["model"])
    except (OSError, ValueError, KeyError) as exc:
        raise CliError("bad-config", f"cannot load model: {exc}") from exc
    face_ids = sorted(vectors)
    if face_ids and len(vectors[face_ids[0]].values) != model.feature_dimension:
        raise CliError(
            "input-mismatch",
            f"feature dimension {len(vectors[face_ids[0]].values)} != model "
            f"dimension {model.feature_dimension}",
        )
    X = np.array([vectors[fid].values for fid in face_ids])
    raw = model.predict_raw(X) if face_ids else np.zeros(0)
    clamped = np.clip(raw, 0.0, 100.0)
    pred_lines = ["face_id,fatigue_rate,raw_prediction"]
    for fid, rate, r in zip(face_ids, clamped, raw):
        pred_lines.append(f"{fid},{float(rate)!r},{float(r)!r}")
    manifest.atomic_write_text(out_dir / "predictions.csv", "\n".join(pred_lines) + "\n")

    analytics_cfg = config.get("analytics", {})
    rates = {fid: float(rate) for fid, rate in zip(face_ids, clamped)}
    report = analytics.cohort_report(
        corpus,
        rates,
        dimensions=analytics_cfg.get("group_by", ["age", "gender", "race"]),
        weekday=bool(analytics_cfg.get("weekday", False)),
        min_group_size=int(analytics_cfg.get("min_group_size", analytics.DEFAULT_MIN_GROUP_SIZE)),
    )
    report_dir = out_dir / "report"
    report_dir.mkdir(parents=True, exist_ok=True)
    files = _report_csvs(report)
    for name, text in files.items():
        manifest.atomic_write_text(report_dir / name, text)

    manifest.write_manifest(
        out_dir,
        "pipeline",
        config,
        [config["corpus"], config["model"], str(args.config)],
        ["filtered.jsonl", "ingest_stats.json", "features.csv", "predictions.csv", "report"],
    )
    print(
        f"pipeline: {stats.kept} faces, {len(report.groups)} groups -> {out_dir}"
    )
    return 0


# ---------------------------------------------------------------------------
# Parser
# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="fatiguescope",
        description="Facial-cue fatigue prediction pipeline",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("ingest", help="filter a DetectionRecord JSONL corpus")
    p.add_argument("--input", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--stats", default=None)
    p.add_argument("--min-posts", type=int, default=20, dest="min_posts")
    p.add_argument("--no-blur-check", action="store_true", dest="no_blur_check")
    p.add_argument("--no-quality-check", action="store_true", dest="no_quality_check")
    p.add_argument(
        "--require-eye-status",
        default="no_glasses_eye_open",
        choices=[s.value for s in EyeState],
        dest="require_eye_status",
    )
    p.set_defaults(func=cmd_ingest)

    p = sub.add_parser("extract", help="compute ROI feature vectors")
    p.add_argument("--images", required=True)
    p.add_argument("--records", required=True)
    p.add_argument("--backend", default="toy", help="toy | file:PATH")
    p.add_argument("--out", required=True)
    p.add_argument("--m-eye", type=float, default=0.5, dest="m_eye")
    p.add_argument("--h-frac", type=float, default=1.0, dest="h_frac")
    p.add_argument("--m-mouth", type=float, default=0.3, dest="m_mouth")
    p.add_argument("--cheek-side", default="left", choices=["left", "right", "full"])
    p.set_defaults(func=cmd_extract)

    p = sub.add_parser("rate-serve", help="run the rating HTTP service")
    p.add_argument("--records", required=True)
    p.add_argument("--images", required=True)
    p.add_argument("--journal", required=True)
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--port", type=int, default=8600)
    p.add_argument("--allow-skip", action="store_true", dest="allow_skip")
    p.set_defaults(func=cmd_rate_serve)

    p = sub.add_parser("labels", help="aggregate completed rating sessions")
    p.add_argument("--journal", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--scale-factor", type=float, default=25.0, dest="scale_factor")
    p.add_argument("--histogram", default=None)
    p.set_defaults(func=cmd_labels)

    p = sub.add_parser("train", help="fit the boosted ensemble")
    p.add_argument("--features", required=True)
    p.add_argument("--labels", required=True)
    p.add_argument("--config", default=None)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_train)

    p = sub.add_parser("tune", help="Bayesian-optimize the ensemble hyper-parameters")
    p.add_argument("--features", required=True)
    p.add_argument("--labels", required=True)
    p.add_argument("--budget", type=int, default=100)
    p.add_argument("--k", type=int, default=5)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--max-depth", type=int, default=5, dest="max_depth")
    p.add_argument("--out", required=True)
    p.add_argument("--log", default=None)
    p.set_defaults(func=cmd_tune)

    p = sub.add_parser("predict", help="score feature vectors with a model")
    p.add_argument("--model", required=True)
    p.add_argument("--features", required=True)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_predict)

    p = sub.add_parser("analyze", help="cohort statistics over predictions")
    p.add_argument("--corpus", required=True)
    p.add_argument("--predictions", required=True)
    p.add_argument("--group-by", default="age,gender,race", dest="group_by")
    p.add_argument("--weekday", action="store_true")
    p.add_argument(
        "--min-group-size",
        type=int,
        default=analytics.DEFAULT_MIN_GROUP_SIZE,
        dest="min_group_size",
    )
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_analyze)

    p = sub.add_parser("pipeline", help="ingest -> extract -> predict -> analyze")
    p.add_argument("--config", required=True)
    p.add_argument("--corpus", default=None)
    p.add_argument("--images", default=None)
    p.add_argument("--model", default=None)
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_pipeline)

    return parser


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except CliError as exc:
        print(f"fatiguescope: {exc.category}: {exc}", file=sys.stderr)
        return 1
    except KeyboardInterrupt:
        print("fatiguescope: interrupted: stopped by user", file=sys.stderr)
        return 130


if __name__ == "__main__":
    sys.exit(main())
