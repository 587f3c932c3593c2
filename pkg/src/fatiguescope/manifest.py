"""Run manifests and atomic output writing for reproducible pipeline stages.

Every CLI stage writes a manifest.json next to its outputs recording the
SHA-256 of each input file, the effective config, and tool versions. Outputs
are written to a temp file in the destination directory and atomically
renamed, so an interrupted run never leaves a partial artifact.
"""

from __future__ import annotations

import hashlib
import json
import os
import platform
import tempfile
from datetime import datetime, timezone
from pathlib import Path
from typing import Any, Iterable

from . import __version__


def sha256_file(path: str | Path) -> str:
    digest = hashlib.sha256()
    with Path(path).open("rb") as fh:
        for chunk in iter(lambda: fh.read(1 << 20), b""):
            digest.update(chunk)
    return digest.hexdigest()


def atomic_write_text(path: str | Path, text: str) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def atomic_write_bytes(path: str | Path, data: bytes) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "wb") as fh:
            fh.write(data)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def write_manifest(
    out_dir: str | Path,
    command: str,
    config: dict[str, Any],
    inputs: Iterable[str | Path],
    outputs: Iterable[str],
    name: str = "manifest.json",
) -> Path:
    """Record input hashes + config next to a stage's outputs.

    The created_utc timestamp is the only non-deterministic field; report
    comparisons must exclude the manifest.
    """
    out_dir = Path(out_dir)
    manifest = {
        "command": command,
        "config": config,
        "inputs": {str(p): sha256_file(p) for p in inputs if Path(p).is_file()},
        "outputs": sorted(outputs),
        "versions": {
            "fatiguescope": __version__,
            "python": platform.python_version(),
        },
        "hash_algorithm": "sha256",
        "created_utc": datetime.now(timezone.utc).isoformat(),
    }
    path = out_dir / name
    atomic_write_text(path, json.dumps(manifest, indent=1, sort_keys=True) + "\n")
    return path
