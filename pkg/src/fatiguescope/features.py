"""Descriptor backends and ROI feature extraction.

A backend is a pure function from a resized crop to a fixed-dimension vector.
Two backends ship here: a deterministic toy backend (intensity statistics)
and a precomputed-descriptor file (for externally computed neural features).
Left/right eye and eye-bottom descriptors are concatenated (left first) so a
face always yields four descriptors: eye, eye_bottom, cheek, mouth.
"""

from __future__ import annotations

import csv
import io
import struct
from dataclasses import dataclass
from pathlib import Path
from typing import Iterator, Mapping, Protocol

import numpy as np

from .roi import RoiKind, RoiSpec

BINARY_MAGIC = b"FSDESC01"


class BackendError(RuntimeError):
    """Descriptor backend failure, tagged with the ROI being processed."""


class DescriptorBackend(Protocol):
    backend_id: str
    base_dim: int
    input_size: tuple[int, int]  # (height, width) of the resized crop
    channels: int                # 1 = grayscale, 3 = rgb
    thread_safe: bool

    def __call__(self, patch: np.ndarray) -> np.ndarray: ...


@dataclass(frozen=True)
class ToyStatsBackend:
    """Intensity statistics of the crop: (mean, population std, min, max).

    Operates on unit-normalized grayscale intensities, so a uniform crop of
    brightness v maps to (v, 0, v, v).
    """

    backend_id: str = "toy"
    base_dim: int = 4
    input_size: tuple[int, int] = (16, 16)
    channels: int = 1
    thread_safe: bool = True

    def __call__(self, patch: np.ndarray) -> np.ndarray:
        if patch.ndim != 2:
            raise BackendError(f"toy backend expects a 2-D grayscale patch, got {patch.shape}")
        return np.array(
            [
                float(np.mean(patch)),
                float(np.std(patch)),
                float(np.min(patch)),
                float(np.max(patch)),
            ]
        )


@dataclass(frozen=True)
class FeatureDescriptor:
    """One of the four per-face descriptors (left/right already concatenated)."""

    kind: str  # "eye" | "eye_bottom" | "cheek" | "mouth"
    values: tuple[float, ...]


@dataclass(frozen=True)
class FeatureVector:
    """Concatenation of the eye, eye_bottom, cheek, and mouth descriptors."""

    values: tuple[float, ...]
    backend_id: str

    @property
    def dimension(self) -> int:
        return len(self.values)

    def as_array(self) -> np.ndarray:
        return np.asarray(self.values, dtype=float)


def split_descriptors(vector: FeatureVector, base_dim: int) -> list[FeatureDescriptor]:
    """Recover the four descriptors from the flat vector layout.

    Layout is [eye (2*base), eye_bottom (2*base), cheek (base), mouth (base)].
    """
    if vector.dimension != 6 * base_dim:
        raise ValueError(
            f"vector dimension {vector.dimension} is not 6 * base_dim ({base_dim})"
        )
    v = vector.values
    return [
        FeatureDescriptor("eye", v[0 : 2 * base_dim]),
        FeatureDescriptor("eye_bottom", v[2 * base_dim : 4 * base_dim]),
        FeatureDescriptor("cheek", v[4 * base_dim : 5 * base_dim]),
        FeatureDescriptor("mouth", v[5 * base_dim : 6 * base_dim]),
    ]


# ---------------------------------------------------------------------------
# Image handling
# ---------------------------------------------------------------------------


def normalize_image(image: np.ndarray) -> np.ndarray:
    """Float64 image in [0,1]; uint8 inputs are divided by 255."""
    arr = np.asarray(image)
    if arr.ndim not in (2, 3):
        raise ValueError(f"expected a 2-D or 3-D pixel buffer, got shape {arr.shape}")
    if arr.dtype == np.uint8:
        return arr.astype(np.float64) / 255.0
    return arr.astype(np.float64)


def bilinear_resize(image: np.ndarray, out_h: int, out_w: int) -> np.ndarray:
    """Deterministic bilinear resampling.

    Output pixel centers map to source coordinates via
    src = (i + 0.5) * in_size / out_size - 0.5, clamped to the image, with
    exact float64 interpolation weights (no platform-dependent rounding).
    """
    img = np.asarray(image, dtype=np.float64)
    in_h, in_w = img.shape[:2]
    ys = np.clip((np.arange(out_h) + 0.5) * in_h / out_h - 0.5, 0, in_h - 1)
    xs = np.clip((np.arange(out_w) + 0.5) * in_w / out_w - 0.5, 0, in_w - 1)
    y0 = np.floor(ys).astype(int)
    x0 = np.floor(xs).astype(int)
    y1 = np.minimum(y0 + 1, in_h - 1)
    x1 = np.minimum(x0 + 1, in_w - 1)
    wy = (ys - y0)[:, None]
    wx = (xs - x0)[None, :]
    if img.ndim == 3:
        wy = wy[..., None]
        wx = wx[..., None]
    top = img[y0][:, x0] * (1 - wx) + img[y0][:, x1] * wx
    bottom = img[y1][:, x0] * (1 - wx) + img[y1][:, x1] * wx
    return top * (1 - wy) + bottom * wy


def to_grayscale(image: np.ndarray) -> np.ndarray:
    """Channel mean; already-2-D images pass through."""
    if image.ndim == 2:
        return image
    return image.mean(axis=2)


def crop_pixels(image: np.ndarray, spec: RoiSpec) -> np.ndarray:
    """Cover-crop of a normalized rect: floor/ceil to pixel indices."""
    h, w = image.shape[:2]
    rect = spec.rect
    col0 = max(int(np.floor(rect.x * w)), 0)
    col1 = min(int(np.ceil(rect.x1 * w)), w)
    row0 = max(int(np.floor(rect.y * h)), 0)
    row1 = min(int(np.ceil(rect.y1 * h)), h)
    if col1 - col0 < 2 or row1 - row0 < 2:
        raise BackendError(f"{spec.kind.value}: crop smaller than 2x2 pixels after clamping")
    return image[row0:row1, col0:col1]


def extract_features(
    image: np.ndarray,
    rois: tuple[RoiSpec, ...],
    backend: DescriptorBackend,
) -> FeatureVector:
    """Run the backend over the six ROIs and assemble the feature vector."""
    by_kind = {spec.kind: spec for spec in rois}
    missing = [k for k in RoiKind if k not in by_kind]
    if missing:
        raise ValueError(f"missing ROIs: {[k.value for k in missing]}")

    img = normalize_image(image)
    if backend.channels == 1:
        img = to_grayscale(img)

    def descriptor(kind: RoiKind) -> np.ndarray:
        patch = crop_pixels(img, by_kind[kind])
        patch = bilinear_resize(patch, *backend.input_size)
        try:
            values = np.asarray(backend(patch), dtype=float)
        except BackendError:
            raise
        except Exception as exc:
            raise BackendError(f"{kind.value}: backend failed: {exc}") from exc
        if values.shape != (backend.base_dim,):
            raise BackendError(
                f"{kind.value}: backend returned shape {values.shape}, "
                f"expected ({backend.base_dim},)"
            )
        if not np.all(np.isfinite(values)):
            raise BackendError(f"{kind.value}: backend returned non-finite values")
        return values

    parts = [
        descriptor(RoiKind.LEFT_EYE),
        descriptor(RoiKind.RIGHT_EYE),
        descriptor(RoiKind.LEFT_EYE_BOTTOM),
        descriptor(RoiKind.RIGHT_EYE_BOTTOM),
        descriptor(RoiKind.CHEEK),
        descriptor(RoiKind.MOUTH),
    ]
    values = tuple(float(v) for part in parts for v in part)
    return FeatureVector(values=values, backend_id=backend.backend_id)


# ---------------------------------------------------------------------------
# Precomputed descriptor files
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class PrecomputedDescriptors:
    """face_id -> FeatureVector map loaded from a descriptor file."""

    backend_id: str
    base_dim: int
    total_dim: int
    vectors: Mapping[str, FeatureVector]

    def __getitem__(self, face_id: str) -> FeatureVector:
        return self.vectors[face_id]

    def __contains__(self, face_id: str) -> bool:
        return face_id in self.vectors

    def __len__(self) -> int:
        return len(self.vectors)

    def __iter__(self) -> Iterator[str]:
        return iter(self.vectors)


class DescriptorFileError(ValueError):
    pass


def save_precomputed(
    path: str | Path,
    vectors: Mapping[str, FeatureVector],
    backend_id: str,
    base_dim: int,
) -> None:
    """Write a descriptor file; .csv writes the text form, anything else binary."""
    total_dim = 6 * base_dim
    for face_id, vec in vectors.items():
        if vec.dimension != total_dim:
            raise DescriptorFileError(
                f"vector for {face_id!r} has dimension {vec.dimension}, expected {total_dim}"
            )
    path = Path(path)
    face_ids = sorted(vectors)
    if path.suffix == ".csv":
        buf = io.StringIO()
        buf.write(f"#fsdesc,backend_id={backend_id},base_dim={base_dim},total_dim={total_dim}\n")
        writer = csv.writer(buf, lineterminator="\n")
        for face_id in face_ids:
            writer.writerow([face_id] + [repr(v) for v in vectors[face_id].values])
        path.write_text(buf.getvalue())
        return
    with path.open("wb") as fh:
        fh.write(BINARY_MAGIC)
        ident = backend_id.encode("utf-8")
        fh.write(struct.pack("<I", len(ident)))
        fh.write(ident)
        fh.write(struct.pack("<IIQ", base_dim, total_dim, len(face_ids)))
        for face_id in face_ids:
            fid = face_id.encode("utf-8")
            fh.write(struct.pack("<I", len(fid)))
            fh.write(fid)
            fh.write(struct.pack(f"<{total_dim}d", *vectors[face_id].values))


def load_precomputed(path: str | Path) -> PrecomputedDescriptors:
    """Load a descriptor file (format detected by magic/leading marker)."""
    path = Path(path)
    raw = path.read_bytes()
    if raw.startswith(BINARY_MAGIC):
        return _load_binary(raw)
    return _load_csv(raw.decode("utf-8"))


def _check_header(backend_id: str, base_dim: int, total_dim: int) -> None:
    if not backend_id.strip():
        raise DescriptorFileError("unknown backend_id: header declares an empty id")
    if base_dim < 1 or total_dim != 6 * base_dim:
        raise DescriptorFileError(
            f"inconsistent header dims: base_dim={base_dim}, total_dim={total_dim}"
        )


def _load_binary(raw: bytes) -> PrecomputedDescriptors:
    off = len(BINARY_MAGIC)

    def take(fmt: str) -> tuple:
        nonlocal off
        size = struct.calcsize(fmt)
        if off + size > len(raw):
            raise DescriptorFileError("truncated descriptor file")
        out = struct.unpack_from(fmt, raw, off)
        off += size
        return out

    (id_len,) = take("<I")
    backend_id = raw[off : off + id_len].decode("utf-8")
    off += id_len
    base_dim, total_dim, count = take("<IIQ")
    _check_header(backend_id, base_dim, total_dim)
    vectors: dict[str, FeatureVector] = {}
    for row in range(count):
        (fid_len,) = take("<I")
        face_id = raw[off : off + fid_len].decode("utf-8")
        off += fid_len
        values = take(f"<{total_dim}d")
        vectors[face_id] = FeatureVector(values=tuple(values), backend_id=backend_id)
    if off != len(raw):
        raise DescriptorFileError("trailing bytes after declared rows")
    return PrecomputedDescriptors(
        backend_id=backend_id, base_dim=base_dim, total_dim=total_dim, vectors=vectors
    )


def _load_csv(text: str) -> PrecomputedDescriptors:
    lines = text.splitlines()
    if not lines or not lines[0].startswith("#fsdesc,"):
        raise DescriptorFileError("missing #fsdesc header line")
    header: dict[str, str] = {}
    for part in lines[0].split(",")[1:]:
        key, _, value = part.partition("=")
        header[key] = value
    try:
        backend_id = header["backend_id"]
        base_dim = int(header["base_dim"])
        total_dim = int(header["total_dim"])
    except (KeyError, ValueError) as exc:
        raise DescriptorFileError(f"bad header: {exc}") from exc
    _check_header(backend_id, base_dim, total_dim)
    vectors: dict[str, FeatureVector] = {}
    for line_no, row in enumerate(csv.reader(lines[1:]), start=2):
        if not row:
            continue
        face_id = row[0]
        if len(row) - 1 != total_dim:
            raise DescriptorFileError(
                f"row for {face_id!r} (line {line_no}) has {len(row) - 1} values, "
                f"expected {total_dim}"
            )
        vectors[face_id] = FeatureVector(
            values=tuple(float(v) for v in row[1:]), backend_id=backend_id
        )
    return PrecomputedDescriptors(
        backend_id=backend_id, base_dim=base_dim, total_dim=total_dim, vectors=vectors
    )


def load_image(path: str | Path) -> np.ndarray:
    """Decode an image file to a numpy array (.npy passes through)."""
    path = Path(path)
    if path.suffix == ".npy":
        return np.load(path)
    from PIL import Image

    with Image.open(path) as img:
        return np.asarray(img)
