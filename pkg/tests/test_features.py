import numpy as np
import pytest

from fatiguescope.features import (
    BackendError,
    DescriptorFileError,
    FeatureVector,
    ToyStatsBackend,
    bilinear_resize,
    extract_features,
    load_precomputed,
    normalize_image,
    save_precomputed,
    split_descriptors,
)
from fatiguescope.roi import RoiKind, locate_rois
from fatiguescope.synthetic import make_face_image, make_landmarks


@pytest.fixture
def rois():
    return locate_rois(make_landmarks())


def test_vector_dimension_six_times_base(rois):
    image = make_face_image(seed=1)
    vector = extract_features(image, rois, ToyStatsBackend())
    assert vector.dimension == 6 * 4
    assert vector.backend_id == "toy"


def test_extraction_deterministic(rois):
    image = make_face_image(seed=2)
    a = extract_features(image, rois, ToyStatsBackend())
    b = extract_features(image, rois, ToyStatsBackend())
    assert a == b


def test_uniform_gray_image_analytic_descriptors(rois):
    image = np.full((64, 64), 0.5)
    vector = extract_features(image, rois, ToyStatsBackend())
    for descriptor in split_descriptors(vector, base_dim=4):
        per_roi = np.asarray(descriptor.values).reshape(-1, 4)
        for mean, std, lo, hi in per_roi:
            assert mean == pytest.approx(0.5, abs=1e-12)
            assert std == pytest.approx(0.0, abs=1e-12)
            assert lo == pytest.approx(0.5, abs=1e-12)
            assert hi == pytest.approx(0.5, abs=1e-12)


def test_layout_recovers_backend_outputs(rois):
    image = make_face_image(seed=3)
    backend = ToyStatsBackend()
    vector = extract_features(image, rois, backend)
    img = normalize_image(image)

    from fatiguescope.features import crop_pixels

    def direct(kind):
        patch = bilinear_resize(crop_pixels(img, next(r for r in rois if r.kind is kind)), 16, 16)
        return backend(patch)

    descriptors = split_descriptors(vector, base_dim=4)
    eye = descriptors[0]
    assert np.allclose(eye.values[:4], direct(RoiKind.LEFT_EYE))
    assert np.allclose(eye.values[4:], direct(RoiKind.RIGHT_EYE))
    assert np.allclose(descriptors[2].values, direct(RoiKind.CHEEK))
    assert np.allclose(descriptors[3].values, direct(RoiKind.MOUTH))


def test_missing_roi_rejected(rois):
    with pytest.raises(ValueError):
        extract_features(make_face_image(seed=1), rois[:5], ToyStatsBackend())


def test_tiny_crop_rejected(rois):
    with pytest.raises(BackendError) as err:
        extract_features(make_face_image(seed=1, size=8), rois, ToyStatsBackend())
    assert "2x2" in str(err.value)


def test_backend_failure_names_roi(rois):
    class Exploding(ToyStatsBackend):
        def __call__(self, patch):
            raise RuntimeError("no descriptors today")

    with pytest.raises(BackendError) as err:
        extract_features(make_face_image(seed=1), rois, Exploding())
    assert "left_eye" in str(err.value)


def test_uint8_normalization():
    img = normalize_image(np.array([[0, 255], [51, 102]], dtype=np.uint8))
    assert img[0, 1] == 1.0
    assert img[1, 0] == pytest.approx(0.2)


def test_bilinear_resize_constant_preserved():
    out = bilinear_resize(np.full((10, 7), 0.3), 16, 16)
    assert out.shape == (16, 16)
    assert np.allclose(out, 0.3)


def test_bilinear_resize_identity():
    rng = np.random.default_rng(0)
    img = rng.random((12, 9))
    assert np.allclose(bilinear_resize(img, 12, 9), img)


def test_bilinear_resize_linear_gradient_exact():
    # Bilinear interpolation reproduces an affine intensity field exactly
    # away from the clamped border.
    h, w = 20, 20
    ys, xs = np.mgrid[0:h, 0:w].astype(float)
    img = 0.1 + 0.02 * xs + 0.01 * ys
    out = bilinear_resize(img, 10, 10)
    ys_q = (np.arange(10) + 0.5) * h / 10 - 0.5
    xs_q = (np.arange(10) + 0.5) * w / 10 - 0.5
    expect = 0.1 + 0.02 * xs_q[None, :] + 0.01 * ys_q[:, None]
    assert np.allclose(out[1:-1, 1:-1], expect[1:-1, 1:-1], atol=1e-12)


# ---------------------------------------------------------------------------
# Descriptor files
# ---------------------------------------------------------------------------


def sample_vectors(n=3, base_dim=4, backend_id="toy"):
    rng = np.random.default_rng(42)
    return {
        f"face{i:02d}": FeatureVector(
            values=tuple(float(v) for v in rng.normal(0, 1, 6 * base_dim)),
            backend_id=backend_id,
        )
        for i in range(n)
    }


@pytest.mark.parametrize("suffix", [".bin", ".csv"])
def test_descriptor_file_roundtrip(tmp_path, suffix):
    vectors = sample_vectors()
    path = tmp_path / f"features{suffix}"
    save_precomputed(path, vectors, backend_id="toy", base_dim=4)
    loaded = load_precomputed(path)
    assert loaded.backend_id == "toy"
    assert loaded.base_dim == 4
    assert loaded.total_dim == 24
    assert dict(loaded.vectors) == vectors
    # save(load(f)) is a fixed point byte-for-byte.
    again = tmp_path / f"again{suffix}"
    save_precomputed(again, dict(loaded.vectors), loaded.backend_id, loaded.base_dim)
    assert again.read_bytes() == path.read_bytes()


def test_single_row_file(tmp_path):
    path = tmp_path / "one.csv"
    save_precomputed(path, sample_vectors(n=1), backend_id="toy", base_dim=4)
    assert len(load_precomputed(path)) == 1


def test_row_dimension_mismatch_names_row(tmp_path):
    path = tmp_path / "bad.csv"
    lines = ["#fsdesc,backend_id=toy,base_dim=4,total_dim=24"]
    lines.append("short-row," + ",".join(["0.0"] * 23))
    path.write_text("\n".join(lines) + "\n")
    with pytest.raises(DescriptorFileError) as err:
        load_precomputed(path)
    assert "short-row" in str(err.value)


def test_empty_backend_id_rejected(tmp_path):
    path = tmp_path / "anon.csv"
    path.write_text("#fsdesc,backend_id=,base_dim=4,total_dim=24\n")
    with pytest.raises(DescriptorFileError) as err:
        load_precomputed(path)
    assert "backend_id" in str(err.value)


def test_header_dim_consistency(tmp_path):
    path = tmp_path / "odd.csv"
    path.write_text("#fsdesc,backend_id=toy,base_dim=4,total_dim=20\n")
    with pytest.raises(DescriptorFileError):
        load_precomputed(path)


def test_truncated_binary_rejected(tmp_path):
    path = tmp_path / "features.bin"
    save_precomputed(path, sample_vectors(), backend_id="toy", base_dim=4)
    path.write_bytes(path.read_bytes()[:-9])
    with pytest.raises(DescriptorFileError):
        load_precomputed(path)


def test_save_rejects_wrong_dimension(tmp_path):
    bad = {"f": FeatureVector(values=(1.0, 2.0), backend_id="toy")}
    with pytest.raises(DescriptorFileError):
        save_precomputed(tmp_path / "x.csv", bad, backend_id="toy", base_dim=4)
