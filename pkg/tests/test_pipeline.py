import numpy as np
import pytest

from conftest import smooth_texture
from freqsr.dct_model import RgbImage
from freqsr.errors import EmptyDataset, ShapeMismatch
from freqsr.formats import write_ppm
from freqsr.jpeg import decode_to_dct, encode_baseline
from freqsr.net import FreqSrModel, FreqSrConfig
from freqsr.pipeline import (
    box_downsample_x2,
    load_pair_dct,
    load_pair_rgb,
    make_dataset,
    read_manifest,
    run_training,
    sr_infer,
)


def test_box_downsample_arithmetic():
    img = np.zeros((4, 4, 3), dtype=np.uint8)
    img[0, 0] = img[0, 1] = img[1, 0] = img[1, 1] = (10, 20, 30)
    img[2:, 2:] = 100
    out = box_downsample_x2(RgbImage(img))
    assert out.samples.shape == (2, 2, 3)
    assert tuple(out.samples[0, 0]) == (10, 20, 30)
    assert tuple(out.samples[1, 1]) == (100, 100, 100)
    with pytest.raises(ShapeMismatch):
        box_downsample_x2(RgbImage(np.zeros((3, 4, 3), dtype=np.uint8)))


def test_make_dataset_shapes_and_manifest(tmp_path):
    from freqsr.formats import write_png

    hr_dir = tmp_path / "hr"
    hr_dir.mkdir()
    rng = np.random.default_rng(0)
    write_ppm(hr_dir / "a.ppm", smooth_texture(rng, 512, 512))
    write_png(hr_dir / "b.png", smooth_texture(rng, 130, 97))  # not divisible by 32
    out = tmp_path / "ds"
    manifest = make_dataset(hr_dir, out)
    assert len(manifest["pairs"]) == 2
    a = next(p for p in manifest["pairs"] if p["name"] == "a")
    b = next(p for p in manifest["pairs"] if p["name"] == "b")
    assert (a["hr_width"], a["hr_height"]) == (512, 512) and not a["trimmed"]
    assert (b["hr_width"], b["hr_height"]) == (96, 128) and b["trimmed"]
    # every generated LR decodes, at half the HR dimensions
    _, blobs = read_manifest(out / "manifest.json")
    for (lr_bytes, hr_bytes), pair in zip(blobs, manifest["pairs"]):
        lr = decode_to_dct(lr_bytes)
        hr = decode_to_dct(hr_bytes)
        assert lr.pixel_width * 2 == hr.pixel_width == pair["hr_width"]
        assert lr.pixel_height * 2 == hr.pixel_height == pair["hr_height"]


def test_make_dataset_empty_dir(tmp_path):
    (tmp_path / "hr").mkdir()
    with pytest.raises(EmptyDataset):
        make_dataset(tmp_path / "hr", tmp_path / "out")


def test_loaders_agree_on_shapes():
    rng = np.random.default_rng(1)
    hr = smooth_texture(rng, 128, 128)
    lr = box_downsample_x2(hr)
    lr_b = encode_baseline(lr, 100, "4:2:0")
    hr_b = encode_baseline(hr, 100, "4:2:0")
    for loader in (load_pair_dct, load_pair_rgb):
        x, t = loader(lr_b, hr_b, 8)
        assert x.shape == (1, 64, 16, 16)
        assert t.shape == (1, 64, 16, 16)


def test_loaders_produce_similar_targets():
    # the RGB-path target is the DCT of decoded pixels; it should be close to
    # the file-coefficient target (small IDCT/rounding differences only)
    rng = np.random.default_rng(2)
    hr = smooth_texture(rng, 128, 128)
    lr = box_downsample_x2(hr)
    lr_b = encode_baseline(lr, 100, "4:2:0")
    hr_b = encode_baseline(hr, 100, "4:2:0")
    _, t_dct = load_pair_dct(lr_b, hr_b, 8)
    _, t_rgb = load_pair_rgb(lr_b, hr_b, 8)
    assert np.max(np.abs(t_dct - t_rgb)) < 0.01  # normalized units


def test_run_training_report(toy_manifest_8):
    model, report = run_training(toy_manifest_8, patch_blocks=8, epochs=2, lr=1e-3, seed=1, feature_width=8)
    assert report["schema_version"] == 1
    assert len(report["loss_history"]) == 2
    assert report["items"] == 16
    assert report["loader_fps"] > 0 and report["pipeline_fps"] > 0
    assert report["pipeline_fps"] <= report["loader_fps"]


def test_run_training_deterministic(toy_manifest_8):
    _, r1 = run_training(toy_manifest_8, patch_blocks=8, epochs=2, lr=1e-3, seed=9, feature_width=8)
    _, r2 = run_training(toy_manifest_8, patch_blocks=8, epochs=2, lr=1e-3, seed=9, feature_width=8)
    assert r1["loss_history"] == r2["loss_history"]


def test_run_training_threads_same_history(toy_manifest_8):
    _, r1 = run_training(toy_manifest_8, patch_blocks=8, epochs=1, lr=1e-3, seed=2, threads=1, feature_width=8)
    _, r2 = run_training(toy_manifest_8, patch_blocks=8, epochs=1, lr=1e-3, seed=2, threads=4, feature_width=8)
    assert r1["loss_history"] == r2["loss_history"]


def test_sr_infer_scale_contract():
    rng = np.random.default_rng(3)
    lr = smooth_texture(rng, 128, 128)
    img = decode_to_dct(encode_baseline(lr, 100, "4:2:0"))
    out = sr_infer(img, None)
    assert (out.width, out.height) == (256, 256)


def test_sr_infer_odd_dims_trim():
    rng = np.random.default_rng(4)
    lr = RgbImage(smooth_texture(rng, 70, 90).samples.copy())
    img = decode_to_dct(encode_baseline(lr, 100, "4:2:0"))
    out = sr_infer(img, None)
    assert (out.width, out.height) == (180, 140)


def test_sr_infer_444_input():
    rng = np.random.default_rng(5)
    lr = smooth_texture(rng, 64, 64)
    img = decode_to_dct(encode_baseline(lr, 100, "4:4:4"))
    out = sr_infer(img, None)
    assert (out.width, out.height) == (128, 128)


def test_sr_infer_constant_image_stays_constant():
    img = decode_to_dct(encode_baseline(RgbImage(np.full((32, 32, 3), 99, np.uint8)), 100, "4:2:0"))
    out = sr_infer(img, None)
    u = np.unique(out.samples.reshape(-1, 3), axis=0)
    assert u.shape[0] == 1
    assert np.max(np.abs(u[0].astype(int) - 99)) <= 1


def test_sr_infer_with_model_output_shape(toy_manifest_8):
    rng = np.random.default_rng(6)
    model = FreqSrModel(FreqSrConfig(feature_width=8))
    model.init_weights(0)
    lr = smooth_texture(rng, 64, 64)
    img = decode_to_dct(encode_baseline(lr, 100, "4:2:0"))
    out = sr_infer(img, model)
    assert (out.width, out.height) == (128, 128)


def test_sr_infer_rejects_grayscale():
    import io
    from PIL import Image

    buf = io.BytesIO()
    Image.fromarray(np.full((16, 16), 100, np.uint8), mode="L").save(buf, "JPEG")
    img = decode_to_dct(buf.getvalue())
    with pytest.raises(ShapeMismatch):
        sr_infer(img, None)
