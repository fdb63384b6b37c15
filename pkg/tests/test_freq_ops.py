import numpy as np
import pytest

from freqsr.dct_model import DctImage, DctPlane, FreqTensor, blockify
from freqsr.errors import CropTooLarge, ShapeMismatch
from freqsr.freq_ops import (
    CropSpec,
    center_crop,
    denormalize,
    normalize,
    normalize_plane,
    postprocess_hr,
    preprocess_lr,
    upsample_dct_x2,
)
from freqsr.spatial import fdct8, idct16


def tensor_of(value, rows=2, cols=2):
    return FreqTensor(np.full((rows, cols, 64), float(value)))


# --- center crop ---


def test_crop_exact_size_is_identity():
    rng = np.random.default_rng(0)
    plane = DctPlane(rng.normal(0, 10, (20, 20, 8, 8)))
    out = center_crop(plane, CropSpec(20))
    assert np.array_equal(out.blocks, plane.blocks)


def test_crop_too_large():
    plane = DctPlane(np.zeros((20, 20, 8, 8)))
    with pytest.raises(CropTooLarge):
        center_crop(plane, CropSpec(32))


def test_crop_floor_tie_break():
    blocks = np.zeros((21, 21, 8, 8))
    blocks[0, 0, 0, 0] = 1.0  # marker at the top-left corner
    out = center_crop(DctPlane(blocks), CropSpec(20))
    assert out.blocks[0, 0, 0, 0] == 1.0  # window origin is (0, 0)


# --- normalization (value endpoints are exact by construction) ---


def test_normalize_endpoints_exact():
    t = FreqTensor(np.array([[[-1024.0] * 64]]))
    assert np.all(normalize(t).data == -1.0)
    t = FreqTensor(np.array([[[1016.0] * 64]]))
    assert np.all(normalize(t).data == 1.0)


def test_normalize_midpoint():
    t = FreqTensor(np.array([[[-4.0] * 64]]))
    assert np.all(normalize(t).data == 0.0)


def test_normalize_zero_value():
    t = FreqTensor(np.zeros((1, 1, 64)))
    out = normalize(t).data
    np.testing.assert_allclose(out, (0.0 + 1024.0) / 2040.0 * 2.0 - 1.0)
    np.testing.assert_allclose(out, 1.0 / 255.0)


def test_normalize_denormalize_inverse():
    rng = np.random.default_rng(1)
    x = rng.uniform(-2000, 2000, (3, 4, 64))  # includes out-of-range values
    t = FreqTensor(x)
    back = denormalize(normalize(t)).data
    assert np.max(np.abs(back - x) / np.maximum(1.0, np.abs(x))) <= 1e-9


def test_normalize_no_clamping():
    t = FreqTensor(np.full((1, 1, 64), 5000.0))
    assert np.all(normalize(t).data > 1.0)


def test_value_range_recorded():
    out = normalize(tensor_of(0.0))
    assert out.value_range == (-1.0, 1.0)


# --- DCT-domain 2x upsampling ---


def upsample_oracle(block: np.ndarray) -> np.ndarray:
    """Independent path: zero-pad the scaled spectrum, inverse 16-point
    transform, split in four, re-encode each tile with the 8-point DCT."""
    padded = np.zeros((16, 16))
    padded[:8, :8] = 2.0 * block
    spatial = idct16(padded)
    out = np.empty((2, 2, 8, 8))
    for qy in (0, 1):
        for qx in (0, 1):
            out[qy, qx] = fdct8(spatial[8 * qy : 8 * qy + 8, 8 * qx : 8 * qx + 8])
    return out


def test_upsample_dc_only_block():
    blocks = np.zeros((1, 1, 8, 8))
    blocks[0, 0, 0, 0] = 80.0
    up = upsample_dct_x2(DctPlane(blocks)).blocks
    assert up.shape == (2, 2, 8, 8)
    for qy in (0, 1):
        for qx in (0, 1):
            assert abs(up[qy, qx, 0, 0] - 80.0) < 1e-9
            ac = up[qy, qx].copy()
            ac[0, 0] = 0.0
            assert np.max(np.abs(ac)) < 1e-9


def test_upsample_zero_plane():
    up = upsample_dct_x2(DctPlane(np.zeros((3, 5, 8, 8))))
    assert up.blocks.shape == (6, 10, 8, 8)
    assert np.all(up.blocks == 0.0)


def test_upsample_matches_composition_oracle():
    rng = np.random.default_rng(2)
    worst = 0.0
    for _ in range(1000):
        block = rng.uniform(-64, 64, (8, 8))
        up = upsample_dct_x2(DctPlane(block[None, None])).blocks
        oracle = upsample_oracle(block)
        got = np.stack([up[0, 0], up[0, 1], up[1, 0], up[1, 1]])
        want = np.stack([oracle[0, 0], oracle[0, 1], oracle[1, 0], oracle[1, 1]])
        worst = max(worst, float(np.sqrt(np.mean((got - want) ** 2))))
    assert worst <= 1e-9


def test_upsample_linearity():
    rng = np.random.default_rng(3)
    a = rng.normal(0, 50, (2, 2, 8, 8))
    b = rng.normal(0, 50, (2, 2, 8, 8))
    s, t = 1.7, -0.4
    lhs = upsample_dct_x2(DctPlane(s * a + t * b)).blocks
    rhs = s * upsample_dct_x2(DctPlane(a)).blocks + t * upsample_dct_x2(DctPlane(b)).blocks
    np.testing.assert_allclose(lhs, rhs, atol=1e-9)


def test_upsample_preserves_mean_of_every_block():
    # The implied 16x16 pixel mean equals the 8x8 mean, so the four output
    # DCs average to the input DC exactly (per-tile equality holds only for
    # constant blocks, covered by the DC-only test above).
    rng = np.random.default_rng(4)
    plane = DctPlane(rng.normal(0, 100, (3, 3, 8, 8)))
    up = upsample_dct_x2(plane).blocks
    for r in range(3):
        for c in range(3):
            dc = plane.blocks[r, c, 0, 0]
            quad = [up[2 * r + qy, 2 * c + qx, 0, 0] for qy in (0, 1) for qx in (0, 1)]
            assert abs(np.mean(quad) - dc) <= 1e-9


def test_upsample_grid_interleaving():
    # block (r, c) of the input produces output blocks (2r+qy, 2c+qx)
    blocks = np.zeros((2, 2, 8, 8))
    blocks[1, 0, 0, 0] = 40.0
    up = upsample_dct_x2(DctPlane(blocks)).blocks
    assert up[2, 0, 0, 0] == pytest.approx(40.0)
    assert np.all(up[:2] == 0.0)
    assert np.all(up[2:, 2:] == 0.0)


# --- preprocessing chain ---


def _color_image(yblocks: np.ndarray, sub="4:2:0") -> DctImage:
    rows, cols = yblocks.shape[:2]
    cdiv = 2 if sub == "4:2:0" else 1
    c = DctPlane(np.zeros((rows // cdiv, cols // cdiv, 8, 8)))
    return DctImage(
        y=DctPlane(yblocks),
        cb=c,
        cr=c,
        pixel_width=cols * 8,
        pixel_height=rows * 8,
        subsampling=sub,
    )


def test_preprocess_shape_contract():
    img = _color_image(np.zeros((40, 36, 8, 8)))
    out = preprocess_lr(img, CropSpec(32))
    assert out.data.shape == (64, 64, 64)


def test_preprocess_rejects_grayscale():
    img = DctImage(
        y=DctPlane(np.zeros((40, 40, 8, 8))),
        cb=None,
        cr=None,
        pixel_width=320,
        pixel_height=320,
        subsampling="4:4:4",
    )
    with pytest.raises(ShapeMismatch):
        preprocess_lr(img, CropSpec(32))


def test_preprocess_rejects_other_scales():
    img = _color_image(np.zeros((32, 32, 8, 8)))
    with pytest.raises(ShapeMismatch):
        preprocess_lr(img, CropSpec(32), scale=4)


def test_preprocess_all_zero_plane_matches_composition_oracle():
    # The chain is crop -> normalize -> upsample -> flatten, in that order.
    # normalize(0) = 1/255 on every coefficient, and the upsampler is linear
    # but does NOT preserve the all-ones coefficient pattern, so the output
    # is 1/255 times the upsampled all-ones block, not a uniform tensor.
    img = _color_image(np.zeros((4, 4, 8, 8)))
    out = preprocess_lr(img, CropSpec(4)).data
    b = 1.0 / 255.0
    tile = upsample_oracle(np.full((8, 8), b))
    expected = np.empty((8, 8, 64))
    for r in range(4):
        for c in range(4):
            for qy in (0, 1):
                for qx in (0, 1):
                    expected[2 * r + qy, 2 * c + qx] = tile[qy, qx].reshape(64)
    np.testing.assert_allclose(out, expected, atol=1e-12)
    assert not np.allclose(out, b)  # the uniform-tensor shortcut is wrong


def test_preprocess_range_is_observed_not_clamped():
    # a plane at the top of the coefficient range normalizes to exactly +1;
    # upsampling overshoots and the overshoot must survive un-clamped
    img = _color_image(np.full((8, 8, 8, 8), 1016.0))
    out = preprocess_lr(img, CropSpec(8)).data
    assert np.all(np.isfinite(out))
    assert out.max() > 1.0 + 1e-6


def test_postprocess_inverts_normalize_blockify():
    rng = np.random.default_rng(6)
    plane = DctPlane(rng.uniform(-1024, 1016, (5, 3, 8, 8)))
    t = blockify(normalize_plane(plane))
    back = postprocess_hr(t)
    assert np.max(np.abs(back.blocks - plane.blocks)) <= 1e-9


def test_postprocess_endpoint_values():
    assert np.all(postprocess_hr(tensor_of(-1.0)).blocks == -1024.0)
    assert np.all(postprocess_hr(tensor_of(0.0)).blocks == -4.0)
