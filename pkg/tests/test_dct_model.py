import numpy as np
import pytest

from freqsr.dct_model import (
    DctImage,
    DctPlane,
    FreqTensor,
    NormParams,
    RgbImage,
    blockify,
    unblockify,
)
from freqsr.errors import ShapeMismatch


def test_blockify_row_major_channel_index():
    blocks = np.zeros((1, 1, 8, 8))
    blocks[0, 0, 1, 2] = 5.0  # u=1, v=2 -> k = 8*1 + 2
    t = blockify(DctPlane(blocks))
    nz = np.nonzero(t.data[0, 0])[0]
    assert list(nz) == [10]
    assert t.data[0, 0, 10] == 5.0


def test_dc_maps_to_channel_zero():
    blocks = np.zeros((2, 3, 8, 8))
    blocks[:, :, 0, 0] = 7.0
    t = blockify(DctPlane(blocks))
    assert np.all(t.data[:, :, 0] == 7.0)
    assert np.all(t.data[:, :, 1:] == 0.0)


def test_blockify_unblockify_roundtrip():
    rng = np.random.default_rng(0)
    blocks = rng.normal(0, 100, (5, 7, 8, 8))
    back = unblockify(blockify(DctPlane(blocks)))
    assert np.array_equal(back.blocks, blocks)


def test_shape_algebra_matches_block_layout():
    h, w = 160, 224  # multiples of 16
    y = DctPlane(np.zeros((h // 8, w // 8, 8, 8)))
    cb = DctPlane(np.zeros((h // 16, w // 16, 8, 8)))
    img = DctImage(y=y, cb=cb, cr=cb, pixel_width=w, pixel_height=h, subsampling="4:2:0")
    assert blockify(img.y).data.shape == (h // 8, w // 8, 64)
    assert blockify(img.cb).data.shape == (h // 16, w // 16, 64)


def test_plane_rejects_bad_shapes():
    with pytest.raises(ShapeMismatch):
        DctPlane(np.zeros((4, 4, 8, 7)))
    with pytest.raises(ShapeMismatch):
        FreqTensor(np.zeros((4, 4, 63)))
    with pytest.raises(ShapeMismatch):
        RgbImage(np.zeros((4, 4, 3)))  # not uint8


def test_chroma_planes_must_pair():
    y = DctPlane(np.zeros((2, 2, 8, 8)))
    with pytest.raises(ShapeMismatch):
        DctImage(y=y, cb=y, cr=None, pixel_width=16, pixel_height=16, subsampling="4:4:4")


def test_norm_params_defaults():
    p = NormParams()
    assert p.orig_min == -1024.0 and p.orig_max == 1016.0
    assert p.val_min == -1.0 and p.val_max == 1.0
    with pytest.raises(ValueError):
        NormParams(orig_min=5, orig_max=5)
