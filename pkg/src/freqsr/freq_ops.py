"""Frequency-domain preprocessing: center crop, range normalization,
DCT-domain 2x upsampling via precomputed conversion matrices, and the
inference-side inverses.
"""
from __future__ import annotations

import numpy as np

from .dct_model import (
    DctImage,
    DctPlane,
    FreqTensor,
    NormParams,
    blockify,
    unblockify,
)
from .errors import CropTooLarge, ShapeMismatch
from .spatial import dct_matrix


class CropSpec:
    """Square crop size in blocks."""

    def __init__(self, size_blocks: int):
        if size_blocks < 1:
            raise ValueError(f"crop size must be >= 1, got {size_blocks}")
        self.size_blocks = int(size_blocks)


def center_crop(plane: DctPlane, spec: CropSpec) -> DctPlane:
    """S x S block window centered with floor tie-break (origin biased top-left)."""
    s = spec.size_blocks
    rows, cols = plane.block_rows, plane.block_cols
    if s > rows or s > cols:
        raise CropTooLarge(f"crop {s}x{s} exceeds plane {rows}x{cols} blocks")
    r0 = (rows - s) // 2
    c0 = (cols - s) // 2
    return DctPlane(plane.blocks[r0 : r0 + s, c0 : c0 + s].copy())


def normalize(t: FreqTensor, p: NormParams = NormParams()) -> FreqTensor:
    data = _affine(np.asarray(t.data, dtype=np.float64), p)
    return FreqTensor(data, value_range=(p.val_min, p.val_max))


def denormalize(t: FreqTensor, p: NormParams = NormParams()) -> FreqTensor:
    data = _affine_inv(np.asarray(t.data, dtype=np.float64), p)
    return FreqTensor(data, value_range=(p.orig_min, p.orig_max))


def _affine(x: np.ndarray, p: NormParams) -> np.ndarray:
    # Values outside [orig_min, orig_max] pass through un-clamped; clamping
    # would break invertibility and only the final pixel stage clips.
    return p.val_min + (x - p.orig_min) / (p.orig_max - p.orig_min) * (p.val_max - p.val_min)


def _affine_inv(x: np.ndarray, p: NormParams) -> np.ndarray:
    return p.orig_min + (x - p.val_min) / (p.val_max - p.val_min) * (p.orig_max - p.orig_min)


def normalize_plane(plane: DctPlane, p: NormParams = NormParams()) -> DctPlane:
    return DctPlane(_affine(np.asarray(plane.blocks, dtype=np.float64), p))


def denormalize_plane(plane: DctPlane, p: NormParams = NormParams()) -> DctPlane:
    return DctPlane(_affine_inv(np.asarray(plane.blocks, dtype=np.float64), p))


def _conversion_matrices() -> tuple[np.ndarray, np.ndarray]:
    """8x8 matrices L0, L1 with out[qy,qx] = 2 * L_qy @ B @ L_qx.T.

    Derived from zero-padding an 8x8 spectrum into a 16x16 block (scaled by 2
    so pixel amplitudes are preserved), inverse-transforming, splitting the
    16x16 tile in four, and re-encoding each half with the 8-point DCT.
    """
    t8 = dct_matrix(8)
    t16 = dct_matrix(16)
    a = t16[:8, :].T  # a[x, u] = t16[u, x], low-frequency synthesis columns
    return t8 @ a[:8, :], t8 @ a[8:, :]


_L0, _L1 = _conversion_matrices()


def upsample_dct_x2(plane: DctPlane) -> DctPlane:
    """Double the block grid; the implied image is the ideal DCT interpolation."""
    blocks = np.asarray(plane.blocks, dtype=np.float64)
    rows, cols = blocks.shape[:2]
    out = np.empty((2 * rows, 2 * cols, 8, 8), dtype=np.float64)
    ls = (_L0, _L1)
    for qy in (0, 1):
        for qx in (0, 1):
            out[qy::2, qx::2] = 2.0 * np.einsum(
                "iu,rcuv,jv->rcij", ls[qy], blocks, ls[qx], optimize=True
            )
    return DctPlane(out)


def preprocess_plane(
    plane: DctPlane, spec: CropSpec | None, p: NormParams = NormParams()
) -> FreqTensor:
    """Crop -> normalize -> upsample -> flatten, in that order."""
    if spec is not None:
        plane = center_crop(plane, spec)
    plane = normalize_plane(plane, p)
    plane = upsample_dct_x2(plane)
    return blockify(plane)


def preprocess_lr(
    img: DctImage,
    spec: CropSpec | None,
    p: NormParams = NormParams(),
    scale: int = 2,
) -> FreqTensor:
    """Preprocess the luma grid of a color image for the network.

    spec=None skips the crop (full-image inference). Only scale 2 exists.
    """
    if scale != 2:
        raise ShapeMismatch(f"only scale 2 is supported, got {scale}")
    if not img.is_color:
        raise ShapeMismatch("grayscale input: SR pipeline requires chroma")
    return preprocess_plane(img.y, spec, p)


def postprocess_hr(t: FreqTensor, p: NormParams = NormParams()) -> DctPlane:
    """Inverse of (normalize -> blockify): restore blocks, then the range."""
    return denormalize_plane(unblockify(t), p)
