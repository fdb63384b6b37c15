"""Spatial-domain reference math: N-point DCT pairs, chroma upsampling,
YCbCr<->RGB conversion, and full RGB reconstruction from coefficient grids.

All transforms use the orthonormal DCT-II matrix (C(0)=1/sqrt(2) style
scaling), evaluated in double precision.
"""
from __future__ import annotations

import numpy as np

from .dct_model import (
    SUBSAMPLING_420,
    SUBSAMPLING_444,
    DctImage,
    DctPlane,
    RgbImage,
)
from .errors import DimensionMismatch, UnsupportedSubsampling


def dct_matrix(n: int) -> np.ndarray:
    """Orthonormal DCT-II matrix: T[u, x] = c(u) cos((2x+1) u pi / 2n)."""
    u = np.arange(n)[:, None]
    x = np.arange(n)[None, :]
    t = np.cos((2 * x + 1) * u * np.pi / (2 * n))
    t *= np.sqrt(2.0 / n)
    t[0, :] *= 1.0 / np.sqrt(2.0)
    return t


_T8 = dct_matrix(8)
_T16 = dct_matrix(16)


def fdct8(block: np.ndarray) -> np.ndarray:
    return _T8 @ np.asarray(block, dtype=np.float64) @ _T8.T


def idct8(block: np.ndarray) -> np.ndarray:
    return _T8.T @ np.asarray(block, dtype=np.float64) @ _T8


def fdct16(block: np.ndarray) -> np.ndarray:
    return _T16 @ np.asarray(block, dtype=np.float64) @ _T16.T


def idct16(block: np.ndarray) -> np.ndarray:
    return _T16.T @ np.asarray(block, dtype=np.float64) @ _T16


def idct_plane(plane: DctPlane, level_shift: float = 128.0) -> np.ndarray:
    """Inverse-transform every block and assemble the full spatial plane."""
    blocks = np.asarray(plane.blocks, dtype=np.float64)
    rows, cols = blocks.shape[:2]
    spat = np.einsum("xu,rcuv,vy->rcxy", _T8.T, blocks, _T8, optimize=True)
    spat += level_shift
    return spat.transpose(0, 2, 1, 3).reshape(rows * 8, cols * 8)


def fdct_plane(samples: np.ndarray, level_shift: float = 128.0) -> DctPlane:
    """Forward-transform a spatial plane (dims multiples of 8) into blocks."""
    s = np.asarray(samples, dtype=np.float64)
    h, w = s.shape
    if h % 8 or w % 8:
        raise DimensionMismatch(f"plane dims {w}x{h} not multiples of 8")
    tiles = s.reshape(h // 8, 8, w // 8, 8).transpose(0, 2, 1, 3) - level_shift
    coef = np.einsum("ux,rcxy,yv->rcuv", _T8, tiles, _T8.T, optimize=True)
    return DctPlane(coef)


def ycbcr_to_rgb(y: np.ndarray, cb: np.ndarray, cr: np.ndarray) -> RgbImage:
    """JFIF/BT.601 full-range conversion, round half away from zero, clamp."""
    if not (y.shape == cb.shape == cr.shape):
        raise DimensionMismatch(f"plane dims differ: {y.shape} {cb.shape} {cr.shape}")
    y = np.asarray(y, dtype=np.float64)
    cbo = np.asarray(cb, dtype=np.float64) - 128.0
    cro = np.asarray(cr, dtype=np.float64) - 128.0
    rgb = np.empty(y.shape + (3,), dtype=np.float64)
    rgb[..., 0] = y + 1.402 * cro
    rgb[..., 1] = y - 0.344136 * cbo - 0.714136 * cro
    rgb[..., 2] = y + 1.772 * cbo
    out = np.clip(round_half_away(rgb), 0.0, 255.0)
    return RgbImage(out.astype(np.uint8))


def rgb_to_ycbcr(img: RgbImage) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Forward BT.601 full-range; returns unrounded float planes."""
    s = img.samples.astype(np.float64)
    r, g, b = s[..., 0], s[..., 1], s[..., 2]
    y = 0.299 * r + 0.587 * g + 0.114 * b
    cb = 128.0 - 0.168736 * r - 0.331264 * g + 0.5 * b
    cr = 128.0 + 0.5 * r - 0.418688 * g - 0.081312 * b
    return y, cb, cr


def round_half_away(x: np.ndarray) -> np.ndarray:
    return np.trunc(x + np.copysign(0.5, x))


def chroma_upsample(plane: np.ndarray, factor: int) -> np.ndarray:
    """Enlarge a spatial plane by DCT zero-pad interpolation (factor 2 or 4).

    Each doubling re-encodes 8x8 tiles, zero-pads their spectra, and
    inverse-transforms; factor 4 is two applications of the doubling.
    """
    if factor not in (2, 4):
        raise DimensionMismatch(f"factor must be 2 or 4, got {factor}")
    from .freq_ops import upsample_dct_x2  # local import: freq_ops uses this module's matrices

    out = np.asarray(plane, dtype=np.float64)
    for _ in range(factor // 2):
        coef = fdct_plane(out, level_shift=0.0)
        out = idct_plane(upsample_dct_x2(coef), level_shift=0.0)
    return out


def reconstruct_rgb(img: DctImage) -> RgbImage:
    """Full decode tail: IDCT planes, upsample chroma, convert, trim padding."""
    from .freq_ops import upsample_dct_x2

    y = idct_plane(img.y)
    if not img.is_color:
        y8 = np.clip(round_half_away(y), 0.0, 255.0).astype(np.uint8)
        gray = y8[: img.pixel_height, : img.pixel_width]
        return RgbImage(np.repeat(gray[:, :, None], 3, axis=2))
    if img.subsampling == SUBSAMPLING_420:
        cb = idct_plane(upsample_dct_x2(img.cb))
        cr = idct_plane(upsample_dct_x2(img.cr))
    elif img.subsampling == SUBSAMPLING_444:
        cb = idct_plane(img.cb)
        cr = idct_plane(img.cr)
    else:
        raise UnsupportedSubsampling(img.subsampling)
    h, w = y.shape
    rgb = ycbcr_to_rgb(y, cb[:h, :w], cr[:h, :w])
    return RgbImage(rgb.samples[: img.pixel_height, : img.pixel_width])
