"""Image-quality metrics (PSNR, SSIM on the luminance plane by default) and
monotonic-clock stopwatch helpers for the benchmark harness.
"""
from __future__ import annotations

import math
import time

import numpy as np

from .dct_model import RgbImage
from .errors import DimensionMismatch, TooSmall

_SSIM_WINDOW = 11
_SSIM_SIGMA = 1.5
_SSIM_K1 = 0.01
_SSIM_K2 = 0.03


def _as_plane(img) -> np.ndarray:
    if isinstance(img, RgbImage):
        return img.samples.astype(np.float64)
    return np.asarray(img, dtype=np.float64)


def luminance(img: RgbImage) -> np.ndarray:
    """BT.601 luma of an RGB raster (float, unrounded)."""
    s = img.samples.astype(np.float64)
    return 0.299 * s[..., 0] + 0.587 * s[..., 1] + 0.114 * s[..., 2]


def psnr(a, b, max_val: float = 255.0) -> float:
    """10*log10(maxVal^2 / MSE); +inf when the inputs are identical."""
    pa, pb = _as_plane(a), _as_plane(b)
    if pa.shape != pb.shape:
        raise DimensionMismatch(f"dims differ: {pa.shape} vs {pb.shape}")
    mse = np.mean((pa - pb) ** 2)
    if mse == 0.0:
        return math.inf
    return 10.0 * math.log10(max_val * max_val / mse)


def _gaussian_window(n: int, sigma: float) -> np.ndarray:
    r = np.arange(n, dtype=np.float64) - (n - 1) / 2.0
    g = np.exp(-(r * r) / (2.0 * sigma * sigma))
    w = np.outer(g, g)
    return w / w.sum()


def _window_means(plane: np.ndarray, w: np.ndarray) -> np.ndarray:
    # valid-region weighted local means via sliding windows
    v = np.lib.stride_tricks.sliding_window_view(plane, w.shape)
    return np.tensordot(v, w, axes=([2, 3], [0, 1]))


def ssim(a, b, max_val: float = 255.0) -> float:
    """Mean SSIM map: 11x11 Gaussian window sigma=1.5, valid region only."""
    pa, pb = _as_plane(a), _as_plane(b)
    if pa.ndim != 2 or pb.ndim != 2:
        raise DimensionMismatch("ssim expects single planes")
    if pa.shape != pb.shape:
        raise DimensionMismatch(f"dims differ: {pa.shape} vs {pb.shape}")
    if pa.shape[0] < _SSIM_WINDOW or pa.shape[1] < _SSIM_WINDOW:
        raise TooSmall(f"plane smaller than the {_SSIM_WINDOW}x{_SSIM_WINDOW} window")
    w = _gaussian_window(_SSIM_WINDOW, _SSIM_SIGMA)
    mu_a = _window_means(pa, w)
    mu_b = _window_means(pb, w)
    var_a = _window_means(pa * pa, w) - mu_a * mu_a
    var_b = _window_means(pb * pb, w) - mu_b * mu_b
    cov = _window_means(pa * pb, w) - mu_a * mu_b
    c1 = (_SSIM_K1 * max_val) ** 2
    c2 = (_SSIM_K2 * max_val) ** 2
    num = (2.0 * mu_a * mu_b + c1) * (2.0 * cov + c2)
    den = (mu_a * mu_a + mu_b * mu_b + c1) * (var_a + var_b + c2)
    return float(np.mean(num / den))


def center_crop_px(img, size: int = 220):
    """Pixel-domain centered crop, floor tie-break on odd margins."""
    if isinstance(img, RgbImage):
        h, w = img.height, img.width
        if h < size or w < size:
            raise DimensionMismatch(f"image {w}x{h} smaller than crop {size}")
        r0, c0 = (h - size) // 2, (w - size) // 2
        return RgbImage(img.samples[r0 : r0 + size, c0 : c0 + size].copy())
    arr = np.asarray(img)
    h, w = arr.shape[:2]
    if h < size or w < size:
        raise DimensionMismatch(f"plane {w}x{h} smaller than crop {size}")
    r0, c0 = (h - size) // 2, (w - size) // 2
    return arr[r0 : r0 + size, c0 : c0 + size].copy()


class Stopwatch:
    """Monotonic-clock scope: `with Stopwatch() as t: ...; t.elapsed`."""

    def __init__(self):
        self.elapsed = 0.0
        self._start = None

    def __enter__(self):
        self._start = time.perf_counter()
        return self

    def __exit__(self, *exc):
        self.elapsed = time.perf_counter() - self._start
        return False


def fps(count: int, elapsed_seconds: float) -> float:
    if elapsed_seconds <= 0.0:
        raise ValueError("elapsed time must be positive")
    return count / elapsed_seconds
