"""Block-domain data model: coefficient planes, flattened frequency tensors,
RGB rasters, and the normalization constants shared by the whole pipeline.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DimensionMismatch, ShapeMismatch

SUBSAMPLING_444 = "4:4:4"
SUBSAMPLING_420 = "4:2:0"


@dataclass(frozen=True)
class DctPlane:
    """Grid of 8x8 DCT coefficient blocks, shape (blockRows, blockCols, 8, 8)."""

    blocks: np.ndarray

    def __post_init__(self):
        b = np.asarray(self.blocks)
        if b.ndim != 4 or b.shape[2:] != (8, 8):
            raise ShapeMismatch(f"expected (rows, cols, 8, 8), got {b.shape}")
        if b.shape[0] < 1 or b.shape[1] < 1:
            raise ShapeMismatch("empty block grid")
        object.__setattr__(self, "blocks", b)

    @property
    def block_rows(self) -> int:
        return self.blocks.shape[0]

    @property
    def block_cols(self) -> int:
        return self.blocks.shape[1]


@dataclass(frozen=True)
class DctImage:
    """Per-channel coefficient grids plus true pixel dims and subsampling.

    Grids keep the MCU-padded extent; pixel_width/pixel_height carry the true
    dimensions. cb/cr are None for grayscale sources.
    """

    y: DctPlane
    cb: DctPlane | None
    cr: DctPlane | None
    pixel_width: int
    pixel_height: int
    subsampling: str

    def __post_init__(self):
        if (self.cb is None) != (self.cr is None):
            raise ShapeMismatch("cb and cr must both be present or both absent")
        if self.cb is not None and self.cb.blocks.shape != self.cr.blocks.shape:
            raise DimensionMismatch("cb/cr grids differ")

    @property
    def is_color(self) -> bool:
        return self.cb is not None


@dataclass(frozen=True)
class FreqTensor:
    """Flattened block grid, shape (blockRows, blockCols, 64)."""

    data: np.ndarray
    value_range: tuple[float, float] | None = None

    def __post_init__(self):
        d = np.asarray(self.data)
        if d.ndim != 3 or d.shape[2] != 64:
            raise ShapeMismatch(f"expected (rows, cols, 64), got {d.shape}")
        object.__setattr__(self, "data", d)


@dataclass(frozen=True)
class RgbImage:
    """Interleaved 8-bit RGB raster, samples shape (height, width, 3)."""

    samples: np.ndarray

    def __post_init__(self):
        s = np.asarray(self.samples)
        if s.ndim != 3 or s.shape[2] != 3 or s.dtype != np.uint8:
            raise ShapeMismatch(f"expected uint8 (h, w, 3), got {s.shape} {s.dtype}")
        object.__setattr__(self, "samples", s)

    @property
    def width(self) -> int:
        return self.samples.shape[1]

    @property
    def height(self) -> int:
        return self.samples.shape[0]


@dataclass(frozen=True)
class NormParams:
    """Affine map from the coefficient range to the network's value range."""

    orig_min: float = -1024.0
    orig_max: float = 1016.0
    val_min: float = -1.0
    val_max: float = 1.0

    def __post_init__(self):
        if not (self.orig_max > self.orig_min and self.val_max > self.val_min):
            raise ValueError("degenerate normalization range")


def blockify(plane: DctPlane) -> FreqTensor:
    """Flatten each 8x8 block row-major: channel k = 8*u + v."""
    rows, cols = plane.block_rows, plane.block_cols
    data = np.ascontiguousarray(plane.blocks, dtype=np.float64).reshape(rows, cols, 64)
    return FreqTensor(data)


def unblockify(t: FreqTensor) -> DctPlane:
    rows, cols = t.data.shape[0], t.data.shape[1]
    blocks = np.ascontiguousarray(t.data, dtype=np.float64).reshape(rows, cols, 8, 8)
    return DctPlane(blocks)
