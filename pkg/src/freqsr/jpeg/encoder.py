"""Baseline JPEG encoder: standard quantization tables scaled by quality,
standard Huffman tables, JFIF container. Exists so datasets and benchmarks
are self-contained; the decode path is the artifact's focus.
"""
from __future__ import annotations

import struct

import numpy as np

from ..dct_model import SUBSAMPLING_420, SUBSAMPLING_444, RgbImage
from ..errors import DimensionMismatch, UnsupportedSubsampling
from ..spatial import fdct_plane, rgb_to_ycbcr, round_half_away
from . import kernels
from .tables import (
    AC_CHROMA_COUNTS,
    AC_CHROMA_SYMBOLS,
    AC_LUMA_COUNTS,
    AC_LUMA_SYMBOLS,
    DC_CHROMA_COUNTS,
    DC_CHROMA_SYMBOLS,
    DC_LUMA_COUNTS,
    DC_LUMA_SYMBOLS,
    NATURAL_OF_ZIGZAG,
    QUANT_CHROMA,
    QUANT_LUMA,
    encode_arrays,
    scaled_quant_table,
)


def _pad_edge(plane: np.ndarray, mult: int) -> np.ndarray:
    h, w = plane.shape
    ph = (-h) % mult
    pw = (-w) % mult
    if ph or pw:
        plane = np.pad(plane, ((0, ph), (0, pw)), mode="edge")
    return plane


def _quantize(plane: np.ndarray, qt_natural: np.ndarray) -> np.ndarray:
    """FDCT, divide by the table, round half away; returns (nblocks, 64) i32."""
    blocks = fdct_plane(plane, level_shift=128.0).blocks
    q = round_half_away(blocks / qt_natural.reshape(8, 8))
    q = q.astype(np.int32).reshape(blocks.shape[0] * blocks.shape[1], 64)
    # standard AC tables stop at magnitude category 10
    q[:, 1:] = np.clip(q[:, 1:], -1023, 1023)
    return np.ascontiguousarray(q)


def _segment(marker: int, payload: bytes) -> bytes:
    return struct.pack(">BBH", 0xFF, marker, len(payload) + 2) + payload


def encode_baseline(img: RgbImage, quality: int = 100, subsampling: str = SUBSAMPLING_420) -> bytes:
    """Encode an RGB raster as a baseline JFIF JPEG."""
    if img.width < 1 or img.height < 1:
        raise DimensionMismatch("image dimensions must be >= 1")
    if subsampling not in (SUBSAMPLING_444, SUBSAMPLING_420):
        raise UnsupportedSubsampling(subsampling)

    qt_luma = scaled_quant_table(QUANT_LUMA, quality)
    qt_chroma = scaled_quant_table(QUANT_CHROMA, quality)

    y, cb, cr = rgb_to_ycbcr(img)
    if subsampling == SUBSAMPLING_420:
        ysamp, mult = 2, 16
    else:
        ysamp, mult = 1, 8
    y = _pad_edge(y, mult)
    cb = _pad_edge(cb, mult)
    cr = _pad_edge(cr, mult)
    if ysamp == 2:  # 2x2 box average to half-resolution chroma
        cb = cb.reshape(cb.shape[0] // 2, 2, cb.shape[1] // 2, 2).mean(axis=(1, 3))
        cr = cr.reshape(cr.shape[0] // 2, 2, cr.shape[1] // 2, 2).mean(axis=(1, 3))

    qy = _quantize(y, qt_luma)
    qcb = _quantize(cb, qt_chroma)
    qcr = _quantize(cr, qt_chroma)

    mcus_x = -(-img.width // (8 * ysamp))
    mcus_y = -(-img.height // (8 * ysamp))
    comp_h = np.array([ysamp, 1, 1, 0], dtype=np.int32)
    comp_v = np.array([ysamp, 1, 1, 0], dtype=np.int32)
    bw_pad = np.array([mcus_x * ysamp, mcus_x, mcus_x, 1], dtype=np.int32)
    dc_sel = np.array([0, 1, 1, 0], dtype=np.int32)
    ac_sel = np.array([0, 1, 1, 0], dtype=np.int32)

    dc_co = np.zeros((4, 256), dtype=np.int32)
    dc_si = np.zeros((4, 256), dtype=np.int32)
    ac_co = np.zeros((4, 256), dtype=np.int32)
    ac_si = np.zeros((4, 256), dtype=np.int32)
    dc_co[0], dc_si[0] = encode_arrays(DC_LUMA_COUNTS, DC_LUMA_SYMBOLS)
    dc_co[1], dc_si[1] = encode_arrays(DC_CHROMA_COUNTS, DC_CHROMA_SYMBOLS)
    ac_co[0], ac_si[0] = encode_arrays(AC_LUMA_COUNTS, AC_LUMA_SYMBOLS)
    ac_co[1], ac_si[1] = encode_arrays(AC_CHROMA_COUNTS, AC_CHROMA_SYMBOLS)

    nblocks = qy.shape[0] + qcb.shape[0] + qcr.shape[0]
    buf = np.empty(nblocks * 512 + 1024, dtype=np.uint8)
    nbytes = kernels.encode_scan(
        qy,
        qcb,
        qcr,
        3,
        comp_h,
        comp_v,
        bw_pad,
        dc_sel,
        ac_sel,
        dc_co,
        dc_si,
        ac_co,
        ac_si,
        NATURAL_OF_ZIGZAG,
        mcus_x,
        mcus_y,
        buf,
    )
    if nbytes < 0:  # pragma: no cover - buffer is sized for the worst case
        raise RuntimeError("entropy buffer overflow")

    out = bytearray()
    out += b"\xff\xd8"  # SOI
    out += _segment(0xE0, b"JFIF\x00\x01\x01\x00\x00\x01\x00\x01\x00\x00")
    dqt = bytes([0x00]) + bytes(qt_luma[NATURAL_OF_ZIGZAG].astype(np.uint8))
    dqt += bytes([0x01]) + bytes(qt_chroma[NATURAL_OF_ZIGZAG].astype(np.uint8))
    out += _segment(0xDB, dqt)
    sof = struct.pack(">BHHB", 8, img.height, img.width, 3)
    sof += bytes([1, (ysamp << 4) | ysamp, 0])
    sof += bytes([2, 0x11, 1])
    sof += bytes([3, 0x11, 1])
    out += _segment(0xC0, sof)
    dht = b""
    for cls, slot, counts, symbols in (
        (0, 0, DC_LUMA_COUNTS, DC_LUMA_SYMBOLS),
        (1, 0, AC_LUMA_COUNTS, AC_LUMA_SYMBOLS),
        (0, 1, DC_CHROMA_COUNTS, DC_CHROMA_SYMBOLS),
        (1, 1, AC_CHROMA_COUNTS, AC_CHROMA_SYMBOLS),
    ):
        dht += bytes([(cls << 4) | slot]) + bytes(counts) + bytes(symbols)
    out += _segment(0xC4, dht)
    sos = bytes([3, 1, 0x00, 2, 0x11, 3, 0x11, 0, 63, 0])
    out += _segment(0xDA, sos)
    out += buf[: int(nbytes)].tobytes()
    out += b"\xff\xd9"  # EOI
    return bytes(out)
