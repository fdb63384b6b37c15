"""Standard JPEG constants: zigzag order, default quantization tables with
quality scaling, default Huffman table specs, and canonical code construction.
"""
from __future__ import annotations

import numpy as np

from ..errors import MalformedBitstream

# zigzag index of each natural (row-major) position
ZIGZAG_OF_NATURAL = np.array(
    [
        0,  1,  5,  6, 14, 15, 27, 28,
        2,  4,  7, 13, 16, 26, 29, 42,
        3,  8, 12, 17, 25, 30, 41, 43,
        9, 11, 18, 24, 31, 40, 44, 53,
        10, 19, 23, 32, 39, 45, 52, 54,
        20, 22, 33, 38, 46, 51, 55, 60,
        21, 34, 37, 47, 50, 56, 59, 61,
        35, 36, 48, 49, 57, 58, 62, 63,
    ],
    dtype=np.int32,
)

# natural (row-major) position of each zigzag index
NATURAL_OF_ZIGZAG = np.argsort(ZIGZAG_OF_NATURAL).astype(np.int32)

# default quantization tables, natural order
QUANT_LUMA = np.array(
    [
        16, 11, 10, 16, 24, 40, 51, 61,
        12, 12, 14, 19, 26, 58, 60, 55,
        14, 13, 16, 24, 40, 57, 69, 56,
        14, 17, 22, 29, 51, 87, 80, 62,
        18, 22, 37, 56, 68, 109, 103, 77,
        24, 35, 55, 64, 81, 104, 113, 92,
        49, 64, 78, 87, 103, 121, 120, 101,
        72, 92, 95, 98, 112, 100, 103, 99,
    ],
    dtype=np.int32,
)

QUANT_CHROMA = np.array(
    [
        17, 18, 24, 47, 99, 99, 99, 99,
        18, 21, 26, 66, 99, 99, 99, 99,
        24, 26, 56, 99, 99, 99, 99, 99,
        47, 66, 99, 99, 99, 99, 99, 99,
        99, 99, 99, 99, 99, 99, 99, 99,
        99, 99, 99, 99, 99, 99, 99, 99,
        99, 99, 99, 99, 99, 99, 99, 99,
        99, 99, 99, 99, 99, 99, 99, 99,
    ],
    dtype=np.int32,
)


def scaled_quant_table(base: np.ndarray, quality: int) -> np.ndarray:
    """libjpeg quality scaling; quality 100 degenerates to all-ones."""
    if not 1 <= quality <= 100:
        raise ValueError(f"quality must be 1..100, got {quality}")
    scale = 5000 // quality if quality < 50 else 200 - 2 * quality
    q = (base.astype(np.int64) * scale + 50) // 100
    return np.clip(q, 1, 255).astype(np.int32)


# default Huffman specs: (counts per code length 1..16, symbol list)
DC_LUMA_COUNTS = [0, 1, 5, 1, 1, 1, 1, 1, 1, 0, 0, 0, 0, 0, 0, 0]
DC_LUMA_SYMBOLS = list(range(12))

DC_CHROMA_COUNTS = [0, 3, 1, 1, 1, 1, 1, 1, 1, 1, 1, 0, 0, 0, 0, 0]
DC_CHROMA_SYMBOLS = list(range(12))

AC_LUMA_COUNTS = [0, 2, 1, 3, 3, 2, 4, 3, 5, 5, 4, 4, 0, 0, 1, 125]
AC_LUMA_SYMBOLS = [
    0x01, 0x02, 0x03, 0x00, 0x04, 0x11, 0x05, 0x12, 0x21, 0x31, 0x41, 0x06,
    0x13, 0x51, 0x61, 0x07, 0x22, 0x71, 0x14, 0x32, 0x81, 0x91, 0xA1, 0x08,
    0x23, 0x42, 0xB1, 0xC1, 0x15, 0x52, 0xD1, 0xF0, 0x24, 0x33, 0x62, 0x72,
    0x82, 0x09, 0x0A, 0x16, 0x17, 0x18, 0x19, 0x1A, 0x25, 0x26, 0x27, 0x28,
    0x29, 0x2A, 0x34, 0x35, 0x36, 0x37, 0x38, 0x39, 0x3A, 0x43, 0x44, 0x45,
    0x46, 0x47, 0x48, 0x49, 0x4A, 0x53, 0x54, 0x55, 0x56, 0x57, 0x58, 0x59,
    0x5A, 0x63, 0x64, 0x65, 0x66, 0x67, 0x68, 0x69, 0x6A, 0x73, 0x74, 0x75,
    0x76, 0x77, 0x78, 0x79, 0x7A, 0x83, 0x84, 0x85, 0x86, 0x87, 0x88, 0x89,
    0x8A, 0x92, 0x93, 0x94, 0x95, 0x96, 0x97, 0x98, 0x99, 0x9A, 0xA2, 0xA3,
    0xA4, 0xA5, 0xA6, 0xA7, 0xA8, 0xA9, 0xAA, 0xB2, 0xB3, 0xB4, 0xB5, 0xB6,
    0xB7, 0xB8, 0xB9, 0xBA, 0xC2, 0xC3, 0xC4, 0xC5, 0xC6, 0xC7, 0xC8, 0xC9,
    0xCA, 0xD2, 0xD3, 0xD4, 0xD5, 0xD6, 0xD7, 0xD8, 0xD9, 0xDA, 0xE1, 0xE2,
    0xE3, 0xE4, 0xE5, 0xE6, 0xE7, 0xE8, 0xE9, 0xEA, 0xF1, 0xF2, 0xF3, 0xF4,
    0xF5, 0xF6, 0xF7, 0xF8, 0xF9, 0xFA,
]

AC_CHROMA_COUNTS = [0, 2, 1, 2, 4, 4, 3, 4, 7, 5, 4, 4, 0, 1, 2, 119]
AC_CHROMA_SYMBOLS = [
    0x00, 0x01, 0x02, 0x03, 0x11, 0x04, 0x05, 0x21, 0x31, 0x06, 0x12, 0x41,
    0x51, 0x07, 0x61, 0x71, 0x13, 0x22, 0x32, 0x81, 0x08, 0x14, 0x42, 0x91,
    0xA1, 0xB1, 0xC1, 0x09, 0x23, 0x33, 0x52, 0xF0, 0x15, 0x62, 0x72, 0xD1,
    0x0A, 0x16, 0x24, 0x34, 0xE1, 0x25, 0xF1, 0x17, 0x18, 0x19, 0x1A, 0x26,
    0x27, 0x28, 0x29, 0x2A, 0x35, 0x36, 0x37, 0x38, 0x39, 0x3A, 0x43, 0x44,
    0x45, 0x46, 0x47, 0x48, 0x49, 0x4A, 0x53, 0x54, 0x55, 0x56, 0x57, 0x58,
    0x59, 0x5A, 0x63, 0x64, 0x65, 0x66, 0x67, 0x68, 0x69, 0x6A, 0x73, 0x74,
    0x75, 0x76, 0x77, 0x78, 0x79, 0x7A, 0x82, 0x83, 0x84, 0x85, 0x86, 0x87,
    0x88, 0x89, 0x8A, 0x92, 0x93, 0x94, 0x95, 0x96, 0x97, 0x98, 0x99, 0x9A,
    0xA2, 0xA3, 0xA4, 0xA5, 0xA6, 0xA7, 0xA8, 0xA9, 0xAA, 0xB2, 0xB3, 0xB4,
    0xB5, 0xB6, 0xB7, 0xB8, 0xB9, 0xBA, 0xC2, 0xC3, 0xC4, 0xC5, 0xC6, 0xC7,
    0xC8, 0xC9, 0xCA, 0xD2, 0xD3, 0xD4, 0xD5, 0xD6, 0xD7, 0xD8, 0xD9, 0xDA,
    0xE2, 0xE3, 0xE4, 0xE5, 0xE6, 0xE7, 0xE8, 0xE9, 0xEA, 0xF2, 0xF3, 0xF4,
    0xF5, 0xF6, 0xF7, 0xF8, 0xF9, 0xFA,
]


def build_huffman_codes(counts, symbols) -> dict[int, tuple[int, int]]:
    """Canonical code assignment; returns {symbol: (code, length)}.

    Raises MalformedBitstream when (counts, symbols) cannot form a valid
    prefix-free set.
    """
    if len(counts) != 16:
        raise MalformedBitstream("Huffman spec needs 16 length counts")
    if sum(counts) != len(symbols):
        raise MalformedBitstream("Huffman counts do not match symbol count")
    if len(symbols) > 256:
        raise MalformedBitstream("too many Huffman symbols")
    codes: dict[int, tuple[int, int]] = {}
    code = 0
    k = 0
    for length in range(1, 17):
        n = counts[length - 1]
        if code + n > (1 << length):
            raise MalformedBitstream("Huffman code overflow (not prefix-free)")
        for _ in range(n):
            sym = symbols[k]
            if sym in codes:
                raise MalformedBitstream(f"duplicate Huffman symbol {sym}")
            codes[sym] = (code, length)
            code += 1
            k += 1
        code <<= 1
    return codes


def build_decode_arrays(counts, symbols):
    """Per-length mincode/maxcode/valptr arrays (T.81 F.2.2.3 layout).

    maxcode[l] == -1 marks lengths with no codes. Index 0 is unused so that
    l indexes directly by code length.
    """
    codes = build_huffman_codes(counts, symbols)
    mincode = np.zeros(17, dtype=np.int32)
    maxcode = np.full(17, -1, dtype=np.int32)
    valptr = np.zeros(17, dtype=np.int32)
    huffval = np.zeros(256, dtype=np.uint8)
    huffval[: len(symbols)] = symbols
    code = 0
    k = 0
    for length in range(1, 17):
        n = counts[length - 1]
        if n:
            valptr[length] = k
            mincode[length] = code
            maxcode[length] = code + n - 1
            code += n
            k += n
        code <<= 1
    return mincode, maxcode, valptr, huffval


def encode_arrays(counts, symbols):
    """Per-symbol (code, size) arrays for the encoder kernel."""
    codes = build_huffman_codes(counts, symbols)
    ehufco = np.zeros(256, dtype=np.int32)
    ehufsi = np.zeros(256, dtype=np.int32)
    for sym, (code, length) in codes.items():
        ehufco[sym] = code
        ehufsi[sym] = length
    return ehufco, ehufsi


def lookahead_lut(counts, symbols):
    """8-bit lookahead arrays: peeked byte -> (symbol, code length).

    Length 0 marks codes longer than 8 bits (the decoder walks those)."""
    codes = build_huffman_codes(counts, symbols)
    lut_sym = np.zeros(256, dtype=np.uint8)
    lut_len = np.zeros(256, dtype=np.int32)
    for sym, (code, length) in codes.items():
        if length > 8:
            continue
        base = code << (8 - length)
        for suffix in range(1 << (8 - length)):
            lut_sym[base | suffix] = sym
            lut_len[base | suffix] = length
    return lut_sym, lut_len
