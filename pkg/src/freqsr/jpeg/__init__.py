from .decoder import (
    FrameComponent,
    FrameInfo,
    HuffmanTable,
    QuantTable,
    decode_to_dct,
    decode_to_rgb,
)
from .encoder import encode_baseline

__all__ = [
    "FrameComponent",
    "FrameInfo",
    "HuffmanTable",
    "QuantTable",
    "decode_to_dct",
    "decode_to_rgb",
    "encode_baseline",
]
