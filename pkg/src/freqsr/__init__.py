"""freqsr: compressed-domain JPEG super-resolution toolkit.

Decodes baseline JPEGs only as far as dequantized DCT coefficients, runs the
frequency-domain preprocessing chain and SR network on those grids, and
benchmarks the coefficient path against the full RGB decode path.
"""
from .dct_model import (
    SUBSAMPLING_420,
    SUBSAMPLING_444,
    DctImage,
    DctPlane,
    FreqTensor,
    NormParams,
    RgbImage,
    blockify,
    unblockify,
)
from .errors import (
    CropTooLarge,
    DimensionMismatch,
    EmptyDataset,
    FormatError,
    FreqsrError,
    MalformedBitstream,
    ShapeMismatch,
    TooSmall,
    UnsupportedMarker,
    UnsupportedSubsampling,
)
from .freq_ops import (
    CropSpec,
    center_crop,
    denormalize,
    normalize,
    postprocess_hr,
    preprocess_lr,
    upsample_dct_x2,
)
from .jpeg import decode_to_dct, decode_to_rgb, encode_baseline
from .metrics import center_crop_px, fps, psnr, ssim
from .spatial import chroma_upsample, reconstruct_rgb, ycbcr_to_rgb

__version__ = "0.1.0"

__all__ = [
    "SUBSAMPLING_420",
    "SUBSAMPLING_444",
    "DctImage",
    "DctPlane",
    "FreqTensor",
    "NormParams",
    "RgbImage",
    "blockify",
    "unblockify",
    "CropTooLarge",
    "DimensionMismatch",
    "EmptyDataset",
    "FormatError",
    "FreqsrError",
    "MalformedBitstream",
    "ShapeMismatch",
    "TooSmall",
    "UnsupportedMarker",
    "UnsupportedSubsampling",
    "CropSpec",
    "center_crop",
    "denormalize",
    "normalize",
    "postprocess_hr",
    "preprocess_lr",
    "upsample_dct_x2",
    "decode_to_dct",
    "decode_to_rgb",
    "encode_baseline",
    "center_crop_px",
    "fps",
    "psnr",
    "ssim",
    "chroma_upsample",
    "reconstruct_rgb",
    "ycbcr_to_rgb",
]
