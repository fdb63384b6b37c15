"""Exception types shared across the toolkit."""


class FreqsrError(Exception):
    """Base class; the CLI maps these to exit code 2 (data error)."""


class UnsupportedMarker(FreqsrError):
    """JPEG feature outside baseline sequential Huffman 8-bit."""


class MalformedBitstream(FreqsrError):
    """Truncated scan, invalid Huffman code, bad marker length, ..."""


class UnsupportedSubsampling(FreqsrError):
    """Chroma layout other than 4:4:4 or 4:2:0."""


class CropTooLarge(FreqsrError):
    pass


class DimensionMismatch(FreqsrError):
    pass


class ShapeMismatch(FreqsrError):
    pass


class TooSmall(FreqsrError):
    pass


class FormatError(FreqsrError):
    """Bad magic, truncation, or version mismatch in a container file."""


class EmptyDataset(FreqsrError):
    pass
