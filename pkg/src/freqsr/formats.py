"""Byte-level file formats: DCTT tensor containers, FSRW weight files,
P6 (PPM) rasters, and a minimal PNG writer. Layouts are documented in the
README and kept bit-stable.
"""
from __future__ import annotations

import struct
import zlib

import numpy as np

from .dct_model import RgbImage
from .errors import FormatError

DCTT_MAGIC = b"DCTT"
DCTT_VERSION = 1
_DCTT_DTYPES = {0: np.dtype("<i4"), 1: np.dtype("<f4"), 2: np.dtype("<f8")}
_DCTT_CODES = {np.dtype("int32"): 0, np.dtype("float32"): 1, np.dtype("float64"): 2}

FSRW_MAGIC = b"FSRW"
FSRW_VERSION = 1


def dctt_pack(arrays: list[np.ndarray]) -> bytes:
    """Concatenated records: magic, version u8, dtype u8, ndim u8, dims u32 LE."""
    out = bytearray()
    for a in arrays:
        a = np.ascontiguousarray(a)
        if a.dtype not in _DCTT_CODES:
            raise FormatError(f"unsupported DCTT dtype {a.dtype}")
        out += DCTT_MAGIC
        out += struct.pack("<BBB", DCTT_VERSION, _DCTT_CODES[a.dtype], a.ndim)
        out += struct.pack(f"<{a.ndim}I", *a.shape)
        out += a.astype(a.dtype.newbyteorder("<"), copy=False).tobytes()
    return bytes(out)


def dctt_unpack(data: bytes) -> list[np.ndarray]:
    arrays = []
    pos = 0
    while pos < len(data):
        if data[pos : pos + 4] != DCTT_MAGIC:
            raise FormatError("bad DCTT magic")
        pos += 4
        if pos + 3 > len(data):
            raise FormatError("truncated DCTT header")
        version, dcode, ndim = struct.unpack_from("<BBB", data, pos)
        pos += 3
        if version != DCTT_VERSION:
            raise FormatError(f"unsupported DCTT version {version}")
        if dcode not in _DCTT_DTYPES:
            raise FormatError(f"unknown DCTT dtype code {dcode}")
        if pos + 4 * ndim > len(data):
            raise FormatError("truncated DCTT dims")
        dims = struct.unpack_from(f"<{ndim}I", data, pos)
        pos += 4 * ndim
        dt = _DCTT_DTYPES[dcode]
        nbytes = int(np.prod(dims, dtype=np.int64)) * dt.itemsize
        if pos + nbytes > len(data):
            raise FormatError("truncated DCTT payload")
        arrays.append(np.frombuffer(data, dt, np.prod(dims, dtype=np.int64), pos).reshape(dims).copy())
        pos += nbytes
    return arrays


def write_dctt(path, arrays: list[np.ndarray]):
    with open(path, "wb") as f:
        f.write(dctt_pack(arrays))


def read_dctt(path) -> list[np.ndarray]:
    with open(path, "rb") as f:
        return dctt_unpack(f.read())


def fsrw_pack(tensors: dict[str, np.ndarray]) -> bytes:
    """FSRW: magic, version u8, count u32; per tensor u16 name length, name,
    ndim u8, dims u32 each, float64 LE row-major payload."""
    out = bytearray()
    out += FSRW_MAGIC
    out += struct.pack("<BI", FSRW_VERSION, len(tensors))
    for name, arr in tensors.items():
        a = np.ascontiguousarray(arr, dtype="<f8")
        nb = name.encode("utf-8")
        out += struct.pack("<H", len(nb)) + nb
        out += struct.pack("<B", a.ndim)
        out += struct.pack(f"<{a.ndim}I", *a.shape)
        out += a.tobytes()
    return bytes(out)


def fsrw_unpack(data: bytes) -> dict[str, np.ndarray]:
    if data[:4] != FSRW_MAGIC:
        raise FormatError("bad FSRW magic")
    if len(data) < 9:
        raise FormatError("truncated FSRW header")
    version, count = struct.unpack_from("<BI", data, 4)
    if version != FSRW_VERSION:
        raise FormatError(f"unsupported FSRW version {version}")
    pos = 9
    tensors: dict[str, np.ndarray] = {}
    for _ in range(count):
        if pos + 2 > len(data):
            raise FormatError("truncated FSRW tensor name")
        (nlen,) = struct.unpack_from("<H", data, pos)
        pos += 2
        name = data[pos : pos + nlen].decode("utf-8")
        pos += nlen
        if pos + 1 > len(data):
            raise FormatError("truncated FSRW tensor header")
        ndim = data[pos]
        pos += 1
        if pos + 4 * ndim > len(data):
            raise FormatError("truncated FSRW dims")
        dims = struct.unpack_from(f"<{ndim}I", data, pos)
        pos += 4 * ndim
        nbytes = int(np.prod(dims, dtype=np.int64)) * 8
        if pos + nbytes > len(data):
            raise FormatError("truncated FSRW payload")
        tensors[name] = np.frombuffer(data, "<f8", np.prod(dims, dtype=np.int64), pos).reshape(dims).copy()
        pos += nbytes
    return tensors


def write_fsrw(path, tensors: dict[str, np.ndarray]):
    with open(path, "wb") as f:
        f.write(fsrw_pack(tensors))


def read_fsrw(path) -> dict[str, np.ndarray]:
    with open(path, "rb") as f:
        return fsrw_unpack(f.read())


def write_ppm(path, img: RgbImage):
    """Binary P6, maxval 255: bit-exact and dependency-free."""
    with open(path, "wb") as f:
        f.write(b"P6\n%d %d\n255\n" % (img.width, img.height))
        f.write(np.ascontiguousarray(img.samples).tobytes())


def read_ppm(path) -> RgbImage:
    with open(path, "rb") as f:
        data = f.read()
    if not data.startswith(b"P6"):
        raise FormatError("not a P6 file")
    fields = []
    pos = 2
    while len(fields) < 3:
        while pos < len(data) and data[pos : pos + 1].isspace():
            pos += 1
        if data[pos : pos + 1] == b"#":  # comment line
            while pos < len(data) and data[pos] != 0x0A:
                pos += 1
            continue
        start = pos
        while pos < len(data) and not data[pos : pos + 1].isspace():
            pos += 1
        fields.append(int(data[start:pos]))
    pos += 1  # single whitespace after maxval
    w, h, maxval = fields
    if maxval != 255:
        raise FormatError(f"unsupported P6 maxval {maxval}")
    need = w * h * 3
    if len(data) - pos < need:
        raise FormatError("truncated P6 payload")
    arr = np.frombuffer(data, np.uint8, need, pos).reshape(h, w, 3)
    return RgbImage(arr.copy())


def write_png(path, img: RgbImage):
    """Minimal 8-bit RGB PNG (filter 0 rows, one zlib IDAT)."""

    def chunk(tag: bytes, payload: bytes) -> bytes:
        crc = zlib.crc32(tag + payload) & 0xFFFFFFFF
        return struct.pack(">I", len(payload)) + tag + payload + struct.pack(">I", crc)

    raw = np.ascontiguousarray(img.samples)
    rows = np.empty((img.height, 1 + img.width * 3), dtype=np.uint8)
    rows[:, 0] = 0
    rows[:, 1:] = raw.reshape(img.height, img.width * 3)
    ihdr = struct.pack(">IIBBBBB", img.width, img.height, 8, 2, 0, 0, 0)
    with open(path, "wb") as f:
        f.write(b"\x89PNG\r\n\x1a\n")
        f.write(chunk(b"IHDR", ihdr))
        f.write(chunk(b"IDAT", zlib.compress(rows.tobytes(), 6)))
        f.write(chunk(b"IEND", b""))


def read_png(path) -> RgbImage:
    """Reader for 8-bit non-interlaced PNGs (gray, RGB, or RGBA)."""
    with open(path, "rb") as f:
        data = f.read()
    if data[:8] != b"\x89PNG\r\n\x1a\n":
        raise FormatError("not a PNG file")
    pos = 8
    idat = bytearray()
    w = h = None
    channels = None
    while pos + 8 <= len(data):
        (length,) = struct.unpack_from(">I", data, pos)
        tag = data[pos + 4 : pos + 8]
        payload = data[pos + 8 : pos + 8 + length]
        pos += 12 + length
        if tag == b"IHDR":
            w, h, depth, ctype, comp, filt, interlace = struct.unpack(">IIBBBBB", payload)
            if depth != 8 or interlace != 0:
                raise FormatError("only 8-bit non-interlaced PNGs are supported")
            channels = {0: 1, 2: 3, 6: 4}.get(ctype)
            if channels is None:
                raise FormatError(f"unsupported PNG color type {ctype}")
        elif tag == b"IDAT":
            idat += payload
        elif tag == b"IEND":
            break
    if w is None or not idat:
        raise FormatError("truncated PNG")
    raw = zlib.decompress(bytes(idat))
    stride = w * channels
    if len(raw) < h * (stride + 1):
        raise FormatError("truncated PNG pixel data")
    out = np.zeros((h, stride), dtype=np.uint8)
    prev = np.zeros(stride, dtype=np.int32)
    pos = 0
    for row in range(h):
        ftype = raw[pos]
        pos += 1
        cur = np.frombuffer(raw, np.uint8, stride, pos).astype(np.int32)
        pos += stride
        if ftype == 0:
            rec = cur
        elif ftype == 2:  # up
            rec = (cur + prev) & 0xFF
        else:  # sub/average/paeth need the left neighbor: sequential
            rec = np.zeros(stride, dtype=np.int32)
            for i in range(stride):
                a = rec[i - channels] if i >= channels else 0
                b = prev[i]
                if ftype == 1:
                    rec[i] = (cur[i] + a) & 0xFF
                elif ftype == 3:
                    rec[i] = (cur[i] + (a + b) // 2) & 0xFF
                elif ftype == 4:
                    c = prev[i - channels] if i >= channels else 0
                    p = a + b - c
                    pa, pb, pc = abs(p - a), abs(p - b), abs(p - c)
                    pred = a if (pa <= pb and pa <= pc) else (b if pb <= pc else c)
                    rec[i] = (cur[i] + pred) & 0xFF
                else:
                    raise FormatError(f"bad PNG filter {ftype}")
        out[row] = rec.astype(np.uint8)
        prev = rec
    px = out.reshape(h, w, channels)
    if channels == 1:
        px = np.repeat(px, 3, axis=2)
    elif channels == 4:
        px = px[:, :, :3]
    return RgbImage(px.copy())


def write_image(path, img: RgbImage):
    """Writer picked by extension: .png or P6 otherwise."""
    if str(path).lower().endswith(".png"):
        write_png(path, img)
    else:
        write_ppm(path, img)


def read_image(path) -> RgbImage:
    p = str(path).lower()
    if p.endswith(".png"):
        return read_png(path)
    return read_ppm(path)
