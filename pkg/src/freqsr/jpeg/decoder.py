"""Baseline JPEG bitstream parser: markers to dequantized DCT coefficients.

No inverse transform happens here; decode_to_rgb is literally the spatial
reconstruction composed onto decode_to_dct.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..dct_model import SUBSAMPLING_420, SUBSAMPLING_444, DctImage, DctPlane, RgbImage
from ..errors import MalformedBitstream, UnsupportedMarker, UnsupportedSubsampling
from . import kernels
from .tables import NATURAL_OF_ZIGZAG, build_decode_arrays, lookahead_lut

# marker bytes (second byte of 0xFFxx)
M_SOI = 0xD8
M_EOI = 0xD9
M_SOS = 0xDA
M_DQT = 0xDB
M_DNL = 0xDC
M_DRI = 0xDD
M_DHP = 0xDE
M_EXP = 0xDF
M_DHT = 0xC4
M_DAC = 0xCC
M_SOF0 = 0xC0
M_COM = 0xFE
M_TEM = 0x01

_SOF_UNSUPPORTED = {
    0xC1: "extended sequential DCT",
    0xC2: "progressive DCT",
    0xC3: "lossless",
    0xC5: "differential sequential",
    0xC6: "differential progressive",
    0xC7: "differential lossless",
    0xC9: "arithmetic sequential",
    0xCA: "arithmetic progressive",
    0xCB: "arithmetic lossless",
    0xCD: "differential arithmetic sequential",
    0xCE: "differential arithmetic progressive",
    0xCF: "differential arithmetic lossless",
}


@dataclass
class QuantTable:
    id: int
    values: np.ndarray  # 64 entries, zigzag order

    def __post_init__(self):
        if not 0 <= self.id < 4:
            raise MalformedBitstream(f"quant table slot {self.id} out of range")
        v = np.asarray(self.values, dtype=np.int32)
        if v.shape != (64,):
            raise MalformedBitstream("quant table must have 64 entries")
        if np.any(v <= 0) or np.any(v > 255):
            raise MalformedBitstream("quant table entries must be in 1..255")
        self.values = v


@dataclass
class HuffmanTable:
    table_class: int  # 0 = DC, 1 = AC
    id: int
    counts: list[int]
    symbols: list[int]

    def __post_init__(self):
        if self.table_class not in (0, 1):
            raise MalformedBitstream(f"bad Huffman table class {self.table_class}")
        if not 0 <= self.id < 4:
            raise MalformedBitstream(f"Huffman table slot {self.id} out of range")
        # canonical construction; raises if not a prefix-free set
        arrays = build_decode_arrays(self.counts, self.symbols)
        self.mincode, self.maxcode, self.valptr, self.huffval = arrays
        self.lut_sym, self.lut_len = lookahead_lut(self.counts, self.symbols)


@dataclass
class FrameComponent:
    id: int
    h_samp: int
    v_samp: int
    quant_table_id: int


@dataclass
class FrameInfo:
    width: int
    height: int
    precision: int
    components: list[FrameComponent]


class _Reader:
    def __init__(self, data: bytes):
        self.data = data
        self.pos = 0

    def u8(self) -> int:
        if self.pos >= len(self.data):
            raise MalformedBitstream("unexpected end of stream")
        b = self.data[self.pos]
        self.pos += 1
        return b

    def u16(self) -> int:
        return (self.u8() << 8) | self.u8()

    def take(self, n: int) -> bytes:
        if self.pos + n > len(self.data):
            raise MalformedBitstream("unexpected end of stream")
        b = self.data[self.pos : self.pos + n]
        self.pos += n
        return b


def _next_marker(r: _Reader) -> int:
    if r.u8() != 0xFF:
        raise MalformedBitstream(f"expected marker at offset {r.pos - 1}")
    m = r.u8()
    while m == 0xFF:  # fill bytes
        m = r.u8()
    if m == 0x00:
        raise MalformedBitstream("stuffed byte outside entropy-coded data")
    return m


def decode_to_dct(data: bytes) -> DctImage:
    """Parse a baseline JPEG into dequantized, de-zigzagged coefficient grids."""
    r = _Reader(bytes(data))
    if r.u8() != 0xFF or r.u8() != M_SOI:
        raise MalformedBitstream("missing SOI marker")

    qtables: dict[int, QuantTable] = {}
    htables: dict[tuple[int, int], HuffmanTable] = {}
    frame: FrameInfo | None = None
    restart_interval = 0

    while True:
        m = _next_marker(r)
        if m == M_EOI:
            raise MalformedBitstream("EOI before scan data")
        if m == M_TEM or 0xD0 <= m <= 0xD7:
            raise MalformedBitstream(f"unexpected standalone marker 0x{m:02X}")
        if m in _SOF_UNSUPPORTED:
            raise UnsupportedMarker(_SOF_UNSUPPORTED[m])
        if m in (M_DAC,):
            raise UnsupportedMarker("arithmetic coding conditioning")
        if m in (M_DNL, M_DHP, M_EXP) or 0xF0 <= m <= 0xFD or m == 0xC8:
            raise UnsupportedMarker(f"marker 0x{m:02X}")

        length = r.u16()
        if length < 2:
            raise MalformedBitstream(f"marker 0x{m:02X} with bad length {length}")
        body = _Reader(r.take(length - 2))

        if 0xE0 <= m <= 0xEF or m == M_COM:
            continue  # APPn / COM skipped
        elif m == M_DQT:
            _parse_dqt(body, qtables)
        elif m == M_DHT:
            _parse_dht(body, htables)
        elif m == M_DRI:
            restart_interval = body.u16()
        elif m == M_SOF0:
            if frame is not None:
                raise MalformedBitstream("multiple frame headers")
            frame = _parse_sof(body)
        elif m == M_SOS:
            if frame is None:
                raise MalformedBitstream("scan before frame header")
            return _decode_scan(r, body, frame, qtables, htables, restart_interval)
        else:
            raise MalformedBitstream(f"unexpected marker 0x{m:02X}")


def _parse_dqt(body: _Reader, qtables: dict[int, QuantTable]):
    while body.pos < len(body.data):
        pq_tq = body.u8()
        pq, tq = pq_tq >> 4, pq_tq & 0x0F
        if pq == 1:
            raise UnsupportedMarker("16-bit quantization table")
        if pq != 0:
            raise MalformedBitstream(f"bad quant table precision {pq}")
        vals = np.frombuffer(body.take(64), dtype=np.uint8).astype(np.int32)
        qtables[tq] = QuantTable(tq, vals)


def _parse_dht(body: _Reader, htables: dict[tuple[int, int], HuffmanTable]):
    while body.pos < len(body.data):
        tc_th = body.u8()
        tc, th = tc_th >> 4, tc_th & 0x0F
        counts = list(body.take(16))
        symbols = list(body.take(sum(counts)))
        htables[(tc, th)] = HuffmanTable(tc, th, counts, symbols)


def _parse_sof(body: _Reader) -> FrameInfo:
    precision = body.u8()
    height = body.u16()
    width = body.u16()
    if precision != 8:
        raise UnsupportedMarker(f"{precision}-bit sample precision")
    if width < 1 or height < 1:
        raise MalformedBitstream("frame dimensions must be positive (DNL unsupported)")
    ncomp = body.u8()
    if ncomp not in (1, 3):
        raise UnsupportedSubsampling(f"{ncomp}-component images")
    comps = []
    for _ in range(ncomp):
        cid = body.u8()
        hv = body.u8()
        tq = body.u8()
        comps.append(FrameComponent(cid, hv >> 4, hv & 0x0F, tq))
    if ncomp == 1:
        # non-interleaved single-component scan: sampling factors are moot
        comps[0].h_samp = comps[0].v_samp = 1
    else:
        h0, v0 = comps[0].h_samp, comps[0].v_samp
        if any(c.h_samp != 1 or c.v_samp != 1 for c in comps[1:]) or (h0, v0) not in (
            (1, 1),
            (2, 2),
        ):
            layout = "/".join(f"{c.h_samp}x{c.v_samp}" for c in comps)
            raise UnsupportedSubsampling(f"sampling layout {layout}")
    return FrameInfo(width, height, precision, comps)


def _decode_scan(r, body, frame, qtables, htables, restart_interval) -> DctImage:
    ncomp = body.u8()
    if ncomp != len(frame.components):
        raise UnsupportedMarker("multi-scan (non-interleaved) files")
    by_id = {c.id: i for i, c in enumerate(frame.components)}
    scan_frame_idx = []
    dc_ids = []
    ac_ids = []
    for _ in range(ncomp):
        cs = body.u8()
        td_ta = body.u8()
        if cs not in by_id:
            raise MalformedBitstream(f"scan references unknown component {cs}")
        scan_frame_idx.append(by_id[cs])
        dc_ids.append(td_ta >> 4)
        ac_ids.append(td_ta & 0x0F)
    if len(set(scan_frame_idx)) != ncomp:
        raise MalformedBitstream("duplicate component in scan")
    ss, se, a = body.u8(), body.u8(), body.u8()
    if ss != 0 or se != 63 or a != 0:
        raise MalformedBitstream("non-baseline spectral selection in SOF0 scan")

    hmax = max(c.h_samp for c in frame.components)
    vmax = max(c.v_samp for c in frame.components)
    mcus_x = -(-frame.width // (8 * hmax))
    mcus_y = -(-frame.height // (8 * vmax))

    comp_h = np.zeros(4, dtype=np.int32)
    comp_v = np.zeros(4, dtype=np.int32)
    dc_sel = np.zeros(4, dtype=np.int32)
    ac_sel = np.zeros(4, dtype=np.int32)
    qt_sel = np.zeros(4, dtype=np.int32)
    bw_pad = np.ones(4, dtype=np.int32)
    outs = []

    dc_mincode = np.zeros((4, 17), dtype=np.int32)
    dc_maxcode = np.full((4, 17), -1, dtype=np.int32)
    dc_valptr = np.zeros((4, 17), dtype=np.int32)
    dc_huffval = np.zeros((4, 256), dtype=np.uint8)
    dc_lut_sym = np.zeros((4, 256), dtype=np.uint8)
    dc_lut_len = np.zeros((4, 256), dtype=np.int32)
    ac_mincode = np.zeros((4, 17), dtype=np.int32)
    ac_maxcode = np.full((4, 17), -1, dtype=np.int32)
    ac_valptr = np.zeros((4, 17), dtype=np.int32)
    ac_huffval = np.zeros((4, 256), dtype=np.uint8)
    ac_lut_sym = np.zeros((4, 256), dtype=np.uint8)
    ac_lut_len = np.zeros((4, 256), dtype=np.int32)
    qtab = np.ones((4, 64), dtype=np.int32)

    grid_shapes = []
    for spos in range(ncomp):
        comp = frame.components[scan_frame_idx[spos]]
        comp_h[spos] = comp.h_samp
        comp_v[spos] = comp.v_samp
        if comp.quant_table_id not in qtables:
            raise MalformedBitstream(f"missing quant table {comp.quant_table_id}")
        if (0, dc_ids[spos]) not in htables:
            raise MalformedBitstream(f"missing DC Huffman table {dc_ids[spos]}")
        if (1, ac_ids[spos]) not in htables:
            raise MalformedBitstream(f"missing AC Huffman table {ac_ids[spos]}")
        qt_sel[spos] = spos
        qtab[spos] = qtables[comp.quant_table_id].values
        dct = htables[(0, dc_ids[spos])]
        act = htables[(1, ac_ids[spos])]
        dc_sel[spos] = spos
        ac_sel[spos] = spos
        dc_mincode[spos], dc_maxcode[spos] = dct.mincode, dct.maxcode
        dc_valptr[spos], dc_huffval[spos] = dct.valptr, dct.huffval
        dc_lut_sym[spos], dc_lut_len[spos] = dct.lut_sym, dct.lut_len
        ac_mincode[spos], ac_maxcode[spos] = act.mincode, act.maxcode
        ac_valptr[spos], ac_huffval[spos] = act.valptr, act.huffval
        ac_lut_sym[spos], ac_lut_len[spos] = act.lut_sym, act.lut_len
        bh = mcus_y * comp.v_samp
        bw = mcus_x * comp.h_samp
        bw_pad[spos] = bw
        grid_shapes.append((bh, bw))
        outs.append(np.zeros((bh * bw, 64), dtype=np.int32))
    while len(outs) < 3:
        outs.append(np.zeros((1, 64), dtype=np.int32))

    entropy = np.frombuffer(r.data, dtype=np.uint8)
    status, endpos = kernels.decode_scan(
        entropy,
        r.pos,
        ncomp,
        comp_h,
        comp_v,
        dc_sel,
        ac_sel,
        qt_sel,
        dc_mincode,
        dc_maxcode,
        dc_valptr,
        dc_huffval,
        dc_lut_sym,
        dc_lut_len,
        ac_mincode,
        ac_maxcode,
        ac_valptr,
        ac_huffval,
        ac_lut_sym,
        ac_lut_len,
        qtab,
        NATURAL_OF_ZIGZAG,
        mcus_x,
        mcus_y,
        restart_interval,
        bw_pad,
        outs[0],
        outs[1],
        outs[2],
    )
    if status == kernels.ERR_TRUNCATED:
        raise MalformedBitstream("truncated scan")
    if status == kernels.ERR_BAD_CODE:
        raise MalformedBitstream("invalid Huffman code in scan")
    if status == kernels.ERR_COEF_OVERRUN:
        raise MalformedBitstream("coefficient run overflows block")
    if status == kernels.ERR_BAD_RESTART:
        raise MalformedBitstream("restart marker mismatch")

    # after the last MCU: unconsumed pad bytes (possibly 0xFF with stuffed
    # 0x00) and fill bytes may precede the EOI marker
    t = int(endpos)
    buf = r.data
    m = None
    while t + 1 < len(buf):
        if buf[t] != 0xFF:
            break
        if buf[t + 1] == 0x00:
            t += 2
        elif buf[t + 1] == 0xFF:
            t += 1
        else:
            m = buf[t + 1]
            break
    if m is None:
        raise MalformedBitstream("missing EOI after scan")
    if m != M_EOI:
        raise MalformedBitstream(f"expected EOI after scan, got 0x{m:02X}")

    planes: list[DctPlane | None] = [None, None, None]
    for spos in range(ncomp):
        bh, bw = grid_shapes[spos]
        planes[scan_frame_idx[spos]] = DctPlane(outs[spos].reshape(bh, bw, 8, 8))

    if ncomp == 1:
        return DctImage(
            y=planes[0],
            cb=None,
            cr=None,
            pixel_width=frame.width,
            pixel_height=frame.height,
            subsampling=SUBSAMPLING_444,
        )
    sub = SUBSAMPLING_444 if frame.components[0].h_samp == 1 else SUBSAMPLING_420
    return DctImage(
        y=planes[0],
        cb=planes[1],
        cr=planes[2],
        pixel_width=frame.width,
        pixel_height=frame.height,
        subsampling=sub,
    )


def decode_to_rgb(data: bytes) -> RgbImage:
    """Timed RGB baseline path: full reconstruction of the coefficient decode."""
    from ..spatial import reconstruct_rgb

    return reconstruct_rgb(decode_to_dct(data))
