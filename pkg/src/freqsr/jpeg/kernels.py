"""Entropy-coding hot loops. Compiled with numba when enabled (see accel);
the same source runs uncompiled on the fallback path.

Status codes returned by the scan decoder:
  0 ok, 1 truncated/marker inside entropy data, 2 invalid Huffman code,
  3 coefficient index overrun, 4 restart marker mismatch.
"""
import numpy as np

from ..accel import njit

OK = 0
ERR_TRUNCATED = 1
ERR_BAD_CODE = 2
ERR_COEF_OVERRUN = 3
ERR_BAD_RESTART = 4


@njit(inline=True)
def _refill(data, pos, bitbuf, bitcnt):
    """Top up the bit buffer to > 48 bits, honoring 0xFF00 byte stuffing.

    Stops (without consuming) at any real marker or at end of data. Returns
    (pos, bitbuf, bitcnt).
    """
    bitbuf &= (np.int64(1) << bitcnt) - 1  # drop already-consumed high bits
    while bitcnt <= 48:
        if pos >= data.size:
            break
        b = np.int64(data[pos])
        if b == 0xFF:
            if pos + 1 >= data.size or data[pos + 1] != 0x00:
                break  # marker (or truncated stuffing): leave for the caller
            pos += 2
        else:
            pos += 1
        bitbuf = (bitbuf << 8) | b
        bitcnt += 8
    return pos, bitbuf, bitcnt


@njit(inline=True)
def _decode_symbol(data, pos, bitbuf, bitcnt, lut_sym, lut_len, mincode, maxcode, valptr, huffval):
    """Huffman DECODE: 8-bit lookahead table, length walk for longer codes.

    Returns (symbol, pos, bitbuf, bitcnt); symbol < 0 carries an error code.
    """
    if bitcnt < 16:
        pos, bitbuf, bitcnt = _refill(data, pos, bitbuf, bitcnt)
    if bitcnt >= 8:
        peek = (bitbuf >> (bitcnt - 8)) & 0xFF
        length = lut_len[peek]
        if length > 0:
            return np.int64(lut_sym[peek]), pos, bitbuf, bitcnt - length
    code = np.int64(0)
    length = 0
    while True:
        length += 1
        if length > 16:
            return np.int64(-ERR_BAD_CODE), pos, bitbuf, bitcnt
        if bitcnt < 1:
            pos, bitbuf, bitcnt = _refill(data, pos, bitbuf, bitcnt)
            if bitcnt < 1:
                return np.int64(-ERR_TRUNCATED), pos, bitbuf, bitcnt
        bitcnt -= 1
        code = (code << 1) | ((bitbuf >> bitcnt) & 1)
        if code <= maxcode[length]:
            sym = np.int64(huffval[valptr[length] + code - mincode[length]])
            return sym, pos, bitbuf, bitcnt


@njit(inline=True)
def _receive_extend(data, pos, bitbuf, bitcnt, s):
    """Read s magnitude bits and sign-extend (T.81 F.2.2.1 EXTEND).

    Returns (ok, value, pos, bitbuf, bitcnt).
    """
    if s == 0:
        return True, np.int64(0), pos, bitbuf, bitcnt
    if bitcnt < s:
        pos, bitbuf, bitcnt = _refill(data, pos, bitbuf, bitcnt)
        if bitcnt < s:
            return False, np.int64(0), pos, bitbuf, bitcnt
    bitcnt -= s
    v = (bitbuf >> bitcnt) & ((np.int64(1) << s) - 1)
    if v < (np.int64(1) << (s - 1)):
        v -= (np.int64(1) << s) - 1
    return True, v, pos, bitbuf, bitcnt


@njit
def decode_scan(
    data,
    pos0,
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
    natural,
    mcus_x,
    mcus_y,
    restart_interval,
    bw_pad,
    out0,
    out1,
    out2,
):
    """Decode one interleaved baseline scan into dequantized blocks.

    Outputs are int32 (nblocks, 64) per component, natural coefficient order,
    already multiplied by the quantization entries. Returns (status, pos).
    """
    pos = pos0
    bitbuf = np.int64(0)
    bitcnt = np.int64(0)
    pred = np.zeros(4, dtype=np.int64)
    next_rst = 0
    nmcu = mcus_x * mcus_y
    for mcu in range(nmcu):
        if restart_interval > 0 and mcu > 0 and mcu % restart_interval == 0:
            # discard pad bits; the refill never consumes markers, so after
            # skipping leftover pad/stuffed bytes pos sits at the RSTn pair
            bitcnt = np.int64(0)
            while pos + 1 < data.size and not (data[pos] == 0xFF and data[pos + 1] != 0x00):
                pos += 1
            if pos + 1 >= data.size:
                return ERR_TRUNCATED, pos
            m = np.int64(data[pos + 1])
            if (m & 0xF8) != 0xD0 or (m & 0x07) != next_rst:
                return ERR_BAD_RESTART, pos
            pos += 2
            next_rst = (next_rst + 1) & 7
            for c in range(4):
                pred[c] = 0
        my = mcu // mcus_x
        mx = mcu % mcus_x
        for c in range(ncomp):
            if c == 0:
                out = out0
            elif c == 1:
                out = out1
            else:
                out = out2
            # hoist row views: slicing once per component, not per symbol
            dct = dc_sel[c]
            act = ac_sel[c]
            dls = dc_lut_sym[dct]
            dll = dc_lut_len[dct]
            dmin = dc_mincode[dct]
            dmax = dc_maxcode[dct]
            dvp = dc_valptr[dct]
            dhv = dc_huffval[dct]
            als = ac_lut_sym[act]
            all_ = ac_lut_len[act]
            amin = ac_mincode[act]
            amax = ac_maxcode[act]
            avp = ac_valptr[act]
            ahv = ac_huffval[act]
            q = qtab[qt_sel[c]]
            for dv in range(comp_v[c]):
                for dh in range(comp_h[c]):
                    bi = (my * comp_v[c] + dv) * bw_pad[c] + (mx * comp_h[c] + dh)
                    # DC: category symbol then magnitude bits, DPCM-predicted
                    sym, pos, bitbuf, bitcnt = _decode_symbol(
                        data, pos, bitbuf, bitcnt, dls, dll, dmin, dmax, dvp, dhv
                    )
                    if sym < 0:
                        return -sym, pos
                    if sym > 15:
                        return ERR_BAD_CODE, pos
                    ok, diff, pos, bitbuf, bitcnt = _receive_extend(
                        data, pos, bitbuf, bitcnt, sym
                    )
                    if not ok:
                        return ERR_TRUNCATED, pos
                    pred[c] += diff
                    out[bi, 0] = np.int32(pred[c] * q[0])
                    # AC: run/size pairs in zigzag order
                    k = 1
                    while k < 64:
                        rs, pos, bitbuf, bitcnt = _decode_symbol(
                            data, pos, bitbuf, bitcnt, als, all_, amin, amax, avp, ahv
                        )
                        if rs < 0:
                            return -rs, pos
                        r = rs >> 4
                        s = rs & 15
                        if s == 0:
                            if r == 15:  # ZRL: sixteen zeros
                                k += 16
                                continue
                            break  # EOB
                        k += r
                        if k > 63:
                            return ERR_COEF_OVERRUN, pos
                        ok, val, pos, bitbuf, bitcnt = _receive_extend(
                            data, pos, bitbuf, bitcnt, s
                        )
                        if not ok:
                            return ERR_TRUNCATED, pos
                        out[bi, natural[k]] = np.int32(val * q[k])
                        k += 1
    return OK, pos


@njit(inline=True)
def _emit_bits(out, nbytes, acc, nacc, code, size):
    """Append `size` bits of `code` MSB-first, with 0xFF byte stuffing.

    Returns (nbytes, acc, nacc); nbytes == -1 signals buffer overflow.
    """
    acc = (acc << size) | np.int64(code)
    nacc += size
    while nacc >= 8:
        nacc -= 8
        b = (acc >> nacc) & 0xFF
        if nbytes + 2 > out.size:
            return -1, acc, nacc
        out[nbytes] = b
        nbytes += 1
        if b == 0xFF:
            out[nbytes] = 0x00
            nbytes += 1
    acc &= (np.int64(1) << nacc) - 1  # drop flushed high bits before they overflow
    return nbytes, acc, nacc


@njit(inline=True)
def _category(v):
    s = 0
    a = v if v >= 0 else -v
    while a:
        s += 1
        a >>= 1
    return s


@njit
def encode_scan(
    q0,
    q1,
    q2,
    ncomp,
    comp_h,
    comp_v,
    bw_pad,
    dc_sel,
    ac_sel,
    dc_co,
    dc_si,
    ac_co,
    ac_si,
    natural,
    mcus_x,
    mcus_y,
    out,
):
    """Entropy-encode quantized blocks (natural order) into `out`.

    Returns the number of bytes written, or -1 on buffer overflow.
    """
    acc = np.int64(0)
    nacc = np.int64(0)
    nbytes = np.int64(0)
    pred = np.zeros(4, dtype=np.int64)
    for mcu in range(mcus_x * mcus_y):
        my = mcu // mcus_x
        mx = mcu % mcus_x
        for c in range(ncomp):
            if c == 0:
                q = q0
            elif c == 1:
                q = q1
            else:
                q = q2
            dco = dc_co[dc_sel[c]]
            dsi = dc_si[dc_sel[c]]
            aco = ac_co[ac_sel[c]]
            asi = ac_si[ac_sel[c]]
            for dv in range(comp_v[c]):
                for dh in range(comp_h[c]):
                    bi = (my * comp_v[c] + dv) * bw_pad[c] + (mx * comp_h[c] + dh)
                    dc = np.int64(q[bi, 0])
                    diff = dc - pred[c]
                    pred[c] = dc
                    s = _category(diff)
                    nbytes, acc, nacc = _emit_bits(out, nbytes, acc, nacc, dco[s], dsi[s])
                    if nbytes < 0:
                        return -1
                    if s:
                        v = diff if diff >= 0 else diff + (np.int64(1) << s) - 1
                        nbytes, acc, nacc = _emit_bits(out, nbytes, acc, nacc, v, s)
                        if nbytes < 0:
                            return -1
                    run = 0
                    for k in range(1, 64):
                        val = np.int64(q[bi, natural[k]])
                        if val == 0:
                            run += 1
                            continue
                        while run > 15:
                            nbytes, acc, nacc = _emit_bits(
                                out, nbytes, acc, nacc, aco[0xF0], asi[0xF0]
                            )
                            if nbytes < 0:
                                return -1
                            run -= 16
                        s = _category(val)
                        rs = (run << 4) | s
                        nbytes, acc, nacc = _emit_bits(out, nbytes, acc, nacc, aco[rs], asi[rs])
                        if nbytes < 0:
                            return -1
                        v = val if val >= 0 else val + (np.int64(1) << s) - 1
                        nbytes, acc, nacc = _emit_bits(out, nbytes, acc, nacc, v, s)
                        if nbytes < 0:
                            return -1
                        run = 0
                    if run > 0:  # EOB
                        nbytes, acc, nacc = _emit_bits(out, nbytes, acc, nacc, aco[0], asi[0])
                        if nbytes < 0:
                            return -1
    if nacc > 0:  # pad the final byte with 1-bits
        pad = 8 - (nacc % 8)
        if pad < 8:
            nbytes, acc, nacc = _emit_bits(out, nbytes, acc, nacc, (1 << pad) - 1, pad)
            if nbytes < 0:
                return -1
    return nbytes
