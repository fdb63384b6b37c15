"""Convolution hot loops (numba path). The vectorized numpy fallback lives in
net.py; accel.USING_NUMBA picks between them.
"""
from .accel import njit


@njit
def conv_dense(xpad, w, b, out):
    """3x3 stride-1 cross-correlation; xpad (C,H+2,W+2) -> out (Cout,H,W)."""
    cout = w.shape[0]
    cin = w.shape[1]
    h = out.shape[1]
    wd = out.shape[2]
    for co in range(cout):
        for i in range(h):
            for j in range(wd):
                out[co, i, j] = b[co]
    for co in range(cout):
        for ci in range(cin):
            for di in range(3):
                for dj in range(3):
                    wv = w[co, ci, di, dj]
                    for i in range(h):
                        for j in range(wd):
                            out[co, i, j] += wv * xpad[ci, i + di, j + dj]


@njit
def conv_dense_grad_w(xpad, gy, gw, gb):
    """Accumulate weight/bias gradients for the dense conv."""
    cout = gw.shape[0]
    cin = gw.shape[1]
    h = gy.shape[1]
    wd = gy.shape[2]
    for co in range(cout):
        s = 0.0
        for i in range(h):
            for j in range(wd):
                s += gy[co, i, j]
        gb[co] += s
    for co in range(cout):
        for ci in range(cin):
            for di in range(3):
                for dj in range(3):
                    s = 0.0
                    for i in range(h):
                        for j in range(wd):
                            s += gy[co, i, j] * xpad[ci, i + di, j + dj]
                    gw[co, ci, di, dj] += s


@njit
def conv_depthwise(xpad, w, b, out):
    """One 3x3 filter per channel; no cross-channel mixing."""
    c = w.shape[0]
    h = out.shape[1]
    wd = out.shape[2]
    for ci in range(c):
        for i in range(h):
            for j in range(wd):
                acc = b[ci]
                for di in range(3):
                    acc += (
                        w[ci, di, 0] * xpad[ci, i + di, j]
                        + w[ci, di, 1] * xpad[ci, i + di, j + 1]
                        + w[ci, di, 2] * xpad[ci, i + di, j + 2]
                    )
                out[ci, i, j] = acc


@njit
def conv_depthwise_grad_w(xpad, gy, gw, gb):
    c = gw.shape[0]
    h = gy.shape[1]
    wd = gy.shape[2]
    for ci in range(c):
        s = 0.0
        for i in range(h):
            for j in range(wd):
                s += gy[ci, i, j]
        gb[ci] += s
        for di in range(3):
            for dj in range(3):
                s = 0.0
                for i in range(h):
                    for j in range(wd):
                        s += gy[ci, i, j] * xpad[ci, i + di, j + dj]
                gw[ci, di, dj] += s
