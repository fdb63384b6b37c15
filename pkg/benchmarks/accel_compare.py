#!/usr/bin/env python3
"""Compare the numba kernels against the pure-numpy fallback path.

The FREQSR_NUMBA flag is read at import time, so each mode runs in its own
subprocess. Covers the three kernel families: scan decode, scan encode, and
the training convolutions.

    python3 benchmarks/accel_compare.py [--size 512] [--repeats 5]
"""
import argparse
import json
import os
import subprocess
import sys

WORKER = r"""
import json, sys, time
import numpy as np
from freqsr.accel import USING_NUMBA
from freqsr.dct_model import RgbImage
from freqsr.jpeg import decode_to_dct, encode_baseline
from freqsr.net import Conv2d

size, repeats = json.loads(sys.argv[1])
rng = np.random.default_rng(42)
yy, xx = np.mgrid[0:size, 0:size].astype(np.float64)
img = np.full((size, size, 3), 128.0)
for c in range(3):
    img[:, :, c] += 50 * np.cos(2 * np.pi * (c + 1) * xx / size) * np.cos(2 * np.pi * yy / size)
img += rng.normal(0, 3, img.shape)
raster = RgbImage(np.clip(img, 0, 255).astype(np.uint8))

def best_of(fn, n):
    times = []
    for _ in range(n):
        t0 = time.perf_counter()
        fn()
        times.append(time.perf_counter() - t0)
    return min(times)

data = encode_baseline(raster, 100, "4:2:0")  # warm compile
decode_to_dct(data)
out = {"numba": bool(USING_NUMBA)}
out["encode_ms"] = best_of(lambda: encode_baseline(raster, 100, "4:2:0"), repeats) * 1e3
out["decode_ms"] = best_of(lambda: decode_to_dct(data), repeats) * 1e3

conv = Conv2d(64, 64)
conv.init_weights(rng)
x = rng.normal(0, 1, (1, 64, 64, 64))
y = conv.forward(x)
g = rng.normal(0, 1, y.shape)
conv.backward(g)
out["conv_fwd_ms"] = best_of(lambda: conv.forward(x), repeats) * 1e3
out["conv_bwd_ms"] = best_of(lambda: conv.backward(g), repeats) * 1e3
print(json.dumps(out))
"""


def run_mode(numba_on: bool, size: int, repeats: int) -> dict:
    env = dict(
        os.environ,
        FREQSR_NUMBA="1" if numba_on else "0",
        FREQSR_CONV_KERNEL="numba" if numba_on else "numpy",
    )
    r = subprocess.run(
        [sys.executable, "-c", WORKER, json.dumps([size, repeats])],
        capture_output=True,
        text=True,
        env=env,
    )
    if r.returncode != 0:
        raise RuntimeError(r.stderr)
    return json.loads(r.stdout)


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--size", type=int, default=512, help="test image side in pixels")
    ap.add_argument("--repeats", type=int, default=5)
    args = ap.parse_args()

    numba = run_mode(True, args.size, args.repeats)
    numpy_ = run_mode(False, args.size, args.repeats)
    assert numba["numba"] and not numpy_["numba"]

    print(f"\nkernel timings, {args.size}x{args.size} Q100 4:2:0 (best of {args.repeats})\n")
    print(f"{'kernel':<14} {'numba (ms)':>12} {'numpy (ms)':>12} {'speedup':>9}")
    for key, label in (
        ("decode_ms", "scan decode"),
        ("encode_ms", "scan encode"),
        ("conv_fwd_ms", "conv forward"),
        ("conv_bwd_ms", "conv backward"),
    ):
        ratio = numpy_[key] / numba[key]
        print(f"{label:<14} {numba[key]:>12.2f} {numpy_[key]:>12.2f} {ratio:>8.1f}x")
    print("\nset FREQSR_NUMBA=0 to force the fallback path in any run")


if __name__ == "__main__":
    main()
