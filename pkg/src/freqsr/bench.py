"""Decode-path benchmark: times the coefficient decode against the full RGB
decode over an in-memory corpus (same bytes, same order, warmup excluded).
"""
from __future__ import annotations

import time
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path

import numpy as np

from .errors import EmptyDataset, FreqsrError
from .jpeg import decode_to_dct, decode_to_rgb

REPORT_SCHEMA_VERSION = 1


def load_corpus(directory) -> list[tuple[str, bytes]]:
    d = Path(directory)
    files = sorted(p for p in d.rglob("*") if p.suffix.lower() in (".jpg", ".jpeg"))
    if not files:
        raise EmptyDataset(f"no JPEG files under {d}")
    return [(str(p.relative_to(d)), p.read_bytes()) for p in files]


def _timed_pass(fn, blobs, threads: int) -> list[float]:
    """Per-image wall-clock latencies (seconds) for one pass over the corpus."""

    def one(data: bytes) -> float:
        t0 = time.perf_counter()
        fn(data)
        return time.perf_counter() - t0

    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            return list(pool.map(one, blobs))
    return [one(b) for b in blobs]


def _stats_ms(latencies: list[float]) -> dict:
    arr = np.asarray(latencies) * 1000.0
    return {
        "mean_ms": float(arr.mean()),
        "median_ms": float(np.median(arr)),
        "p95_ms": float(np.percentile(arr, 95)),
        "count": int(arr.size),
    }


def bench_decode(
    corpus: list[tuple[str, bytes]],
    iterations: int = 3,
    warmup: int = 1,
    threads: int = 1,
) -> dict:
    if iterations < 1:
        raise FreqsrError("iterations must be >= 1")
    if warmup < 0:
        raise FreqsrError("warmup must be >= 0")
    blobs = [b for _, b in corpus]
    started = time.strftime("%Y-%m-%dT%H:%M:%S")
    results = {}
    for name, fn in (("dct", decode_to_dct), ("rgb", decode_to_rgb)):
        for _ in range(warmup):
            _timed_pass(fn, blobs, threads)
        lats: list[float] = []
        t0 = time.perf_counter()
        for _ in range(iterations):
            lats.extend(_timed_pass(fn, blobs, threads))
        wall = time.perf_counter() - t0
        stats = _stats_ms(lats)
        stats["loader_fps"] = len(lats) / wall
        results[name] = stats
    return {
        "schema_version": REPORT_SCHEMA_VERSION,
        "kind": "bench-decode",
        "corpus_size": len(corpus),
        "iterations": iterations,
        "warmup": warmup,
        "threads": threads,
        "started": started,
        "finished": time.strftime("%Y-%m-%dT%H:%M:%S"),
        "paths": results,
        "speedup_rgb_over_dct": results["rgb"]["mean_ms"] / results["dct"]["mean_ms"],
    }
