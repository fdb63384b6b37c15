"""End-to-end glue: dataset synthesis, the two training loaders (coefficient
path vs RGB-decode baseline), the training loop with loader/pipeline FPS
accounting, and the inference tail.
"""
from __future__ import annotations

import json
import time
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path

import numpy as np

from .dct_model import (
    SUBSAMPLING_420,
    DctImage,
    NormParams,
    RgbImage,
    blockify,
)
from .errors import EmptyDataset, FreqsrError, ShapeMismatch
from .formats import read_png, read_ppm
from .freq_ops import (
    CropSpec,
    center_crop,
    normalize_plane,
    postprocess_hr,
    preprocess_lr,
    preprocess_plane,
    upsample_dct_x2,
)
from .jpeg import decode_to_dct, decode_to_rgb, encode_baseline
from .metrics import Stopwatch, fps, luminance
from .net import FreqSrConfig, FreqSrModel, l1_loss, net_to_tensor, tensor_to_net
from .spatial import fdct_plane, idct_plane, round_half_away, ycbcr_to_rgb

MANIFEST_SCHEMA_VERSION = 1

_IMAGE_SUFFIXES = (".ppm", ".png", ".jpg", ".jpeg")


def load_rgb_any(path) -> RgbImage:
    p = str(path).lower()
    if p.endswith(".ppm"):
        return read_ppm(path)
    if p.endswith(".png"):
        return read_png(path)
    if p.endswith((".jpg", ".jpeg")):
        with open(path, "rb") as f:
            return decode_to_rgb(f.read())
    raise FreqsrError(f"unsupported input image format: {path}")


def box_downsample_x2(img: RgbImage) -> RgbImage:
    h, w = img.height, img.width
    if h % 2 or w % 2:
        raise ShapeMismatch(f"box downsample needs even dims, got {w}x{h}")
    s = img.samples.astype(np.float64).reshape(h // 2, 2, w // 2, 2, 3).mean(axis=(1, 3))
    return RgbImage(np.clip(round_half_away(s), 0, 255).astype(np.uint8))


def make_dataset(hr_dir, out_dir, scale: int = 2, quality: int = 100, subsampling: str = SUBSAMPLING_420) -> dict:
    """Trim HR images to multiples of 16*scale, box-downsample to LR, encode
    both as baseline JPEGs, and write a manifest of the pairs."""
    if scale != 2:
        raise ShapeMismatch(f"only scale 2 is supported, got {scale}")
    hr_dir = Path(hr_dir)
    out_dir = Path(out_dir)
    sources = sorted(p for p in hr_dir.iterdir() if p.suffix.lower() in _IMAGE_SUFFIXES)
    if not sources:
        raise EmptyDataset(f"no images found in {hr_dir}")
    (out_dir / "hr").mkdir(parents=True, exist_ok=True)
    (out_dir / "lr").mkdir(parents=True, exist_ok=True)
    mult = 16 * scale
    pairs = []
    for src in sources:
        img = load_rgb_any(src)
        th = img.height - img.height % mult
        tw = img.width - img.width % mult
        if th == 0 or tw == 0:
            raise ShapeMismatch(f"{src.name}: smaller than {mult}x{mult}")
        hr = RgbImage(img.samples[:th, :tw].copy())
        lr = box_downsample_x2(hr)
        hr_path = out_dir / "hr" / (src.stem + ".jpg")
        lr_path = out_dir / "lr" / (src.stem + ".jpg")
        hr_path.write_bytes(encode_baseline(hr, quality, subsampling))
        lr_path.write_bytes(encode_baseline(lr, quality, subsampling))
        pairs.append(
            {
                "name": src.stem,
                "hr": str(hr_path.relative_to(out_dir)),
                "lr": str(lr_path.relative_to(out_dir)),
                "hr_width": tw,
                "hr_height": th,
                "trimmed": (tw != img.width or th != img.height),
            }
        )
    manifest = {
        "schema_version": MANIFEST_SCHEMA_VERSION,
        "scale": scale,
        "quality": quality,
        "subsampling": subsampling,
        "pairs": pairs,
    }
    with open(out_dir / "manifest.json", "w") as f:
        json.dump(manifest, f, indent=2)
    return manifest


def read_manifest(path) -> tuple[dict, list[tuple[bytes, bytes]]]:
    """Manifest plus preloaded (lr_bytes, hr_bytes) per pair; I/O is excluded
    from loader timing by reading everything up front."""
    path = Path(path)
    with open(path) as f:
        manifest = json.load(f)
    base = path.parent
    blobs = []
    for pair in manifest["pairs"]:
        blobs.append(((base / pair["lr"]).read_bytes(), (base / pair["hr"]).read_bytes()))
    return manifest, blobs


def load_pair_dct(lr_bytes: bytes, hr_bytes: bytes, patch_blocks: int, p: NormParams = NormParams()):
    """Coefficient-path loader: parse to DCT grids, no inverse transform."""
    x = preprocess_lr(decode_to_dct(lr_bytes), CropSpec(patch_blocks), p)
    hr = decode_to_dct(hr_bytes)
    target = blockify(normalize_plane(center_crop(hr.y, CropSpec(2 * patch_blocks)), p))
    return tensor_to_net(x), tensor_to_net(target)


def _plane_from_rgb(img: RgbImage):
    y = luminance(img)
    h, w = y.shape
    ph, pw = (-h) % 8, (-w) % 8
    if ph or pw:
        y = np.pad(y, ((0, ph), (0, pw)), mode="edge")
    return fdct_plane(y)


def load_pair_rgb(lr_bytes: bytes, hr_bytes: bytes, patch_blocks: int, p: NormParams = NormParams()):
    """Baseline loader: full RGB decode, then forward DCT of the pixels."""
    lr_plane = _plane_from_rgb(decode_to_rgb(lr_bytes))
    x = preprocess_plane(lr_plane, CropSpec(patch_blocks), p)
    hr_plane = _plane_from_rgb(decode_to_rgb(hr_bytes))
    target = blockify(normalize_plane(center_crop(hr_plane, CropSpec(2 * patch_blocks)), p))
    return tensor_to_net(x), tensor_to_net(target)


def run_training(
    manifest_path,
    patch_blocks: int = 32,
    epochs: int = 1,
    lr: float = 1e-4,
    seed: int = 0,
    baseline_loader: str = "dct",
    threads: int = 1,
    weights_out=None,
    feature_width: int = 64,
    log=None,
) -> tuple[FreqSrModel, dict]:
    """Full training pipeline over a manifest; returns the model and a report
    with per-epoch losses and loader/pipeline FPS."""
    if baseline_loader not in ("dct", "rgb"):
        raise FreqsrError(f"unknown loader {baseline_loader}")
    manifest, blobs = read_manifest(manifest_path)
    if not blobs:
        raise EmptyDataset("manifest has no pairs")
    loader = load_pair_dct if baseline_loader == "dct" else load_pair_rgb

    cfg = FreqSrConfig(feature_width=feature_width)
    model = FreqSrModel(cfg)
    model.init_weights(seed)
    order_rng = np.random.default_rng(seed + 1)

    history: list[float] = []
    loader_seconds = 0.0
    train_seconds = 0.0
    items = 0
    pool = ThreadPoolExecutor(max_workers=threads) if threads > 1 else None
    try:
        for epoch in range(epochs):
            order = order_rng.permutation(len(blobs))
            with Stopwatch() as t_load:
                if pool is not None:
                    pairs = list(
                        pool.map(lambda i: loader(blobs[i][0], blobs[i][1], patch_blocks), order)
                    )
                else:
                    pairs = [loader(blobs[i][0], blobs[i][1], patch_blocks) for i in order]
            loader_seconds += t_load.elapsed
            with Stopwatch() as t_train:
                total = 0.0
                for x, y in pairs:
                    pred = model.forward(x)
                    loss, g = l1_loss(pred, y)
                    model.zero_grad()
                    model.backward(g)
                    model.adam_step(lr)
                    total += loss
            train_seconds += t_train.elapsed
            items += len(pairs)
            history.append(total / len(pairs))
            if log is not None:
                log(f"epoch {epoch + 1}/{epochs}: mean L1 {history[-1]:.6f}")
    finally:
        if pool is not None:
            pool.shutdown()

    if weights_out is not None:
        model.save_weights(weights_out)
    report = {
        "schema_version": 1,
        "kind": "train",
        "loader": baseline_loader,
        "patch_blocks": patch_blocks,
        "epochs": epochs,
        "items": items,
        "lr": lr,
        "seed": seed,
        "threads": threads,
        "feature_width": feature_width,
        "loss_history": history,
        "loader_fps": fps(items, loader_seconds),
        "pipeline_fps": fps(items, loader_seconds + train_seconds),
        "loader_seconds": loader_seconds,
        "train_seconds": train_seconds,
        "timestamp": time.strftime("%Y-%m-%dT%H:%M:%S"),
    }
    return model, report


def sr_infer(img: DctImage, model: FreqSrModel | None, p: NormParams = NormParams()) -> RgbImage:
    """Inference tail: upsampled 2x RGB output from an LR coefficient image.

    With a model: normalize -> upsample -> network -> denormalize on the luma
    grid (the network maps the upsampled input to the normalized HR target
    domain, so denormalization is exact there). Without a model: the raw
    coefficient grid is upsampled directly. Feeding the identity through the
    normalize/denormalize pair instead would not cancel: the affine shift adds
    an all-ones coefficient pattern the linear upsampler does not preserve,
    injecting a fixed block-corner artifact worth 1-2 dB.

    Chroma never passes through the network and is always upsampled directly
    in the coefficient domain (once at 4:4:4, twice at 4:2:0).
    """
    if not img.is_color:
        raise ShapeMismatch("grayscale input: SR pipeline requires chroma")
    if model is not None:
        x = preprocess_lr(img, None, p)
        t = net_to_tensor(model.forward(tensor_to_net(x)))
        y_hr = postprocess_hr(t, p)
    else:
        y_hr = upsample_dct_x2(img.y)
    cb, cr = img.cb, img.cr
    rounds = 2 if img.subsampling == SUBSAMPLING_420 else 1
    for _ in range(rounds):
        cb = upsample_dct_x2(cb)
        cr = upsample_dct_x2(cr)
    y_s = idct_plane(y_hr)
    cb_s = idct_plane(cb)
    cr_s = idct_plane(cr)
    h, w = y_s.shape
    rgb = ycbcr_to_rgb(y_s, cb_s[:h, :w], cr_s[:h, :w])
    return RgbImage(rgb.samples[: 2 * img.pixel_height, : 2 * img.pixel_width])
