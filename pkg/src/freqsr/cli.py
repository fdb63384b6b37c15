"""Command-line surface.

Exit codes: 0 success, 1 usage error, 2 data error.
"""
from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path

import numpy as np

from .bench import bench_decode, load_corpus
from .dct_model import NormParams, RgbImage
from .errors import FreqsrError
from .formats import write_dctt, write_image
from .freq_ops import CropSpec, preprocess_lr
from .jpeg import decode_to_dct
from .metrics import center_crop_px, luminance, psnr, ssim
from .net import FreqSrModel
from .pipeline import load_rgb_any, make_dataset, run_training, sr_infer
from .spatial import reconstruct_rgb

USAGE_ERROR = 1
DATA_ERROR = 2


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        sys.exit(USAGE_ERROR)


def _default_threads() -> int:
    env = os.environ.get("FREQSR_THREADS")
    if env:
        try:
            return max(1, int(env))
        except ValueError:
            pass
    return 1


def _dctt_arrays(img) -> list[np.ndarray]:
    planes = [img.y.blocks]
    if img.is_color:
        planes += [img.cb.blocks, img.cr.blocks]
    return [np.ascontiguousarray(p, dtype=np.int32) for p in planes]


def cmd_decode(args) -> int:
    data = Path(args.input).read_bytes()
    img = decode_to_dct(data)
    if args.mode == "dct":
        write_dctt(args.out, _dctt_arrays(img))
        meta = {
            "pixel_width": img.pixel_width,
            "pixel_height": img.pixel_height,
            "subsampling": img.subsampling,
            "planes": ["y", "cb", "cr"] if img.is_color else ["y"],
        }
        with open(str(args.out) + ".json", "w") as f:
            json.dump(meta, f, indent=2)
    else:
        write_image(args.out, reconstruct_rgb(img))
    return 0


def cmd_preprocess(args) -> int:
    data = Path(args.input).read_bytes()
    img = decode_to_dct(data)
    spec = None if args.full else CropSpec(args.patch_blocks)
    t = preprocess_lr(img, spec, NormParams())
    write_dctt(args.out, [np.ascontiguousarray(t.data, dtype=np.float64)])
    return 0


def cmd_bench_decode(args) -> int:
    corpus = load_corpus(args.dir)
    report = bench_decode(corpus, args.iterations, args.warmup, args.threads)
    text = json.dumps(report, indent=2)
    if args.json:
        Path(args.json).write_text(text)
    print(text)
    return 0


def cmd_make_dataset(args) -> int:
    manifest = make_dataset(args.hr, args.out, args.scale, args.quality, args.subsampling)
    print(f"wrote {len(manifest['pairs'])} pairs under {args.out}")
    return 0


def cmd_train(args) -> int:
    _, report = run_training(
        args.manifest,
        patch_blocks=args.patch_blocks,
        epochs=args.epochs,
        lr=args.lr,
        seed=args.seed,
        baseline_loader=args.baseline_loader,
        threads=args.threads,
        weights_out=args.weights,
        feature_width=args.feature_width,
        log=lambda msg: print(msg, file=sys.stderr),
    )
    text = json.dumps(report, indent=2)
    if args.json:
        Path(args.json).write_text(text)
    print(text)
    return 0


def _finite(v: float):
    """PSNR's +infinity sentinel serialized as the JSON string "inf"."""
    import math

    return v if math.isfinite(v) else "inf"


def _metrics_report(out_img: RgbImage, ref_img: RgbImage, crop: int) -> dict:
    a = center_crop_px(out_img, crop)
    b = center_crop_px(ref_img, crop)
    return {
        "schema_version": 1,
        "kind": "metrics",
        "crop": crop,
        "psnr_y": _finite(psnr(luminance(a), luminance(b))),
        "ssim_y": ssim(luminance(a), luminance(b)),
        "psnr_rgb": _finite(psnr(a, b)),
    }


def cmd_infer(args) -> int:
    img = decode_to_dct(Path(args.input).read_bytes())
    model = FreqSrModel.load_weights(args.weights) if args.weights else None
    out = sr_infer(img, model)
    write_image(args.out, out)
    if args.report:
        report = {"schema_version": 1, "kind": "infer", "width": out.width, "height": out.height}
        if args.ref:
            report.update(_metrics_report(out, load_rgb_any(args.ref), args.crop))
        Path(args.report).write_text(json.dumps(report, indent=2))
    return 0


def cmd_upsample(args) -> int:
    img = decode_to_dct(Path(args.input).read_bytes())
    write_image(args.out, sr_infer(img, None))
    return 0


def cmd_metrics(args) -> int:
    a = load_rgb_any(args.image)
    b = load_rgb_any(args.ref)
    if args.crop:
        report = _metrics_report(a, b, args.crop)
    else:
        report = {
            "schema_version": 1,
            "kind": "metrics",
            "crop": None,
            "psnr_y": _finite(psnr(luminance(a), luminance(b))),
            "ssim_y": ssim(luminance(a), luminance(b)),
            "psnr_rgb": _finite(psnr(a, b)),
        }
    text = json.dumps(report, indent=2)
    if args.json:
        Path(args.json).write_text(text)
    print(text)
    return 0


def build_parser() -> _Parser:
    p = _Parser(prog="freqsr", description=__doc__)
    sub = p.add_subparsers(dest="command", required=True)

    d = sub.add_parser("decode", help="decode a JPEG to DCT coefficients or RGB")
    d.add_argument("input")
    d.add_argument("--mode", choices=("dct", "rgb"), default="dct")
    d.add_argument("--out", required=True)
    d.set_defaults(fn=cmd_decode)

    pp = sub.add_parser("preprocess", help="dump the network input tensor for a JPEG")
    pp.add_argument("input")
    pp.add_argument("--out", required=True)
    pp.add_argument("--patch-blocks", type=int, default=32)
    pp.add_argument("--full", action="store_true", help="no crop (full image)")
    pp.set_defaults(fn=cmd_preprocess)

    b = sub.add_parser("bench-decode", help="time decode paths over a corpus")
    b.add_argument("--dir", required=True)
    b.add_argument("--iterations", type=int, default=3)
    b.add_argument("--warmup", type=int, default=1)
    b.add_argument("--threads", type=int, default=_default_threads())
    b.add_argument("--json")
    b.set_defaults(fn=cmd_bench_decode)

    m = sub.add_parser("make-dataset", help="synthesize LR/HR JPEG pairs")
    m.add_argument("--hr", required=True)
    m.add_argument("--out", required=True)
    m.add_argument("--scale", type=int, default=2)
    m.add_argument("--quality", type=int, default=100)
    m.add_argument("--subsampling", choices=("4:4:4", "4:2:0"), default="4:2:0")
    m.set_defaults(fn=cmd_make_dataset)

    t = sub.add_parser("train", help="train the SR model on a manifest")
    t.add_argument("--manifest", required=True)
    t.add_argument("--patch-blocks", type=int, default=32)
    t.add_argument("--epochs", type=int, default=1)
    t.add_argument("--lr", type=float, default=1e-4)
    t.add_argument("--seed", type=int, default=0)
    t.add_argument("--weights")
    t.add_argument("--baseline-loader", choices=("dct", "rgb"), default="dct")
    t.add_argument("--threads", type=int, default=_default_threads())
    t.add_argument("--feature-width", type=int, default=64)
    t.add_argument("--json")
    t.set_defaults(fn=cmd_train)

    i = sub.add_parser("infer", help="2x super-resolve a JPEG")
    i.add_argument("--weights")
    i.add_argument("--input", required=True)
    i.add_argument("--out", required=True)
    i.add_argument("--report")
    i.add_argument("--ref")
    i.add_argument("--crop", type=int, default=220)
    i.set_defaults(fn=cmd_infer)

    u = sub.add_parser("upsample", help="model-free DCT-interpolation 2x upscale")
    u.add_argument("--input", required=True)
    u.add_argument("--out", required=True)
    u.set_defaults(fn=cmd_upsample)

    mt = sub.add_parser("metrics", help="PSNR/SSIM between two images")
    mt.add_argument("image")
    mt.add_argument("ref")
    mt.add_argument("--crop", type=int, default=0)
    mt.add_argument("--json")
    mt.set_defaults(fn=cmd_metrics)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.fn(args)
    except (FreqsrError, OSError) as e:
        print(f"freqsr: error: {e}", file=sys.stderr)
        return DATA_ERROR


if __name__ == "__main__":
    sys.exit(main())
