import io
import subprocess
from pathlib import Path

import numpy as np
import pytest

from freqsr.dct_model import RgbImage
from freqsr.formats import write_ppm

REFERENCE_DIR = Path(__file__).parent / "reference"


@pytest.fixture(scope="session")
def jpegref(tmp_path_factory):
    """Reference helper built against the system libjpeg (independent oracle)."""
    exe = tmp_path_factory.mktemp("jpegref") / "jpegref"
    src = REFERENCE_DIR / "jpegref.c"
    subprocess.run(
        ["cc", "-O2", "-o", str(exe), str(src), "-ljpeg"],
        check=True,
        capture_output=True,
    )
    return exe


def jpegref_dump(exe, jpeg_path, out_path):
    """Parsed coefficient dump: per component (dequantized blocks, quant)."""
    subprocess.run([str(exe), "dump", str(jpeg_path), str(out_path)], check=True)
    raw = Path(out_path).read_bytes()
    off = 0
    ncomp = int(np.frombuffer(raw, "<u4", 1, off)[0])
    off += 4
    comps = []
    for _ in range(ncomp):
        hb, wb, hs, vs = (int(v) for v in np.frombuffer(raw, "<u4", 4, off))
        off += 16
        qt = np.frombuffer(raw, "<u2", 64, off).astype(np.int32)
        off += 128
        blocks = np.frombuffer(raw, "<i2", hb * wb * 64, off).astype(np.int32)
        off += hb * wb * 128
        comps.append(
            {
                "height_in_blocks": hb,
                "width_in_blocks": wb,
                "h_samp": hs,
                "v_samp": vs,
                "dequant": blocks.reshape(hb, wb, 64) * qt[None, None, :],
            }
        )
    return comps


def jpegref_encode(exe, img: RgbImage, out_path, quality=90, subsamp="420", restart=0):
    ppm = Path(str(out_path) + ".ppm")
    write_ppm(ppm, img)
    subprocess.run(
        [str(exe), "encode", str(ppm), str(out_path), str(quality), subsamp, str(restart)],
        check=True,
    )
    return Path(out_path).read_bytes()


def pil_encode(img: RgbImage, quality=90, subsampling=0, **kw) -> bytes:
    from PIL import Image

    buf = io.BytesIO()
    Image.fromarray(img.samples).save(buf, "JPEG", quality=quality, subsampling=subsampling, **kw)
    return buf.getvalue()


def pil_decode(data: bytes) -> np.ndarray:
    from PIL import Image

    return np.asarray(Image.open(io.BytesIO(data)).convert("RGB"))


def smooth_texture(rng, h, w, amplitude=100.0, base=128.0):
    """Band-limited random image: low-frequency cosines plus mild noise."""
    yy, xx = np.mgrid[0:h, 0:w].astype(np.float64)
    img = np.full((h, w, 3), base)
    for c in range(3):
        for _ in range(4):
            fy, fx = rng.uniform(0.2, 3.0, 2)
            ph = rng.uniform(0, 2 * np.pi, 2)
            img[:, :, c] += (amplitude / 4) * np.cos(
                2 * np.pi * fy * yy / h + ph[0]
            ) * np.cos(2 * np.pi * fx * xx / w + ph[1])
    img += rng.normal(0, 3.0, img.shape)
    return RgbImage(np.clip(img, 0, 255).astype(np.uint8))


def gradient_card(h, w):
    """Horizontal luminance ramp with a vertical tint sweep (smooth chroma)."""
    yy, xx = np.mgrid[0:h, 0:w].astype(np.float64)
    r = 255.0 * xx / max(w - 1, 1)
    g = 255.0 * yy / max(h - 1, 1)
    b = 255.0 * (xx + yy) / max(h + w - 2, 1)
    return RgbImage(np.stack([r, g, b], axis=2).astype(np.uint8))


@pytest.fixture(scope="session")
def photo_images():
    """Color photographs bundled with scikit-image, trimmed to multiples of 32."""
    from skimage import data

    photos = {}
    for name in ("astronaut", "coffee", "chelsea", "rocket", "immunohistochemistry", "hubble_deep_field"):
        img = getattr(data, name)()
        h, w = img.shape[0] // 32 * 32, img.shape[1] // 32 * 32
        photos[name] = RgbImage(np.ascontiguousarray(img[:h, :w, :3]))
    return photos


@pytest.fixture(scope="session")
def bench_corpus_dir(tmp_path_factory):
    """>=100 mixed-size Q100 4:2:0 JPEGs between 256^2 and 1024^2."""
    from freqsr.jpeg import encode_baseline

    d = tmp_path_factory.mktemp("bench_corpus")
    rng = np.random.default_rng(1234)
    sizes = [256, 320, 384, 448, 512, 640, 768, 896, 1024, 512]
    n = 0
    for i in range(100):
        s = sizes[i % len(sizes)]
        img = smooth_texture(rng, s, s)
        (d / f"img{i:03d}.jpg").write_bytes(encode_baseline(img, 100, "4:2:0"))
        n += 1
    assert n >= 100
    return d


@pytest.fixture(scope="session")
def train_manifest_32(tmp_path_factory, photo_images):
    """32-pair manifest (HR 256^2 crops -> LR 128^2) for loader benchmarks."""
    from freqsr.pipeline import make_dataset

    hr_dir = tmp_path_factory.mktemp("hr32")
    rng = np.random.default_rng(99)
    photos = list(photo_images.values())
    for i in range(32):
        src = photos[i % len(photos)].samples
        r0 = rng.integers(0, src.shape[0] - 256 + 1)
        c0 = rng.integers(0, src.shape[1] - 256 + 1)
        write_ppm(hr_dir / f"crop{i:02d}.ppm", RgbImage(src[r0 : r0 + 256, c0 : c0 + 256].copy()))
    out = tmp_path_factory.mktemp("ds32")
    make_dataset(hr_dir, out)
    return out / "manifest.json"


@pytest.fixture(scope="session")
def toy_manifest_8(tmp_path_factory, photo_images):
    """8-pair manifest with small images (HR 128^2 -> LR 64^2)."""
    from freqsr.pipeline import make_dataset

    hr_dir = tmp_path_factory.mktemp("hr8")
    rng = np.random.default_rng(5)
    photos = list(photo_images.values())
    for i in range(8):
        src = photos[i % len(photos)].samples
        r0 = rng.integers(0, src.shape[0] - 128 + 1)
        c0 = rng.integers(0, src.shape[1] - 128 + 1)
        write_ppm(hr_dir / f"crop{i}.ppm", RgbImage(src[r0 : r0 + 128, c0 : c0 + 128].copy()))
    out = tmp_path_factory.mktemp("ds8")
    make_dataset(hr_dir, out)
    return out / "manifest.json"
