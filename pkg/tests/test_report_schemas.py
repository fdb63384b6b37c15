"""Every JSON report the CLI emits validates against its shipped schema."""
import json
from pathlib import Path

import jsonschema
import numpy as np
import pytest

from conftest import smooth_texture
from freqsr.bench import bench_decode
from freqsr.jpeg import encode_baseline
from freqsr.pipeline import run_training

SCHEMA_DIR = Path(__file__).parent.parent / "docs" / "schemas"


def load_schema(name: str) -> dict:
    with open(SCHEMA_DIR / name) as f:
        return json.load(f)


def test_bench_report_validates(tmp_path):
    rng = np.random.default_rng(0)
    corpus = [(f"f{i}", encode_baseline(smooth_texture(rng, 48, 48), 100, "4:2:0")) for i in range(3)]
    report = bench_decode(corpus, iterations=2, warmup=0, threads=2)
    jsonschema.validate(json.loads(json.dumps(report)), load_schema("bench_report.schema.json"))


def test_train_report_validates(toy_manifest_8):
    _, report = run_training(toy_manifest_8, patch_blocks=8, epochs=1, lr=1e-3, seed=0, feature_width=8)
    jsonschema.validate(json.loads(json.dumps(report)), load_schema("train_report.schema.json"))


@pytest.mark.parametrize("identical", [False, True])
def test_metrics_report_validates(tmp_path, identical):
    import subprocess
    import sys

    from freqsr.formats import write_ppm

    rng = np.random.default_rng(1)
    a = tmp_path / "a.ppm"
    b = tmp_path / "b.ppm"
    img = smooth_texture(rng, 64, 64)
    write_ppm(a, img)
    if identical:
        write_ppm(b, img)
    else:
        from freqsr.dct_model import RgbImage

        noisy = np.clip(img.samples.astype(int) + rng.integers(-5, 6, img.samples.shape), 0, 255)
        write_ppm(b, RgbImage(noisy.astype(np.uint8)))
    out = tmp_path / "m.json"
    r = subprocess.run(
        [sys.executable, "-m", "freqsr.cli", "metrics", str(a), str(b), "--json", str(out)],
        capture_output=True,
        text=True,
    )
    assert r.returncode == 0, r.stderr
    report = json.loads(out.read_text())
    jsonschema.validate(report, load_schema("metrics_report.schema.json"))
    if identical:
        assert report["psnr_y"] == "inf"
