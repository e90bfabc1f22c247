"""Self-contained handwritten-style digit corpus.

Glyphs from the bundled DejaVu/STIX font families are distorted with
random affine maps, stroke-weight filters and blur, then size- and
mass-centered on a 28x28 canvas the way the classic digit benchmarks
are.  Everything is driven by one rng seed, and the corpus is written
as standard IDX image/label pairs so the ingestion path is identical
to a real external dataset.
"""

from pathlib import Path

import matplotlib
import numpy as np
from PIL import Image, ImageDraw, ImageFilter, ImageFont

from ..nn.idx import write_idx_images, write_idx_labels

_FONT_FILES = [
    "DejaVuSans.ttf",
    "DejaVuSans-Bold.ttf",
    "DejaVuSans-Oblique.ttf",
    "DejaVuSerif.ttf",
    "DejaVuSerif-Bold.ttf",
    "DejaVuSerif-Italic.ttf",
    "DejaVuSansMono.ttf",
    "DejaVuSansMono-Bold.ttf",
]

_HIRES = 96
_CORE = 20  # target size of the glyph's long side on the 28px canvas

TRAIN_IMAGES = "digits-train-images.idx"
TRAIN_LABELS = "digits-train-labels.idx"
TEST_IMAGES = "digits-test-images.idx"
TEST_LABELS = "digits-test-labels.idx"


def _font_paths():
    base = Path(matplotlib.get_data_path()) / "fonts" / "ttf"
    found = [base / name for name in _FONT_FILES if (base / name).exists()]
    if not found:
        raise RuntimeError(f"no usable fonts under {base}")
    return found


_FONT_CACHE = {}


def _font(path, size):
    key = (str(path), size)
    if key not in _FONT_CACHE:
        _FONT_CACHE[key] = ImageFont.truetype(str(path), size)
    return _FONT_CACHE[key]


def render_digit(digit, font_path, rng):
    """One distorted 28x28 uint8 glyph of ``digit``."""
    img = Image.new("L", (_HIRES, _HIRES), 0)
    draw = ImageDraw.Draw(img)
    font = _font(font_path, 64)
    text = str(digit)
    bbox = draw.textbbox((0, 0), text, font=font)
    w, h = bbox[2] - bbox[0], bbox[3] - bbox[1]
    draw.text(
        ((_HIRES - w) / 2 - bbox[0], (_HIRES - h) / 2 - bbox[1]), text, font=font, fill=255
    )

    # random affine about the image center
    theta = np.deg2rad(rng.uniform(-16, 16))
    shear = rng.uniform(-0.22, 0.22)
    sx = rng.uniform(0.82, 1.12)
    sy = rng.uniform(0.82, 1.12)
    cos, sin = np.cos(theta), np.sin(theta)
    fwd = np.array([[cos, -sin], [sin, cos]]) @ np.array([[1, shear], [0, 1]])
    fwd = fwd @ np.diag([sx, sy])
    inv = np.linalg.inv(fwd)
    c = _HIRES / 2
    coeffs = (
        inv[0, 0], inv[0, 1], c - inv[0, 0] * c - inv[0, 1] * c,
        inv[1, 0], inv[1, 1], c - inv[1, 0] * c - inv[1, 1] * c,
    )
    img = img.transform((_HIRES, _HIRES), Image.AFFINE, coeffs, resample=Image.BILINEAR)

    # occasional stroke weight change
    r = rng.random()
    if r < 0.18:
        img = img.filter(ImageFilter.MaxFilter(3))
    elif r < 0.36:
        img = img.filter(ImageFilter.MinFilter(3))

    box = img.getbbox()
    if box is None:
        return render_digit(digit, font_path, rng)
    img = img.crop(box)
    long_side = max(img.size)
    scale = _CORE / long_side
    img = img.resize(
        (max(1, round(img.width * scale)), max(1, round(img.height * scale))),
        Image.BILINEAR,
    )

    arr = np.asarray(img, dtype=np.float64)
    total = arr.sum()
    cy, cx = (
        (arr * np.arange(arr.shape[0])[:, None]).sum() / total,
        (arr * np.arange(arr.shape[1])[None, :]).sum() / total,
    )
    jx, jy = rng.uniform(-1.2, 1.2, 2)
    left = int(round(14 + jx - cx))
    top = int(round(14 + jy - cy))

    canvas = Image.new("L", (28, 28), 0)
    canvas.paste(img, (left, top))
    blur = rng.uniform(0.0, 0.5)
    if blur > 0.05:
        canvas = canvas.filter(ImageFilter.GaussianBlur(blur))
    out = np.asarray(canvas, dtype=np.float64) * rng.uniform(0.9, 1.0)
    return np.clip(out, 0, 255).astype(np.uint8)


def build_corpus(n, rng):
    """``n`` digits, classes balanced round-robin; returns (images, labels)."""
    fonts = _font_paths()
    images = np.zeros((n, 28, 28), dtype=np.uint8)
    labels = np.zeros(n, dtype=np.uint8)
    for i in range(n):
        digit = i % 10
        font = fonts[rng.integers(len(fonts))]
        images[i] = render_digit(digit, font, rng)
        labels[i] = digit
    order = rng.permutation(n)
    return images[order], labels[order]


def generate_dataset(out_dir, n_train=12000, n_test=2000, seed=0):
    """Write train/test IDX pairs under ``out_dir``; returns the paths."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    rng = np.random.default_rng(seed)
    train_x, train_y = build_corpus(n_train, rng)
    test_x, test_y = build_corpus(n_test, rng)
    paths = {
        "train_images": out / TRAIN_IMAGES,
        "train_labels": out / TRAIN_LABELS,
        "test_images": out / TEST_IMAGES,
        "test_labels": out / TEST_LABELS,
    }
    write_idx_images(paths["train_images"], train_x)
    write_idx_labels(paths["train_labels"], train_y)
    write_idx_images(paths["test_images"], test_x)
    write_idx_labels(paths["test_labels"], test_y)
    return paths
