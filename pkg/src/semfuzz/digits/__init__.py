from .semantic import CANVAS, MARGIN, ControlPointRef, DigitSemantic, displace, to_svg
from .vectorize import EmptyBitmapError, vectorize
from .rasterize import iou, rasterize
from .dataset import build_corpus, generate_dataset, render_digit

__all__ = [
    "CANVAS",
    "MARGIN",
    "ControlPointRef",
    "DigitSemantic",
    "displace",
    "to_svg",
    "EmptyBitmapError",
    "vectorize",
    "iou",
    "rasterize",
    "build_corpus",
    "generate_dataset",
    "render_digit",
]
