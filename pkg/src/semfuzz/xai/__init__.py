from .heatmap import Heatmap, heatmap_stats, load_pgm, normalize, save_pgm, threshold
from .explainers import (
    XaiConfig,
    explain,
    gradcam_pp,
    ig_attributions,
    integrated_gradients,
    smoothgrad,
)

__all__ = [
    "Heatmap",
    "heatmap_stats",
    "load_pgm",
    "normalize",
    "save_pgm",
    "threshold",
    "XaiConfig",
    "explain",
    "gradcam_pp",
    "ig_attributions",
    "integrated_gradients",
    "smoothgrad",
]
