from .tensor import FLOAT, NonFiniteError, ShapeMismatchError, as_tensor, ensure_finite
from .layers import Conv2d, Dense, MaxPool2d, ReLU, Softmax, Tanh
from .network import (
    ARCHITECTURES,
    Network,
    UnsupportedNetworkError,
    digit_classifier,
    steering_regressor,
)
from .idx import (
    IdxFormatError,
    read_idx_images,
    read_idx_labels,
    write_idx_images,
    write_idx_labels,
)
from .weights import CorruptWeightsError, load_weights, save_weights
from .train import Dataset, TrainConfig, TrainingFailure, TrainReport, train

__all__ = [
    "FLOAT",
    "NonFiniteError",
    "ShapeMismatchError",
    "as_tensor",
    "ensure_finite",
    "Conv2d",
    "Dense",
    "MaxPool2d",
    "ReLU",
    "Softmax",
    "Tanh",
    "ARCHITECTURES",
    "Network",
    "UnsupportedNetworkError",
    "digit_classifier",
    "steering_regressor",
    "IdxFormatError",
    "read_idx_images",
    "read_idx_labels",
    "write_idx_images",
    "write_idx_labels",
    "CorruptWeightsError",
    "load_weights",
    "save_weights",
    "Dataset",
    "TrainConfig",
    "TrainingFailure",
    "TrainReport",
    "train",
]
