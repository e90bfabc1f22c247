"""Array conventions and validation helpers.

All model math runs on float32 numpy arrays in row-major (C) order.
Images are (channels, height, width); batches prepend a leading axis.
NaN or inf anywhere is treated as a hard error, never propagated.
"""

import numpy as np

FLOAT = np.float32


class NonFiniteError(ValueError):
    """An operation produced NaN or inf."""


class ShapeMismatchError(ValueError):
    """Input shape does not match what the network expects."""


def as_tensor(data, shape=None):
    """Coerce to a float32, C-contiguous array and verify finiteness."""
    arr = np.ascontiguousarray(data, dtype=FLOAT)
    if shape is not None and tuple(arr.shape) != tuple(shape):
        raise ShapeMismatchError(f"expected shape {tuple(shape)}, got {arr.shape}")
    ensure_finite(arr, "as_tensor")
    return arr


def ensure_finite(arr, context=""):
    if not np.all(np.isfinite(arr)):
        raise NonFiniteError(f"non-finite values in {context or 'array'}")
    return arr
