"""IDX container read/write (the classic big-endian image/label format).

Images use magic 0x00000803 (unsigned bytes, 3 dims), labels 0x00000801
(unsigned bytes, 1 dim).  Dimension sizes are 32-bit big-endian.  Reads
are bit-exact round trips of what was written.
"""

import struct

import numpy as np

IMAGE_MAGIC = 0x00000803
LABEL_MAGIC = 0x00000801


class IdxFormatError(ValueError):
    pass


def read_idx_images(path):
    """Load an IDX image file as a uint8 array (n, rows, cols)."""
    with open(path, "rb") as f:
        head = f.read(16)
        if len(head) < 16:
            raise IdxFormatError(f"{path}: truncated header")
        magic, n, rows, cols = struct.unpack(">IIII", head)
        if magic != IMAGE_MAGIC:
            raise IdxFormatError(f"{path}: bad image magic 0x{magic:08x}")
        data = f.read(n * rows * cols)
    if len(data) != n * rows * cols:
        raise IdxFormatError(f"{path}: truncated pixel data")
    return np.frombuffer(data, dtype=np.uint8).reshape(n, rows, cols)


def read_idx_labels(path):
    """Load an IDX label file as a uint8 vector."""
    with open(path, "rb") as f:
        head = f.read(8)
        if len(head) < 8:
            raise IdxFormatError(f"{path}: truncated header")
        magic, n = struct.unpack(">II", head)
        if magic != LABEL_MAGIC:
            raise IdxFormatError(f"{path}: bad label magic 0x{magic:08x}")
        data = f.read(n)
    if len(data) != n:
        raise IdxFormatError(f"{path}: truncated label data")
    return np.frombuffer(data, dtype=np.uint8)


def write_idx_images(path, images):
    images = np.asarray(images, dtype=np.uint8)
    if images.ndim != 3:
        raise IdxFormatError("images must be (n, rows, cols)")
    with open(path, "wb") as f:
        f.write(struct.pack(">IIII", IMAGE_MAGIC, *images.shape))
        f.write(images.tobytes(order="C"))


def write_idx_labels(path, labels):
    labels = np.asarray(labels, dtype=np.uint8)
    if labels.ndim != 1:
        raise IdxFormatError("labels must be a vector")
    with open(path, "wb") as f:
        f.write(struct.pack(">II", LABEL_MAGIC, labels.shape[0]))
        f.write(labels.tobytes(order="C"))
