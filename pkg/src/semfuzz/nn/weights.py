"""Weights file: text header with a layer manifest, then raw float32 data.

Layout:
    line 1   magic + format version ("semfuzz-weights 1")
    line 2   network line: kind, input shape, output count
    line 3.. one line per layer: type and constructor arguments, plus the
             shapes of its parameter arrays
    "---"    separator
    body     little-endian float32 arrays, concatenated in manifest order

Round trips restore bit-identical parameters.  Truncated or edited files
fail with CorruptWeightsError; loading against a mismatching expected
architecture fails with ShapeMismatchError.
"""

import numpy as np

from .layers import Conv2d, Dense, MaxPool2d, ReLU, Softmax, Tanh
from .network import Network
from .tensor import ShapeMismatchError

MAGIC = "semfuzz-weights"
VERSION = 1

_SEPARATOR = b"---\n"


class CorruptWeightsError(ValueError):
    pass


def _layer_line(layer):
    if isinstance(layer, Conv2d):
        kh, kw = layer.kernel
        return (
            f"conv2d in={layer.in_channels} out={layer.out_channels} "
            f"kh={kh} kw={kw} stride={layer.stride}"
        )
    if isinstance(layer, MaxPool2d):
        return f"maxpool size={layer.size}"
    if isinstance(layer, Dense):
        return f"dense in={layer.in_features} out={layer.out_features}"
    if isinstance(layer, ReLU):
        return "relu"
    if isinstance(layer, Tanh):
        return "tanh"
    if isinstance(layer, Softmax):
        return "softmax"
    raise TypeError(f"unknown layer {type(layer).__name__}")


def _layer_from_line(line):
    parts = line.split()
    name, kv = parts[0], dict(p.split("=", 1) for p in parts[1:])
    if name == "conv2d":
        return Conv2d(
            int(kv["in"]), int(kv["out"]), (int(kv["kh"]), int(kv["kw"])),
            stride=int(kv["stride"]),
        )
    if name == "maxpool":
        return MaxPool2d(int(kv["size"]))
    if name == "dense":
        return Dense(int(kv["in"]), int(kv["out"]))
    if name == "relu":
        return ReLU()
    if name == "tanh":
        return Tanh()
    if name == "softmax":
        return Softmax()
    raise CorruptWeightsError(f"unknown layer type {name!r}")


def manifest_lines(net):
    meta = " ".join(
        f"{k}={net.metadata[k]}" for k in sorted(net.metadata) if _is_scalar(net.metadata[k])
    )
    lines = [
        f"{MAGIC} {VERSION}",
        f"network kind={net.kind} input={'x'.join(map(str, net.input_shape))} "
        f"outputs={net.n_outputs}" + (f" {meta}" if meta else ""),
    ]
    lines.extend(_layer_line(l) for l in net.layers)
    return lines


def _is_scalar(v):
    return isinstance(v, (int, float, str)) and " " not in str(v)


def save_weights(net, path):
    header = "\n".join(manifest_lines(net)) + "\n"
    with open(path, "wb") as f:
        f.write(header.encode("ascii"))
        f.write(_SEPARATOR)
        for p in net.parameters():
            f.write(np.asarray(p, dtype="<f4").tobytes(order="C"))


def load_weights(path, expect=None):
    """Rebuild a Network from ``path``.

    ``expect`` may be another Network (or its manifest lines); a manifest
    disagreement raises ShapeMismatchError, e.g. loading classifier
    weights into a regressor architecture.
    """
    with open(path, "rb") as f:
        blob = f.read()
    sep = blob.find(_SEPARATOR)
    if sep < 0:
        raise CorruptWeightsError(f"{path}: missing header separator")
    try:
        header = blob[:sep].decode("ascii").strip().splitlines()
    except UnicodeDecodeError as e:
        raise CorruptWeightsError(f"{path}: undecodable header") from e
    if len(header) < 2:
        raise CorruptWeightsError(f"{path}: incomplete header")
    magic = header[0].split()
    if magic[0] != MAGIC or int(magic[1]) != VERSION:
        raise CorruptWeightsError(f"{path}: bad magic/version {header[0]!r}")
    netline = dict(p.split("=", 1) for p in header[1].split()[1:])
    input_shape = tuple(int(d) for d in netline.pop("input").split("x"))
    kind = netline.pop("kind")
    n_outputs = int(netline.pop("outputs"))
    layers = [_layer_from_line(l) for l in header[2:]]
    net = Network(layers, input_shape, kind, n_outputs, metadata=netline)

    if expect is not None:
        want = expect if isinstance(expect, list) else manifest_lines(expect)
        got = manifest_lines(net)
        if want[1:] != got[1:]:
            raise ShapeMismatchError(
                f"{path}: stored architecture does not match the expected one"
            )

    body = blob[sep + len(_SEPARATOR):]
    offset = 0
    for p in net.parameters():
        nbytes = p.size * 4
        chunk = body[offset : offset + nbytes]
        if len(chunk) != nbytes:
            raise CorruptWeightsError(f"{path}: truncated parameter data")
        p[...] = np.frombuffer(chunk, dtype="<f4").reshape(p.shape)
        offset += nbytes
    if offset != len(body):
        raise CorruptWeightsError(f"{path}: trailing bytes after parameters")
    return net
