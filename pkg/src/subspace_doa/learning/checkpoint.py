"""Model checkpoints and per-epoch metrics logs.

Checkpoint layout (little-endian)::

    magic        8 bytes  b"SLANET\\0\\0"
    version      uint32   CHECKPOINT_VERSION
    header_len   uint32   byte length of the JSON header
    header       UTF-8 JSON: version, spec_hash, mode, hidden, seed, N, M,
                 activation, n_params
    params       n_params x float64, layer by layer (W then b, row-major)
"""

import json
import struct

import numpy as np

from ..errors import FileFormatError
from .network import Network, NetworkSpec

MAGIC = b"SLANET\0\0"
CHECKPOINT_VERSION = 1
_HEAD = struct.Struct("<8sII")


def save_checkpoint(path, model):
    spec = model.spec
    flat = model.flat_params()
    header = {
        "version": CHECKPOINT_VERSION,
        "spec_hash": spec.digest(),
        "mode": spec.mode,
        "hidden": list(spec.hidden),
        "seed": spec.seed,
        "N": spec.N,
        "M": spec.M,
        "activation": spec.activation,
        "n_params": int(flat.size),
    }
    blob = json.dumps(header, sort_keys=True).encode("utf-8")
    with open(path, "wb") as fh:
        fh.write(_HEAD.pack(MAGIC, CHECKPOINT_VERSION, len(blob)))
        fh.write(blob)
        fh.write(flat.astype("<f8").tobytes())


def load_checkpoint(path):
    with open(path, "rb") as fh:
        data = fh.read()
    if len(data) < _HEAD.size:
        raise FileFormatError(f"{path}: truncated checkpoint")
    magic, version, hlen = _HEAD.unpack_from(data, 0)
    if magic != MAGIC:
        raise FileFormatError(f"{path}: not a checkpoint file")
    if version != CHECKPOINT_VERSION:
        raise FileFormatError(f"{path}: unsupported checkpoint version {version}")
    try:
        header = json.loads(data[_HEAD.size : _HEAD.size + hlen].decode("utf-8"))
    except (UnicodeDecodeError, json.JSONDecodeError) as exc:
        raise FileFormatError(f"{path}: corrupt checkpoint header") from exc
    if (len(data) - _HEAD.size - hlen) % 8:
        raise FileFormatError(f"{path}: truncated parameter block")
    spec = NetworkSpec(
        N=header["N"],
        M=header["M"],
        hidden=tuple(header["hidden"]),
        mode=header["mode"],
        seed=header["seed"],
        activation=header["activation"],
    )
    if spec.digest() != header["spec_hash"]:
        raise FileFormatError(f"{path}: header hash mismatch")
    flat = np.frombuffer(data, dtype="<f8", offset=_HEAD.size + hlen).astype(np.float64)
    if flat.size != header["n_params"]:
        raise FileFormatError(f"{path}: expected {header['n_params']} parameters, found {flat.size}")
    model = Network(spec)
    model.set_flat_params(flat)
    return model


class MetricsLog:
    """Appends one JSON object per epoch to a text file."""

    def __init__(self, path):
        self.path = path
        open(path, "w").close()

    def __call__(self, record):
        with open(self.path, "a") as fh:
            fh.write(json.dumps(record, sort_keys=True) + "\n")


def read_metrics(path):
    with open(path) as fh:
        return [json.loads(line) for line in fh if line.strip()]
