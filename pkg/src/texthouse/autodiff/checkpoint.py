"""Flat binary parameter container plus a JSON hyperparameter manifest.

Layout: magic, format version, record count, then per record a
length-prefixed UTF-8 name, the shape, and a little-endian float64
payload.  The manifest lives next to the container as ``<stem>.json``.
"""

from __future__ import annotations

import hashlib
import json
import struct
from pathlib import Path

import numpy as np

MAGIC = b"THTENSOR"
VERSION = 1


class CheckpointError(RuntimeError):
    pass


def save_checkpoint(path, named_params: dict, hyperparams: dict | None = None) -> None:
    path = Path(path)
    with open(path, "wb") as fh:
        fh.write(MAGIC)
        fh.write(struct.pack("<II", VERSION, len(named_params)))
        for name, tensor in named_params.items():
            data = np.ascontiguousarray(tensor.data, dtype="<f8")
            raw_name = name.encode("utf-8")
            fh.write(struct.pack("<H", len(raw_name)))
            fh.write(raw_name)
            fh.write(struct.pack("<B", data.ndim))
            fh.write(struct.pack(f"<{data.ndim}I", *data.shape))
            fh.write(data.tobytes())
    manifest = path.with_suffix(".json")
    with open(manifest, "w", encoding="utf-8") as fh:
        json.dump(hyperparams or {}, fh, indent=2, sort_keys=True)
        fh.write("\n")


def load_checkpoint(path):
    """Returns (dict name -> ndarray, hyperparams dict)."""
    path = Path(path)
    with open(path, "rb") as fh:
        if fh.read(len(MAGIC)) != MAGIC:
            raise CheckpointError(f"{path} is not a parameter container")
        version, count = struct.unpack("<II", fh.read(8))
        if version != VERSION:
            raise CheckpointError(f"unsupported container version {version}")
        params = {}
        for _ in range(count):
            (name_len,) = struct.unpack("<H", fh.read(2))
            name = fh.read(name_len).decode("utf-8")
            (ndim,) = struct.unpack("<B", fh.read(1))
            shape = struct.unpack(f"<{ndim}I", fh.read(4 * ndim))
            n = int(np.prod(shape)) if shape else 1
            data = np.frombuffer(fh.read(8 * n), dtype="<f8").reshape(shape).copy()
            params[name] = data
    manifest = path.with_suffix(".json")
    hyper = {}
    if manifest.exists():
        with open(manifest, encoding="utf-8") as fh:
            hyper = json.load(fh)
    return params, hyper


def checkpoint_checksum(path) -> str:
    h = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(1 << 20), b""):
            h.update(chunk)
    return h.hexdigest()
