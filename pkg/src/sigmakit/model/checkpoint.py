"""Versioned binary checkpoint: magic, JSON header, little-endian float64 tensors."""

from __future__ import annotations

import json
import os
import struct
from pathlib import Path

import numpy as np

MAGIC = b"SGMACKPT"
VERSION = 1


class CheckpointError(ValueError):
    """The file is not a readable checkpoint of this version."""


def save_checkpoint(path: str | Path, params: dict[str, np.ndarray], header: dict) -> None:
    """Write atomically (temp file then rename) so a crash keeps the old file."""
    meta = dict(header)
    meta["tensors"] = [[name, list(arr.shape)] for name, arr in params.items()]
    blob = json.dumps(meta, sort_keys=True).encode("utf-8")
    path = Path(path)
    tmp = path.with_name(path.name + ".tmp")
    with open(tmp, "wb") as fh:
        fh.write(MAGIC)
        fh.write(struct.pack("<II", VERSION, len(blob)))
        fh.write(blob)
        for arr in params.values():
            fh.write(np.ascontiguousarray(arr, dtype="<f8").tobytes())
    os.replace(tmp, path)


def load_checkpoint(path: str | Path) -> tuple[dict[str, np.ndarray], dict]:
    """Return ``(params, header)``; tensors come back as float64."""
    data = Path(path).read_bytes()
    if data[:len(MAGIC)] != MAGIC:
        raise CheckpointError(f"{path}: bad magic")
    version, size = struct.unpack_from("<II", data, len(MAGIC))
    if version != VERSION:
        raise CheckpointError(f"{path}: unsupported version {version}")
    start = len(MAGIC) + 8
    header = json.loads(data[start:start + size].decode("utf-8"))
    offset = start + size
    params: dict[str, np.ndarray] = {}
    for name, shape in header.pop("tensors"):
        count = int(np.prod(shape)) if shape else 1
        arr = np.frombuffer(data, dtype="<f8", count=count, offset=offset).reshape(shape)
        params[name] = arr.astype(np.float64)
        offset += 8 * count
    if offset != len(data):
        raise CheckpointError(f"{path}: {len(data) - offset} trailing bytes")
    return params, header
