"""Flat binary parameter checkpoints.

Layout: magic bytes ``DADRLCKPT``, little-endian u32 version, then one record
per tensor: u32 name length, UTF-8 name, u32 rank, u32 dims, float64
little-endian values in row-major order. Records run until EOF.
"""

from __future__ import annotations

import struct

import numpy as np

MAGIC = b"DADRLCKPT"
VERSION = 1


class CheckpointError(RuntimeError):
    pass


def save_checkpoint(path, tensors):
    """Write named arrays (dict preserving insertion order) to ``path``."""
    with open(path, "wb") as fh:
        fh.write(MAGIC)
        fh.write(struct.pack("<I", VERSION))
        for name, arr in tensors.items():
            # asarray keeps 0-d arrays 0-d; ascontiguousarray would not
            data = np.asarray(arr, dtype=np.float64, order="C")
            encoded = name.encode("utf-8")
            fh.write(struct.pack("<I", len(encoded)))
            fh.write(encoded)
            fh.write(struct.pack("<I", data.ndim))
            fh.write(struct.pack(f"<{data.ndim}I", *data.shape))
            fh.write(data.astype("<f8").tobytes(order="C"))


def load_checkpoint(path):
    """Read a checkpoint back into {name: float64 ndarray}."""
    with open(path, "rb") as fh:
        blob = fh.read()
    if blob[:len(MAGIC)] != MAGIC:
        raise CheckpointError(f"{path}: bad magic, not a checkpoint")
    (version,) = struct.unpack_from("<I", blob, len(MAGIC))
    if version != VERSION:
        raise CheckpointError(f"{path}: unsupported checkpoint version {version}")
    off = len(MAGIC) + 4
    out = {}
    while off < len(blob):
        (name_len,) = struct.unpack_from("<I", blob, off)
        off += 4
        name = blob[off:off + name_len].decode("utf-8")
        off += name_len
        (rank,) = struct.unpack_from("<I", blob, off)
        off += 4
        dims = struct.unpack_from(f"<{rank}I", blob, off)
        off += 4 * rank
        count = int(np.prod(dims)) if rank else 1
        arr = np.frombuffer(blob, dtype="<f8", count=count, offset=off)
        off += 8 * count
        out[name] = arr.reshape(dims).astype(np.float64)
    return out
