"""Binary container formats for model weights and labeled vectors, plus
IDX image/label ingestion.

WISEWTS1: magic, u32-LE layer count, then per layer u32-LE rows and cols
followed by row-major complex64 entries (interleaved little-endian f32).
WISEVEC1: magic, u32-LE record count, u32-LE dim, then per record one u8
label and dim complex64 entries.  All sizes must match the payload
exactly; violations raise distinct error types.
"""

from __future__ import annotations

import gzip
import struct
from pathlib import Path

import numpy as np

from .errors import BadMagicError, SizeMismatchError, TruncatedFileError

__all__ = [
    "WEIGHTS_MAGIC",
    "VECTORS_MAGIC",
    "write_weights",
    "read_weights",
    "write_vectors",
    "read_vectors",
    "read_idx",
]

WEIGHTS_MAGIC = b"WISEWTS1"
VECTORS_MAGIC = b"WISEVEC1"


def _u32(value: int) -> bytes:
    return struct.pack("<I", value)


class _Reader:
    def __init__(self, data: bytes, what: str):
        self.data = data
        self.pos = 0
        self.what = what

    def take(self, n: int) -> bytes:
        if self.pos + n > len(self.data):
            raise TruncatedFileError(
                f"{self.what}: needed {n} bytes at offset {self.pos}, "
                f"file has {len(self.data)}"
            )
        out = self.data[self.pos : self.pos + n]
        self.pos += n
        return out

    def u32(self) -> int:
        return struct.unpack("<I", self.take(4))[0]

    def done(self):
        if self.pos != len(self.data):
            raise SizeMismatchError(
                f"{self.what}: {len(self.data) - self.pos} trailing bytes "
                "beyond the declared payload"
            )


def write_weights(layers, path) -> None:
    """Serialize a list of complex matrices."""
    chunks = [WEIGHTS_MAGIC, _u32(len(list(layers)))]
    for w in layers:
        w = np.asarray(w)
        if w.ndim != 2:
            raise ValueError(f"layers must be matrices, got shape {w.shape}")
        m, n = w.shape
        chunks.append(_u32(m))
        chunks.append(_u32(n))
        chunks.append(np.ascontiguousarray(w, dtype="<c8").tobytes())
    Path(path).write_bytes(b"".join(chunks))


def read_weights(path) -> list[np.ndarray]:
    data = Path(path).read_bytes()
    r = _Reader(data, f"weights container {path}")
    magic = r.take(8)
    if magic != WEIGHTS_MAGIC:
        raise BadMagicError(
            f"{path}: expected magic {WEIGHTS_MAGIC!r}, found {magic!r}"
        )
    count = r.u32()
    layers = []
    for _ in range(count):
        m = r.u32()
        n = r.u32()
        raw = r.take(8 * m * n)
        layers.append(
            np.frombuffer(raw, dtype="<c8").reshape(m, n).astype(np.complex128)
        )
    r.done()
    return layers


def write_vectors(vectors: np.ndarray, labels, path) -> None:
    """Serialize labeled complex vectors (records x dim)."""
    v = np.asarray(vectors)
    lab = np.asarray(labels, dtype=np.uint8)
    if v.ndim != 2 or lab.shape != (v.shape[0],):
        raise ValueError(
            f"need records x dim vectors with one label each, got "
            f"{v.shape} and {lab.shape}"
        )
    chunks = [VECTORS_MAGIC, _u32(v.shape[0]), _u32(v.shape[1])]
    rows = np.ascontiguousarray(v, dtype="<c8")
    for i in range(v.shape[0]):
        chunks.append(bytes([lab[i]]))
        chunks.append(rows[i].tobytes())
    Path(path).write_bytes(b"".join(chunks))


def read_vectors(path) -> tuple[np.ndarray, np.ndarray]:
    data = Path(path).read_bytes()
    r = _Reader(data, f"vector container {path}")
    magic = r.take(8)
    if magic != VECTORS_MAGIC:
        raise BadMagicError(
            f"{path}: expected magic {VECTORS_MAGIC!r}, found {magic!r}"
        )
    count = r.u32()
    dim = r.u32()
    expected = 16 + count * (1 + 8 * dim)
    if len(data) != expected:
        if len(data) < expected:
            raise TruncatedFileError(
                f"{path}: declared {count} records of dim {dim} need "
                f"{expected} bytes, file has {len(data)}"
            )
        raise SizeMismatchError(
            f"{path}: declared sizes need {expected} bytes, file has {len(data)}"
        )
    labels = np.empty(count, dtype=np.uint8)
    vectors = np.empty((count, dim), dtype=np.complex128)
    for i in range(count):
        labels[i] = r.take(1)[0]
        vectors[i] = np.frombuffer(r.take(8 * dim), dtype="<c8")
    r.done()
    return vectors, labels


_IDX_IMAGES = 0x00000803
_IDX_LABELS = 0x00000801


def _read_maybe_gzip(path) -> bytes:
    raw = Path(path).read_bytes()
    if raw[:2] == b"\x1f\x8b":
        return gzip.decompress(raw)
    return raw


def read_idx(path) -> np.ndarray:
    """Read an IDX file (big-endian magic 0x803 for images, 0x801 for
    labels), transparently gunzipping."""
    data = _read_maybe_gzip(path)
    if len(data) < 4:
        raise TruncatedFileError(f"{path}: too short for an IDX header")
    magic = struct.unpack(">I", data[:4])[0]
    if magic == _IDX_IMAGES:
        ndim = 3
    elif magic == _IDX_LABELS:
        ndim = 1
    else:
        raise BadMagicError(f"{path}: unknown IDX magic 0x{magic:08x}")
    header = 4 + 4 * ndim
    if len(data) < header:
        raise TruncatedFileError(f"{path}: IDX header truncated")
    dims = struct.unpack(f">{ndim}I", data[4:header])
    count = int(np.prod(dims))
    if len(data) != header + count:
        raise SizeMismatchError(
            f"{path}: dims {dims} need {count} payload bytes, "
            f"found {len(data) - header}"
        )
    return np.frombuffer(data, dtype=np.uint8, offset=header).reshape(dims)
