"""Writers and readers for the shared binary container formats.

This is an independent implementation of the interchange format (magic
"WISEWTS1" for weights, "WISEVEC1" for labeled vectors): 8 magic bytes,
little-endian u32 counts/dims, and interleaved little-endian float32
complex payloads, row-major.
"""

from __future__ import annotations

import struct
from pathlib import Path

import numpy as np

WEIGHTS_MAGIC = b"WISEWTS1"
VECTORS_MAGIC = b"WISEVEC1"


def write_weights(layers, path) -> None:
    chunks = [WEIGHTS_MAGIC, struct.pack("<I", len(list(layers)))]
    for w in layers:
        w = np.asarray(w)
        chunks.append(struct.pack("<II", w.shape[0], w.shape[1]))
        chunks.append(np.ascontiguousarray(w, dtype="<c8").tobytes())
    Path(path).write_bytes(b"".join(chunks))


def read_weights(path):
    data = Path(path).read_bytes()
    if data[:8] != WEIGHTS_MAGIC:
        raise ValueError(f"{path}: bad weights magic {data[:8]!r}")
    count = struct.unpack("<I", data[8:12])[0]
    pos = 12
    layers = []
    for _ in range(count):
        m, n = struct.unpack("<II", data[pos : pos + 8])
        pos += 8
        nbytes = 8 * m * n
        layers.append(
            np.frombuffer(data[pos : pos + nbytes], dtype="<c8").reshape(m, n)
            .astype(np.complex128)
        )
        pos += nbytes
    if pos != len(data):
        raise ValueError(f"{path}: {len(data) - pos} unexpected trailing bytes")
    return layers


def write_vectors(vectors, labels, path) -> None:
    v = np.asarray(vectors)
    lab = np.asarray(labels, dtype=np.uint8)
    chunks = [VECTORS_MAGIC, struct.pack("<II", v.shape[0], v.shape[1])]
    rows = np.ascontiguousarray(v, dtype="<c8")
    for i in range(v.shape[0]):
        chunks.append(bytes([lab[i]]))
        chunks.append(rows[i].tobytes())
    Path(path).write_bytes(b"".join(chunks))


def read_vectors(path):
    data = Path(path).read_bytes()
    if data[:8] != VECTORS_MAGIC:
        raise ValueError(f"{path}: bad vectors magic {data[:8]!r}")
    count, dim = struct.unpack("<II", data[8:16])
    expected = 16 + count * (1 + 8 * dim)
    if len(data) != expected:
        raise ValueError(f"{path}: expected {expected} bytes, found {len(data)}")
    labels = np.empty(count, dtype=np.uint8)
    vectors = np.empty((count, dim), dtype=np.complex128)
    pos = 16
    for i in range(count):
        labels[i] = data[pos]
        pos += 1
        vectors[i] = np.frombuffer(data[pos : pos + 8 * dim], dtype="<c8")
        pos += 8 * dim
    return vectors, labels
