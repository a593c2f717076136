"""Dataset ingestion: MNIST IDX files, AudioMNIST WAV trees, and a
synthetic separable dataset for smoke runs without any downloads."""

from __future__ import annotations

import gzip
import struct
import warnings
from pathlib import Path

import numpy as np
from scipy.io import wavfile
from scipy.signal import resample_poly

from .model import zc_phases

__all__ = [
    "load_idx",
    "load_mnist_split",
    "preprocess_audio_clip",
    "preprocess_audiomnist_tree",
    "synthetic_dataset",
]

AUDIO_TARGET_RATE = 8000
AUDIO_SAMPLES = 4000          # middle 0.5 s at 8 kHz
AUDIO_WINDOW = 20             # samples per transform window
AUDIO_WINDOWS = AUDIO_SAMPLES // AUDIO_WINDOW


def load_idx(path) -> np.ndarray:
    raw = Path(path).read_bytes()
    if raw[:2] == b"\x1f\x8b":
        raw = gzip.decompress(raw)
    magic = struct.unpack(">I", raw[:4])[0]
    if magic == 0x803:
        count, rows, cols = struct.unpack(">III", raw[4:16])
        return np.frombuffer(raw, np.uint8, offset=16).reshape(count, rows, cols)
    if magic == 0x801:
        count = struct.unpack(">I", raw[4:8])[0]
        return np.frombuffer(raw, np.uint8, offset=8, count=count)
    raise ValueError(f"{path}: unknown IDX magic 0x{magic:08x}")


def _find_idx(directory: Path, stem: str) -> Path:
    for suffix in ("", ".gz"):
        p = directory / (stem + suffix)
        if p.exists():
            return p
    raise FileNotFoundError(f"{stem}[.gz] not found under {directory}")


def load_mnist_split(directory, train: bool = True):
    """Pixels scaled to [0,1], flattened, and modulated by the 784-point
    polyphase ramp; returns (vectors, labels)."""
    directory = Path(directory)
    prefix = "train" if train else "t10k"
    images = load_idx(_find_idx(directory, f"{prefix}-images-idx3-ubyte"))
    labels = load_idx(_find_idx(directory, f"{prefix}-labels-idx1-ubyte"))
    flat = images.reshape(images.shape[0], -1).astype(np.float64) / 255.0
    mod = np.exp(1j * zc_phases(flat.shape[1]))
    return flat * mod[None, :], labels.astype(np.int64)


def preprocess_audio_clip(samples: np.ndarray, rate: int) -> np.ndarray | None:
    """One clip to a 4000-dimensional complex vector.

    Downsample to 8 kHz, keep the middle half second, take the magnitudes
    of 200 non-overlapping 20-sample transforms, and modulate the
    concatenation with the 4000-point polyphase ramp.  Returns None (with
    a warning) for clips shorter than half a second.
    """
    x = np.asarray(samples, dtype=np.float64)
    if x.ndim > 1:
        x = x.mean(axis=1)
    if rate != AUDIO_TARGET_RATE:
        if rate % AUDIO_TARGET_RATE == 0:
            x = resample_poly(x, 1, rate // AUDIO_TARGET_RATE)
        else:
            x = resample_poly(x, AUDIO_TARGET_RATE, rate)
    if x.shape[0] < AUDIO_SAMPLES:
        warnings.warn(
            f"clip of {x.shape[0]} samples is shorter than 0.5 s after "
            "downsampling; skipped"
        )
        return None
    start = (x.shape[0] - AUDIO_SAMPLES) // 2
    x = x[start : start + AUDIO_SAMPLES]
    frames = x.reshape(AUDIO_WINDOWS, AUDIO_WINDOW)
    spectra = np.abs(np.fft.fft(frames, axis=1))
    flat = spectra.reshape(-1)
    return flat * np.exp(1j * zc_phases(AUDIO_SAMPLES))


def preprocess_audiomnist_tree(root):
    """Walk a directory of <digit>_<speaker>_<take>.wav clips."""
    root = Path(root)
    vectors, labels = [], []
    for wav in sorted(root.rglob("*.wav")):
        rate, samples = wavfile.read(wav)
        vec = preprocess_audio_clip(samples, rate)
        if vec is None:
            continue
        vectors.append(vec)
        labels.append(int(wav.name.split("_")[0]))
    if not vectors:
        raise FileNotFoundError(f"no usable .wav clips under {root}")
    return np.stack(vectors), np.asarray(labels, dtype=np.int64)


def synthetic_dataset(
    count: int,
    dim: int,
    classes: int,
    seed: int = 0,
    spread: float = 0.15,
    template_seed: int = 0xC1A55,
):
    """Separable synthetic task: class templates plus noise on the
    amplitudes, magnitude-encoded like the real pipelines.

    Templates come from ``template_seed`` so differently-seeded draws
    (train/test splits) share the same classes.
    """
    templates = np.random.default_rng(template_seed).uniform(
        0.0, 1.0, (classes, dim)
    )
    rng = np.random.default_rng(seed)
    labels = rng.integers(0, classes, count)
    amps = templates[labels] + spread * rng.standard_normal((count, dim))
    mod = np.exp(1j * zc_phases(dim))
    return np.abs(amps) * mod[None, :], labels.astype(np.int64)
