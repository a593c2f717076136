"""Complex-valued fully-connected model runtime.

Hidden activations take the magnitude and re-phase it with the
constant-amplitude polyphase ramp, which keeps layer outputs spectrally
flat when they become the next layer's transmit vector; the last layer
keeps only the magnitude.  The analog path runs every layer's MVM through
the frequency-encoded pipeline.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import engine
from .containers import read_idx, read_weights
from .ofdm import zc_phasors

__all__ = [
    "ComplexFcModel",
    "activation_zc",
    "forward_digital",
    "forward_analog",
    "classify",
    "load_mnist",
    "load_model",
]


@dataclass
class ComplexFcModel:
    layers: list

    def __post_init__(self):
        self.layers = [np.asarray(w, dtype=np.complex128) for w in self.layers]
        if not self.layers:
            raise ValueError("model needs at least one layer")
        for a, b in zip(self.layers, self.layers[1:]):
            if a.shape[0] != b.shape[1]:
                raise ValueError(
                    f"layer chain mismatch: {a.shape} feeds {b.shape}"
                )
        for w in self.layers:
            if not np.all(np.isfinite(w)):
                raise ValueError("weights must be finite")

    @property
    def input_size(self) -> int:
        return self.layers[0].shape[1]

    @property
    def dims(self) -> list:
        return [w.shape for w in self.layers]


def load_model(path) -> ComplexFcModel:
    return ComplexFcModel(read_weights(path))


def activation_zc(y: np.ndarray, last_layer: bool = False) -> np.ndarray:
    """|y| re-phased with the length-M polyphase ramp; magnitude only on
    the last layer."""
    y = np.asarray(y)
    mag = np.abs(y)
    if last_layer:
        return mag
    return mag * zc_phasors(y.shape[-1])


def forward_digital(model: ComplexFcModel, x: np.ndarray) -> np.ndarray:
    """Exact layered matrix multiply; the reference for the analog path."""
    v = np.asarray(x, dtype=np.complex128)
    if v.shape != (model.input_size,):
        raise ValueError(
            f"input must have length {model.input_size}, got {v.shape}"
        )
    n_layers = len(model.layers)
    for i, w in enumerate(model.layers):
        y = w @ v
        v = activation_zc(y, last_layer=(i == n_layers - 1))
    return v


def forward_analog(
    model: ComplexFcModel,
    x: np.ndarray,
    scheme: str = "w-precode",
    fidelity: str = "symbolic",
    channel=None,
    snr_db: float | None = None,
    seed: int = 0,
    csi=None,
    frontend=None,
    block_output: int = 6,
    zero_pad: int = 1,
    cp_len: int | None = None,
) -> np.ndarray:
    """Run each layer's MVM through the frequency-encoded pipeline, with
    the activation computed digitally between layers."""
    v = np.asarray(x, dtype=np.complex128)
    if v.shape != (model.input_size,):
        raise ValueError(
            f"input must have length {model.input_size}, got {v.shape}"
        )
    n_layers = len(model.layers)
    for i, w in enumerate(model.layers):
        y = engine.run_mvm(
            w, v, scheme=scheme, fidelity=fidelity, channel=channel,
            snr_db=snr_db, seed=seed * n_layers + i, csi=csi,
            frontend=frontend, block_output=block_output, zero_pad=zero_pad,
            cp_len=cp_len,
        )
        v = activation_zc(y, last_layer=(i == n_layers - 1))
    return v


def classify(scores: np.ndarray) -> int:
    """Argmax class index; ties break toward the lowest index."""
    s = np.asarray(scores)
    if s.size == 0:
        raise ValueError("scores must be non-empty")
    return int(np.argmax(s))


def load_mnist(image_path, label_path) -> tuple[np.ndarray, np.ndarray]:
    """IDX images and labels to labeled complex model inputs.

    Pixels are scaled to [0, 1], flattened row-major, and modulated with
    the 784-point polyphase ramp.
    """
    images = read_idx(image_path)
    labels = read_idx(label_path)
    if images.ndim != 3:
        raise ValueError(f"expected an image tensor, got shape {images.shape}")
    if labels.shape != (images.shape[0],):
        raise ValueError(
            f"{labels.shape[0]} labels for {images.shape[0]} images"
        )
    flat = images.reshape(images.shape[0], -1).astype(np.float64) / 255.0
    phases = zc_phasors(flat.shape[1])
    return flat * phases[None, :], labels.astype(np.int64)
