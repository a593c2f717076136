"""Generate the committed inference fixtures: a randomly initialized
16-8-4 complex model and 32 synthetic labeled vectors, in the shared
container formats.  Rerunning reproduces the same bytes."""

import pathlib
import sys

import numpy as np

sys.path.insert(0, str(pathlib.Path(__file__).resolve().parents[1] / "src"))

from rfmvm.containers import write_vectors, write_weights  # noqa: E402
from rfmvm.ofdm import zc_phasors  # noqa: E402


def main():
    out = pathlib.Path(__file__).resolve().parents[1] / "tests" / "fixtures"
    out.mkdir(parents=True, exist_ok=True)
    rng = np.random.default_rng(0xF1C5)

    dims = [(8, 16), (4, 8)]
    layers = []
    for m, n in dims:
        w = rng.standard_normal((m, n)) + 1j * rng.standard_normal((m, n))
        layers.append((w / np.sqrt(n)).astype(np.complex64))
    # make it three layers: 16-8-4 needs two matrices; add a square front
    front = (rng.standard_normal((16, 16)) + 1j * rng.standard_normal((16, 16)))
    layers.insert(0, (front / 4.0).astype(np.complex64))
    write_weights(layers, out / "model_16_8_4.wts")

    count, dim = 32, 16
    amps = rng.uniform(0.0, 1.0, (count, dim))
    vectors = amps * zc_phasors(dim)[None, :]
    labels = rng.integers(0, 4, count)
    write_vectors(vectors.astype(np.complex64), labels, out / "vectors_16.vec")
    print(f"wrote fixtures to {out}")


if __name__ == "__main__":
    main()
