"""Classify with a complex-valued model whose layers run through the
frequency-encoded MVM pipeline.

Uses the committed 16-8-4 fixture model and synthetic vectors; point the
environment at real exported containers to rerun on trained weights.
"""

import os
from pathlib import Path

from rfmvm import bench, containers, inference

fixtures = Path(__file__).resolve().parents[1] / "tests" / "fixtures"
model_path = os.environ.get("RFMVM_MODEL", fixtures / "model_16_8_4.wts")
vectors_path = os.environ.get("RFMVM_VECTORS", fixtures / "vectors_16.vec")

model = inference.load_model(model_path)
vectors, labels = containers.read_vectors(vectors_path)
print(f"model layers: {model.dims}, {vectors.shape[0]} vectors\n")

digital = bench.classify_accuracy(model, vectors, labels, digital=True)
print(f"digital reference accuracy: {digital * 100:.1f}%")

for snr in (10.0, 15.0, 25.0, 40.0):
    acc = bench.classify_accuracy(
        model, vectors, labels, scheme="w-precode", snr_db=snr, seed=0
    )
    print(f"in-physics pipeline at {snr:4.0f} dB SNR: {acc * 100:.1f}%")
