"""Trainer for complex-valued fully-connected classifiers."""

from .containers import read_vectors, read_weights, write_vectors, write_weights
from .data import (
    load_mnist_split,
    preprocess_audio_clip,
    preprocess_audiomnist_tree,
    synthetic_dataset,
)
from .model import Adam, ComplexMlp, softmax_cross_entropy, zc_phases
from .train import TrainingConfig, export_containers, train_model

__version__ = "0.1.0"
