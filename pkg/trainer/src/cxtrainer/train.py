"""Training loop and command-line entry point.

Trains the complex-valued classifier with Adam (lr 1e-3, 100 epochs by
default), tracks test accuracy each epoch, and exports the best-scoring
weights in the shared container format.
"""

from __future__ import annotations

import argparse
import json
import sys
import time
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import containers, data
from .model import Adam, ComplexMlp

__all__ = ["TrainingConfig", "train_model", "main"]


@dataclass
class TrainingConfig:
    dims: list
    learning_rate: float = 1e-3
    epochs: int = 100
    batch_size: int = 128
    seed: int = 0
    log: list = field(default_factory=list)


def _batches(count: int, batch: int, rng):
    order = rng.permutation(count)
    for i in range(0, count, batch):
        yield order[i : i + batch]


def train_model(
    config: TrainingConfig,
    train_x: np.ndarray,
    train_y: np.ndarray,
    test_x: np.ndarray,
    test_y: np.ndarray,
    verbose: bool = True,
):
    """Returns (model-with-best-test-weights, per-epoch accuracy log)."""
    if train_x.shape[1] != config.dims[0]:
        raise ValueError(
            f"dims[0]={config.dims[0]} does not match input width "
            f"{train_x.shape[1]}"
        )
    model = ComplexMlp(config.dims, seed=config.seed)
    opt = Adam(model.weights, lr=config.learning_rate)
    rng = np.random.default_rng(config.seed + 1)
    best_acc, best_weights = -1.0, model.copy_weights()
    for epoch in range(config.epochs):
        losses = []
        for idx in _batches(train_x.shape[0], config.batch_size, rng):
            loss, grads = model.loss_and_grads(train_x[idx], train_y[idx])
            if not np.isfinite(loss):
                raise FloatingPointError(
                    f"training diverged at epoch {epoch} (loss {loss})"
                )
            opt.step(grads)
            losses.append(loss)
        acc = model.accuracy(test_x, test_y)
        config.log.append({"epoch": epoch, "loss": float(np.mean(losses)),
                           "test_accuracy": acc})
        if acc > best_acc:
            best_acc = acc
            best_weights = model.copy_weights()
        if verbose:
            print(
                f"epoch {epoch + 1:3d}/{config.epochs}  loss "
                f"{np.mean(losses):.4f}  test acc {acc * 100:.2f}%"
            )
    model.weights = best_weights
    return model, best_acc


def export_containers(model: ComplexMlp, weights_path, vectors=None,
                      labels=None, vectors_path=None) -> None:
    """Write the trained weights (float32) and optionally a vector set."""
    containers.write_weights(
        [w.astype(np.complex64) for w in model.weights], weights_path
    )
    if vectors is not None:
        containers.write_vectors(
            np.asarray(vectors).astype(np.complex64), labels, vectors_path
        )


def build_parser():
    p = argparse.ArgumentParser(prog="cxtrainer")
    p.add_argument("dataset", choices=["mnist", "audiomnist", "synthetic"])
    p.add_argument("--data-dir", help="IDX directory or WAV tree root")
    p.add_argument("--dims", default=None,
                   help="comma-separated layer sizes (defaults per dataset)")
    p.add_argument("--epochs", type=int, default=100)
    p.add_argument("--lr", type=float, default=1e-3)
    p.add_argument("--batch-size", type=int, default=128)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--limit", type=int, help="cap the training set size")
    p.add_argument("--weights-out", default="model.wts")
    p.add_argument("--vectors-out", help="also export the test set")
    p.add_argument("--log-out", help="write the per-epoch JSON log")
    return p


_DEFAULT_DIMS = {
    "mnist": [784, 300, 100, 10],
    "audiomnist": [4000, 300, 100, 10],
    "synthetic": [32, 16, 8, 4],
}


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    dims = (
        [int(d) for d in args.dims.split(",")]
        if args.dims else _DEFAULT_DIMS[args.dataset]
    )
    started = time.time()
    if args.dataset == "mnist":
        if not args.data_dir:
            print("mnist needs --data-dir with the IDX files", file=sys.stderr)
            return 2
        train_x, train_y = data.load_mnist_split(args.data_dir, train=True)
        test_x, test_y = data.load_mnist_split(args.data_dir, train=False)
    elif args.dataset == "audiomnist":
        if not args.data_dir:
            print("audiomnist needs --data-dir with the WAV tree", file=sys.stderr)
            return 2
        vectors, labels = data.preprocess_audiomnist_tree(args.data_dir)
        rng = np.random.default_rng(args.seed)
        order = rng.permutation(vectors.shape[0])
        split = int(0.9 * len(order))
        train_x, train_y = vectors[order[:split]], labels[order[:split]]
        test_x, test_y = vectors[order[split:]], labels[order[split:]]
    else:
        train_x, train_y = data.synthetic_dataset(2000, dims[0], dims[-1], args.seed)
        test_x, test_y = data.synthetic_dataset(
            500, dims[0], dims[-1], args.seed + 1
        )
    if args.limit:
        train_x, train_y = train_x[: args.limit], train_y[: args.limit]

    config = TrainingConfig(
        dims=dims, learning_rate=args.lr, epochs=args.epochs,
        batch_size=args.batch_size, seed=args.seed,
    )
    try:
        model, best = train_model(config, train_x, train_y, test_x, test_y)
    except FloatingPointError as exc:
        print(f"aborted: {exc}", file=sys.stderr)
        return 1
    export_containers(
        model, args.weights_out,
        vectors=test_x if args.vectors_out else None,
        labels=test_y if args.vectors_out else None,
        vectors_path=args.vectors_out,
    )
    if args.log_out:
        Path(args.log_out).write_text(json.dumps(config.log, indent=2) + "\n")
    print(
        f"best test accuracy {best * 100:.2f}% in {time.time() - started:.0f} s; "
        f"weights -> {args.weights_out}"
    )
    return 0


if __name__ == "__main__":
    sys.exit(main())
