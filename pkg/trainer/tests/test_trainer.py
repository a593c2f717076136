import os
import warnings
from pathlib import Path

import numpy as np
import pytest

from cxtrainer import containers, data
from cxtrainer.model import Adam, ComplexMlp, softmax_cross_entropy, zc_phases
from cxtrainer.train import TrainingConfig, export_containers, train_model


class TestGradients:
    def test_matches_central_finite_differences(self):
        # tiny 4-3-2 model, step 1e-4, max relative error <= 1e-4
        rng = np.random.default_rng(0)
        model = ComplexMlp([4, 3, 2], seed=1)
        x = rng.standard_normal((5, 4)) + 1j * rng.standard_normal((5, 4))
        labels = rng.integers(0, 2, 5)
        _, grads = model.loss_and_grads(x, labels)

        def loss_at():
            scores = model.forward(x)
            return softmax_cross_entropy(scores, labels)[0]

        step = 1e-4
        worst = 0.0
        for li, w in enumerate(model.weights):
            for idx in np.ndindex(w.shape):
                for part, delta in (("re", step), ("im", 1j * step)):
                    w[idx] += delta
                    up = loss_at()
                    w[idx] -= 2 * delta
                    down = loss_at()
                    w[idx] += delta
                    numeric = (up - down) / (2 * step)
                    analytic = (
                        grads[li][idx].real if part == "re" else grads[li][idx].imag
                    )
                    scale = max(abs(numeric), abs(analytic), 1e-6)
                    worst = max(worst, abs(numeric - analytic) / scale)
        assert worst <= 1e-4

    def test_softmax_gradient_rows_sum_to_zero(self):
        rng = np.random.default_rng(1)
        scores = rng.standard_normal((6, 4))
        labels = rng.integers(0, 4, 6)
        _, g = softmax_cross_entropy(scores, labels)
        assert np.allclose(g.sum(axis=1), 0.0, atol=1e-12)


class TestTraining:
    def test_synthetic_smoke_run_beats_chance(self):
        # one epoch on 1000 samples clears the 4-class chance level
        train_x, train_y = data.synthetic_dataset(1000, 32, 4, seed=3)
        test_x, test_y = data.synthetic_dataset(300, 32, 4, seed=4)
        config = TrainingConfig(dims=[32, 16, 4], epochs=1, seed=5)
        _, best = train_model(
            config, train_x, train_y, test_x, test_y, verbose=False
        )
        assert best > 0.35

    def test_seed_deterministic(self):
        train_x, train_y = data.synthetic_dataset(400, 16, 4, seed=6)
        test_x, test_y = data.synthetic_dataset(100, 16, 4, seed=7)
        runs = []
        for _ in range(2):
            config = TrainingConfig(dims=[16, 8, 4], epochs=2, seed=9)
            model, _ = train_model(
                config, train_x, train_y, test_x, test_y, verbose=False
            )
            runs.append([w.copy() for w in model.weights])
        for a, b in zip(*runs):
            assert np.array_equal(a, b)

    def test_divergence_aborts(self):
        train_x, train_y = data.synthetic_dataset(64, 8, 2, seed=10)
        config = TrainingConfig(dims=[8, 2], epochs=1, seed=0)
        bad = train_x.copy()
        bad[0, 0] = np.nan
        with np.errstate(invalid="ignore"):
            with pytest.raises(FloatingPointError):
                train_model(config, bad, train_y, bad, train_y, verbose=False)


class TestAudioPreprocessing:
    def test_silent_clip_is_zero_vector(self):
        vec = data.preprocess_audio_clip(np.zeros(48_000), 48_000)
        assert vec.shape == (4000,)
        assert np.allclose(vec, 0.0)

    def test_bin_centered_tone_concentrates_per_window(self):
        # 1.2 kHz is exactly bin 3 of a 20-point transform at 8 kHz, so
        # every window peaks there (conjugate image at bin 17)
        rate = 48_000
        t = np.arange(rate) / rate
        clip = np.sin(2 * np.pi * 1200.0 * t)
        vec = data.preprocess_audio_clip(clip, rate)
        mags = np.abs(vec).reshape(200, 20)
        assert np.all(np.isin(np.argmax(mags, axis=1), (3, 17)))
        energy = mags**2
        assert np.all(
            (energy[:, 3] + energy[:, 17]) / energy.sum(axis=1) > 0.95
        )

    def test_off_grid_tone_straddles_neighboring_bins(self):
        # 1 kHz falls between bins 2 and 3 (400 Hz spacing); the analytic
        # transform says those two (and their images) carry the energy
        rate = 48_000
        t = np.arange(rate) / rate
        clip = np.sin(2 * np.pi * 1000.0 * t)
        vec = data.preprocess_audio_clip(clip, rate)
        mags = np.abs(vec).reshape(200, 20)
        assert np.all(np.isin(np.argmax(mags, axis=1), (2, 3, 17, 18)))
        energy = mags**2
        share = energy[:, [2, 3, 17, 18]].sum(axis=1) / energy.sum(axis=1)
        assert np.all(share > 0.8)

    def test_output_dimension_is_4000(self):
        rng = np.random.default_rng(11)
        vec = data.preprocess_audio_clip(rng.standard_normal(48_000), 48_000)
        assert vec.shape == (4000,)

    def test_short_clip_skipped_with_warning(self):
        with pytest.warns(UserWarning):
            out = data.preprocess_audio_clip(np.zeros(10_000), 48_000)
        assert out is None


class TestExport:
    def test_reexport_idempotent(self, tmp_path):
        model = ComplexMlp([8, 4, 2], seed=12)
        p1, p2 = tmp_path / "a.wts", tmp_path / "b.wts"
        export_containers(model, p1)
        layers = containers.read_weights(p1)
        containers.write_weights(
            [w.astype(np.complex64) for w in layers], p2
        )
        assert p1.read_bytes() == p2.read_bytes()

    def test_vectors_roundtrip(self, tmp_path):
        vx, vy = data.synthetic_dataset(12, 8, 3, seed=13)
        p = tmp_path / "v.vec"
        containers.write_vectors(vx.astype(np.complex64), vy, p)
        back_x, back_y = containers.read_vectors(p)
        assert np.array_equal(back_y, vy)
        assert np.allclose(back_x, vx.astype(np.complex64))


class TestCrossImplementation:
    """The exported bytes are the interface to the inference runtime."""

    def test_runtime_reads_trainer_weights(self, tmp_path):
        rfmvm_inference = pytest.importorskip("rfmvm.inference")
        model = ComplexMlp([8, 4, 2], seed=14)
        path = tmp_path / "m.wts"
        export_containers(model, path)
        runtime_model = rfmvm_inference.load_model(path)
        rng = np.random.default_rng(15)
        x = rng.standard_normal(8) + 1j * rng.standard_normal(8)
        theirs = rfmvm_inference.forward_digital(runtime_model, x)
        ours = model.forward(x[None, :])[0]
        assert np.max(np.abs(theirs - ours)) / np.max(np.abs(ours)) <= 1e-4

    def test_runtime_rejects_corrupted_export(self, tmp_path):
        from rfmvm import containers as runtime_containers
        from rfmvm.errors import ContainerError

        model = ComplexMlp([4, 2], seed=16)
        path = tmp_path / "m.wts"
        export_containers(model, path)
        blob = bytearray(path.read_bytes())
        blob[3] = 0xFF
        path.write_bytes(bytes(blob))
        with pytest.raises(ContainerError):
            runtime_containers.read_weights(path)

    def test_vector_container_cross_read(self, tmp_path):
        from rfmvm import containers as runtime_containers

        vx, vy = data.synthetic_dataset(6, 5, 2, seed=17)
        path = tmp_path / "v.vec"
        containers.write_vectors(vx.astype(np.complex64), vy, path)
        got_x, got_y = runtime_containers.read_vectors(path)
        assert np.array_equal(got_y, vy)
        assert np.allclose(got_x, vx.astype(np.complex64))


class TestEndToEndSynthetic:
    def test_trained_weights_classify_through_the_pipeline(self, tmp_path):
        bench = pytest.importorskip("rfmvm.bench")
        rfmvm_inference = pytest.importorskip("rfmvm.inference")

        train_x, train_y = data.synthetic_dataset(1500, 32, 4, seed=20)
        test_x, test_y = data.synthetic_dataset(200, 32, 4, seed=21)
        config = TrainingConfig(dims=[32, 16, 4], epochs=15, seed=22)
        model, best = train_model(
            config, train_x, train_y, test_x, test_y, verbose=False
        )
        assert best >= 0.9
        export_containers(
            model, tmp_path / "m.wts", vectors=test_x[:40], labels=test_y[:40],
            vectors_path=tmp_path / "v.vec",
        )
        runtime_model = rfmvm_inference.load_model(tmp_path / "m.wts")
        from rfmvm.containers import read_vectors

        vx, vy = read_vectors(tmp_path / "v.vec")
        digital = bench.classify_accuracy(runtime_model, vx, vy, digital=True)
        analog = bench.classify_accuracy(
            runtime_model, vx, vy, scheme="w-precode", snr_db=25.0, seed=0
        )
        assert digital >= 0.85
        assert analog >= digital - 0.1


MNIST_DIR = os.environ.get("MNIST_DIR")
AUDIOMNIST_DIR = os.environ.get("AUDIOMNIST_DIR")


@pytest.mark.skipif(not MNIST_DIR, reason="set MNIST_DIR to the IDX files")
class TestMnistFull:
    def test_full_training_reaches_reference_accuracy(self, tmp_path):
        train_x, train_y = data.load_mnist_split(MNIST_DIR, train=True)
        test_x, test_y = data.load_mnist_split(MNIST_DIR, train=False)
        config = TrainingConfig(dims=[784, 300, 100, 10], epochs=100, seed=0)
        model, best = train_model(
            config, train_x, train_y, test_x, test_y, verbose=False
        )
        export_containers(model, tmp_path / "mnist.wts")
        assert best >= 0.975


@pytest.mark.skipif(
    not AUDIOMNIST_DIR, reason="set AUDIOMNIST_DIR to the WAV tree"
)
class TestAudioMnistFull:
    def test_full_training_reaches_reference_accuracy(self, tmp_path):
        vectors, labels = data.preprocess_audiomnist_tree(AUDIOMNIST_DIR)
        rng = np.random.default_rng(0)
        order = rng.permutation(vectors.shape[0])
        split = int(0.9 * len(order))
        config = TrainingConfig(dims=[4000, 300, 100, 10], epochs=100, seed=0)
        model, best = train_model(
            config,
            vectors[order[:split]], labels[order[:split]],
            vectors[order[split:]], labels[order[split:]],
            verbose=False,
        )
        assert best >= 0.985


@pytest.mark.skipif(not MNIST_DIR, reason="set MNIST_DIR to the IDX files")
class TestMnistEndToEnd:
    def test_simulated_classification_reaches_reference_accuracy(self, tmp_path):
        bench = pytest.importorskip("rfmvm.bench")
        rfmvm_inference = pytest.importorskip("rfmvm.inference")

        train_x, train_y = data.load_mnist_split(MNIST_DIR, train=True)
        test_x, test_y = data.load_mnist_split(MNIST_DIR, train=False)
        config = TrainingConfig(dims=[784, 300, 100, 10], epochs=100, seed=0)
        model, _ = train_model(
            config, train_x, train_y, test_x, test_y, verbose=False
        )
        export_containers(model, tmp_path / "mnist.wts")
        runtime_model = rfmvm_inference.load_model(tmp_path / "mnist.wts")
        acc25 = bench.classify_accuracy(
            runtime_model, test_x, test_y, scheme="w-precode", snr_db=25.0,
            seed=0, limit=1000,
        )
        acc15 = bench.classify_accuracy(
            runtime_model, test_x, test_y, scheme="w-precode", snr_db=15.0,
            seed=0, limit=1000,
        )
        assert acc25 >= 0.95
        assert acc15 >= 0.75
