"""Reusable Monte Carlo benchmarks: accuracy-vs-SNR sweeps, classification
runs, and synchronization statistics.

Random draws derive from (master seed, point index, trial index) so any
reported number can be reproduced by a single library call, independent
of batching or thread count.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import engine, inference, ofdm
from .errors import SyncError

__all__ = [
    "SweepPoint",
    "random_ip_pair",
    "ip_point",
    "ip_accuracy_sweep",
    "mvm_point",
    "mvm_accuracy_sweep",
    "fit_db_per_bit",
    "classify_accuracy",
    "sync_statistics",
]


@dataclass
class SweepPoint:
    snr_db: float
    rmse: float
    bits: float
    trials: int


def random_ip_pair(n: int, rng) -> tuple[np.ndarray, np.ndarray]:
    """Vectors with uniform [0,1] amplitudes and uniform phases."""
    a = rng.uniform(0.0, 1.0, n) * np.exp(2j * np.pi * rng.random(n))
    b = rng.uniform(0.0, 1.0, n) * np.exp(2j * np.pi * rng.random(n))
    return a, b


def ip_point(
    n: int,
    snr_db: float,
    trials: int,
    seed: int,
    point_index: int = 0,
    scheme: str = "w-precode",
    zero_pad: int = 1,
    cp_len: int = 1,
) -> SweepPoint:
    """RMSE of the frequency-encoded inner product at one SNR.

    Trial t reuses the same vector and noise draws at every SNR (common
    random numbers), so sweep-to-sweep comparisons and fitted slopes see
    the Monte Carlo fluctuation only as a shared offset.
    """
    errors = np.empty(trials, dtype=np.complex128)
    for t in range(trials):
        rng = np.random.default_rng([seed, t])
        a, b = random_ip_pair(n, rng)
        c_hat = engine.run_ip(
            a, b, snr_db=snr_db, scheme=scheme, seed=int(rng.integers(2**63)),
            zero_pad=zero_pad, cp_len=cp_len,
        )
        errors[t] = c_hat - np.sum(a * np.conj(b))
    rmse, bits = ofdm.rmse_and_bits(
        errors, np.zeros_like(errors), 1.0 / np.sqrt(n)
    )
    return SweepPoint(snr_db=snr_db, rmse=rmse, bits=bits, trials=trials)


def ip_accuracy_sweep(
    n: int,
    snr_list,
    trials: int,
    seed: int,
    scheme: str = "w-precode",
    zero_pad: int = 1,
    cp_len: int = 1,
    executor=None,
) -> list[SweepPoint]:
    """IP benchmark over an SNR grid; optionally fan points out over an
    executor (results keep grid order regardless of scheduling)."""
    args = [
        (n, float(s), trials, seed, i, scheme, zero_pad, cp_len)
        for i, s in enumerate(snr_list)
    ]
    if executor is None:
        return [ip_point(*a) for a in args]
    futures = [executor.submit(ip_point, *a) for a in args]
    return [f.result() for f in futures]


def mvm_point(
    n: int,
    m: int,
    snr_db: float,
    trials: int,
    seed: int,
    point_index: int = 0,
    scheme: str = "w-precode",
    block_output: int = 6,
    channel=None,
    csi=None,
) -> SweepPoint:
    """RMSE of full MVM runs at one SNR (all outputs pooled); common
    random numbers across SNR points, as in :func:`ip_point`."""
    errs = []
    for t in range(trials):
        rng = np.random.default_rng([seed, t])
        w = rng.uniform(0.0, 1.0, (m, n)) * np.exp(2j * np.pi * rng.random((m, n)))
        x = rng.uniform(0.0, 1.0, n) * np.exp(2j * np.pi * rng.random(n))
        y = engine.run_mvm(
            w, x, scheme=scheme, snr_db=snr_db, seed=int(rng.integers(2**63)),
            channel=channel, csi=csi, block_output=block_output,
        )
        errs.append(y - w @ x)
    errors = np.concatenate(errs)
    rmse, bits = ofdm.rmse_and_bits(
        errors, np.zeros_like(errors), 1.0 / np.sqrt(n)
    )
    return SweepPoint(snr_db=snr_db, rmse=rmse, bits=bits, trials=trials)


def mvm_accuracy_sweep(
    n: int,
    m: int,
    snr_list,
    trials: int,
    seed: int,
    scheme: str = "w-precode",
    block_output: int = 6,
    channel=None,
    csi=None,
    executor=None,
) -> list[SweepPoint]:
    args = [
        (n, m, float(s), trials, seed, i, scheme, block_output, channel, csi)
        for i, s in enumerate(snr_list)
    ]
    if executor is None:
        return [mvm_point(*a) for a in args]
    futures = [executor.submit(mvm_point, *a) for a in args]
    return [f.result() for f in futures]


def fit_db_per_bit(points) -> float:
    """Slope of SNR (dB) against computing accuracy (bits)."""
    bits = np.array([p.bits for p in points])
    snrs = np.array([p.snr_db for p in points])
    finite = np.isfinite(bits)
    if finite.sum() < 2:
        raise ValueError("need at least two finite accuracy points to fit")
    return float(np.polyfit(bits[finite], snrs[finite], 1)[0])


def classify_accuracy(
    model: inference.ComplexFcModel,
    vectors: np.ndarray,
    labels: np.ndarray,
    scheme: str = "w-precode",
    fidelity: str = "symbolic",
    snr_db: float | None = None,
    seed: int = 0,
    channel=None,
    csi=None,
    digital: bool = False,
    limit: int | None = None,
) -> float:
    """Fraction of samples classified correctly."""
    count = vectors.shape[0] if limit is None else min(limit, vectors.shape[0])
    hits = 0
    for i in range(count):
        if digital:
            scores = inference.forward_digital(model, vectors[i])
        else:
            scores = inference.forward_analog(
                model, vectors[i], scheme=scheme, fidelity=fidelity,
                snr_db=snr_db, seed=seed + i, channel=channel, csi=csi,
            )
        hits += int(inference.classify(scores) == labels[i])
    return hits / count


@dataclass
class SyncStats:
    detect_rate: float
    timing_error_max: int
    cfo_error_max: float
    trials: int


def sync_statistics(
    snr_db: float,
    trials: int = 1000,
    seed: int = 0,
    l_pre: int = 31,
    n_ratio: int = 16,
    cfo: float = 0.0,
    sample_rate: float = 1.0,
    threshold: float = 0.8,
    max_offset: int = 200,
) -> SyncStats:
    """Monte Carlo preamble detection over random offsets in noise.

    The preamble (known, seeded) is embedded at a random offset in a noise
    floor set by the per-sample SNR; detection counts as a hit when the
    start lands within one sample of the truth.
    """
    pre = ofdm.generate_preamble(n_ratio, l_pre, 0.95, seed=123).samples
    # capture-rate samples: one per n_ratio transmit samples
    pre_low = pre[::n_ratio]
    p_sig = float(np.mean(np.abs(pre_low) ** 2))
    sigma = np.sqrt(p_sig / 10.0 ** (snr_db / 10.0))
    rng = np.random.default_rng(seed)
    hits = 0
    worst_timing = 0
    worst_cfo = 0.0
    length = 2 * l_pre + max_offset + 32
    for _ in range(trials):
        offset = int(rng.integers(0, max_offset))
        stream = sigma / np.sqrt(2) * (
            rng.standard_normal(length) + 1j * rng.standard_normal(length)
        )
        t = np.arange(2 * l_pre) / sample_rate
        stream[offset : offset + 2 * l_pre] += pre_low * np.exp(
            2j * np.pi * cfo * t
        )
        try:
            det = ofdm.detect_preamble_and_cfo(
                stream, l_pre, n_ratio, threshold, sample_rate=sample_rate
            )
        except SyncError:
            continue
        timing_err = abs(det.start_index - offset)
        if timing_err <= 1:
            hits += 1
            worst_timing = max(worst_timing, timing_err)
            worst_cfo = max(worst_cfo, abs(det.cfo_estimate - cfo))
    return SyncStats(
        detect_rate=hits / trials,
        timing_error_max=worst_timing,
        cfo_error_max=worst_cfo,
        trials=trials,
    )
