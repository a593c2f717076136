"""OFDM primitives: shifted DFT conventions, Zadoff-Chu phases, cyclic
prefix handling, repeated-half preambles with CFO estimation, and the
accuracy metric used throughout the benchmarks.

All transforms place the DC subcarrier at index L/2 (a real-valued center
offset, so odd lengths such as the 3-point capture work without rounding).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import SyncError

__all__ = [
    "OfdmGrid",
    "ZcPhaseSequence",
    "Preamble",
    "SyncResult",
    "dft_shifted",
    "idft_shifted",
    "zc_phase_sequence",
    "zc_phasors",
    "attach_cyclic_prefix",
    "remove_cyclic_prefix",
    "generate_preamble",
    "detect_preamble_and_cfo",
    "rmse_and_bits",
]


@dataclass
class OfdmGrid:
    """One frequency-domain OFDM symbol.

    Subcarrier k sits at baseband frequency (k - fft_size/2) * subcarrier_spacing,
    so index fft_size/2 is the DC bin.
    """

    fft_size: int
    subcarrier_spacing: float
    symbols: np.ndarray

    def __post_init__(self):
        self.symbols = np.asarray(self.symbols, dtype=np.complex128)
        if self.fft_size < 1:
            raise ValueError(f"fft_size must be positive, got {self.fft_size}")
        if self.symbols.shape != (self.fft_size,):
            raise ValueError(
                f"symbols must have length {self.fft_size}, got {self.symbols.shape}"
            )

    @property
    def bandwidth(self) -> float:
        return self.fft_size * self.subcarrier_spacing

    @property
    def symbol_time(self) -> float:
        return 1.0 / self.subcarrier_spacing

    def time_samples(self) -> np.ndarray:
        return idft_shifted(self.symbols)


def _half_shift(n: np.ndarray | int) -> np.ndarray:
    # exp(+/- j*pi*n) for integer n; exact alternating signs
    return (-1.0) ** np.asarray(n)


def dft_shifted(samples: np.ndarray) -> np.ndarray:
    """Shifted DFT: S[k] = sum_n s[n] * exp(-j*2*pi*(k - L/2)*n/L).

    The L/2 center offset is applied as an exact alternating-sign
    modulation, valid for odd L as well (non-integer center).
    """
    s = np.asarray(samples, dtype=np.complex128)
    L = s.shape[-1]
    n = np.arange(L)
    return np.fft.fft(s * _half_shift(n), axis=-1)


def idft_shifted(symbols: np.ndarray) -> np.ndarray:
    """Inverse of :func:`dft_shifted`: s[n] = (1/L) sum_k S[k] exp(+j*2*pi*(k-L/2)*n/L)."""
    S = np.asarray(symbols, dtype=np.complex128)
    L = S.shape[-1]
    n = np.arange(L)
    return np.fft.ifft(S, axis=-1) * _half_shift(n)


@dataclass
class ZcPhaseSequence:
    """Polyphase sequence with phases phi[m] = -pi*m*(m+c_f)/M, c_f = M mod 2."""

    length: int
    phases: np.ndarray

    def phasors(self) -> np.ndarray:
        return np.exp(1j * self.phases)


def zc_phase_sequence(length: int) -> ZcPhaseSequence:
    """Constant-amplitude zero-autocorrelation phase ramp of a given length."""
    if length < 1:
        raise ValueError(f"length must be >= 1, got {length}")
    m = np.arange(length, dtype=np.float64)
    c_f = length % 2
    phases = -np.pi * m * (m + c_f) / length
    return ZcPhaseSequence(length=length, phases=phases)


def zc_phasors(length: int) -> np.ndarray:
    """Unit-modulus phasors of the phase sequence; flat magnitude spectrum."""
    return zc_phase_sequence(length).phasors()


def attach_cyclic_prefix(samples: np.ndarray, prefix_len: int) -> np.ndarray:
    """Prepend the last prefix_len samples as a cyclic prefix."""
    s = np.asarray(samples)
    if prefix_len < 0 or prefix_len > s.shape[-1]:
        raise ValueError(
            f"prefix_len must be in [0, {s.shape[-1]}], got {prefix_len}"
        )
    if prefix_len == 0:
        return s.copy()
    return np.concatenate([s[..., -prefix_len:], s], axis=-1)


def remove_cyclic_prefix(samples: np.ndarray, prefix_len: int) -> np.ndarray:
    """Drop the first prefix_len samples.

    A residual timing offset dn <= prefix_len shows up afterwards as the
    per-subcarrier linear phase exp(-j*2*pi*(k - L/2)*(prefix_len - dn)/L).
    """
    s = np.asarray(samples)
    if prefix_len < 0 or s.shape[-1] <= prefix_len:
        raise ValueError(
            f"input length {s.shape[-1]} must exceed prefix_len {prefix_len}"
        )
    return s[..., prefix_len:].copy()


@dataclass
class Preamble:
    """Two identical constant-amplitude random-phase halves.

    Total length is 2 * downsample_ratio * base_length at the transmit rate;
    after capture at 1/downsample_ratio the repetition period is base_length.
    """

    base_length: int
    downsample_ratio: int
    amplitude: float
    samples: np.ndarray

    @property
    def half_length(self) -> int:
        return self.downsample_ratio * self.base_length


def generate_preamble(
    n_ratio: int, l_pre: int, amplitude: float = 0.95, seed: int = 0
) -> Preamble:
    """Build a repeated-half synchronization preamble.

    Phases are uniform on [0, 2pi); the second half copies the first so a
    delayed autocorrelation peaks at the true start.
    """
    if l_pre < 2:
        raise ValueError(f"l_pre must be >= 2, got {l_pre}")
    if not 0.0 < amplitude <= 1.0:
        raise ValueError(f"amplitude must be in (0, 1], got {amplitude}")
    rng = np.random.default_rng(seed)
    half = amplitude * np.exp(2j * np.pi * rng.random(n_ratio * l_pre))
    return Preamble(
        base_length=l_pre,
        downsample_ratio=n_ratio,
        amplitude=amplitude,
        samples=np.concatenate([half, half]),
    )


@dataclass
class SyncResult:
    start_index: int
    peak_metric: float
    cfo_estimate: float


def detect_preamble_and_cfo(
    received: np.ndarray,
    l_pre: int,
    n_ratio: int = 1,
    threshold: float = 0.8,
    sample_rate: float | None = None,
    expected_half_phase: float = 0.0,
) -> SyncResult:
    """Locate a repeated-half preamble in a low-rate sample stream.

    Slides a 2*l_pre window one sample at a time and computes the
    normalized half-lag autocorrelation R.  Partial overlap makes R ramp
    up over l_pre samples ahead of the true start, so the detection is
    the maximum of R within l_pre + l_pre/4 samples after the first
    window exceeding the threshold.  The CFO estimate comes from the
    angle of the half-lag correlation at the detected start.

    ``sample_rate`` is the rate of ``received``; when omitted, the
    high-rate f_s implied by ``n_ratio`` is taken as 1.0 so the CFO comes
    back in normalized frequency units.  A receiver whose own oscillator
    plan rotates the halves by a known angle passes it as
    ``expected_half_phase`` so only the residual reads as CFO.
    """
    r = np.asarray(received, dtype=np.complex128)
    if not 0.0 < threshold < 1.0:
        raise ValueError(f"threshold must be in (0, 1), got {threshold}")
    if r.shape[-1] < 2 * l_pre:
        raise ValueError(
            f"received length {r.shape[-1]} shorter than one window 2*{l_pre}"
        )
    if sample_rate is None:
        sample_rate = 1.0 / n_ratio

    n_win = r.shape[-1] - 2 * l_pre + 1
    # c[i] = sum_{n<l_pre} r[i+n] * conj(r[i+n+l_pre]); cumulative sums give O(1) per window
    prod = r[:-l_pre] * np.conj(r[l_pre:])
    c = np.cumsum(prod)
    corr = c[l_pre - 1 : l_pre - 1 + n_win].copy()
    corr[1:] -= c[: n_win - 1]
    power = np.cumsum(np.abs(r) ** 2)
    e_first = power[l_pre - 1 : l_pre - 1 + n_win].copy()
    e_first[1:] -= power[: n_win - 1]
    e_second = power[2 * l_pre - 1 : 2 * l_pre - 1 + n_win].copy()
    e_second[0] -= power[l_pre - 1]
    e_second[1:] -= power[l_pre : l_pre + n_win - 1]
    denom = np.sqrt(e_first * e_second)
    metric = np.where(denom > 0, np.abs(corr) / np.maximum(denom, 1e-300), 0.0)

    above = np.nonzero(metric >= threshold)[0]
    if above.size == 0:
        raise SyncError(
            f"no autocorrelation window exceeded threshold {threshold} "
            f"(max metric {metric.max():.3f})"
        )
    first = int(above[0])
    search_end = min(n_win, first + l_pre + max(1, l_pre // 4) + 1)
    start = first + int(np.argmax(metric[first:search_end]))

    # one low-rate sample spans n_ratio high-rate samples; half-lag spans l_pre of them
    lag_time = l_pre / sample_rate
    residual = np.angle(corr[start] * np.exp(-1j * expected_half_phase))
    cfo = -residual / (2.0 * np.pi * lag_time)
    return SyncResult(start_index=start, peak_metric=float(metric[start]), cfo_estimate=float(cfo))


def rmse_and_bits(
    estimate: np.ndarray, truth: np.ndarray, normalization: float = 1.0
) -> tuple[float, float]:
    """Root-mean-square error after scaling both vectors, plus the
    equivalent accuracy in bits, -log2(rmse/2).

    A perfect estimate reports rmse 0 and bits = +inf.
    """
    e = np.asarray(estimate, dtype=np.complex128).ravel()
    t = np.asarray(truth, dtype=np.complex128).ravel()
    if e.shape != t.shape or e.size < 1:
        raise ValueError(f"length mismatch: {e.shape} vs {t.shape}")
    if normalization <= 0:
        raise ValueError(f"normalization must be positive, got {normalization}")
    rmse = float(np.sqrt(np.mean(np.abs(normalization * (e - t)) ** 2)))
    bits = math.inf if rmse == 0.0 else -math.log2(rmse / 2.0)
    return rmse, bits
