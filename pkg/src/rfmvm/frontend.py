"""Waveform-level physics: DAC reconstruction, I/Q modulation, mixer
models, FIR low-pass filtering, reduced-rate capture, calibrated noise
injection, and PAPR measurement.

Simulations run on a normalized frequency axis (bandwidth = 1 unit) since
the physics is carrier-translation invariant; the real-world GHz carrier
plan is kept as config metadata for reporting only.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy import signal as sig

__all__ = [
    "IqWaveform",
    "PassbandWaveform",
    "LpfSpec",
    "FrontendConfig",
    "NoiseSpec",
    "upsample",
    "iq_modulate",
    "iq_demodulate",
    "mix",
    "lowpass",
    "adc_capture",
    "add_awgn",
    "papr",
    "fourier_series_eval",
]


@dataclass
class IqWaveform:
    """Complex baseband samples at a given rate."""

    samples: np.ndarray
    sample_rate: float

    def __post_init__(self):
        self.samples = np.asarray(self.samples, dtype=np.complex128)
        if self.sample_rate <= 0:
            raise ValueError(f"sample_rate must be positive, got {self.sample_rate}")

    @property
    def duration(self) -> float:
        return self.samples.shape[-1] / self.sample_rate


@dataclass
class PassbandWaveform:
    """Real passband samples at the simulation rate."""

    samples: np.ndarray
    sample_rate: float

    def __post_init__(self):
        self.samples = np.asarray(self.samples, dtype=np.float64)
        if self.sample_rate <= 0:
            raise ValueError(f"sample_rate must be positive, got {self.sample_rate}")


@dataclass
class LpfSpec:
    """Windowed-sinc low-pass design targets.

    Passband holds within 0.3 dB below 0.9*cutoff; attenuation reaches
    stopband_db above (1 + transition_fraction)*cutoff.
    """

    transition_fraction: float = 0.5
    stopband_db: float = 60.0
    cutoff: float | None = None  # Hz; None lets the caller pick


@dataclass
class FrontendConfig:
    """Carrier plan and hardware model switches, in units of the signal
    bandwidth B (normalized to 1.0).

    carrier_w is offset from a round multiple of B so that odd harmonics
    of the sign-mixer LO never alias onto the capture band on the discrete
    simulation grid.
    """

    carrier_w: float = 8.3
    carrier_x: float = 12.0
    oversample_factor: int = 4       # complex-baseband path
    passband_oversample: int = 64    # real passband path (sign mixer)
    mixer_model: str = "ideal-baseband"
    dac_kernel: str = "fourier-ideal"
    lpf: LpfSpec = field(default_factory=lambda: LpfSpec(stopband_db=45.0))
    mean_amplitude: float = 0.2      # DAC drive level; 14 dB PAPR headroom
    preamble_base_length: int = 61
    preamble_amplitude: float = 0.95
    cfo: float = 0.0                 # LO offset, in units of B
    # Reference hardware carrier plan (Hz), metadata for reporting only.
    real_carriers_hz: tuple = (0.915e9, 1.2e9, 0.285e9)

    @property
    def carrier_y(self) -> float:
        return self.carrier_x - self.carrier_w


def upsample(samples: np.ndarray, factor: int, kernel: str = "fourier-ideal") -> np.ndarray:
    """Reconstruct a waveform at ``factor``-times the input rate.

    'fourier-ideal' evaluates the periodic band-limited interpolant (what
    an ideal DAC does to one OFDM symbol); 'zero-order-hold' repeats each
    sample.  FFT bins at and above L/2 are treated as negative
    frequencies, matching the shifted-DFT subcarrier convention.
    """
    s = np.asarray(samples, dtype=np.complex128)
    if factor < 1 or int(factor) != factor:
        raise ValueError(f"factor must be a positive integer, got {factor}")
    factor = int(factor)
    if factor == 1:
        return s.copy()
    if kernel == "zero-order-hold":
        return np.repeat(s, factor)
    if kernel != "fourier-ideal":
        raise ValueError(f"unknown DAC kernel {kernel!r}")
    L = s.shape[-1]
    X = np.fft.fft(s)
    half = (L + 1) // 2 if L % 2 else L // 2
    X_up = np.zeros(L * factor, dtype=np.complex128)
    X_up[:half] = X[:half]
    X_up[L * factor - (L - half):] = X[half:]
    return np.fft.ifft(X_up) * factor


def iq_modulate(
    baseband: IqWaveform,
    carrier: float,
    f_sim: float,
    dac_kernel: str = "fourier-ideal",
) -> PassbandWaveform:
    """Reconstruct the baseband with the DAC kernel and mix it onto a real carrier:
    r(t) = Re{ s(t) * exp(j*2*pi*F*t) }.
    """
    f_s = baseband.sample_rate
    if f_sim < 2.5 * (carrier + f_s / 2.0):
        raise ValueError(
            f"f_sim {f_sim} violates the aliasing guard for carrier {carrier} "
            f"(need >= {2.5 * (carrier + f_s / 2.0)})"
        )
    ratio = f_sim / f_s
    if abs(ratio - round(ratio)) > 1e-9:
        raise ValueError(f"f_sim must be an integer multiple of f_s, got ratio {ratio}")
    up = upsample(baseband.samples, int(round(ratio)), dac_kernel)
    t = np.arange(up.shape[-1]) / f_sim
    r = np.real(up * np.exp(2j * np.pi * carrier * t))
    return PassbandWaveform(samples=r, sample_rate=f_sim)


def iq_demodulate(
    passband: PassbandWaveform,
    carrier: float,
    lpf_cutoff: float,
    lpf: LpfSpec | None = None,
) -> IqWaveform:
    """Mix a real passband signal down to complex baseband and low-pass it.

    The factor of two restores the original envelope amplitude.
    """
    lpf = lpf or LpfSpec()
    f_sim = passband.sample_rate
    t = np.arange(passband.samples.shape[-1]) / f_sim
    mixed = passband.samples * np.exp(-2j * np.pi * carrier * t)
    out = 2.0 * lowpass(mixed, lpf_cutoff, lpf.transition_fraction, lpf.stopband_db, f_sim)
    return IqWaveform(samples=out, sample_rate=f_sim)


def mix(lo, rf, model: str = "ideal-baseband"):
    """Frequency-mixer model.

    ideal-baseband: complex multiply with the conjugate on the LO port
    (down-conversion), rf * conj(lo).
    diode-sign-passband: double-balanced diode ring, sgn(r_lo) * r_rf on
    real passband samples.
    """
    if model == "ideal-baseband":
        if not isinstance(lo, IqWaveform) or not isinstance(rf, IqWaveform):
            raise ValueError("ideal-baseband mixing needs two IqWaveforms")
        if lo.sample_rate != rf.sample_rate:
            raise ValueError(
                f"sample-rate mismatch: {lo.sample_rate} vs {rf.sample_rate}"
            )
        return IqWaveform(rf.samples * np.conj(lo.samples), rf.sample_rate)
    if model == "diode-sign-passband":
        if not isinstance(lo, PassbandWaveform) or not isinstance(rf, PassbandWaveform):
            raise ValueError("diode mixing needs two PassbandWaveforms")
        if lo.sample_rate != rf.sample_rate:
            raise ValueError(
                f"sample-rate mismatch: {lo.sample_rate} vs {rf.sample_rate}"
            )
        return PassbandWaveform(np.sign(lo.samples) * rf.samples, rf.sample_rate)
    raise ValueError(f"unknown mixer model {model!r}")


def _design_lowpass(cutoff: float, transition_fraction: float, stopband_db: float, f_s: float):
    pass_edge = 0.9 * cutoff
    stop_edge = (1.0 + transition_fraction) * cutoff
    if stop_edge >= f_s / 2.0:
        stop_edge = 0.999 * f_s / 2.0
        if stop_edge <= pass_edge:
            raise ValueError(f"cutoff {cutoff} leaves no transition room at rate {f_s}")
    width = stop_edge - pass_edge
    numtaps, beta = sig.kaiserord(stopband_db, width / (0.5 * f_s))
    numtaps |= 1  # odd length, integer group delay
    taps = sig.firwin(
        numtaps, (pass_edge + stop_edge) / 2.0, window=("kaiser", beta), fs=f_s
    )
    return taps


def lowpass(
    waveform: np.ndarray,
    cutoff: float,
    transition_fraction: float = 0.5,
    stopband_db: float = 60.0,
    sample_rate: float = 1.0,
) -> np.ndarray:
    """Linear-phase FIR low-pass with the group delay removed exactly."""
    x = np.asarray(waveform)
    if cutoff >= sample_rate / 2.0:
        raise ValueError(f"cutoff {cutoff} must be below Nyquist {sample_rate / 2.0}")
    taps = _design_lowpass(cutoff, transition_fraction, stopband_db, sample_rate)
    delay = (len(taps) - 1) // 2
    full = sig.fftconvolve(x, taps, mode="full")
    return full[delay : delay + x.shape[-1]]


def design_lowpass_edges(
    pass_edge: float, stop_edge: float, stopband_db: float, sample_rate: float
) -> np.ndarray:
    """Kaiser FIR taps with explicit passband and stopband edges."""
    if not 0.0 < pass_edge < stop_edge < sample_rate / 2.0:
        raise ValueError(
            f"need 0 < pass {pass_edge} < stop {stop_edge} < Nyquist "
            f"{sample_rate / 2.0}"
        )
    numtaps, beta = sig.kaiserord(stopband_db, (stop_edge - pass_edge) / (0.5 * sample_rate))
    numtaps |= 1
    return sig.firwin(
        numtaps, (pass_edge + stop_edge) / 2.0, window=("kaiser", beta), fs=sample_rate
    )


def filter_compensated(waveform: np.ndarray, taps: np.ndarray) -> np.ndarray:
    """Apply an odd-length linear-phase FIR, removing its group delay."""
    x = np.asarray(waveform)
    delay = (len(taps) - 1) // 2
    full = sig.fftconvolve(x, taps, mode="full")
    return full[delay : delay + x.shape[-1]]


def adc_capture(
    waveform: IqWaveform,
    out_rate: float,
    lpf: LpfSpec | None = None,
) -> np.ndarray:
    """Anti-alias filter at out_rate/2 and keep every (f_s/out_rate)-th sample."""
    lpf = lpf or LpfSpec()
    ratio = waveform.sample_rate / out_rate
    if abs(ratio - round(ratio)) > 1e-9:
        raise ValueError(
            f"decimation ratio {ratio} is not an integer "
            f"({waveform.sample_rate} -> {out_rate})"
        )
    ratio = int(round(ratio))
    if ratio == 1:
        return waveform.samples.copy()
    cutoff = lpf.cutoff if lpf.cutoff is not None else out_rate / 2.0
    filtered = lowpass(
        waveform.samples, cutoff, lpf.transition_fraction, lpf.stopband_db,
        waveform.sample_rate,
    )
    return filtered[::ratio]


@dataclass
class NoiseSpec:
    """SNR target measured inside a frequency band.

    band is a (low, high) interval in Hz; None means the full sampled band.
    snr_db = +inf disables injection.
    """

    snr_db: float
    band: tuple | None = None


def add_awgn(
    samples: np.ndarray,
    noise: NoiseSpec,
    seed: int = 0,
    sample_rate: float = 1.0,
) -> np.ndarray:
    """Add circularly-symmetric white Gaussian noise so the in-band SNR
    hits the requested level. Deterministic per seed."""
    s = np.asarray(samples, dtype=np.complex128)
    if s.size == 0:
        raise ValueError("samples must be non-empty")
    if np.isinf(noise.snr_db):
        return s.copy()
    if noise.band is None:
        band_width = sample_rate
        p_band = float(np.mean(np.abs(s) ** 2))
    else:
        lo, hi = noise.band
        band_width = hi - lo
        if band_width <= 0:
            raise ValueError(f"empty measurement band {noise.band}")
        freqs = np.fft.fftfreq(s.shape[-1], d=1.0 / sample_rate)
        mask = (freqs >= lo) & (freqs <= hi)
        spec = np.fft.fft(s)
        p_band = float(np.sum(np.abs(spec[mask]) ** 2) / s.shape[-1] ** 2)
    snr = 10.0 ** (noise.snr_db / 10.0)
    var = (p_band / snr) * (sample_rate / band_width)
    rng = np.random.default_rng(seed)
    n = rng.standard_normal(s.shape) + 1j * rng.standard_normal(s.shape)
    return s + np.sqrt(var / 2.0) * n


def papr(samples: np.ndarray) -> float:
    """Peak-to-average power ratio in dB."""
    s = np.asarray(samples)
    if s.size == 0:
        raise ValueError("samples must be non-empty")
    p = np.abs(s) ** 2
    mean = float(np.mean(p))
    if mean == 0.0:
        raise ValueError("PAPR undefined for an all-zero signal")
    return float(10.0 * np.log10(np.max(p) / mean))


def fourier_series_eval(symbols: np.ndarray, t_norm: np.ndarray) -> np.ndarray:
    """Evaluate s(t) = sum_k S[k] exp(j*2*pi*(k - L/2)*t/T) at t/T values.

    Direct O(L * len(t)) evaluation; the exact continuous-time waveform of
    one OFDM symbol, used where FFT-grid sampling does not land on the
    requested instants.
    """
    S = np.asarray(symbols, dtype=np.complex128)
    L = S.shape[-1]
    t = np.atleast_1d(np.asarray(t_norm, dtype=np.float64))
    k = np.arange(L) - L / 2.0
    return np.exp(2j * np.pi * np.outer(t, k)) @ S
