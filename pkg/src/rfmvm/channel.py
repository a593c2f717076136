"""Channel models, CSI estimation, interpolation, and the two precoding
schemes that make broadcast weights decode correctly after a dispersive
channel.

CSI lives on a frequency grid; reshaping it into the per-element matrix a
given MVM geometry needs is done on demand, so one estimate serves any
problem size (amplitudes interpolate nearest-neighbor, phases linearly).
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field

import numpy as np

from .errors import SingularChannelWarning, UnderDeterminedError

__all__ = [
    "ChannelResponse",
    "flat_channel",
    "multipath_channel",
    "tabulated_channel",
    "CsiEstimate",
    "apply_channel_symbols",
    "apply_channel_waveform",
    "apply_channel",
    "sounding_probe",
    "estimate_csi",
    "csi_from_channel",
    "interpolate_csi",
    "precode_weights",
    "precode_input",
    "time_encode_weights",
    "save_csi",
    "load_csi",
]


@dataclass
class ChannelResponse:
    """Complex frequency response h(f).

    kind 'flat': constant gain.
    kind 'multipath-taps': taps are (delay_samples, gain) pairs; delays are
    in samples at ``tap_rate``.
    kind 'tabulated': response sampled on a frequency grid, continued by
    nearest-amplitude / linear-phase interpolation.
    """

    kind: str = "flat"
    gain: complex = 1.0 + 0.0j
    taps: list = field(default_factory=list)
    tap_rate: float = 1.0
    table_freqs: np.ndarray | None = None
    table_values: np.ndarray | None = None

    def response(self, freqs) -> np.ndarray:
        f = np.atleast_1d(np.asarray(freqs, dtype=np.float64))
        if self.kind == "flat":
            return np.full(f.shape, self.gain, dtype=np.complex128)
        if self.kind == "multipath-taps":
            h = np.zeros(f.shape, dtype=np.complex128)
            for delay, g in self.taps:
                h += g * np.exp(-2j * np.pi * f * delay / self.tap_rate)
            return h
        if self.kind == "tabulated":
            return interpolate_csi(
                (self.table_freqs, self.table_values), f
            )
        raise ValueError(f"unknown channel kind {self.kind!r}")

    def impulse_response(self, sample_rate: float) -> np.ndarray:
        """FIR taps at the given rate; only flat and tap channels have one."""
        if self.kind == "flat":
            return np.array([self.gain], dtype=np.complex128)
        if self.kind == "multipath-taps":
            step = sample_rate / self.tap_rate
            length = int(round(max(d for d, _ in self.taps) * step)) + 1
            h = np.zeros(length, dtype=np.complex128)
            for delay, g in self.taps:
                idx = delay * step
                if abs(idx - round(idx)) > 1e-9:
                    raise ValueError(
                        f"tap delay {delay} not on the {sample_rate} grid"
                    )
                h[int(round(idx))] += g
            return h
        raise ValueError(f"{self.kind} channel has no impulse response")


def flat_channel(gain: complex = 1.0 + 0.0j) -> ChannelResponse:
    return ChannelResponse(kind="flat", gain=gain)


def multipath_channel(taps, tap_rate: float = 1.0) -> ChannelResponse:
    """taps: iterable of (delay_samples, complex_gain)."""
    return ChannelResponse(kind="multipath-taps", taps=list(taps), tap_rate=tap_rate)


def tabulated_channel(freqs, values) -> ChannelResponse:
    f = np.asarray(freqs, dtype=np.float64)
    v = np.asarray(values, dtype=np.complex128)
    order = np.argsort(f)
    return ChannelResponse(kind="tabulated", table_freqs=f[order], table_values=v[order])


def apply_channel_symbols(symbols: np.ndarray, channel: ChannelResponse, freqs) -> np.ndarray:
    """Per-subcarrier multiplication by the channel response."""
    return np.asarray(symbols, dtype=np.complex128) * channel.response(freqs)


def apply_channel_waveform(
    samples: np.ndarray, channel: ChannelResponse, sample_rate: float
) -> np.ndarray:
    """Tap-delay convolution of a sample stream (output trimmed to input length)."""
    h = channel.impulse_response(sample_rate)
    out = np.convolve(np.asarray(samples, dtype=np.complex128), h)
    return out[: samples.shape[-1]]


def apply_channel(signal, channel: ChannelResponse, freqs=None, sample_rate=None):
    """Dispatch: frequency-domain symbols (freqs given) or a waveform (rate given)."""
    if freqs is not None:
        return apply_channel_symbols(signal, channel, freqs)
    if sample_rate is not None:
        return apply_channel_waveform(signal, channel, sample_rate)
    raise ValueError("pass freqs= for symbols or sample_rate= for a waveform")


@dataclass
class CsiEstimate:
    """Channel state information on a frequency grid.

    ``residual`` is the mean squared fit error of the estimator and
    ``probe_count`` the number of probe observations that produced it.
    """

    freqs: np.ndarray
    values: np.ndarray
    residual: float = 0.0
    probe_count: int = 0

    def __post_init__(self):
        self.freqs = np.asarray(self.freqs, dtype=np.float64)
        self.values = np.asarray(self.values, dtype=np.complex128)
        order = np.argsort(self.freqs)
        self.freqs = self.freqs[order]
        self.values = self.values[order]

    def response(self, freqs) -> np.ndarray:
        return interpolate_csi((self.freqs, self.values), freqs)

    def h_matrix(self, n_in: int, m_out: int, subcarrier_spacing: float) -> np.ndarray:
        """Reshape onto an M x N grid: H[m, n] = h(f_k), k = M*N - 1 - m - n*M."""
        L = n_in * m_out
        m = np.arange(m_out)[:, None]
        n = np.arange(n_in)[None, :]
        k = L - 1 - m - n * m_out
        return self.response(((k - L / 2.0) * subcarrier_spacing).ravel()).reshape(
            m_out, n_in
        )

    def h_vector(self, n_in: int, m_out: int, subcarrier_spacing: float) -> np.ndarray:
        """Column-collapsed form h[n] ~ H[m, n] (mean over the output rows)."""
        return self.h_matrix(n_in, m_out, subcarrier_spacing).mean(axis=0)


def csi_from_channel(channel: ChannelResponse, freqs) -> CsiEstimate:
    """Perfect CSI: the true response sampled on a grid."""
    f = np.asarray(freqs, dtype=np.float64)
    return CsiEstimate(freqs=f, values=channel.response(f), residual=0.0, probe_count=0)


def sounding_probe(
    channel: ChannelResponse,
    freqs,
    probe_snr_db: float = np.inf,
    seed: int = 0,
) -> tuple[np.ndarray, np.ndarray]:
    """One full-band probe: known unit symbols on every grid frequency,
    observed through the channel with AWGN at the probe SNR."""
    f = np.asarray(freqs, dtype=np.float64)
    rng = np.random.default_rng(seed)
    tx = np.exp(2j * np.pi * rng.random(f.shape))
    rx = tx * channel.response(f)
    if np.isfinite(probe_snr_db):
        snr = 10.0 ** (probe_snr_db / 10.0)
        p = np.mean(np.abs(rx) ** 2)
        noise = rng.standard_normal(f.shape) + 1j * rng.standard_normal(f.shape)
        rx = rx + np.sqrt(p / snr / 2.0) * noise
    return tx, rx


def _lstsq(a: np.ndarray, y: np.ndarray, ridge: float, what: str):
    if ridge > 0.0:
        g = a.conj().T @ a + ridge * np.eye(a.shape[1])
        sol = np.linalg.solve(g, a.conj().T @ y)
        res = float(np.mean(np.abs(a @ sol - y) ** 2))
        return sol, res
    sol, _, rank, _ = np.linalg.lstsq(a, y, rcond=None)
    if rank < a.shape[1]:
        raise UnderDeterminedError(
            f"{what}: rank {rank} < {a.shape[1]} unknowns; add probes"
        )
    res = float(np.mean(np.abs(a @ sol - y) ** 2))
    return sol, res


def estimate_csi(
    probes,
    mode: str,
    plan=None,
    freqs=None,
    ridge: float = 0.0,
) -> CsiEstimate:
    """Estimate the channel from probe observations.

    mode 'sounding': probes = [(tx_symbols, rx_symbols)], freqs = grid; the
    estimate is rx / tx per subcarrier.
    mode 'w-precode': probes = [(V, x, y_hat)]; least squares for the CSI
    matrix row by row (each output is linear in one row), >= N probes.
    mode 'x-precode': probes = [(W, v, y_hat)]; least squares for the
    length-N equivalent channel vector, >= N/M probes.

    Probe-based modes need ``plan`` for the subcarrier geometry of the
    returned grid.
    """
    if mode == "sounding":
        if freqs is None:
            raise ValueError("sounding mode needs the probe frequency grid")
        tx, rx = probes[0]
        values = np.asarray(rx, dtype=np.complex128) / np.asarray(tx, dtype=np.complex128)
        return CsiEstimate(freqs=freqs, values=values, residual=0.0, probe_count=1)

    if plan is None:
        raise ValueError(f"{mode} mode needs the MVM plan for grid geometry")

    if mode == "w-precode":
        v0, x0, _ = probes[0]
        m_out, n_in = np.asarray(v0).shape
        rows = []
        freq_grid = _weight_subcarrier_freqs(plan, m_out)
        residuals = []
        est = np.empty((m_out, n_in), dtype=np.complex128)
        for m in range(m_out):
            a = np.stack([np.asarray(v)[m] * np.asarray(x) for v, x, _ in probes])
            y = np.array([np.asarray(yh)[m] for _, _, yh in probes])
            sol, res = _lstsq(a, y, ridge, f"CSI row {m}")
            est[m] = sol
            residuals.append(res)
        # grid entries of shared frequencies get averaged implicitly below
        flat_f = freq_grid.ravel()
        flat_v = est.ravel()
        uniq, inv = np.unique(np.round(flat_f, 12), return_inverse=True)
        vals = np.zeros(uniq.shape, dtype=np.complex128)
        counts = np.bincount(inv)
        np.add.at(vals, inv, flat_v)
        vals /= counts
        return CsiEstimate(
            freqs=uniq, values=vals,
            residual=float(np.mean(residuals)), probe_count=len(probes),
        )

    if mode == "x-precode":
        w0 = np.asarray(probes[0][0])
        m_out, n_in = w0.shape
        a = np.concatenate(
            [np.asarray(w) * np.asarray(v)[None, :] for w, v, _ in probes], axis=0
        )
        y = np.concatenate([np.asarray(yh) for _, _, yh in probes])
        sol, res = _lstsq(a, y, ridge, "equivalent channel vector")
        freq_grid = _weight_subcarrier_freqs(plan, m_out).mean(axis=0)
        return CsiEstimate(
            freqs=freq_grid, values=sol, residual=res, probe_count=len(probes)
        )

    raise ValueError(f"unknown estimation mode {mode!r}")


def _weight_subcarrier_freqs(plan, m_out: int) -> np.ndarray:
    """Baseband frequency of the subcarrier carrying weight (m, n), for the
    encode-side (unflipped) mapping, as an m_out x N array."""
    m_pad = plan.padded_block
    L = plan.padded_fft_size
    mp = np.arange(m_out) % plan.block_output + plan.zero_pad
    n = np.arange(plan.input_size)
    k = L - 1 - mp[:, None] - n[None, :] * m_pad
    return (k - L / 2.0) * plan.subcarrier_spacing


def interpolate_csi(estimate, target_freqs) -> np.ndarray:
    """Resample a gridded response: nearest-neighbor on amplitude, linear
    (unwrapped) on phase.  Raises on extrapolation beyond the grid span."""
    if isinstance(estimate, CsiEstimate):
        src_f, src_v = estimate.freqs, estimate.values
    else:
        src_f, src_v = estimate
        src_f = np.asarray(src_f, dtype=np.float64)
        src_v = np.asarray(src_v, dtype=np.complex128)
        order = np.argsort(src_f)
        src_f, src_v = src_f[order], src_v[order]
    tf = np.atleast_1d(np.asarray(target_freqs, dtype=np.float64))
    span = src_f[-1] - src_f[0]
    tol = 1e-9 * max(span, 1.0)
    if tf.min() < src_f[0] - tol or tf.max() > src_f[-1] + tol:
        raise ValueError(
            f"target band [{tf.min()}, {tf.max()}] extends beyond the "
            f"estimated span [{src_f[0]}, {src_f[-1]}]"
        )
    if src_f.size == 1:
        return np.full(tf.shape, src_v[0])
    idx = np.searchsorted(src_f, tf)
    idx = np.clip(idx, 1, src_f.size - 1)
    left_closer = (tf - src_f[idx - 1]) < (src_f[idx] - tf)
    nearest = np.where(left_closer, idx - 1, idx)
    amp = np.abs(src_v)[nearest]
    phase = np.interp(tf, src_f, np.unwrap(np.angle(src_v)))
    return amp * np.exp(1j * phase)


def save_csi(estimate: CsiEstimate, path) -> None:
    """Persist an estimate in the labeled-vector container: record 0 is
    the frequency grid (real parts), record 1 the complex response."""
    from .containers import write_vectors

    rows = np.stack([
        estimate.freqs.astype(np.complex128),
        estimate.values,
    ])
    write_vectors(rows, [0, 1], path)


def load_csi(path) -> CsiEstimate:
    from .containers import read_vectors

    rows, labels = read_vectors(path)
    if rows.shape[0] != 2 or list(labels) != [0, 1]:
        raise ValueError(f"{path}: not a serialized CSI estimate")
    return CsiEstimate(freqs=rows[0].real, values=rows[1])


def _floored_divide(numer: np.ndarray, denom: np.ndarray, what: str) -> np.ndarray:
    mag = np.abs(denom)
    floor = 1e-6 * np.median(mag)
    low = mag < floor
    if np.any(low):
        warnings.warn(
            f"{what}: {int(low.sum())} channel entr{'y' if low.sum() == 1 else 'ies'} "
            f"below the division floor were clamped",
            SingularChannelWarning,
            stacklevel=3,
        )
        denom = np.where(low, floor * np.exp(1j * np.angle(denom)), denom)
    return numer / denom


def time_encode_weights(weights: np.ndarray) -> np.ndarray:
    """Fold the client's inverse transform into the weights so the client
    may transmit its raw input vector repeated in time.

    W'[m, k] = sum_n W[m, n] * exp(+j*2*pi*n*(k - N/2)/N)
    """
    w = np.asarray(weights, dtype=np.complex128)
    n = np.arange(w.shape[1])
    return np.fft.ifft(w * (-1.0) ** n, axis=1) * w.shape[1]


def precode_weights(
    weights: np.ndarray,
    estimate: CsiEstimate,
    plan=None,
    time_encoding: bool = False,
    subcarrier_spacing: float | None = None,
    conjugate: bool = False,
) -> np.ndarray:
    """Channel-inverting weight precoding V = W / H*.

    With ``time_encoding`` the inverse-transform matrix is folded into W
    first, so clients can transmit the raw repeated input.  ``plan`` maps
    each element to its subcarrier; ``conjugate`` selects the
    down-conversion orientation where the transmitted spectrum is the
    flipped conjugate (the element then rides the mirror subcarrier and
    sees the conjugated response).
    """
    w = np.asarray(weights, dtype=np.complex128)
    if time_encoding:
        w = time_encode_weights(w)
    if plan is not None:
        h = _plan_weight_response(estimate, plan, w.shape[0], conjugate)
    else:
        if subcarrier_spacing is None:
            raise ValueError("need plan or subcarrier_spacing to map weights")
        h = estimate.h_matrix(w.shape[1], w.shape[0], subcarrier_spacing)
    return _floored_divide(w, h, "precode_weights")


def _plan_weight_response(
    estimate: CsiEstimate, plan, m_out: int, conjugate: bool
) -> np.ndarray:
    """Per-element channel response for a decomposed plan.

    conjugate=False: encode-side mapping k = L-1-m-n*M_pad.
    conjugate=True: the transmitted spectrum is flipped and conjugated
    (down-conversion), so element (m, n) rides k' = m + n*M_pad and its
    effective response is conj(h(f_k')).
    """
    m_pad = plan.padded_block
    L = plan.padded_fft_size
    mp = np.arange(m_out) % plan.block_output + plan.zero_pad
    n = np.arange(plan.input_size)
    if conjugate:
        k = mp[:, None] + n[None, :] * m_pad
    else:
        k = L - 1 - mp[:, None] - n[None, :] * m_pad
    f = (k - L / 2.0) * plan.subcarrier_spacing
    h = estimate.response(f.ravel()).reshape(m_out, plan.input_size)
    return np.conj(h) if conjugate else h


def plan_weight_response(
    estimate: CsiEstimate, plan, m_out: int, conjugate: bool = False
) -> np.ndarray:
    """Public wrapper used by the engine; see :func:`_plan_weight_response`."""
    return _plan_weight_response(estimate, plan, m_out, conjugate)


def precode_input(
    x: np.ndarray,
    estimate: CsiEstimate,
    plan=None,
    m_out: int | None = None,
    conjugate: bool = False,
) -> np.ndarray:
    """Client-side precoding v = x / h*, using the column-collapsed channel."""
    xv = np.asarray(x, dtype=np.complex128)
    if plan is not None:
        h_full = _plan_weight_response(
            estimate, plan, m_out or plan.block_output, conjugate
        )
        h = h_full.mean(axis=0)
    else:
        raise ValueError("precode_input needs the MVM plan")
    return _floored_divide(xv, h, "precode_input")
