"""Synchronization statistics and the two mixer models.

Monte Carlo preamble detection across SNRs, then the waveform pipeline
with the ideal multiplier versus the diode-ring sign model, whose
distortion floor does not improve with more transmit power.
"""

import numpy as np

from rfmvm import bench, engine, frontend as fe

print("preamble detection over 300 random offsets (l_pre=61):")
for snr in (5.0, 10.0, 20.0):
    st = bench.sync_statistics(snr, trials=300, seed=0, l_pre=61, n_ratio=16)
    print(f"  {snr:4.0f} dB: detected {st.detect_rate*100:5.1f}%, "
          f"worst timing error {st.timing_error_max} sample")

rng = np.random.default_rng(5)
N, M = 64, 24
plan = engine.plan_mvm(N, M, 6, 1, cp_len=6)
W = rng.uniform(0, 1, (M, N)) * np.exp(2j * np.pi * rng.random((M, N)))
x = rng.uniform(0, 1, N) * np.exp(2j * np.pi * rng.random(N))
truth = W @ x


def rmse(frontend, snr):
    y = engine.run_mvm(W, x, plan=plan, fidelity="waveform",
                       frontend=frontend, snr_db=snr, seed=1)
    return np.sqrt(np.mean(np.abs(y - truth) ** 2) / N)


ideal = fe.FrontendConfig(mixer_model="ideal-baseband")
diode = fe.FrontendConfig(mixer_model="diode-sign-passband")
print("\nwaveform-fidelity RMSE (normalized):")
print(f"  ideal multiplier, noiseless: {rmse(ideal, None):.4f}")
print(f"  diode sign mixer, noiseless: {rmse(diode, None):.4f}")
print(f"  diode at 25 dB SNR:          {rmse(diode, 25.0):.4f}")
print(f"  diode at 35 dB SNR:          {rmse(diode, 35.0):.4f}")
print("the diode floor barely moves with SNR: switching distortion, not "
      "thermal noise, limits it")
