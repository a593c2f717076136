"""Energy-per-MAC accounting across schemes and problem sizes.

Evaluates the closed forms for the waveform-generation, sampling, and
digital-decode terms, the thermodynamic limit they approach, and the
Landauer reference floor.
"""

import numpy as np

from rfmvm import energy as en

profile = en.HardwareProfile()  # reference hardware, 25 dB SNR
print(f"hardware: eta={profile.eta:.3e}, e_adc={profile.e_adc*1e12:.0f} pJ, "
      f"e_dig={profile.e_dig*1e12:.0f} pJ, SNR {profile.snr_db} dB\n")

print("per-MAC energy vs input size (square MVM, W-precoding, fJ/MAC):")
print("  N        e1       e2       e3       total    TOPS/W")
for n in [2**k for k in range(7, 16, 2)]:
    b = en.energy_breakdown("w-precode", n, n, profile)
    print(f"  {n:6d}  {b.e1*1e15:7.3f}  {b.e2*1e15:7.3f}  {b.e3*1e15:7.3f}"
          f"  {b.e_mvm*1e15:7.3f}  {b.tops_per_watt:8.1f}")

print("\nscheme comparison at N=M=4096 (fJ/MAC):")
for scheme in ("vanilla", "basic", "w-precode", "x-precode"):
    b = en.energy_breakdown(scheme, 4096, 4096, profile)
    print(f"  {scheme:10s} total {b.e_mvm*1e15:8.3f}  "
          f"(e3 = {b.e3*1e15:.3f})")

print("\nclassifier aggregate (784-300-100-10, MAC-weighted):")
agg = en.aggregate_model_energy(
    [(784, 300), (300, 100), (100, 10)], "w-precode", profile, alpha=0.33
)
print(f"  e1={agg.e1*1e15:.3f}, e2={agg.e2*1e15:.3f}, e3={agg.e3*1e15:.3f} fJ/MAC")

print("\nlimits:")
snr_5bit = en.db_to_linear(14.54)
print(f"  thermodynamic limit at the 5-bit operating point: "
      f"{en.e_tdl(snr_5bit)*1e21:.1f} zJ/MAC")
print(f"  Landauer floor, 4-bit MAC: {en.landauer_limit(4)*1e21:.1f} zJ/MAC")
print(f"  Landauer floor, 5-bit MAC: {en.landauer_limit(5)*1e21:.1f} zJ/MAC")

print("\nthroughput: "
      f"{en.throughput(en.ThroughputParams(1, 25e6, 0.33, 0.25))/1e6:.2f} MOPS "
      "per client in a 25 MHz channel, "
      f"{en.throughput(en.ThroughputParams(1, 100e6, 0.33, 0.25))/1e6:.2f} MOPS at 100 MHz")
print(f"link budget: {en.link_budget_distance(9.0, -3.0):.2f} m at "
      "9 dBm transmit, -3 dBm required receive power, 9 dBi antennas")
