"""Cavity squeezing buys readout-noise robustness, at a small ideal-case cost.

Sweeps the forecasting task over (cavity squeezing x readout-noise level)
with several noise realizations each, printing the median test NMSE per grid
cell. At 20% of the vacuum fluctuations the -6.5 dB reservoir clearly beats
the passive one; with no noise the ordering flips.

Run:  python demos/noise_robustness.py
"""

import numpy as np

from sqnn.dataio import Split, henon_series, normalize_minmax01
from sqnn.gaussian import squeezing_db
from sqnn.reservoir import ReservoirConfig, noise_squeezing_sweep

split = Split(washout=300, train=3000, test=700)
series = normalize_minmax01(henon_series(4100, seed=7),
                            slice(0, split.washout + split.train))
base = ReservoirConfig(n_modes=12, input_squeezing=0.75, network_seed=42)

squeezings = [0.0, 0.75, 1.5]
noises = [0.0, 0.002, 0.2]
points = noise_squeezing_sweep(base, series, split,
                               cavity_squeezings=squeezings,
                               relative_noises=noises,
                               n_realizations=8)

print("median test NMSE (8 noise realizations per cell)\n")
header = "cavity squeezing " + "".join(f"{f'{r * 100:g}% noise':>14}" for r in noises)
print(header)
for xi_c in squeezings:
    cells = []
    for rel in noises:
        values = [p.test_nmse for p in points
                  if p.cavity_squeezing == xi_c and p.relative_noise == rel]
        cells.append(np.median(values))
    label = f"{squeezing_db(xi_c):+6.2f} dB"
    print(f"{label:>16} " + "".join(f"{c:>14.3e}" for c in cells))

print("\nreading the last column: squeezing rescues the reservoir under heavy")
print("readout noise; reading the first: strong squeezing is mildly")
print("detrimental in ideal conditions.")
