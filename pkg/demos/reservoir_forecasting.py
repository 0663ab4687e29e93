"""Forecast a chaotic series with the squeezed-light loop reservoir.

Walks through the full pipeline: synthesize the dataset, drive the loop,
train the linear readout, and compare against the constant predictor and an
unsqueezed (information-free) control. Also writes correlations.csv showing
how the same input sequence produces different nonlinear responses under
different phase encodings, which is the tunable-nonlinearity story.

Run:  python demos/reservoir_forecasting.py [output-dir]
"""

import sys
from pathlib import Path

import numpy as np

from sqnn.dataio import Split, henon_series, normalize_minmax01, write_csv
from sqnn.reservoir import (
    ReservoirConfig,
    forecast_experiment,
    run_sequence_ideal,
)

out_dir = Path(sys.argv[1]) if len(sys.argv) > 1 else Path("demo_output")
out_dir.mkdir(parents=True, exist_ok=True)

split = Split(washout=300, train=3000, test=700)
series = normalize_minmax01(henon_series(4100, seed=7), slice(0, split.washout + split.train))
print(f"dataset: {series.source}, {len(series)} samples, sha256 {series.sha256[:12]}")

cfg = ReservoirConfig(n_modes=12, input_squeezing=0.75, cavity_squeezing=0.0,
                      network_seed=42)
result = forecast_experiment(cfg, series, split)
print(f"\nreservoir with squeezed input encoding (-3.26 dB):")
print(f"  train NMSE    {result.train_nmse:.3e}")
print(f"  test NMSE     {result.test_nmse:.3e}")
print(f"  constant-mean {result.constant_nmse:.3e}  (no-skill baseline)")

control = forecast_experiment(
    ReservoirConfig(n_modes=12, input_squeezing=0.0, network_seed=42), series, split)
print(f"\ncontrol without input squeezing (no information enters the loop):")
print(f"  test NMSE     {control.test_nmse:.3e}  == baseline "
      f"{control.constant_nmse:.3e}")

# nonlinear response of one reservoir correlation to the encoding choice
inputs = series.values[:120]
columns = {}
for encoding in ("quarter-pi", "half-pi", "pi"):
    cfg_enc = ReservoirConfig(n_modes=2, input_squeezing=0.75, network_seed=5,
                              encoding=encoding)
    rows = run_sequence_ideal(cfg_enc, inputs)
    columns[encoding] = rows[:, 1]  # the <x_0 x_1> cross-correlation

write_csv(out_dir / "correlations.csv",
          ["k"] + list(columns),
          [(k, *(columns[e][k] for e in columns)) for k in range(len(inputs))])
print(f"\nwrote encoding-response curves to {out_dir / 'correlations.csv'}")
print("the three columns respond to the same inputs with visibly different")
print("nonlinear profiles; that tunability is what the phase encoding buys.")
