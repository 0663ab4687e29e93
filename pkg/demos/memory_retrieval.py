"""Pattern retrieval in the metastable window of the resonator memory.

Three stages, printed as they happen:

1. the Liouvillian spectrum opens a metastable window (timescale separation);
2. a single oversized squeezed-coherent probe relaxes onto the nearest lobe:
   |<a>| drops to the lobe amplitude and Mandel Q flips sign, then both freeze;
3. a batch of random probes is classified before and after relaxation, giving
   the retrieval success probability against the 1/n guessing baseline.

Run:  python demos/memory_retrieval.py   (takes a minute or two)
"""

import numpy as np

from sqnn.fock import ResonatorParams, liouvillian, spectrum, squeezed_coherent
from sqnn.memory import (
    build_lobe_set,
    lobe_amplitude,
    mc_trajectory,
    metastable_window,
    resolve_space,
    success_experiment,
)

params = ResonatorParams(3, 4, detuning=0.4, drive_strength=13.02, gamma_m=0.2)
space = resolve_space(params, probe_modulus=1.5, squeezing_max=0.5)
print(f"resonator (n=3, m=4), Fock cutoff {space.cutoff}")

pairs = spectrum(liouvillian(params, space), count=5, n_symmetry=3)
print("\nslowest Liouvillian eigenvalues (units of the single-photon rate):")
for i, (value, _) in enumerate(pairs):
    print(f"  lambda_{i + 1} = {value.real:+.4e} {value.imag:+.4e}i")
window = metastable_window(params, space, pairs=pairs)
print(f"metastable window [{window.t_start:.2f}, {window.t_end:.2f}], "
      f"gap ratio {window.gap_ratio:.0f}")

lobes = build_lobe_set(params, space, window)
amp = lobes.amplitude
print(f"lobe amplitude {amp:.3f}, lobe Mandel Q "
      + ", ".join(f"{q:+.3f}" for q in lobes.mandel_qs))

psi0 = squeezed_coherent(1.5 * amp * np.exp(1j * np.pi / 3),
                         0.5 * np.exp(-0.15j * np.pi), space)
record = mc_trajectory(psi0, params, space, t_max=window.observed_end(),
                       seed=20, n_times=61, lobes=lobes)
print("\none probe at 1.5x the lobe amplitude (|<a>|, Q) vs time:")
for i in range(0, 61, 10):
    marker = " <- in window" if record.times[i] >= window.t_start else ""
    print(f"  t={record.times[i]:5.2f}  |a|={abs(record.a_expect[i]):5.2f} "
          f"Q={record.mandel_q[i]:+6.2f}{marker}")

print("\nretrieval statistics (n=3, lobes at <n>=8, 60 random probes each):")
for m in (3, 4):
    from dataclasses import replace

    results = success_experiment(replace(params, dissipation_order=m),
                                 mean_photon_targets=[8.0], trajectories=60,
                                 seed=5, span=2.0, n_times=81)
    res = results[0]
    print(f"  m={m}: success {res.p_hat:.2f} +- {res.stderr:.2f} "
          f"(guessing: {res.baseline:.2f})")
