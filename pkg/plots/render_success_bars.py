#!/usr/bin/env python3
"""Retrieval success bars with binomial error bars and the 1/n guessing line.

Input columns: n, m, mean_photon, trajectories, p_hat, stderr, baseline.
"""

import numpy as np
import matplotlib.pyplot as plt

from common import SchemaError, base_parser, data_extents, finish, floats, load_table, run

REQUIRED = ["n", "m", "mean_photon", "trajectories", "p_hat", "stderr", "baseline"]


def render(table, ax):
    ms = floats(table, "m")
    photons = floats(table, "mean_photon")
    p_hat = floats(table, "p_hat")
    err = floats(table, "stderr")
    baseline = floats(table, "baseline")
    ax.set_xlabel("lobe mean photon number")
    ax.set_ylabel("success probability")
    if not p_hat:
        return None
    if len(set(baseline)) != 1:
        raise SchemaError("baseline column must be constant (one lobe count)")
    unique_m = sorted(set(ms))
    unique_photons = sorted(set(photons))
    width = 0.8 / len(unique_m)
    for i, m in enumerate(unique_m):
        xs, ys, es = [], [], []
        for j, ph in enumerate(unique_photons):
            for k in range(len(p_hat)):
                if ms[k] == m and photons[k] == ph:
                    xs.append(j + (i - (len(unique_m) - 1) / 2) * width)
                    ys.append(p_hat[k])
                    es.append(err[k])
        ax.bar(xs, ys, width=width * 0.9, yerr=es, capsize=3, label=f"m = {m:g}")
    ax.axhline(baseline[0], color="black", linewidth=1.2,
               label=f"guessing 1/n = {baseline[0]:.2f}")
    ax.set_xticks(range(len(unique_photons)))
    ax.set_xticklabels([f"{ph:g}" for ph in unique_photons])
    ax.set_ylim(0, 1.05)
    ax.legend(fontsize=8)
    return data_extents(list(range(len(unique_photons))), p_hat + [baseline[0]])


def main(argv=None):
    args = base_parser(__doc__).parse_args(argv)
    table = load_table(args.input, REQUIRED)
    fig, ax = plt.subplots(figsize=(5.2, 3.6))
    extents = render(table, ax)
    return finish(fig, ax, args, empty=extents is None)


if __name__ == "__main__":
    raise SystemExit(run(main))
