#!/usr/bin/env python3
"""NMSE boxplots vs readout-noise intensity, one box group per squeezing.

Input columns: cavity_squeezing_db, noise_relative_intensity, seed,
train_nmse, test_nmse.
"""

import matplotlib.pyplot as plt

from common import base_parser, data_extents, finish, floats, load_table, run

REQUIRED = ["cavity_squeezing_db", "noise_relative_intensity", "seed",
            "train_nmse", "test_nmse"]


def render(table, ax):
    dbs = floats(table, "cavity_squeezing_db")
    noises = floats(table, "noise_relative_intensity")
    nmse = floats(table, "test_nmse")
    ax.set_xlabel("readout noise relative to vacuum")
    ax.set_ylabel("test NMSE")
    if not nmse:
        return None
    unique_db = sorted(set(dbs), reverse=True)  # 0 dB first
    unique_noise = sorted(set(noises))
    width = 0.8 / len(unique_db)
    colors = plt.cm.viridis([i / max(len(unique_db) - 1, 1)
                             for i in range(len(unique_db))])
    for i, db in enumerate(unique_db):
        positions, groups = [], []
        for j, noise in enumerate(unique_noise):
            values = [nmse[k] for k in range(len(nmse))
                      if dbs[k] == db and noises[k] == noise]
            if values:
                positions.append(j + (i - (len(unique_db) - 1) / 2) * width)
                groups.append(values)
        boxes = ax.boxplot(groups, positions=positions, widths=width * 0.85,
                           patch_artist=True, manage_ticks=False)
        for patch in boxes["boxes"]:
            patch.set_facecolor(colors[i])
        ax.plot([], [], color=colors[i], label=f"{db:.2f} dB")
    ax.set_xticks(range(len(unique_noise)))
    ax.set_xticklabels([f"{n:g}" for n in unique_noise])
    ax.set_yscale("log")
    ax.legend(fontsize=8, title="cavity squeezing")
    return data_extents(list(range(len(unique_noise))), nmse)


def main(argv=None):
    args = base_parser(__doc__).parse_args(argv)
    table = load_table(args.input, REQUIRED)
    fig, ax = plt.subplots(figsize=(5.6, 3.8))
    extents = render(table, ax)
    return finish(fig, ax, args, empty=extents is None)


if __name__ == "__main__":
    raise SystemExit(run(main))
