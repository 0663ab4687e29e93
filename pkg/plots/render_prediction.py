#!/usr/bin/env python3
"""Forecast overlay: target series vs reservoir prediction (columns k, target,
prediction)."""

import matplotlib.pyplot as plt

from common import base_parser, data_extents, finish, floats, load_table, run

REQUIRED = ["k", "target", "prediction"]


def render(table, ax):
    ks = floats(table, "k")
    target = floats(table, "target")
    prediction = floats(table, "prediction")
    ax.set_xlabel("time step")
    ax.set_ylabel("signal")
    if not ks:
        return None
    ax.plot(ks, target, color="black", linewidth=1.2, label="target")
    ax.plot(ks, prediction, color="tab:blue", linewidth=1.0, linestyle="--",
            label="prediction")
    ax.legend(fontsize=8)
    return data_extents(ks, target + prediction)


def main(argv=None):
    args = base_parser(__doc__).parse_args(argv)
    table = load_table(args.input, REQUIRED)
    fig, ax = plt.subplots(figsize=(6.4, 3.2))
    extents = render(table, ax)
    return finish(fig, ax, args, empty=extents is None)


if __name__ == "__main__":
    raise SystemExit(run(main))
