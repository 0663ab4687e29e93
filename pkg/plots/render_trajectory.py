#!/usr/bin/env python3
"""Trajectory observables over time: |<a>| on the left axis, Mandel Q on the
right (columns t, re_a, im_a, n, mandel_q, assigned_lobe)."""

import numpy as np
import matplotlib.pyplot as plt

from common import base_parser, data_extents, finish, floats, load_table, run

REQUIRED = ["t", "re_a", "im_a", "n", "mandel_q", "assigned_lobe"]


def render(table, ax):
    ts = floats(table, "t")
    re_a = np.array(floats(table, "re_a"))
    im_a = np.array(floats(table, "im_a"))
    q = floats(table, "mandel_q")
    ax.set_xlabel("time (1/gamma_1)")
    ax.set_ylabel("|<a>|", color="tab:red")
    if not ts:
        return None
    amp = np.hypot(re_a, im_a)
    ax.plot(ts, amp, color="tab:red", linewidth=1.2)
    ax.tick_params(axis="y", labelcolor="tab:red")
    twin = ax.twinx()
    twin.plot(ts, q, color="tab:blue", linewidth=1.0)
    twin.axhline(0.0, color="tab:blue", linewidth=0.6, alpha=0.5)
    twin.set_ylabel("Mandel Q", color="tab:blue")
    twin.tick_params(axis="y", labelcolor="tab:blue")
    return data_extents(ts, list(amp))


def main(argv=None):
    args = base_parser(__doc__).parse_args(argv)
    table = load_table(args.input, REQUIRED)
    fig, ax = plt.subplots(figsize=(6.0, 3.4))
    extents = render(table, ax)
    return finish(fig, ax, args, empty=extents is None)


if __name__ == "__main__":
    raise SystemExit(run(main))
