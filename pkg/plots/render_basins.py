#!/usr/bin/env python3
"""Basin-of-attraction scatter: initial coherent amplitudes colored by the
lobe they relax onto (columns re_alpha, im_alpha, assigned_lobe)."""

import matplotlib.pyplot as plt

from common import base_parser, data_extents, finish, floats, load_table, run

REQUIRED = ["re_alpha", "im_alpha", "assigned_lobe"]

COLORS = ["tab:red", "tab:green", "tab:blue", "tab:orange", "tab:purple"]


def render(table, ax):
    res = floats(table, "re_alpha")
    ims = floats(table, "im_alpha")
    lobes = [int(float(v)) for v in table["assigned_lobe"]]
    ax.set_xlabel("Re alpha")
    ax.set_ylabel("Im alpha")
    ax.set_aspect("equal")
    if not res:
        return None
    for lobe in sorted(set(lobes)):
        xs = [res[i] for i in range(len(res)) if lobes[i] == lobe]
        ys = [ims[i] for i in range(len(res)) if lobes[i] == lobe]
        ax.scatter(xs, ys, s=28, color=COLORS[lobe % len(COLORS)],
                   label=f"lobe {lobe}")
    ax.axhline(0, color="gray", linewidth=0.5, alpha=0.5)
    ax.axvline(0, color="gray", linewidth=0.5, alpha=0.5)
    ax.legend(fontsize=8)
    return data_extents(res, ims)


def main(argv=None):
    args = base_parser(__doc__).parse_args(argv)
    table = load_table(args.input, REQUIRED)
    fig, ax = plt.subplots(figsize=(4.6, 4.4))
    extents = render(table, ax)
    return finish(fig, ax, args, empty=extents is None)


if __name__ == "__main__":
    raise SystemExit(run(main))
