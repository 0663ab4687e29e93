#!/usr/bin/env python3
"""Phase-space heatmap from a steady-state Wigner CSV (columns x, p, w)."""

import numpy as np
import matplotlib.pyplot as plt

from common import SchemaError, base_parser, data_extents, finish, floats, load_table, run

REQUIRED = ["x", "p", "w"]


def render(table, ax):
    xs = np.array(floats(table, "x"))
    ps = np.array(floats(table, "p"))
    ws = np.array(floats(table, "w"))
    if xs.size == 0:
        ax.set_xlabel("x")
        ax.set_ylabel("p")
        return None
    ux, up = np.unique(xs), np.unique(ps)
    if xs.size != ux.size * up.size:
        raise SchemaError(f"wigner grid is not complete: {xs.size} points for "
                          f"{ux.size} x {up.size} axes")
    grid = ws.reshape(ux.size, up.size)  # rows ordered x-major by the writer
    scale = np.max(np.abs(grid)) or 1.0
    mesh = ax.pcolormesh(ux, up, grid.T, cmap="RdBu_r", vmin=-scale, vmax=scale,
                         shading="nearest")
    ax.figure.colorbar(mesh, ax=ax, label="W(x, p)")
    ax.set_aspect("equal")
    ax.set_xlabel("x")
    ax.set_ylabel("p")
    return data_extents(list(ux), list(up))


def main(argv=None):
    args = base_parser(__doc__).parse_args(argv)
    table = load_table(args.input, REQUIRED)
    fig, ax = plt.subplots(figsize=(5.2, 4.4))
    extents = render(table, ax)
    return finish(fig, ax, args, empty=extents is None)


if __name__ == "__main__":
    raise SystemExit(run(main))
