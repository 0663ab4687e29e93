#!/usr/bin/env python3
"""Photon-number histogram of a state (columns k, p_k)."""

import matplotlib.pyplot as plt

from common import base_parser, data_extents, finish, floats, load_table, run

REQUIRED = ["k", "p_k"]


def render(table, ax):
    ks = floats(table, "k")
    ps = floats(table, "p_k")
    ax.set_xlabel("Fock level k")
    ax.set_ylabel("population")
    if not ks:
        return None
    ax.bar(ks, ps, width=0.9, color="tab:red", alpha=0.8)
    return data_extents(ks, ps)


def main(argv=None):
    args = base_parser(__doc__).parse_args(argv)
    table = load_table(args.input, REQUIRED)
    fig, ax = plt.subplots(figsize=(5.0, 3.2))
    extents = render(table, ax)
    return finish(fig, ax, args, empty=extents is None)


if __name__ == "__main__":
    raise SystemExit(run(main))
