#!/usr/bin/env python3
"""Reservoir correlation response vs input step, one curve per encoding.

Input: a column k plus one numeric column per encoding preset.
"""

import matplotlib.pyplot as plt

from common import SchemaError, base_parser, data_extents, finish, floats, load_table, run

REQUIRED = ["k"]


def render(table, ax):
    ks = floats(table, "k")
    series = {name: floats(table, name) for name in table if name != "k"}
    if not series:
        raise SchemaError("correlations input needs at least one value column "
                          "besides 'k'")
    ax.set_xlabel("input step k")
    ax.set_ylabel("correlation")
    if not ks:
        return None
    everything = []
    for name, values in series.items():
        ax.plot(ks, values, linewidth=1.0, label=name)
        everything.extend(values)
    ax.legend(fontsize=8, title="encoding")
    return data_extents(ks, everything)


def main(argv=None):
    args = base_parser(__doc__).parse_args(argv)
    table = load_table(args.input, REQUIRED)
    fig, ax = plt.subplots(figsize=(6.0, 3.2))
    extents = render(table, ax)
    return finish(fig, ax, args, empty=extents is None)


if __name__ == "__main__":
    raise SystemExit(run(main))
