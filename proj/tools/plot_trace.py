#!/usr/bin/env python3
"""Plot train cost, test accuracy and uplink traffic from fedssca CSV output.

    python3 tools/plot_trace.py out/trace.csv -o cost.png
    python3 tools/plot_trace.py out/compare.csv -o compare.png   # seed-averaged per algorithm
"""

import argparse

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt
import pandas as pd


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("csv", nargs="+")
    ap.add_argument("-o", "--output", default="trace.png")
    ap.add_argument("--log", action="store_true", help="log-scale cost axis")
    args = ap.parse_args()

    fig, (ax_cost, ax_acc, ax_comm) = plt.subplots(1, 3, figsize=(13, 3.8))
    for path in args.csv:
        df = pd.read_csv(path)
        groups = df.groupby("algorithm") if "algorithm" in df else [(path, df)]
        for name, g in groups:
            m = g.groupby("t").mean(numeric_only=True)
            ax_cost.plot(m.index, m["train_cost"], label=name)
            ax_acc.plot(m.index, m["test_acc"], label=name)
            ax_comm.plot(m["uplink_scalars"], m["train_cost"], label=name)

    ax_cost.set_xlabel("round")
    ax_cost.set_ylabel("train cost")
    ax_acc.set_xlabel("round")
    ax_acc.set_ylabel("test accuracy")
    ax_comm.set_xlabel("cumulative uplink scalars")
    ax_comm.set_ylabel("train cost")
    if args.log:
        ax_cost.set_yscale("log")
        ax_comm.set_yscale("log")
    ax_cost.legend()
    fig.tight_layout()
    fig.savefig(args.output, dpi=120)


if __name__ == "__main__":
    main()
