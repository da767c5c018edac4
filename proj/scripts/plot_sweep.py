#!/usr/bin/env python3
"""Plot mean coding length against block count from an experiment CSV."""
import argparse

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt
import pandas as pd


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("csv")
    ap.add_argument("-o", "--output", default="sweep.png")
    args = ap.parse_args()

    df = pd.read_csv(args.csv)
    means = df.groupby(["mode", "blocks"])["actual_bits"].mean().unstack(0)
    ax = means.plot(marker="o", logx=True)
    ax.set_xscale("log", base=2)
    ax.set_xlabel("blocks B")
    ax.set_ylabel("mean coding length (bits)")
    ax.grid(alpha=0.3)
    plt.tight_layout()
    plt.savefig(args.output, dpi=120)


if __name__ == "__main__":
    main()
