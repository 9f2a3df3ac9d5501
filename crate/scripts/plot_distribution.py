"""Plot distribution.csv written by `toa-lab distribution`."""
import argparse

import matplotlib.pyplot as plt
import pandas as pd


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("csv", nargs="?", default="out/distribution.csv")
    ap.add_argument("-o", "--output", default="distribution.png")
    args = ap.parse_args()

    df = pd.read_csv(args.csv, comment="#")
    fig, ax = plt.subplots(figsize=(6, 4))
    ax.plot(df.tau, df.free, label="free")
    ax.plot(df.tau, df.barrier, label="barrier")
    ax.plot(df.tau, df.shortened, "--", label="free, shortened path")
    ax.set_xlabel("tau")
    ax.set_ylabel("Pi(tau)")
    ax.legend()
    fig.tight_layout()
    fig.savefig(args.output, dpi=150)


if __name__ == "__main__":
    main()
