"""Plot CSV output of the bethe-csma CLI.

    python docs/plot_traces.py bethe-error sweep.csv [more.csv ...]
    python docs/plot_traces.py bum bum_trace.csv
    python docs/plot_traces.py compare results/   # directory written by `compare --out`
"""

import argparse
import pathlib

import matplotlib.pyplot as plt
import pandas as pd


def plot_bethe_error(paths):
    fig, ax = plt.subplots()
    for path in paths:
        df = pd.read_csv(path)
        label = f"{df['topology'].iloc[0]}-{df['n'].iloc[0]}"
        ax.plot(df["load"], df["normalized_e_max"], marker="o", label=label)
    ax.set_xlabel("load")
    ax.set_ylabel("normalized Bethe error")
    ax.legend()
    return fig


def plot_bum(path):
    df = pd.read_csv(path)
    fig, (top, bottom) = plt.subplots(2, 1, sharex=True)
    for col in [c for c in df.columns if c.startswith("r_")]:
        top.plot(df["t"], df[col], label=col)
    top.set_ylabel("intensity")
    top.legend(fontsize="small")
    bottom.plot(df["t"], df["K_B"])
    bottom.set_xlabel("iteration")
    bottom.set_ylabel("K_B")
    return fig


def plot_compare(directory):
    directory = pathlib.Path(directory)
    fig, ax = plt.subplots()
    for trace in sorted(directory.glob("*_trace.csv")):
        name = trace.stem.removesuffix("_trace")
        df = pd.read_csv(trace)
        x = df["t"] if "t" in df else df["update_index"]
        cols = [c for c in df.columns if c.startswith("r_")]
        ax.plot(x, df[cols[0]], label=f"{name} {cols[0]}")
    ax.set_xscale("log")
    ax.set_xlabel("update")
    ax.set_ylabel("intensity of link 0")
    ax.legend()
    return fig


def main():
    parser = argparse.ArgumentParser(description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
    parser.add_argument("kind", choices=["bethe-error", "bum", "compare"])
    parser.add_argument("inputs", nargs="+")
    parser.add_argument("--save", help="write the figure here instead of showing it")
    args = parser.parse_args()

    if args.kind == "bethe-error":
        fig = plot_bethe_error(args.inputs)
    elif args.kind == "bum":
        fig = plot_bum(args.inputs[0])
    else:
        fig = plot_compare(args.inputs[0])
    fig.tight_layout()
    if args.save:
        fig.savefig(args.save)
    else:
        plt.show()


if __name__ == "__main__":
    main()
