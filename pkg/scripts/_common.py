"""Shared argument parsing and CSV output for the experiment scripts."""

import argparse
import csv
import sys

from relaysim.cli import SWEEP_COLUMNS


def parser(description, trials, seed, out):
    p = argparse.ArgumentParser(description=description)
    p.add_argument("--trials", type=int, default=trials)
    p.add_argument("--seed", type=int, default=seed)
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--out", default=out, help="CSV path, '-' for stdout")
    return p


def open_out(path):
    if path == "-":
        return sys.stdout
    return open(path, "w", newline="", encoding="utf-8")


def write_sweep(result, path):
    fh = open_out(path)
    try:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(SWEEP_COLUMNS)
        for point in result.points:
            for scheme in result.spec.schemes:
                st = point.stats[scheme]
                w.writerow(
                    [
                        str(result.spec.sweep_variable),
                        f"{point.value:.6g}",
                        str(scheme),
                        st.trials,
                        f"{st.mean_snr:.6f}",
                        f"{st.mean_rate_bits:.6f}",
                        f"{st.stderr_rate:.6f}",
                    ]
                )
    finally:
        if fh is not sys.stdout:
            fh.close()


def summarize(result):
    names = [str(s) for s in result.spec.schemes]
    print(f"{'value':>12} " + " ".join(f"{n:>9}" for n in names), file=sys.stderr)
    for point in result.points:
        rates = " ".join(f"{point.stats[s].mean_rate_bits:9.4f}" for s in result.spec.schemes)
        print(f"{point.value:12.4g} {rates}", file=sys.stderr)
