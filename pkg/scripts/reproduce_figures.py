"""Regenerate the comparison figures as CSV + SVG pairs.

    python3 scripts/reproduce_figures.py --out figures/

Writes ktall (both parameter sets), trust, trustcv, fdall, errorless and
qmem. Runs in well under a minute on one core.
"""

import argparse
import os

from qkdrates.cli import main as cli


def figures(out):
    j = lambda name: os.path.join(out, name)
    yield "ktall_set1", ["sweep", "--figure", "ktall", "--set", "1", "--grid", "60", "--x-min", "1e-7"]
    yield "ktall_set2", ["sweep", "--figure", "ktall", "--set", "2", "--grid", "60", "--x-min", "1e-7"]
    yield "trust_set1", ["sweep", "--figure", "trust", "--set", "1", "--grid", "60", "--x-min", "1e-5"]
    yield "trustcv_set1", ["sweep", "--figure", "trustcv", "--set", "1", "--grid", "60", "--x-min", "1e-2"]
    yield "fdall_set1", ["sweep", "--figure", "fdall", "--set", "1", "--grid", "150",
                         "--x-min", "1", "--x-max", "150"]
    yield "fdall_set2", ["sweep", "--figure", "fdall", "--set", "2", "--grid", "150",
                         "--x-min", "1", "--x-max", "250"]
    yield "errorless_set1", ["sweep", "--figure", "errorless", "--set", "1", "--grid", "60",
                             "--x-min", "1e-5"]
    yield "qmem", ["sweep", "--figure", "qmem", "--grid", "200", "--x-min", "10", "--x-max", "1000"]


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--out", default="figures")
    ap.add_argument("--workers", type=int, default=1)
    args = ap.parse_args()
    os.makedirs(args.out, exist_ok=True)
    for name, argv in figures(args.out):
        base = os.path.join(args.out, name)
        extra = ["--out", base + ".csv", "--svg", base + ".svg"]
        if argv[2] != "qmem":
            extra += ["--workers", str(args.workers)]
        code = cli(argv + extra)
        print(f"{name}: exit {code}")


if __name__ == "__main__":
    main()
