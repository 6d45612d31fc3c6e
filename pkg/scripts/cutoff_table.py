"""Cutoff transmittances per protocol and parameter set, plus the asymptotic
CV rate K/t at very high loss as a function of the excess noise.

    python3 scripts/cutoff_table.py
"""

import argparse

from qkdrates.presets import SET1, SET2
from qkdrates.sweep import KTALL, evaluate, find_cutoff


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--iters", type=int, default=50)
    args = ap.parse_args()
    print("protocol,set1_cutoff_t,set2_cutoff_t")
    for p in KTALL + ("wcp_upper", "decoy_upper"):
        c = [find_cutoff(p, ps, n_iter=args.iters) for ps in (SET1, SET2)]
        print(",".join([p] + ["none" if x is None else f"{x:.4g}" for x in c]))
    # set #2 CV has no electronic noise: K/t tends to a constant, so there
    # is no cutoff unless the excess noise exceeds ~0.021
    print("\nepsilon,K_over_t_at_1e-8 (set2 CV)")
    for eps in (0.001, 0.005, 0.01, 0.02, 0.021, 0.022, 0.05):
        ps = SET2.with_cv(epsilon=eps)
        print(f"{eps},{evaluate('cv', ps, 1e-8).K / 1e-8:.4g}")


if __name__ == "__main__":
    main()
