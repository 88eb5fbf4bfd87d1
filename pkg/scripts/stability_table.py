"""Sweep seeded normal-field bumps over the stable product table and one unstable pair.

Usage: python3 scripts/stability_table.py [--seeds 50] [--length 8] [--resolution 64]
"""

import argparse
import time

from parakahler import variation


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--seeds", type=int, default=50)
    ap.add_argument("--length", type=float, default=8.0)
    ap.add_argument("--resolution", type=int, default=64)
    args = ap.parse_args()

    rows = [(r, "stable") for r in variation.STABLE_TABLE] + [(variation.UNSTABLE_EXAMPLE, "unstable")]
    print(f"{'first':>18} {'second':>18} {'eps':>4} {'curves':>22} {'max':>9} {'min':>9}  verdict")
    for row, label in rows:
        t0 = time.perf_counter()
        grid = variation.geodesic_configuration(*row, length=args.length, resolution=args.resolution)
        fam = variation.sweep(grid, "normal", range(args.seeds))
        first, second, eps, c1, c2 = row
        print(f"{first:>18} {second:>18} {eps:>+4d} {c1 + 'x' + c2:>22} {fam.max_value:9.3f} "
              f"{fam.min_value:9.3f}  {fam.verdict} ({label}, {time.perf_counter() - t0:.1f} s)")


if __name__ == "__main__":
    main()
