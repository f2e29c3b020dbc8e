"""Overlap integrals against the waist offset, for k = 0 (diagonal) or k = 1 (neighbours).

    python3 scripts/overlaps_vs_distance.py --regime 0 --max-oam 6 --out k0.csv
"""
import argparse
import sys

import numpy as np

from qndswap.lgmodes import BeamGeometry, allowed_pairs, overlap_chi


def main():
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--regime", type=int, choices=(0, 1), default=0)
    p.add_argument("--max-oam", type=int, default=6)
    p.add_argument("--zs-max", type=float, default=50.0)
    p.add_argument("--points", type=int, default=101)
    p.add_argument("--out", type=argparse.FileType("w"), default=sys.stdout)
    args = p.parse_args()

    pairs = allowed_pairs(args.regime, args.max_oam)
    args.out.write("zs_over_zr," + ",".join(f"chi_{l}_{m}" for l, m in pairs) + "\n")
    for zs in np.linspace(0.0, args.zs_max, args.points):
        g = BeamGeometry(zs_over_zr=zs)
        vals = [overlap_chi(args.regime, l, m, g) for l, m in pairs]
        args.out.write(f"{zs:.6g}," + ",".join(f"{v:.10f}" for v in vals) + "\n")

    if args.regime == 1:
        # spread between the largest and smallest neighbour overlap
        spread = []
        for zs in np.linspace(0.0, args.zs_max, args.points):
            g = BeamGeometry(zs_over_zr=zs)
            v = [overlap_chi(1, l, m, g) for l, m in pairs]
            spread.append(max(v) - min(v))
        print(f"smallest spread over the grid: {min(spread):.4g}", file=sys.stderr)


if __name__ == "__main__":
    main()
