"""Tetrad gains mu_j = Im(lambda) of the k = 1 input-output matrix against the waist offset.

    python3 scripts/tetrad_spectrum.py --max-oam 14 > spectrum.csv
"""
import argparse
import sys

import numpy as np

from qndswap.coupling import SystemConfig, build_M, couplings_for
from qndswap.lgmodes import BeamGeometry
from qndswap.spectral import eigendecompose, group_tetrads, pair_structure_check


def main():
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--max-oam", type=int, default=14)
    p.add_argument("--eta", type=float, default=1.0)
    p.add_argument("--zs-max", type=float, default=50.0)
    p.add_argument("--points", type=int, default=51)
    args = p.parse_args()

    n = args.max_oam // 2
    sys.stdout.write("zs_over_zr," + ",".join(f"mu_{j}" for j in range(n)) + "\n")
    for zs in np.linspace(0.0, args.zs_max, args.points):
        cfg = SystemConfig(1, args.max_oam, args.eta, BeamGeometry(zs_over_zr=zs))
        es = eigendecompose(build_M(couplings_for(cfg)))
        pair_structure_check(es)
        mus = [t.mu for t in group_tetrads(es)]
        sys.stdout.write(f"{zs:.6g}," + ",".join(f"{m:.10f}" for m in mus) + "\n")


if __name__ == "__main__":
    main()
