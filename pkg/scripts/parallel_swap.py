"""Parallel SWAP over every subsystem, in either regime.

k = 0 shares one pair of constants; k = 1 takes per-tetrad constants from
the spectrum, scaled so that nu1 * nu2 = 2 in each subsystem.

    python3 scripts/parallel_swap.py --regime 1 --max-oam 8 --zs 5
"""
import argparse

import numpy as np

from qndswap.lgmodes import BeamGeometry
from qndswap.protocol import QubitAmplitudes, Scenario, geometric_constants, run_scenario


def main():
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--regime", type=int, choices=(0, 1), default=0)
    p.add_argument("--max-oam", type=int, default=8)
    p.add_argument("--nu2", type=float, default=20.0)
    p.add_argument("--zs", type=float, default=5.0)
    p.add_argument("--seed", type=int, default=0)
    args = p.parse_args()

    rng = np.random.default_rng(args.seed)
    g = BeamGeometry(zs_over_zr=args.zs)
    n = args.max_oam // 2
    inputs = [QubitAmplitudes.random(rng) for _ in range(n)]
    if args.regime == 0:
        nu1, nu2 = 2 / args.nu2, args.nu2
    else:
        base = geometric_constants(1, args.max_oam, g)
        print("unit-strength tetrad constants 2 mu_j:", np.array2string(base, precision=4))
        nu2 = tuple(np.full(n, args.nu2))
        nu1 = tuple(2 / np.asarray(nu2))
    res = run_scenario(Scenario(regime=args.regime, max_oam=args.max_oam, nu1=nu1, nu2=nu2, geometry=g, inputs=inputs))
    target = "(X x X) SWAP" if res.swap_times_xx else "SWAP"
    print(f"target: {target}")
    for j, s in enumerate(res.subsystems):
        print(
            f"subsystem {j}: fidelity {s.fidelity:.6f}  projection gap {s.projection_distance:.1e}  "
            f"two-qubit weight {s.two_qubit_weight:.6f}  cross leakage {s.cross_leakage:.1e}"
        )


if __name__ == "__main__":
    main()
