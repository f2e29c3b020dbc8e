"""SWAP quality along nu1 = 2 / nu2, from the Fock engine and from the closed forms.

For a random input, prints the fidelity and the component ratios of the
protocol output next to the printed closed form and the exact inverse.

    python3 scripts/swap_vs_nu2.py --seed 3
"""
import argparse

import numpy as np

from qndswap.protocol import ProtocolParams, QubitAmplitudes, alpha_closed_form, alpha_exact, run_swap
from qndswap.spectral import build_encoding_k0


def main():
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--nu2", type=float, nargs="+", default=[1.5, 2, 5, 10, 20, 50, 100])
    args = p.parse_args()

    a = QubitAmplitudes.random(np.random.default_rng(args.seed))
    enc = build_encoding_k0(2)
    print(f"{'nu2':>7} {'fidelity':>10} {'a4/a1':>10} {'exact':>10} {'printed':>10} {'a2/a1':>9} {'a3/a1':>9}")
    for nu2 in args.nu2:
        nu1 = 2.0 / nu2
        r = run_swap(ProtocolParams(0, 2, nu1, nu2), a, enc).subsystems[0]
        _, a2, a3, a4 = r.ratios
        print(
            f"{nu2:7.3g} {r.fidelity:10.6f} {a4:10.6f} {abs(alpha_exact(nu1, nu2)['a4']):10.6f} "
            f"{abs(alpha_closed_form(nu1, nu2)[3]):10.6f} {a2:9.2e} {a3:9.2e}"
        )


if __name__ == "__main__":
    main()
