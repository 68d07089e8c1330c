#!/usr/bin/env python3
"""Print per-order series tail masses and residuals for a sample potential.

Shows the geometric collapse of the coefficient series: each extra order
multiplies the newest term's l1 mass by roughly M / (plane gap), and the
residual of the partial sum tracks the first dropped term.
"""

import argparse

import numpy as np

import halfspace_bloch as hb
from halfspace_bloch import bloch


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--amplitude", type=float, default=0.3)
    parser.add_argument("--max-order", type=int, default=14)
    args = parser.parse_args()

    basis = hb.identity_basis(2)
    q = hb.FourierPotential(
        basis, {(1, 0): args.amplitude, (1, -1): 0.5 * args.amplitude, (2, 1): -0.25j * args.amplitude}
    )
    t = np.array([0.3, 0.15])
    print(f"potential M = {q.norm_l1:.4f}, classification = {q.classification}")
    print(f"{'order':>5} {'tail l1':>12} {'residual':>12}")
    for order in range(1, args.max_order + 1):
        psi = bloch.bloch_series(basis, q, (0, 0), t, max_order=order, tail_tol=0.0)
        res = bloch.residual(basis, q, psi)
        print(f"{order:>5} {psi.tail:>12.4e} {res:>12.4e}")


if __name__ == "__main__":
    main()
