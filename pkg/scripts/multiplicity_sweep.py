#!/usr/bin/env python3
"""Sweep 1-D two-harmonic potentials: criterion zero set vs rank oracle.

For q = a pi^2 e^{i 2 pi x} + b pi^2 e^{i 4 pi x} the double eigenvalue
(2 pi)^2 keeps geometric multiplicity two exactly on the curve b = -a^2/4
(reduced units).  The sweep tabulates the criterion against the truncated
operator's kernel dimension along and off that curve.
"""

import argparse
from fractions import Fraction

import halfspace_bloch as hb
from halfspace_bloch import galerkin, rootfn, spectrum

import math

import numpy as np


def oracle_multiplicity(u: dict, n: int) -> int:
    basis = hb.LatticeBasis(np.array([[2 * math.pi]]))
    pi2 = math.pi**2
    q = hb.FourierPotential(basis, {(m,): complex(v) * pi2 for m, v in u.items()})
    op = galerkin.build(basis, q, (0.0,), 2 * math.pi * (3 * n + 2))
    return galerkin.geometric_multiplicity(op, spectrum.eigenvalue(basis, (n,), (0.0,)))


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--n", type=int, default=1)
    args = parser.parse_args()

    print(f"{'a':>8} {'b':>10} {'criterion':>12} {'oracle mult':>11}")
    for num in range(-4, 5):
        a = Fraction(num, 4)
        for b in (-a * a / 4, -a * a / 4 + Fraction(1, 5)):
            u = {1: a, 2: b}
            crit = rootfn.oned_double_criterion(args.n, u)
            mult = oracle_multiplicity(u, args.n)
            print(f"{str(a):>8} {str(b):>10} {str(crit):>12} {mult:>11}")


if __name__ == "__main__":
    main()
