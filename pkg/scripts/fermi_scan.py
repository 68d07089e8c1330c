#!/usr/bin/env python3
"""Sample isoenergetic surfaces over the fundamental domain and export CSV.

The retained point set is identical for every admissible half-space
potential, so the scan only needs the free dispersion; use the oracle
command of the CLI to verify that identity on a perturbed operator.
"""

import argparse
import pathlib

import halfspace_bloch as hb
from halfspace_bloch import isoenergetic


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--rho", type=float, nargs="+", default=[0.5, 1.0])
    parser.add_argument("--resolution", type=int, default=101)
    parser.add_argument("--threshold", type=float, default=0.01)
    parser.add_argument("--outdir", type=pathlib.Path, default=pathlib.Path("fermi_out"))
    args = parser.parse_args()

    basis = hb.identity_basis(2)
    args.outdir.mkdir(parents=True, exist_ok=True)
    for rho in args.rho:
        sample = isoenergetic.sample_surface(
            basis, rho, resolution=args.resolution, threshold=args.threshold
        )
        path = args.outdir / f"fermi_rho_{rho:g}.csv"
        path.write_text(sample.to_csv(), encoding="utf-8")
        print(f"rho = {rho:g}: retained {len(sample.points)} of {args.resolution**2} points -> {path}")


if __name__ == "__main__":
    main()
