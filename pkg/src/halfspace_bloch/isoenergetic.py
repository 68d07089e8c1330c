"""Sampling of isoenergetic (Fermi) surfaces over the quasimomentum domain.

The level set at energy rho^2 is the union of spheres of radius rho,
translated by the lattice and clipped to the fundamental domain.  Points
are reported as a cloud with their distance to the nearest sphere and the
translating lattice index; set-level claims (potential independence) are
tested on the cloud directly.
"""

from __future__ import annotations

import io
import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import CutoffError
from .lattice import IndexVector, LatticeBasis
from .spectrum import eigenvalue


@dataclass(frozen=True)
class SurfaceSample:
    """Grid points of the fundamental domain near the energy-rho^2 surface.

    ``points`` holds (t, distance, nearest lattice index) for every retained
    grid point, where distance = min over lattice points g of
    | |g + t| - rho |.
    """

    rho: float
    resolution: int
    threshold: float
    points: tuple[tuple[tuple[float, ...], float, IndexVector], ...]

    def to_csv(self) -> str:
        if not self.points:
            dim = 0
        else:
            dim = len(self.points[0][0])
        buf = io.StringIO()
        cols = [f"t_{i+1}" for i in range(dim)] + ["distance"] + [
            f"gamma_{i+1}" for i in range(dim)
        ]
        buf.write(",".join(cols) + "\n")
        for t, dist, gamma in self.points:
            row = [f"{x:.17g}" for x in t] + [f"{dist:.17g}"] + [str(g) for g in gamma]
            buf.write(",".join(row) + "\n")
        return buf.getvalue()


def distance_to_surface(
    basis: LatticeBasis,
    t: Sequence[float],
    rho: float,
    cutoff: float,
) -> tuple[float, IndexVector]:
    """min over g of | |g + t| - rho | with its lexicographically first argmin.

    The cutoff must reach rho plus the fundamental-domain diameter so that
    the enumeration (over |g + t| <= cutoff) provably contains a minimizer.
    """
    if rho < 0:
        raise ValueError(f"rho must be nonnegative, got {rho}")
    needed = rho + basis.fundamental_diameter()
    if cutoff < needed:
        raise CutoffError(
            f"cutoff {cutoff} too small to certify the minimizer; need at least "
            f"{needed:.6g}"
        )
    t = np.asarray(t, dtype=float)
    best: tuple[float, IndexVector] | None = None
    for n in basis.enumerate_ball(-t, cutoff):
        dist = abs(math.sqrt(eigenvalue(basis, n, t)) - rho)
        if best is None or dist < best[0]:
            best = (dist, n)
    if best is None:
        raise CutoffError(f"empty enumeration ball at cutoff {cutoff}")
    return best


def sample_surface(
    basis: LatticeBasis,
    rho: float,
    resolution: int,
    threshold: float,
    cutoff: float | None = None,
) -> SurfaceSample:
    """Scan a uniform generator-coordinate grid and keep near-surface points.

    The grid is resolution points per axis across [-1/2, 1/2] (endpoints
    included; the two boundary sheets are lattice translates of each other).
    """
    if resolution < 2:
        raise ValueError(f"resolution must be at least 2, got {resolution}")
    if cutoff is None:
        cutoff = rho + basis.fundamental_diameter() + 1.0
    axis = np.linspace(-0.5, 0.5, resolution)
    grids = np.meshgrid(*([axis] * basis.dimension), indexing="ij")
    coords = np.stack([g.ravel() for g in grids], axis=-1)
    points = []
    for c in coords:
        t = c @ basis.generators
        dist, gamma = distance_to_surface(basis, t, rho, cutoff)
        if dist <= threshold:
            points.append((tuple(float(x) for x in t), dist, gamma))
    return SurfaceSample(
        rho=rho, resolution=resolution, threshold=threshold, points=tuple(points)
    )
