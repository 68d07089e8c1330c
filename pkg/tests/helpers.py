"""Shared independent oracles and instance generators for the test suite.

Oracles here deliberately avoid the library's own code paths: brute-force
box scans, explicit Gram-Schmidt, literal chain-sum evaluation.  Expected
values frozen into tests were computed with these.
"""

from __future__ import annotations

import itertools
import math
from fractions import Fraction

import numpy as np

import halfspace_bloch as hb
from halfspace_bloch import galerkin, spectrum

# -- geometry oracles ---------------------------------------------------------


def gram_schmidt_separation(generators: np.ndarray, k: int) -> float:
    """Separation constant by explicit sequential Gram-Schmidt projection."""
    mat = np.asarray(generators, dtype=float)
    others = [mat[j] for j in range(mat.shape[0]) if j != k - 1]
    ortho: list[np.ndarray] = []
    for v in others:
        w = v.astype(float)
        for u in ortho:
            w = w - (w @ u) * u
        ortho.append(w / np.linalg.norm(w))
    h = mat[k - 1].astype(float)
    for u in ortho:
        h = h - (h @ u) * u
    return float(np.linalg.norm(h))


def ball_scan_oracle(basis: hb.LatticeBasis, center, radius: float):
    """Brute-force bounding-box scan for the lattice ball."""
    center = np.asarray(center, dtype=float)
    spread = int(math.ceil(radius * np.abs(basis._inverse).sum())) + 2
    mid = np.rint(center @ basis._inverse).astype(int)
    out = []
    for n in itertools.product(
        *[range(m - spread, m + spread + 1) for m in mid]
    ):
        v = basis.to_cartesian(n) - center
        if math.sqrt(float(v @ v)) <= radius:
            out.append(n)
    return sorted(out)


def collision_scan_oracle(basis, gamma, t, radius=8.0, tol=1e-9):
    """All lattice points whose free eigenvalue collides with gamma's."""
    lam = spectrum.eigenvalue(basis, gamma, t)
    hits = []
    for n in ball_scan_oracle(basis, -np.asarray(t, float), radius):
        if abs(spectrum.eigenvalue(basis, n, t) - lam) <= tol:
            hits.append(n)
    return sorted(hits)


# -- 1-D chain-sum oracle -----------------------------------------------------


def compositions(total: int, parts: int):
    """All tuples of ``parts`` positive integers summing to ``total``."""
    if parts == 1:
        yield (total,)
        return
    for first in range(1, total - parts + 2):
        for rest in compositions(total - first, parts - 1):
            yield (first,) + rest


def oned_chain_oracle(n: int, q: dict, p: int):
    """Literal chain-sum evaluation of the 1-D coefficient (reduced units).

    c_p = (q_p + sum over chains q_{n_1}..q_{n_k} q_{p-n(k)} / prod_s
    4 (p - n(s)) (2n - p + n(s))) / (4 p (2n - p)).
    """
    total = q.get(p, 0)
    for k in range(1, p):
        for comp in compositions(p, k + 1):
            prod = q.get(comp[-1], 0)
            for m in comp[:-1]:
                prod = prod * q.get(m, 0)
            if prod == 0:
                continue
            denom = 1
            running = 0
            for s in range(k):
                running += comp[s]
                denom *= 4 * (p - running) * (2 * n - p + running)
            total = total + prod / denom
    return total / (4 * p * (2 * n - p))


# -- instance generators ------------------------------------------------------


def random_unit_disc(rng, scale: float = 1.0) -> complex:
    r = scale * math.sqrt(rng.uniform(0, 1))
    theta = rng.uniform(0, 2 * math.pi)
    return complex(r * math.cos(theta), r * math.sin(theta))


def random_halfspace_potential(
    rng,
    basis,
    k: int = 1,
    sign: str = "+",
    max_harmonics: int = 8,
    max_p: int = 3,
    max_a: int = 3,
    coeff_scale: float = 1.0,
):
    """Random finite potential supported in the (k, sign) open half-lattice."""
    sig = 1 if sign == "+" else -1
    count = int(rng.integers(1, max_harmonics + 1))
    coeffs = {}
    while len(coeffs) < count:
        p = sig * int(rng.integers(1, max_p + 1))
        a = [int(rng.integers(-max_a, max_a + 1)) for _ in range(basis.dimension - 1)]
        idx = list(a)
        idx.insert(k - 1, p)
        coeffs[tuple(idx)] = random_unit_disc(rng, coeff_scale)
    return hb.FourierPotential(basis, coeffs)


def random_rational_t(rng, basis, denominator_max: int = 9) -> np.ndarray:
    """Quasimomentum with rational generator coordinates in [-1/2, 1/2)."""
    coords = []
    for _ in range(basis.dimension):
        den = int(rng.integers(2, denominator_max + 1))
        num = int(rng.integers(-(den // 2), den - den // 2))
        frac = Fraction(num, den)
        if frac >= Fraction(1, 2):
            frac -= 1
        coords.append(float(frac))
    return np.asarray(coords) @ basis.generators


def min_denominator_gap(basis, q, gamma, t, floor: float = 9.0) -> float:
    """Sound lower bound for |lam - |gamma+delta+t|^2| over the support cone.

    Scans every delta on positive planes within the ball where the gap could
    be below ``floor``; outside it the gap exceeds ``floor`` by the triangle
    inequality.
    """
    lam = spectrum.eigenvalue(basis, gamma, t)
    r = math.sqrt(lam)
    radius = r + math.sqrt(lam + floor) + 1.0
    k, sign = q.k, q.sign
    sig = 1 if sign == "+" else -1
    best = floor
    base = basis.to_cartesian(gamma) + np.asarray(t, float)
    for n in basis.enumerate_ball(np.zeros(basis.dimension), radius):
        if sig * n[k - 1] < 1:
            continue
        v = base + basis.to_cartesian(n)
        best = min(best, abs(lam - float(v @ v)))
    return best


def nonresonant_instance(rng, basis, max_harmonics: int = 6, min_gap: float = 1.0):
    """(q, gamma, t) with potential scaled to M <= min(0.5, 0.5 * gap).

    Resamples gamma and t until every denominator in the support cone is
    bounded below by ``min_gap``.
    """
    gammas = [(0, 0), (1, 0), (0, 1), (-1, 0), (0, -1)]
    while True:
        q = random_halfspace_potential(
            rng, basis, max_harmonics=max_harmonics, max_p=2, max_a=2
        )
        gamma = gammas[int(rng.integers(0, len(gammas)))]
        t = rng.uniform(0.05, 0.45, size=basis.dimension)
        gap = min_denominator_gap(basis, q, gamma, t)
        if gap < min_gap:
            continue
        target = min(0.5, 0.5 * gap)
        if q.norm_l1 > target:
            q = q.scaled(target / q.norm_l1)
        return q, gamma, t


# -- 1-D oracle helpers --------------------------------------------------------

PI_SQ = math.pi**2

#: draw set for reduced 1-D coefficients: exact rationals plus one complex pair
ONED_DRAWS = (
    0,
    Fraction(3, 10),
    Fraction(-3, 10),
    complex(0.7, 0.2),
    complex(-0.7, -0.2),
)


def oned_basis() -> hb.LatticeBasis:
    return hb.LatticeBasis(np.array([[2 * math.pi]]))


def oned_potential(reduced: dict) -> hb.FourierPotential:
    """Float-world potential from reduced (pi^2 units) coefficients."""
    return hb.FourierPotential(
        oned_basis(), {(m,): complex(v) * PI_SQ for m, v in reduced.items()}
    )


def oned_oracle_multiplicity(reduced: dict, n: int, cutoff_planes: int | None = None):
    basis = oned_basis()
    planes = cutoff_planes if cutoff_planes is not None else 3 * n + 2
    op = galerkin.build(basis, oned_potential(reduced), (0.0,), 2 * math.pi * planes)
    lam = spectrum.eigenvalue(basis, (n,), (0.0,))
    return galerkin.geometric_multiplicity(op, lam), op, lam
