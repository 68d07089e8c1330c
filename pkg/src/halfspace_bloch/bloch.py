"""Constructive Bloch functions for half-space potentials.

Two routes to the same coefficients, kept deliberately separate so they can
check each other:

* the operator series: iterate the transformation A that convolves with the
  potential and divides by the eigenvalue gap, and sum the terms;
* the closed-form recursion: solve for the coefficients plane by plane,
  dividing by d(g, delta) = |g+t|^2 - |g+delta+t|^2 once per target index.

Both produce coefficient maps supported on the base index 0 and the strict
half-space planes only, normalized to 1 at the base plane wave.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Mapping, Sequence

import numpy as np

from .errors import ResonanceError
from .lattice import IndexVector, LatticeBasis, as_index, decompose
from .potential import FourierPotential, convolve
from .spectrum import eigenvalue

#: scale of the guard below which a denominator counts as resonant
DENOM_TOL_SCALE = 1e-12

DEFAULT_MAX_ORDER = 12
DEFAULT_TAIL_TOL = 1e-12


def denominator_tolerance(lam: float) -> float:
    return DENOM_TOL_SCALE * (1.0 + abs(lam))


@dataclass(frozen=True)
class BlochCoefficients:
    """Fourier coefficients of a Bloch function over offsets from its base index.

    ``coeffs`` maps the offset delta to c(gamma, delta), with c(gamma, 0) = 1
    exactly and support otherwise restricted to the open half-space planes.
    ``order`` is the series order or plane depth used; ``tail`` the l1 mass
    of the last series term (None for the closed form); ``term_masses`` the
    per-order l1 masses actually observed.
    """

    gamma: IndexVector
    t: tuple[float, ...]
    k: int
    sign: str
    coeffs: dict[IndexVector, complex]
    order: int
    lam: float
    tail: float | None = None
    converged: bool = True
    term_masses: tuple[float, ...] = ()

    def to_json_dict(self) -> dict:
        entries = [
            {"delta": list(n), "re": c.real, "im": c.imag}
            for n, c in sorted(self.coeffs.items())
        ]
        return {
            "gamma": list(self.gamma),
            "t": list(self.t),
            "lambda": self.lam,
            "order": self.order,
            "entries": entries,
        }


def _require_classified(q: FourierPotential) -> tuple[int, str]:
    if q.classification is None and q.coeffs:
        raise ValueError("potential is not classifiable into a half-lattice")
    return (q.k or 1, q.sign or "+")


def apply_A(
    basis: LatticeBasis,
    q: FourierPotential,
    gamma: Sequence[int],
    t: Sequence[float],
    coeffs: Mapping[IndexVector, complex],
    denom_tol: float | None = None,
) -> dict[IndexVector, complex]:
    """One application of the gap-weighted convolution transformation.

    Sends mass at offset delta to delta + g1 for every support index g1 of
    the potential, weighted by q_{g1} / (lam - |gamma + delta + g1 + t|^2)
    with lam = |gamma + t|^2.  Raises :class:`ResonanceError` when a target
    denominator vanishes, which the half-space hypotheses exclude for valid
    bases (simple eigenvalue, or leading member of its group).
    """
    gamma = as_index(gamma, basis.dimension)
    t = np.asarray(t, dtype=float)
    lam = eigenvalue(basis, gamma, t)
    tol = denominator_tolerance(lam) if denom_tol is None else denom_tol
    out: dict[IndexVector, complex] = {}
    for g1, qv in q.coeffs.items():
        for delta, cv in coeffs.items():
            target = tuple(a + b for a, b in zip(delta, g1))
            denom = lam - eigenvalue(
                basis, tuple(a + b for a, b in zip(gamma, target)), t
            )
            if abs(denom) < tol:
                raise ResonanceError(
                    f"resonant denominator at offset {target}: {denom!r}",
                    index=target,
                    value=denom,
                )
            out[target] = out.get(target, 0j) + qv * cv / denom
    return {n: v for n, v in sorted(out.items()) if v != 0}


def bloch_series(
    basis: LatticeBasis,
    q: FourierPotential,
    gamma: Sequence[int],
    t: Sequence[float],
    max_order: int = DEFAULT_MAX_ORDER,
    tail_tol: float = DEFAULT_TAIL_TOL,
) -> BlochCoefficients:
    """Partial sums of the A-iteration applied to the base plane wave.

    Stops when the l1 mass of the newest term drops below ``tail_tol`` or at
    ``max_order``; the achieved tail and convergence flag are recorded on
    the result rather than raised, so callers can decide.
    """
    k, sign = _require_classified(q)
    gamma = as_index(gamma, basis.dimension)
    t = np.asarray(t, dtype=float)
    lam = eigenvalue(basis, gamma, t)
    zero = (0,) * basis.dimension

    total: dict[IndexVector, complex] = {zero: 1.0 + 0j}
    term: dict[IndexVector, complex] = {zero: 1.0 + 0j}
    masses: list[float] = []
    tail = 0.0
    order = 0
    for order in range(1, max_order + 1):
        term = apply_A(basis, q, gamma, t, term)
        tail = sum(abs(v) for v in term.values())
        masses.append(tail)
        for n, v in term.items():
            total[n] = total.get(n, 0j) + v
        if tail < tail_tol:
            break
    if not q.coeffs:
        order, tail = 0, 0.0

    total = {n: v for n, v in sorted(total.items()) if v != 0}
    total[zero] = 1.0 + 0j
    return BlochCoefficients(
        gamma=gamma,
        t=tuple(float(x) for x in t),
        k=k,
        sign=sign,
        coeffs=total,
        order=order,
        lam=lam,
        tail=tail,
        converged=tail < tail_tol,
        term_masses=tuple(masses),
    )


def closed_form_coeffs(
    basis: LatticeBasis,
    q: FourierPotential,
    gamma: Sequence[int],
    t: Sequence[float],
    depth: int,
) -> BlochCoefficients:
    """Plane-by-plane solution of the coefficient recursion up to a plane depth.

    The coefficient at an offset on plane p is the potential-convolution of
    the coefficients on planes below p, divided by d(gamma, delta); chains
    never descend, so each plane is determined by the previous ones alone.
    Requires the base eigenvalue to be simple (resonances raise).
    """
    k, sign = _require_classified(q)
    sig = 1 if sign == "+" else -1
    gamma = as_index(gamma, basis.dimension)
    t = np.asarray(t, dtype=float)
    lam = eigenvalue(basis, gamma, t)
    tol = denominator_tolerance(lam)
    zero = (0,) * basis.dimension

    # potential support split by signed plane index
    by_plane: dict[int, list[tuple[IndexVector, complex]]] = {}
    for g1, qv in q.coeffs.items():
        p = sig * decompose(g1, k)[1]
        by_plane.setdefault(p, []).append((g1, qv))

    computed: dict[int, dict[IndexVector, complex]] = {0: {zero: 1.0 + 0j}}
    for p in range(1, depth + 1):
        numerators: dict[IndexVector, complex] = {}
        for p1, entries in by_plane.items():
            lower = computed.get(p - p1)
            if not lower:
                continue
            for g1, qv in entries:
                for dlt, cv in lower.items():
                    target = tuple(a + b for a, b in zip(dlt, g1))
                    numerators[target] = numerators.get(target, 0j) + qv * cv
        plane_coeffs: dict[IndexVector, complex] = {}
        for dlt, num in sorted(numerators.items()):
            d = lam - eigenvalue(basis, tuple(a + b for a, b in zip(gamma, dlt)), t)
            if abs(d) < tol:
                raise ResonanceError(
                    f"d(gamma, delta) vanished at delta={dlt}: {d!r}",
                    index=dlt,
                    value=d,
                )
            if num != 0:
                plane_coeffs[dlt] = num / d
        computed[p] = plane_coeffs

    coeffs: dict[IndexVector, complex] = {zero: 1.0 + 0j}
    for p in range(1, depth + 1):
        coeffs.update(computed[p])
    coeffs = dict(sorted(coeffs.items()))
    return BlochCoefficients(
        gamma=gamma,
        t=tuple(float(x) for x in t),
        k=k,
        sign=sign,
        coeffs=coeffs,
        order=depth,
        lam=lam,
        tail=None,
        converged=True,
        term_masses=(),
    )


def residual(
    basis: LatticeBasis,
    q: FourierPotential,
    psi: BlochCoefficients,
    pad: float | None = None,
) -> float:
    """l2 norm of the Fourier coefficients of (-Laplacian + q - lam) applied to psi.

    Exact on the truncated coefficient set: the defect is supported on the
    support of psi plus one potential convolution, all of which is included.
    ``pad``, when given, must cover that one-convolution growth; it exists
    so callers can assert their truncation intent.
    """
    if pad is not None:
        growth = max(
            (
                math.sqrt(float(basis.to_cartesian(n) @ basis.to_cartesian(n)))
                for n in q.coeffs
            ),
            default=0.0,
        )
        if pad < growth:
            raise ValueError(
                f"pad {pad} is below the one-convolution support growth {growth:.6g}"
            )
    t = np.asarray(psi.t, dtype=float)
    defect: dict[IndexVector, complex] = {}
    for dlt, cv in psi.coeffs.items():
        shifted = eigenvalue(
            basis, tuple(a + b for a, b in zip(psi.gamma, dlt)), t
        )
        defect[dlt] = defect.get(dlt, 0j) + (shifted - psi.lam) * cv
    for n, v in convolve(q.coeffs, psi.coeffs).items():
        defect[n] = defect.get(n, 0j) + v
    return math.sqrt(sum(abs(v) ** 2 for v in defect.values()))


def evaluate_function(
    basis: LatticeBasis, psi: BlochCoefficients, x: Sequence[float]
) -> complex:
    """Pointwise value of the Bloch function from its coefficients.

    Spot-check use only: sums c(gamma, delta) exp(i <gamma + delta + t, x>)
    over the stored offsets.
    """
    x = np.asarray(x, dtype=float)
    t = np.asarray(psi.t, dtype=float)
    total = 0j
    for delta, cv in psi.coeffs.items():
        wave = basis.to_cartesian(tuple(a + b for a, b in zip(psi.gamma, delta))) + t
        total += cv * np.exp(1j * float(wave @ x))
    return total


def max_discrepancy(
    a: BlochCoefficients, b: BlochCoefficients, max_plane: int | None = None
) -> float:
    """Largest coefficient difference on planes both computations determine.

    Series order N determines planes up to N and the closed form determines
    planes up to its depth, so the comparison is restricted to planes up to
    the smaller ``order`` (or to ``max_plane`` when given).
    """
    if a.gamma != b.gamma or a.k != b.k or a.sign != b.sign:
        raise ValueError("coefficient sets describe different Bloch functions")
    limit = min(a.order, b.order) if max_plane is None else max_plane
    sig = 1 if a.sign == "+" else -1
    worst = 0.0
    for key in set(a.coeffs) | set(b.coeffs):
        p = sig * decompose(key, a.k)[1]
        if 0 < p <= limit or key == (0,) * len(key):
            worst = max(worst, abs(a.coeffs.get(key, 0j) - b.coeffs.get(key, 0j)))
    return worst
