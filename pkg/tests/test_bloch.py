import math

import numpy as np
import pytest

import halfspace_bloch as hb
from halfspace_bloch import bloch, potential, spectrum
from halfspace_bloch.errors import ResonanceError
from halfspace_bloch.lattice import decompose

import helpers

BASIS = hb.identity_basis(2)
T = (0.5, 0.3)


def single_harmonic(a=0.1):
    return hb.FourierPotential(BASIS, {(1, 0): a})


def test_apply_a_zero_potential():
    q = hb.FourierPotential(BASIS, {})
    assert bloch.apply_A(BASIS, q, (0, 0), T, {(0, 0): 1.0}) == {}


def test_apply_a_single_harmonic():
    # lam = 0.34, |(1.5, 0.3)|^2 = 2.34: coefficient -A/2
    out = bloch.apply_A(BASIS, single_harmonic(), (0, 0), T, {(0, 0): 1.0})
    assert out == {(1, 0): pytest.approx(-0.05)}


def test_apply_a_second_application():
    first = bloch.apply_A(BASIS, single_harmonic(), (0, 0), T, {(0, 0): 1.0})
    second = bloch.apply_A(BASIS, single_harmonic(), (0, 0), T, first)
    # |(2.5, 0.3)|^2 = 6.34: (-A/2) * A / (0.34 - 6.34) = A^2 / 12
    assert second == {(2, 0): pytest.approx(0.01 / 12)}


def test_apply_a_resonance_error():
    # t = 0, gamma = (-1, 0): offset (1,0) hits |(0,0)|^2 = lam... not resonant;
    # offset (2,0) hits |(1,0)+t|^2 = 1 = lam exactly
    q = single_harmonic()
    with pytest.raises(ResonanceError) as err:
        coeffs = {(0, 0): 1.0}
        for _ in range(3):
            coeffs = bloch.apply_A(BASIS, q, (-1, 0), (0.0, 0.0), coeffs)
    assert err.value.index == (2, 0)


def test_series_zero_potential():
    out = bloch.bloch_series(BASIS, hb.FourierPotential(BASIS, {}), (0, 0), T)
    assert out.coeffs == {(0, 0): 1.0}
    assert out.tail == 0.0 and out.converged


def test_series_single_harmonic_values():
    out = bloch.bloch_series(BASIS, single_harmonic(), (0, 0), T, max_order=12)
    assert out.coeffs[(0, 0)] == 1.0
    assert out.coeffs[(1, 0)] == pytest.approx(-0.05)
    assert out.coeffs[(2, 0)] == pytest.approx(8.333333333e-4, rel=1e-6)
    assert out.converged
    # geometric decay of the term masses
    ratios = [b / a for a, b in zip(out.term_masses, out.term_masses[1:]) if a > 0]
    assert all(r < 0.6 for r in ratios)


def test_series_degenerate_leading_member():
    # gamma = (1,0) is the single leading member of the lam = 1 group at t = 0
    out = bloch.bloch_series(BASIS, single_harmonic(), (1, 0), (0.0, 0.0))
    assert out.coeffs[(1, 0)] == pytest.approx(0.1 / (1 - 4))
    assert out.converged


def test_closed_form_zero_potential():
    out = bloch.closed_form_coeffs(BASIS, hb.FourierPotential(BASIS, {}), (0, 0), T, 4)
    assert out.coeffs == {(0, 0): 1.0}


def test_closed_form_single_harmonic_hand_values():
    out = bloch.closed_form_coeffs(BASIS, single_harmonic(), (0, 0), T, depth=3)
    assert out.coeffs[(1, 0)] == pytest.approx(-0.05)
    assert out.coeffs[(2, 0)] == pytest.approx(0.01 / 12)


def test_closed_form_two_harmonics_chain_sum():
    # c((2,0)) = (q_{(2,0)} + q_{(1,0)}^2 / d_1) / d_2 with d_1 = -2, d_2 = -6
    a, b2 = 0.1, 0.07
    q = hb.FourierPotential(BASIS, {(1, 0): a, (2, 0): b2})
    out = bloch.closed_form_coeffs(BASIS, q, (0, 0), T, depth=2)
    assert out.coeffs[(2, 0)] == pytest.approx((b2 + a * a / -2.0) / -6.0)


def test_apply_a_is_linear():
    rng = np.random.default_rng(41)
    q = helpers.random_halfspace_potential(rng, BASIS, max_harmonics=4)
    f = {(1, 0): 0.3 + 0.1j, (1, -1): -0.2}
    g = {(1, 0): -1.0j, (2, 2): 0.7}
    alpha, beta = 0.6 - 0.2j, 1.3j
    combo = {}
    for key in set(f) | set(g):
        combo[key] = alpha * f.get(key, 0j) + beta * g.get(key, 0j)
    lhs = bloch.apply_A(BASIS, q, (0, 0), T, combo)
    af = bloch.apply_A(BASIS, q, (0, 0), T, f)
    ag = bloch.apply_A(BASIS, q, (0, 0), T, g)
    rhs = {}
    for key in set(af) | set(ag):
        rhs[key] = alpha * af.get(key, 0j) + beta * ag.get(key, 0j)
    assert set(lhs) == {k for k, v in rhs.items() if abs(v) > 0}
    for key, value in lhs.items():
        assert value == pytest.approx(rhs[key], abs=1e-15)


def test_closed_form_resonance_error():
    q = single_harmonic()
    with pytest.raises(ResonanceError):
        bloch.closed_form_coeffs(BASIS, q, (-1, 0), (0.0, 0.0), depth=3)


def test_series_closed_form_agreement_random():
    rng = np.random.default_rng(23)
    for _ in range(12):
        q, gamma, t = helpers.nonresonant_instance(rng, BASIS)
        series = bloch.bloch_series(BASIS, q, gamma, t, max_order=8)
        closed = bloch.closed_form_coeffs(BASIS, q, gamma, t, depth=6)
        assert bloch.max_discrepancy(series, closed, max_plane=6) < 1e-10


def test_halfspace_support_structural():
    rng = np.random.default_rng(29)
    for _ in range(8):
        q, gamma, t = helpers.nonresonant_instance(rng, BASIS)
        out = bloch.bloch_series(BASIS, q, gamma, t, max_order=8)
        zero = (0, 0)
        for delta in out.coeffs:
            if delta != zero:
                assert decompose(delta, q.k)[1] >= 1
        closed = bloch.closed_form_coeffs(BASIS, q, gamma, t, depth=5)
        for delta in closed.coeffs:
            if delta != zero:
                assert decompose(delta, q.k)[1] >= 1


def test_normalization_exact():
    rng = np.random.default_rng(31)
    q, gamma, t = helpers.nonresonant_instance(rng, BASIS)
    out = bloch.bloch_series(BASIS, q, gamma, t)
    assert out.coeffs[(0, 0)] == 1.0 + 0j


def test_residual_zero_potential():
    q = hb.FourierPotential(BASIS, {})
    psi = bloch.bloch_series(BASIS, q, (0, 0), T)
    assert bloch.residual(BASIS, q, psi) == 0.0


def test_residual_of_series_is_small():
    out = bloch.bloch_series(BASIS, single_harmonic(), (0, 0), T, max_order=12)
    assert bloch.residual(BASIS, single_harmonic(), out) < 1e-10


def test_residual_of_bare_wave_is_potential_norm():
    q = hb.FourierPotential(BASIS, {(1, 0): 0.3, (2, -1): -0.4j})
    free = bloch.BlochCoefficients(
        gamma=(0, 0),
        t=T,
        k=1,
        sign="+",
        coeffs={(0, 0): 1.0 + 0j},
        order=0,
        lam=spectrum.eigenvalue(BASIS, (0, 0), T),
    )
    assert bloch.residual(BASIS, q, free) == pytest.approx(q.norm_l2)


def test_residual_equals_next_term_defect():
    # the defect of the order-N partial sum telescopes to q * (last term)
    rng = np.random.default_rng(37)
    for _ in range(6):
        q, gamma, t = helpers.nonresonant_instance(rng, BASIS)
        for order in (2, 4):
            psi = bloch.bloch_series(BASIS, q, gamma, t, max_order=order, tail_tol=0.0)
            term = {(0, 0): 1.0 + 0j}
            for _ in range(order):
                term = bloch.apply_A(BASIS, q, gamma, t, term)
            defect = potential.convolve(q.coeffs, term)
            expected = math.sqrt(sum(abs(v) ** 2 for v in defect.values()))
            assert bloch.residual(BASIS, q, psi) == pytest.approx(
                expected, abs=1e-12
            )


def test_residual_decreases_with_order():
    q = single_harmonic(0.2)
    prev = math.inf
    for order in (2, 4, 6, 8):
        psi = bloch.bloch_series(BASIS, q, (0, 0), T, max_order=order, tail_tol=0.0)
        res = bloch.residual(BASIS, q, psi)
        assert res < prev
        prev = res


def test_degenerate_leading_members_independent():
    # t = (0.5, 0): lam = 0.25 group {(0,0), (-1,0)} shares the k=2 top plane
    t = (0.5, 0.0)
    q = hb.FourierPotential(BASIS, {(0, 1): 0.3, (1, 1): 0.2})
    assert q.classification == (2, "+")
    group = spectrum.degeneracy_group(BASIS, (0, 0), t, k=2, cutoff=6.0)
    assert group.s == 2
    leading = group.leading_members()
    vectors = []
    for b in leading:
        psi = bloch.bloch_series(BASIS, q, b, t, max_order=10)
        assert bloch.residual(BASIS, q, psi) < 1e-9
        vectors.append(psi)
    # the s x s matrix of coefficients at the leading members is the identity
    mat = np.zeros((len(leading), len(leading)), dtype=complex)
    for i, psi in enumerate(vectors):
        for j, b in enumerate(leading):
            offset = tuple(np.subtract(b, leading[i]))
            mat[i, j] = psi.coeffs.get(offset, 0j)
    assert np.allclose(mat, np.eye(len(leading)))


def test_minus_class_series_and_closed_form_agree():
    q = hb.FourierPotential(BASIS, {(0, -1): 0.2, (1, -2): -0.1j})
    assert q.classification == (2, "-")
    t = (0.3, 0.15)
    series = bloch.bloch_series(BASIS, q, (0, 0), t, max_order=8)
    closed = bloch.closed_form_coeffs(BASIS, q, (0, 0), t, depth=6)
    assert bloch.max_discrepancy(series, closed, max_plane=6) < 1e-10
    for delta in series.coeffs:
        if delta != (0, 0):
            assert decompose(delta, 2)[1] <= -1
    assert bloch.residual(BASIS, q, series) < 1e-9


def test_non_convergence_flag():
    out = bloch.bloch_series(
        BASIS, single_harmonic(), (0, 0), T, max_order=1, tail_tol=1e-30
    )
    assert not out.converged
    assert out.tail > 1e-30


def test_json_round_trip():
    out = bloch.bloch_series(BASIS, single_harmonic(), (0, 0), T, max_order=6)
    doc = out.to_json_dict()
    assert doc["gamma"] == [0, 0]
    assert doc["lambda"] == pytest.approx(0.34)
    assert doc["order"] == out.order
    rebuilt = {tuple(e["delta"]): complex(e["re"], e["im"]) for e in doc["entries"]}
    assert rebuilt == out.coeffs


@pytest.mark.parametrize(
    "generators",
    ([[1.0, 0.0], [0.0, 1.0]], [[1.0, 0.0], [1.0, 1.0]], [[2 * math.pi, 0.0], [0.0, 2 * math.pi]]),
    ids=("identity", "skewed", "scaled"),
)
def test_routes_agree_on_non_identity_bases(generators):
    basis = hb.LatticeBasis(np.array(generators))
    q = hb.FourierPotential(basis, {(1, 0): 0.1, (1, 1): 0.05})
    t = basis.reduce_quasimomentum((0.21, 0.34))
    series = bloch.bloch_series(basis, q, (0, 0), t, max_order=9)
    closed = bloch.closed_form_coeffs(basis, q, (0, 0), t, depth=6)
    assert bloch.max_discrepancy(series, closed, max_plane=6) < 1e-10
    assert bloch.residual(basis, q, series) < 1e-9


def test_pointwise_quasiperiodicity():
    # for the integer lattice the period lattice is 2 pi Z^2: the constructed
    # function gains exactly e^{i <t, w>} across a period w
    q = hb.FourierPotential(BASIS, {(1, 0): 0.2, (1, -1): 0.1j})
    psi = bloch.bloch_series(BASIS, q, (0, 0), T, max_order=10)
    rng = np.random.default_rng(97)
    for _ in range(5):
        x = rng.uniform(-1, 1, size=2)
        w = 2 * math.pi * np.array([1.0, -2.0])
        lhs = bloch.evaluate_function(BASIS, psi, x + w)
        rhs = np.exp(1j * float(np.dot(T, w))) * bloch.evaluate_function(BASIS, psi, x)
        assert lhs == pytest.approx(rhs, abs=1e-12)


def test_pad_guard():
    q = hb.FourierPotential(BASIS, {(3, 0): 0.1})
    psi = bloch.bloch_series(BASIS, q, (0, 0), T, max_order=4)
    with pytest.raises(ValueError):
        bloch.residual(BASIS, q, psi, pad=1.0)
    assert bloch.residual(BASIS, q, psi, pad=4.0) < 1e-6
