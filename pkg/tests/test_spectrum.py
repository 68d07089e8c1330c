import math

import numpy as np
import pytest

import halfspace_bloch as hb
from halfspace_bloch import spectrum
from halfspace_bloch.errors import CutoffError

import helpers

BASIS = hb.identity_basis(2)


def test_eigenvalue_examples():
    assert spectrum.eigenvalue(BASIS, (1, 0), (0.1, 0.2)) == pytest.approx(1.25)
    assert spectrum.eigenvalue(BASIS, (0, 0), (0.0, 0.0)) == 0.0
    assert spectrum.eigenvalue(BASIS, (0, 1), (0.5, 0.3)) == pytest.approx(1.94)


def test_is_simple_collision_at_origin():
    assert not spectrum.is_simple(BASIS, (1, 0), (0.0, 0.0), cutoff=6.0)


def test_is_simple_generic_t():
    assert spectrum.is_simple(BASIS, (0, 0), (0.1, 0.2), cutoff=4.0)


def test_is_simple_half_integer_t():
    assert not spectrum.is_simple(BASIS, (0, 0), (0.5, 0.0), cutoff=4.0)


def test_is_simple_cutoff_guard():
    with pytest.raises(CutoffError):
        spectrum.is_simple(BASIS, (3, 0), (0.1, 0.2), cutoff=1.0)


def test_degeneracy_group_unit_circle():
    group = spectrum.degeneracy_group(BASIS, (1, 0), (0.0, 0.0), k=1, cutoff=6.0)
    assert group.lam == pytest.approx(1.0)
    assert group.members == (
        ((1, 0), 1),
        ((0, -1), 0),
        ((0, 1), 0),
        ((-1, 0), -1),
    )
    assert group.s == 1
    assert [(p.n, len(p.members)) for p in group.planes] == [(1, 1), (0, 2), (-1, 1)]
    # brute-force collision scan agrees
    assert sorted(group.member_indices()) == helpers.collision_scan_oracle(
        BASIS, (1, 0), (0.0, 0.0)
    )


def test_degeneracy_group_simple_case():
    group = spectrum.degeneracy_group(BASIS, (0, 0), (0.1, 0.2), k=1, cutoff=4.0)
    assert group.multiplicity == 1
    assert group.s == 1
    assert len(group.planes) == 1
    assert group.excluded_gap > 0.5


def test_degeneracy_group_half_half():
    # oracle: the four points (0,0), (-1,0), (0,-1), (-1,-1) collide at 0.5;
    # two of them sit on the top k=1 plane p=0, so s = 2
    group = spectrum.degeneracy_group(BASIS, (0, 0), (0.5, 0.5), k=1, cutoff=6.0)
    assert group.lam == pytest.approx(0.5)
    assert sorted(group.member_indices()) == helpers.collision_scan_oracle(
        BASIS, (0, 0), (0.5, 0.5)
    )
    assert sorted(group.member_indices()) == [(-1, -1), (-1, 0), (0, -1), (0, 0)]
    assert group.s == 2
    assert group.planes[0].members == ((0, -1), (0, 0))


def test_group_eigenvalue_agreement():
    group = spectrum.degeneracy_group(BASIS, (1, 0), (0.0, 0.0), k=2, cutoff=6.0)
    for b, _ in group.members:
        assert spectrum.eigenvalue(BASIS, b, group.t) == pytest.approx(group.lam)


def test_group_canonical_under_cutoff_growth():
    small = spectrum.degeneracy_group(BASIS, (1, 0), (0.0, 0.0), k=1, cutoff=6.0)
    large = spectrum.degeneracy_group(BASIS, (1, 0), (0.0, 0.0), k=1, cutoff=9.0)
    assert small.members == large.members
    assert small.planes == large.planes
    assert small.s == large.s


def test_axis_choice_changes_planes():
    g1 = spectrum.degeneracy_group(BASIS, (0, 0), (0.5, 0.5), k=1, cutoff=6.0)
    g2 = spectrum.degeneracy_group(BASIS, (0, 0), (0.5, 0.5), k=2, cutoff=6.0)
    assert set(g1.member_indices()) == set(g2.member_indices())
    assert g2.planes[0].members == ((-1, 0), (0, 0))


def test_is_simple_iff_single_member():
    rng = np.random.default_rng(5)
    for _ in range(20):
        gamma = (int(rng.integers(-2, 3)), int(rng.integers(-2, 3)))
        t = helpers.random_rational_t(rng, BASIS)
        cutoff = 4.0 * (math.sqrt(spectrum.eigenvalue(BASIS, gamma, t)) + 1.0)
        simple = spectrum.is_simple(BASIS, gamma, t, cutoff=cutoff)
        group = spectrum.degeneracy_group(BASIS, gamma, t, k=1, cutoff=cutoff)
        assert simple == (group.multiplicity == 1)
