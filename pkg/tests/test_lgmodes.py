from math import e, exp, pi, sqrt

import numpy as np
import pytest
from scipy.integrate import simpson

from qndswap.errors import ConfigError
from qndswap.lgmodes import (
    BeamGeometry,
    allowed_pairs,
    mode_area,
    mode_norm,
    overlap_chi,
    overlap_table,
    parametric_pairs,
    radial_profile,
)


def chi_k0_exact(m, zs):
    # int s^m e^{-s(1+r)} ds / m!  with r = w_s^2 / (2 w_d^2)
    r = 1.0 / (2.0 * (1.0 + zs**2))
    return (1.0 + r) ** -(m + 1)


def chi_k1_exact(m, zs):
    r = 1.0 / (2.0 * (1.0 + zs**2))
    return sqrt(2 * r * e) * sqrt(m + 1) / (1.0 + r) ** (m + 2)


def test_gaussian_overlap_is_two_thirds():
    assert overlap_chi(0, 0, 0, BeamGeometry()) == pytest.approx(2 / 3, abs=1e-12)


@pytest.mark.parametrize("zs", [0.0, 0.5, 5.0, 50.0])
@pytest.mark.parametrize("m", range(6))
def test_k0_diagonal_overlaps_match_closed_form(m, zs):
    assert overlap_chi(0, m, m, BeamGeometry(zs_over_zr=zs)) == pytest.approx(chi_k0_exact(m, zs), abs=1e-11)


@pytest.mark.parametrize("zs", [0.0, 1.0, 5.0, 50.0])
@pytest.mark.parametrize("m", range(6))
def test_k1_neighbour_overlaps_match_closed_form(m, zs):
    assert overlap_chi(1, m, m + 1, BeamGeometry(zs_over_zr=zs)) == pytest.approx(chi_k1_exact(m, zs), abs=1e-11)


def test_overlap_is_symmetric_and_waist_independent():
    g1, g2 = BeamGeometry(1.0, 3.0), BeamGeometry(2.5, 3.0)
    assert overlap_chi(1, 2, 3, g1) == pytest.approx(overlap_chi(1, 3, 2, g1), abs=1e-15)
    assert overlap_chi(1, 2, 3, g1) == pytest.approx(overlap_chi(1, 2, 3, g2), abs=1e-11)


@pytest.mark.parametrize("l", range(13))
def test_unit_modes_are_normalized(l):
    assert mode_norm(l, BeamGeometry(quantum_waist=1.7)) == pytest.approx(1.0, abs=1e-10)


def test_profile_values():
    g = BeamGeometry()
    assert radial_profile("s", 0, g, 1.0) == pytest.approx(sqrt(0.5) * exp(-1), rel=1e-14)
    assert radial_profile("s", 3, g, 0.0) == 0.0
    # |U_l|^2 integrates to the mode area
    rho = np.linspace(0, 10, 20001)
    for l in (0, 2, 5):
        val = simpson(2 * pi * rho * radial_profile("s", l, g, rho) ** 2, rho)
        assert val == pytest.approx(mode_area(l, 1.0), rel=1e-9)
    with pytest.raises(ConfigError):
        radial_profile("s", 0, g, -1.0)
    with pytest.raises(ConfigError):
        radial_profile("x", 0, g, 1.0)


def test_mode_area():
    assert mode_area(0, 2.0) == pytest.approx(pi)
    assert mode_area(-3, 1.0) == pytest.approx(pi)


def test_geometry_validation_and_driving_waist():
    assert BeamGeometry(2.0, 3.0).driving_waist == pytest.approx(2.0 * sqrt(10))
    with pytest.raises(ConfigError):
        BeamGeometry(0.0)
    with pytest.raises(ConfigError):
        BeamGeometry(1.0, -1.0)


def test_selection_rules():
    assert allowed_pairs(0, 4) == [(0, 0), (1, 1), (2, 2), (3, 3)]
    assert allowed_pairs(1, 4) == [(0, 1), (1, 2), (2, 3)]
    assert parametric_pairs(0, 4) == [(0, 0)]
    assert parametric_pairs(1, 4) == [(0, 1)]
    with pytest.raises(ConfigError):
        allowed_pairs(2, 4)


def test_overlap_table():
    t = overlap_table(1, 6, BeamGeometry(zs_over_zr=5))
    assert t.pairs == allowed_pairs(1, 6)
    assert t[(2, 1)] == t[(1, 2)]
    with pytest.raises(ConfigError):
        overlap_table(0, 5, BeamGeometry())
