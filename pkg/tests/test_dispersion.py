import numpy as np
import pytest

from spdc_angular.dispersion import (
    BBO_DEFAULT,
    CrystalSpec,
    SellmeierBranch,
    SellmeierSet,
    group_derivative,
    n_extraordinary,
    n_extraordinary_principal,
    n_ordinary,
    walkoff_angle,
    wavenumber,
)

C = 299792458.0

# Dispersionless stub: constant n_o = 1.5, n_e = 1.47 over a wide range.
CONST_SET = SellmeierSet(
    name="const-stub",
    ordinary=SellmeierBranch(b1=2.25, c1=0.0, e1=-1.0, d1=0.0),
    extraordinary=SellmeierBranch(b1=2.1609, c1=0.0, e1=-1.0, d1=0.0),
    lambda_min_um=0.1,
    lambda_max_um=10.0,
)


def sellmeier_oracle(lam_um, b1, c1, e1, d1):
    # direct transcription of the index formula, independent of the package path
    return np.sqrt(b1 + c1 / (lam_um**2 - e1) - d1 * lam_um**2)


class TestIndices:
    def test_ordinary_pump_wavelength_golden(self):
        expected = sellmeier_oracle(0.4068, 2.7359, 0.01878, 0.01822, 0.01354)
        assert n_ordinary(0.4068) == pytest.approx(expected, rel=1e-14)
        assert n_ordinary(0.4068) == pytest.approx(1.6915, abs=1e-4)

    def test_ordinary_degenerate_wavelength_golden(self):
        expected = sellmeier_oracle(0.8136, 2.7359, 0.01878, 0.01822, 0.01354)
        assert n_ordinary(0.8136) == pytest.approx(expected, rel=1e-14)
        assert n_ordinary(0.8136) == pytest.approx(1.6602, abs=1e-4)

    def test_out_of_range_raises_naming_range(self):
        with pytest.raises(ValueError, match=r"0\.22.*1\.06"):
            n_ordinary(1.2)
        with pytest.raises(ValueError):
            n_extraordinary_principal(0.1)

    def test_uniaxial_identities(self):
        lam = 0.65
        assert n_extraordinary(lam, 0.0) == pytest.approx(n_ordinary(lam), rel=1e-14)
        assert n_extraordinary(lam, np.pi / 2) == pytest.approx(
            n_extraordinary_principal(lam), rel=1e-14
        )

    def test_extraordinary_at_cut_golden(self):
        theta = np.deg2rad(29.3)
        no = n_ordinary(0.4068)
        nep = n_extraordinary_principal(0.4068)
        expected = 1.0 / np.sqrt(np.cos(theta) ** 2 / no**2 + np.sin(theta) ** 2 / nep**2)
        assert n_extraordinary(0.4068, theta) == pytest.approx(expected, rel=1e-14)
        assert n_extraordinary(0.4068, theta) == pytest.approx(1.6589, abs=2e-4)

    def test_negative_uniaxial_ordering_over_range(self):
        lams = np.linspace(BBO_DEFAULT.lambda_min_um, BBO_DEFAULT.lambda_max_um, 50)
        assert np.all(n_ordinary(lams) > n_extraordinary_principal(lams))

    def test_extraordinary_monotone_decreasing_in_angle(self):
        thetas = np.deg2rad(np.arange(0.0, 90.5, 0.5))
        ns = n_extraordinary(0.4068, thetas)
        assert np.all(np.diff(ns) < 0)


class TestWavenumber:
    def test_ordinary_golden(self, bbo_crystal):
        omega = 2 * np.pi * C / 0.8136e-6
        k = wavenumber(omega, "ordinary", bbo_crystal)
        assert k == pytest.approx(2 * np.pi * n_ordinary(0.8136) / 0.8136e-6, rel=1e-12)
        assert k == pytest.approx(1.2822e7, rel=2e-4)

    def test_pump_extraordinary_golden(self, bbo_crystal):
        omega = 2 * np.pi * C / 0.4068e-6
        k = wavenumber(omega, "extraordinary", bbo_crystal)
        expected = 2 * np.pi * n_extraordinary(0.4068, np.deg2rad(29.3)) / 0.4068e-6
        assert k == pytest.approx(expected, rel=1e-12)

    def test_doubling_frequency_doubles_k_for_constant_index(self):
        crystal = CrystalSpec(1e-3, np.deg2rad(29.3), sellmeier=CONST_SET)
        omega = 2 * np.pi * C / 0.8e-6
        k1 = wavenumber(omega, "ordinary", crystal)
        k2 = wavenumber(2 * omega, "ordinary", crystal)
        assert k2 == pytest.approx(2 * k1, rel=1e-14)

    def test_unknown_polarization(self, bbo_crystal):
        with pytest.raises(ValueError, match="polarization"):
            wavenumber(2e15, "diagonal", bbo_crystal)


def five_point_stencil(omega, polarization, crystal, rel_step=1e-5):
    h = rel_step * omega
    k = lambda om: wavenumber(om, polarization, crystal)
    return (-k(omega + 2 * h) + 8 * k(omega + h) - 8 * k(omega - h) + k(omega - 2 * h)) / (12 * h)


class TestGroupDerivative:
    def test_constant_index_limit(self):
        crystal = CrystalSpec(1e-3, np.deg2rad(29.3), sellmeier=CONST_SET)
        omega = 2 * np.pi * C / 0.8e-6
        assert group_derivative(omega, "ordinary", crystal) == pytest.approx(1.5 / C, rel=1e-10)

    def test_against_five_point_stencil(self, bbo_crystal):
        omega = 2 * np.pi * C / 0.8136e-6
        got = group_derivative(omega, "ordinary", bbo_crystal)
        assert got == pytest.approx(five_point_stencil(omega, "ordinary", bbo_crystal), rel=1e-6)

    def test_positive_across_filter_window(self, bbo_crystal):
        for lam_nm in np.linspace(800, 826, 14):
            omega = 2 * np.pi * C / (lam_nm * 1e-9)
            assert group_derivative(omega, "ordinary", bbo_crystal) > 0

    def test_higher_order_stencil_on_random_frequencies(self, bbo_crystal):
        rng = np.random.default_rng(7)
        lams = rng.uniform(0.30, 1.0, 20)
        for lam in lams:
            omega = 2 * np.pi * C / (lam * 1e-6)
            got = group_derivative(omega, "ordinary", bbo_crystal)
            assert got == pytest.approx(
                five_point_stencil(omega, "ordinary", bbo_crystal), rel=1e-5
            )


class TestWalkoff:
    def test_vanishes_at_axis_aligned_and_normal_cuts(self):
        near_zero = CrystalSpec(1e-3, 1e-9)
        near_normal = CrystalSpec(1e-3, np.pi / 2 - 1e-9)
        assert walkoff_angle(0.4068, near_zero) < 1e-8
        assert walkoff_angle(0.4068, near_normal) < 1e-8

    def test_golden_value(self, bbo_crystal):
        rho = walkoff_angle(0.4068, bbo_crystal)
        n_theta = n_extraordinary(0.4068, np.deg2rad(29.3))
        no2 = n_ordinary(0.4068) ** 2
        ne2 = n_extraordinary_principal(0.4068) ** 2
        expected = np.arctan(
            0.5 * n_theta**2 * np.sin(2 * np.deg2rad(29.3)) * (1 / ne2 - 1 / no2)
        )
        assert rho == pytest.approx(expected, rel=1e-14)
        assert np.rad2deg(rho) == pytest.approx(3.89, abs=0.03)

    def test_matches_index_derivative_formula(self, bbo_crystal):
        # independent route: rho = arctan(-(1/n) dn/dtheta) at the cut angle
        theta = bbo_crystal.cut_angle_rad
        h = 1e-7
        dn = (n_extraordinary(0.4068, theta + h) - n_extraordinary(0.4068, theta - h)) / (2 * h)
        expected = np.arctan(-dn / n_extraordinary(0.4068, theta))
        assert walkoff_angle(0.4068, bbo_crystal) == pytest.approx(expected, abs=1e-4)


class TestCrystalSpec:
    def test_invariants(self):
        with pytest.raises(ValueError, match="L > 0"):
            CrystalSpec(length_m=0.0, cut_angle_rad=0.5)
        with pytest.raises(ValueError, match="theta_c"):
            CrystalSpec(length_m=1e-3, cut_angle_rad=2.0)
        with pytest.raises(ValueError, match="walkoff_sign"):
            CrystalSpec(length_m=1e-3, cut_angle_rad=0.5, walkoff_sign=0)
