import numpy as np
import pytest

from conftest import bisect_root, make_context

from spdc_angular.dispersion import wavenumber
from spdc_angular.phasematch import (
    FilterSpec,
    PhasematchContext,
    PumpSpec,
    TransverseWavevector,
    delta_k,
    frequency_window,
    kz_longitudinal,
    longitudinal_intensity,
    pump_angular_intensity,
    sinc_sq,
)

TW = TransverseWavevector


class TestPumpAngularIntensity:
    def test_peak_at_zero(self):
        pump = PumpSpec(406.8e-9, 182e-6, 189e-6)
        assert pump_angular_intensity(TW(0.0, 0.0), pump) == 1.0

    def test_analytic_one_over_e_point(self):
        pump = PumpSpec(406.8e-9, 182e-6, 189e-6)
        k1e = np.sqrt(2) / pump.waist_x_m
        assert pump_angular_intensity(TW(k1e, 0.0), pump) == pytest.approx(np.exp(-1), rel=1e-12)

    def test_hand_arithmetic_golden(self):
        pump = PumpSpec(406.8e-9, 189e-6, 189e-6)
        got = pump_angular_intensity(TW(1e4, 0.0), pump)
        assert got == pytest.approx(np.exp(-0.5 * (189e-6 * 1e4) ** 2), rel=1e-12)
        assert got == pytest.approx(0.16763, abs=1e-4)

    def test_log_quadratic(self):
        pump = PumpSpec(406.8e-9, 120e-6, 80e-6)
        rng = np.random.default_rng(3)
        kx = rng.uniform(-3e4, 3e4, 50)
        ky = rng.uniform(-3e4, 3e4, 50)
        val = pump_angular_intensity(TW(kx, ky), pump)
        expected = pump.waist_x_m**2 * kx**2 + pump.waist_y_m**2 * ky**2
        assert np.allclose(-2.0 * np.log(val), expected, rtol=1e-12, atol=1e-9)

    def test_invariant_errors(self):
        with pytest.raises(ValueError, match="W_x > 0"):
            PumpSpec(406.8e-9, -5e-6, 189e-6)
        with pytest.raises(ValueError, match="W_y > 0"):
            PumpSpec(406.8e-9, 5e-6, 0.0)


class TestKz:
    def test_collinear(self, bbo_crystal):
        omega = 2 * np.pi * 299792458.0 / 0.8136e-6
        k = wavenumber(omega, "ordinary", bbo_crystal)
        assert kz_longitudinal(omega, TW(0.0, 0.0), bbo_crystal) == pytest.approx(k, rel=1e-14)

    def test_boundary_is_evanescent(self, bbo_crystal):
        omega = 2 * np.pi * 299792458.0 / 0.8136e-6
        k = float(wavenumber(omega, "ordinary", bbo_crystal))
        assert np.isnan(kz_longitudinal(omega, TW(k, 0.0), bbo_crystal))
        assert np.isnan(kz_longitudinal(omega, TW(1.5 * k, 0.0), bbo_crystal))

    def test_small_angle_golden(self, bbo_crystal):
        omega = 2 * np.pi * 299792458.0 / 0.8136e-6
        k = float(wavenumber(omega, "ordinary", bbo_crystal))
        kz = kz_longitudinal(omega, TW(0.0, 0.038 * k), bbo_crystal)
        assert kz == pytest.approx(k * np.sqrt(1 - 0.038**2), rel=1e-12)
        assert kz / k == pytest.approx(0.999278, abs=1e-6)


class TestDeltaK:
    def test_ring_radius_matches_bisection_oracle(self, ctx_m1):
        om = 0.5 * ctx_m1.omega_p
        k_deg = float(wavenumber(om, "ordinary", ctx_m1.crystal))
        root = bisect_root(
            lambda q: delta_k(om, TW(0.0, q), om, TW(0.0, -q), ctx_m1), 1.0, 0.5 * k_deg
        )
        assert delta_k(om, TW(0.0, root), om, TW(0.0, -root), ctx_m1) == pytest.approx(
            0.0, abs=1e-3
        )
        internal_deg = np.rad2deg(np.arcsin(root / k_deg))
        assert 2.0 < internal_deg < 2.35  # paper quotes ~2.2 internal

    def test_x_mirror_parity_exact(self, ctx_m1):
        om = 0.5 * ctx_m1.omega_p
        ks = TW(2.1e5, 4.3e5)
        ki = TW(-1.7e5, -4.2e5)
        a = delta_k(om, ks, om, ki, ctx_m1)
        b = delta_k(om, TW(-ks.kx, ks.ky), om, TW(-ki.kx, ki.ky), ctx_m1)
        assert a == b

    def test_zero_walkoff_stub_restores_y_symmetry(self):
        ctx = make_context(walkoff_rho0_rad=0.0)
        om = 0.5 * ctx.omega_p
        q = 4.8e5
        up = delta_k(om, TW(0.0, q + 1e4), om, TW(0.0, -q), ctx)
        down = delta_k(om, TW(0.0, -q - 1e4), om, TW(0.0, q), ctx)
        assert up == down

    def test_walkoff_breaks_y_symmetry(self, ctx_m1):
        om = 0.5 * ctx_m1.omega_p
        q = 4.8e5
        up = delta_k(om, TW(0.0, q + 1e4), om, TW(0.0, -q), ctx_m1)
        down = delta_k(om, TW(0.0, -q - 1e4), om, TW(0.0, q), ctx_m1)
        assert up != down


class TestSincSq:
    def test_removable_singularity(self):
        assert sinc_sq(0.0, 1e-3) == 1.0

    def test_first_null(self):
        # L dk / 2 = pi
        assert sinc_sq(2 * np.pi / 1e-3, 1e-3) < 1e-30

    def test_half_power_point_against_bisection_oracle(self):
        root = bisect_root(lambda x: (np.sin(x) / x) ** 2 - 0.5, 1.0, 2.0)
        assert root == pytest.approx(1.39156, abs=1e-4)
        assert sinc_sq(2 * root / 1e-3, 1e-3) == pytest.approx(0.5, abs=1e-5)


class TestContext:
    def test_empty_passband_overlap_raises(self, bbo_crystal):
        pump = PumpSpec(406.8e-9, 100e-6, 100e-6)
        with pytest.raises(ValueError, match="passbands do not overlap"):
            PhasematchContext(
                crystal=bbo_crystal,
                pump=pump,
                signal_filter=FilterSpec(810e-9, 10e-9),
                idler_filter=FilterSpec(775e-9, 10e-9),
            )

    def test_window_is_filter_intersection(self, ctx_m1):
        lo, hi = ctx_m1.omega_window
        sig, idl = ctx_m1.signal_filter, ctx_m1.idler_filter
        assert lo == pytest.approx(max(idl.omega_lo, ctx_m1.omega_p - sig.omega_hi), rel=1e-14)
        assert hi == pytest.approx(min(idl.omega_hi, ctx_m1.omega_p - sig.omega_lo), rel=1e-14)
        assert frequency_window(ctx_m1.pump, sig, idl) == (lo, hi)

    def test_even_node_count_rounded_up(self):
        ctx = make_context(freq_nodes=10)
        assert len(ctx._nodes) == 11

    def test_node_count_invariant(self, bbo_crystal):
        with pytest.raises(ValueError, match="N_omega >= 1"):
            make_context(freq_nodes=0)

    def test_pump_wavelength_outside_sellmeier_range(self, bbo_crystal):
        pump = PumpSpec(1500e-9, 100e-6, 100e-6)
        with pytest.raises(ValueError, match="Sellmeier"):
            PhasematchContext(crystal=bbo_crystal, pump=pump)


class TestLongitudinalIntensity:
    def test_single_node_reduces_to_integrand(self):
        ctx = make_context(freq_nodes=1)
        om = 0.5 * ctx.omega_p
        ks = TW(1.0e5, 4.0e5)
        ki = TW(-0.9e5, -4.1e5)
        got = longitudinal_intensity(ks, ki, ctx)
        k_s = float(wavenumber(om, "ordinary", ctx.crystal))
        k_i = k_s
        ksz = np.sqrt(k_s**2 - ks.kx**2 - ks.ky**2)
        kiz = np.sqrt(k_i**2 - ki.kx**2 - ki.ky**2)
        node = ctx._nodes[0]
        amp = (node.kprime_s * k_s / ksz) * (node.kprime_i * k_i / kiz)
        dk = delta_k(om, ks, om, ki, ctx)
        expected = amp * (np.sin(0.5 * ctx.crystal.length_m * dk) / (0.5 * ctx.crystal.length_m * dk)) ** 2
        assert got == pytest.approx(expected, rel=1e-12)

    def test_ring_maximizes_over_radial_scaling(self, ctx_m1):
        om = 0.5 * ctx_m1.omega_p
        k_deg = float(wavenumber(om, "ordinary", ctx_m1.crystal))
        q0 = bisect_root(
            lambda q: delta_k(om, TW(0.0, q), om, TW(0.0, -q), ctx_m1), 1.0, 0.5 * k_deg
        )
        on_ring = longitudinal_intensity(TW(0.0, q0), TW(0.0, -q0), ctx_m1)
        off_ring = longitudinal_intensity(TW(0.0, 1.5 * q0), TW(0.0, -1.5 * q0), ctx_m1)
        assert on_ring > off_ring

    def test_simpson_vs_riemann_oracle(self, ctx_m1):
        from conftest import riemann_longitudinal_oracle

        rng = np.random.default_rng(11)
        for _ in range(10):
            ks = TW(rng.uniform(-6e5, 6e5), rng.uniform(-6e5, 6e5))
            ki = TW(rng.uniform(-6e5, 6e5), rng.uniform(-6e5, 6e5))
            got = longitudinal_intensity(ks, ki, ctx_m1)
            assert got == pytest.approx(riemann_longitudinal_oracle(ks, ki, ctx_m1), rel=1e-3)

    def test_x_parity_exact(self, ctx_m1):
        rng = np.random.default_rng(5)
        kx_s, ky_s = rng.uniform(-5e5, 5e5, 2)
        kx_i, ky_i = rng.uniform(-5e5, 5e5, 2)
        a = longitudinal_intensity(TW(kx_s, ky_s), TW(kx_i, ky_i), ctx_m1)
        b = longitudinal_intensity(TW(-kx_s, ky_s), TW(-kx_i, ky_i), ctx_m1)
        assert a == b

    def test_zero_walkoff_y_parity_exact(self):
        ctx = make_context(walkoff_rho0_rad=0.0)
        a = longitudinal_intensity(TW(1e5, 4.4e5), TW(-1.2e5, -4.6e5), ctx)
        b = longitudinal_intensity(TW(1e5, -4.4e5), TW(-1.2e5, 4.6e5), ctx)
        assert a == b

    def test_nonnegative_and_evanescent_zero(self, ctx_m1):
        rng = np.random.default_rng(13)
        kx = rng.uniform(-8e5, 8e5, 100)
        ky = rng.uniform(-8e5, 8e5, 100)
        vals = longitudinal_intensity(TW(kx, ky), TW(-kx * 0.9, -ky * 1.1), ctx_m1)
        assert np.all(vals >= 0)
        # far beyond the light cone: evanescent points contribute nothing
        k_deg = float(wavenumber(0.5 * ctx_m1.omega_p, "ordinary", ctx_m1.crystal))
        assert longitudinal_intensity(TW(1.5 * k_deg, 0.0), TW(0.0, 0.0), ctx_m1) == 0.0

    def test_vectorized_matches_scalar(self, ctx_m1):
        kx = np.array([1e5, -2e5, 3e5])
        ky = np.array([4e5, 4.5e5, -4e5])
        vec = longitudinal_intensity(TW(kx, ky), TW(0.0, -4.8e5), ctx_m1)
        for i in range(3):
            scalar = longitudinal_intensity(TW(float(kx[i]), float(ky[i])), TW(0.0, -4.8e5), ctx_m1)
            assert vec[i] == scalar
