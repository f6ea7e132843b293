import numpy as np
import pytest

from spdc_angular.dispersion import CrystalSpec
from spdc_angular.phasematch import PhasematchContext, PumpSpec

# Measurement table: (W_x um, W_y um, published critical length mm)
MEASUREMENTS = {
    1: (182.0, 189.0, 4.1),
    2: (67.5, 64.8, 1.4),
    3: (56.4, 47.9, 1.1),
    4: (38.9, 34.7, 0.8),
}


def make_context(wx_um=182.0, wy_um=189.0, length_mm=1.0, cut_deg=29.3, **kwargs):
    crystal = CrystalSpec(length_m=length_mm * 1e-3, cut_angle_rad=np.deg2rad(cut_deg))
    pump = PumpSpec(wavelength_m=406.8e-9, waist_x_m=wx_um * 1e-6, waist_y_m=wy_um * 1e-6)
    return PhasematchContext(crystal=crystal, pump=pump, **kwargs)


@pytest.fixture(scope="session")
def bbo_crystal():
    return CrystalSpec(length_m=1e-3, cut_angle_rad=np.deg2rad(29.3))


@pytest.fixture(scope="session")
def ctx_m1():
    return make_context(*MEASUREMENTS[1][:2])


@pytest.fixture(scope="session")
def ctx_m4():
    return make_context(*MEASUREMENTS[4][:2])


def bisect_root(f, lo, hi, iters=80):
    """Plain hand-rolled bisection used as an independent oracle."""
    f_lo = f(lo)
    assert f_lo * f(hi) < 0, "oracle bracket does not straddle a root"
    for _ in range(iters):
        mid = 0.5 * (lo + hi)
        if f(mid) * f_lo <= 0:
            hi = mid
        else:
            lo = mid
            f_lo = f(lo)
    return 0.5 * (lo + hi)


def riemann_longitudinal_oracle(ks, ki, ctx, n=10000):
    """Brute-force midpoint-rule oracle for the longitudinal integral.

    Recomputes indices, wavenumbers and group derivatives from the Sellmeier
    coefficients directly, independent of the package's quadrature path.
    """
    lo, hi = ctx.omega_window
    h = (hi - lo) / n
    om_i = lo + (np.arange(n) + 0.5) * h
    om_s = ctx.omega_p - om_i
    c = 299792458.0
    br = ctx.crystal.sellmeier.ordinary

    def k_of(om):
        lam_um = 2 * np.pi * c / om * 1e6
        n_o = np.sqrt(br.b1 + br.c1 / (lam_um**2 - br.e1) - br.d1 * lam_um**2)
        return n_o * om / c

    def kprime_of(om):
        d = 1e-6 * om
        return (k_of(om + d) - k_of(om - d)) / (2 * d)

    k_s = k_of(om_s)
    k_i = k_of(om_i)
    ksz = np.sqrt(k_s**2 - (ks.kx**2 + ks.ky**2))
    kiz = np.sqrt(k_i**2 - (ki.kx**2 + ki.ky**2))
    kpx = ks.kx + ki.kx
    kpy = ks.ky + ki.ky
    dk = (
        ctx.k_p
        - (kpx**2 + kpy**2) / (2 * ctx.k_p)
        - ksz
        - kiz
        - ctx.crystal.walkoff_sign * np.tan(ctx.rho0_rad) * kpy
    )
    x = 0.5 * ctx.crystal.length_m * dk
    amps = (kprime_of(om_s) * k_s / ksz) * (kprime_of(om_i) * k_i / kiz)
    return float(np.sum(amps * (np.sin(x) / x) ** 2) * h)


def one_over_e_full_width(xs, ys):
    """1/e full width of a sampled single-peak profile (linear interpolation)."""
    imax = int(np.argmax(ys))
    level = ys[imax] / np.e
    assert 0 < imax < len(ys) - 1, "profile maximum at window edge"
    j = np.nonzero(ys[:imax] < level)[0]
    assert j.size, "no left 1/e crossing inside window"
    j = int(j[-1])
    t = (level - ys[j]) / (ys[j + 1] - ys[j])
    left = xs[j] + t * (xs[j + 1] - xs[j])
    j = np.nonzero(ys[imax + 1:] < level)[0]
    assert j.size, "no right 1/e crossing inside window"
    j = imax + 1 + int(j[0])
    t = (level - ys[j - 1]) / (ys[j] - ys[j - 1])
    right = xs[j - 1] + t * (xs[j] - xs[j - 1])
    return float(right - left)
