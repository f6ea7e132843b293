"""Phase mismatch, pump angular spectrum, and the longitudinal phasematching factor.

The coincidence rate over transverse wavevectors factors into a pump term
|S(k_s + k_i)|^2 (transverse phasematching, set purely by the pump focus)
and a longitudinal term (set purely by the crystal: length, dispersion,
Poynting walkoff) obtained by integrating sinc^2(L dk / 2) over the idler
frequencies passed by both spectral filters.

Wavevectors are in rad/m, frequencies in rad/s, everything else SI.  The
transverse-wavevector functions broadcast over numpy arrays.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np
from scipy.constants import c as C_VACUUM

from .dispersion import CrystalSpec, group_derivative, walkoff_angle, wavenumber


class TransverseWavevector(NamedTuple):
    """Transverse wavevector components in rad/m (scalar or array)."""

    kx: float
    ky: float


@dataclass(frozen=True)
class PumpSpec:
    """CW Gaussian pump: vacuum wavelength and field-amplitude beam radii."""

    wavelength_m: float
    waist_x_m: float
    waist_y_m: float

    def __post_init__(self):
        if not self.waist_x_m > 0:
            raise ValueError(f"invariant W_x > 0 violated (got {self.waist_x_m!r})")
        if not self.waist_y_m > 0:
            raise ValueError(f"invariant W_y > 0 violated (got {self.waist_y_m!r})")
        if not self.wavelength_m > 0:
            raise ValueError(f"pump wavelength must be positive (got {self.wavelength_m!r})")

    @property
    def omega_p(self) -> float:
        return 2.0 * np.pi * C_VACUUM / self.wavelength_m


@dataclass(frozen=True)
class FilterSpec:
    """Top-hat bandpass filter in wavelength (center and full bandwidth, m)."""

    center_m: float
    bandwidth_m: float

    def __post_init__(self):
        if not self.bandwidth_m > 0:
            raise ValueError(f"invariant bandwidth > 0 violated (got {self.bandwidth_m!r})")

    @property
    def lambda_lo_m(self) -> float:
        return self.center_m - 0.5 * self.bandwidth_m

    @property
    def lambda_hi_m(self) -> float:
        return self.center_m + 0.5 * self.bandwidth_m

    @property
    def omega_lo(self) -> float:
        return 2.0 * np.pi * C_VACUUM / self.lambda_hi_m

    @property
    def omega_hi(self) -> float:
        return 2.0 * np.pi * C_VACUUM / self.lambda_lo_m

    def transmission(self, omega) -> np.ndarray:
        """1 inside the passband (edges inclusive), 0 outside."""
        om = np.asarray(omega, dtype=float)
        return ((om >= self.omega_lo) & (om <= self.omega_hi)).astype(float)


class _FrequencyNode(NamedTuple):
    weight: float
    omega_i: float
    omega_s: float
    k_s: float        # total ordinary wavenumber at omega_s
    k_i: float        # total ordinary wavenumber at omega_i
    kprime_s: float   # dk/domega at omega_s
    kprime_i: float   # dk/domega at omega_i
    filters: float    # |f_s(omega_s)|^2 |f_i(omega_i)|^2


def frequency_window(pump: PumpSpec, signal_filter: FilterSpec, idler_filter: FilterSpec):
    """Idler-frequency interval passed by both filters under omega_s = omega_p - omega_i.

    Returns (lo, hi); empty when hi <= lo.
    """
    omega_p = pump.omega_p
    lo = max(idler_filter.omega_lo, omega_p - signal_filter.omega_hi)
    hi = min(idler_filter.omega_hi, omega_p - signal_filter.omega_lo)
    return lo, hi


@dataclass
class PhasematchContext:
    """Aggregated inputs of the longitudinal integral, with derived caches.

    ``freq_nodes`` sets the composite-Simpson node count over the filter
    intersection window (even values are rounded up to the next odd;
    ``freq_nodes=1`` evaluates the bare integrand at the degenerate
    frequency).  ``walkoff_rho0_rad`` overrides the computed walkoff
    magnitude when not None (0.0 gives a zero-walkoff stub).

    Treat instances as immutable; they may be shared across threads or
    processes.
    """

    crystal: CrystalSpec
    pump: PumpSpec
    signal_filter: FilterSpec = field(default_factory=lambda: FilterSpec(810e-9, 10e-9))
    idler_filter: FilterSpec = field(default_factory=lambda: FilterSpec(810e-9, 10e-9))
    freq_nodes: int = 33
    walkoff_rho0_rad: float | None = None

    def __post_init__(self):
        if self.freq_nodes < 1:
            raise ValueError(f"invariant N_omega >= 1 violated (got {self.freq_nodes!r})")
        lam_p_um = self.pump.wavelength_m * 1e6
        self.crystal.sellmeier.check_range(lam_p_um)
        for filt, label in ((self.signal_filter, "signal"), (self.idler_filter, "idler")):
            for edge in (filt.lambda_lo_m, filt.lambda_hi_m):
                try:
                    self.crystal.sellmeier.check_range(edge * 1e6)
                except ValueError as err:
                    raise ValueError(f"{label} filter passband outside Sellmeier range: {err}") from err

        self.omega_p = self.pump.omega_p
        self.k_p = float(wavenumber(self.omega_p, "extraordinary", self.crystal))
        rho0 = self.walkoff_rho0_rad
        if rho0 is None:
            rho0 = walkoff_angle(lam_p_um, self.crystal)
        self.rho0_rad = float(rho0)
        self.tan_rho0_signed = self.crystal.walkoff_sign * float(np.tan(self.rho0_rad))

        lo, hi = frequency_window(self.pump, self.signal_filter, self.idler_filter)
        if not hi > lo:
            raise ValueError(
                "invariant violated: signal and idler passbands do not overlap "
                "energy conservation (omega_s = omega_p - omega_i has empty support)"
            )
        self.omega_window = (lo, hi)
        self._nodes = self._build_nodes(lo, hi)

    def _build_nodes(self, lo: float, hi: float):
        if self.freq_nodes == 1:
            omegas = np.array([0.5 * self.omega_p])
            weights = np.array([1.0])
        else:
            n = self.freq_nodes
            if n % 2 == 0:
                n += 1
            omegas = np.linspace(lo, hi, n)
            h = (hi - lo) / (n - 1)
            weights = np.ones(n)
            weights[1:-1:2] = 4.0
            weights[2:-1:2] = 2.0
            weights *= h / 3.0
        nodes = []
        for w, om_i in zip(weights, omegas):
            om_s = self.omega_p - om_i
            nodes.append(
                _FrequencyNode(
                    weight=float(w),
                    omega_i=float(om_i),
                    omega_s=float(om_s),
                    k_s=float(wavenumber(om_s, "ordinary", self.crystal)),
                    k_i=float(wavenumber(om_i, "ordinary", self.crystal)),
                    kprime_s=group_derivative(om_s, "ordinary", self.crystal),
                    kprime_i=group_derivative(om_i, "ordinary", self.crystal),
                    filters=float(
                        self.signal_filter.transmission(om_s) * self.idler_filter.transmission(om_i)
                    ),
                )
            )
        return tuple(nodes)


def pump_angular_intensity(k_plus: TransverseWavevector, pump: PumpSpec):
    """Gaussian pump angular spectrum exp(-[W_x^2 kx^2 + W_y^2 ky^2] / 2)."""
    kx = np.asarray(k_plus.kx, dtype=float)
    ky = np.asarray(k_plus.ky, dtype=float)
    arg = 0.5 * (pump.waist_x_m**2 * kx**2 + pump.waist_y_m**2 * ky**2)
    return np.exp(-arg)


def kz_longitudinal(omega, k_perp: TransverseWavevector, crystal: CrystalSpec):
    """Longitudinal component sqrt(k^2 - |k_perp|^2) of an ordinary wave.

    Evanescent entries (|k_perp| >= k) come back as NaN; integrators map
    them to zero contribution.
    """
    k_tot = wavenumber(omega, "ordinary", crystal)
    perp_sq = np.asarray(k_perp.kx, dtype=float) ** 2 + np.asarray(k_perp.ky, dtype=float) ** 2
    arg = k_tot**2 - perp_sq
    with np.errstate(invalid="ignore"):
        kz = np.where(arg > 0, np.sqrt(np.where(arg > 0, arg, 1.0)), np.nan)
    if np.isscalar(omega) and np.ndim(perp_sq) == 0:
        return float(kz)
    return kz


def _kz_from_total(k_tot: float, perp_sq):
    """sqrt(k_tot^2 - perp_sq) with NaN marking evanescent entries."""
    arg = k_tot * k_tot - perp_sq
    with np.errstate(invalid="ignore"):
        return np.where(arg > 0, np.sqrt(np.abs(arg)), np.nan)


def delta_k(omega_s, k_s: TransverseWavevector, omega_i, k_i: TransverseWavevector,
            ctx: PhasematchContext):
    """Phase mismatch along the pump axis.

    dk = k_p - |k_plus|^2/(2 k_p) - k_sz - k_iz - sign * tan(rho0) * k_plus_y
    with k_plus = k_s + k_i.  Callers enforce omega_s + omega_i = omega_p.
    NaN marks non-propagating (evanescent) input combinations.
    """
    kpx = np.asarray(k_s.kx) + np.asarray(k_i.kx)
    kpy = np.asarray(k_s.ky) + np.asarray(k_i.ky)
    ksz = _kz_from_total(
        float(wavenumber(omega_s, "ordinary", ctx.crystal)),
        np.asarray(k_s.kx, dtype=float) ** 2 + np.asarray(k_s.ky, dtype=float) ** 2,
    )
    kiz = _kz_from_total(
        float(wavenumber(omega_i, "ordinary", ctx.crystal)),
        np.asarray(k_i.kx, dtype=float) ** 2 + np.asarray(k_i.ky, dtype=float) ** 2,
    )
    kp = ctx.k_p
    out = kp - (kpx**2 + kpy**2) / (2.0 * kp) - ksz - kiz - ctx.tan_rho0_signed * kpy
    if np.ndim(out) == 0:
        return float(out)
    return out


def sinc_sq(delta_k_val, length_m):
    """[sin(x)/x]^2 with x = L dk / 2; equals 1 at x = 0."""
    x = 0.5 * np.asarray(length_m, dtype=float) * np.asarray(delta_k_val, dtype=float)
    return np.sinc(x / np.pi) ** 2


def longitudinal_intensity(k_s: TransverseWavevector, k_i: TransverseWavevector,
                           ctx: PhasematchContext):
    """Crystal-side factor of the coincidence rate (arbitrary units, >= 0).

    Composite-Simpson integral over the idler frequencies passed by both
    filters of  A_s A_i sinc^2(L dk / 2),  A = k' k / k_z.  Evanescent
    points contribute zero.  The frequency window is validated non-empty at
    context construction.  Accumulation follows a fixed node order, so
    results are bit-identical however the transverse points are batched.
    """
    ksx = np.asarray(k_s.kx, dtype=float)
    ksy = np.asarray(k_s.ky, dtype=float)
    kix = np.asarray(k_i.kx, dtype=float)
    kiy = np.asarray(k_i.ky, dtype=float)

    perp_sq_s = ksx**2 + ksy**2
    perp_sq_i = kix**2 + kiy**2
    kpx = ksx + kix
    kpy = ksy + kiy
    kp = ctx.k_p
    transverse = kp - (kpx**2 + kpy**2) / (2.0 * kp) - ctx.tan_rho0_signed * kpy
    half_len = 0.5 * ctx.crystal.length_m

    acc = np.zeros(np.broadcast(perp_sq_s, perp_sq_i).shape)
    for node in ctx._nodes:
        if node.filters == 0.0:
            continue
        ksz = _kz_from_total(node.k_s, perp_sq_s)
        kiz = _kz_from_total(node.k_i, perp_sq_i)
        dk = transverse - ksz - kiz
        amps = (node.kprime_s * node.k_s / ksz) * (node.kprime_i * node.k_i / kiz)
        term = node.weight * node.filters * amps * np.sinc(half_len * dk / np.pi) ** 2
        acc += np.nan_to_num(term, nan=0.0)
    if np.ndim(acc) == 0 or acc.shape == ():
        return float(acc)
    return acc
