"""Refractive indices and derived quantities for a negative uniaxial crystal.

Sellmeier form used throughout (wavelength in microns):

    n^2 = B1 + C1 / (lam^2 - E1) - D1 * lam^2

The default coefficient set describes beta barium borate (BBO) over
0.22-1.06 um.  Signal and idler are ordinary waves; the pump is an
extraordinary wave evaluated at the fixed cut angle (type-I e -> oo).
All functions are pure and accept numpy arrays where a wavelength or
frequency argument is documented as a float.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.constants import c as C_VACUUM


@dataclass(frozen=True)
class SellmeierBranch:
    """Coefficients of one polarization branch, lam in um."""

    b1: float
    c1: float  # um^2
    e1: float  # um^2
    d1: float  # um^-2

    def n_squared(self, lam_um):
        lam2 = np.asarray(lam_um, dtype=float) ** 2
        return self.b1 + self.c1 / (lam2 - self.e1) - self.d1 * lam2


@dataclass(frozen=True)
class SellmeierSet:
    """Ordinary and principal extraordinary dispersion plus validity range."""

    name: str
    ordinary: SellmeierBranch
    extraordinary: SellmeierBranch
    lambda_min_um: float
    lambda_max_um: float

    def check_range(self, lam_um) -> None:
        lam = np.asarray(lam_um, dtype=float)
        if np.any(lam < self.lambda_min_um) or np.any(lam > self.lambda_max_um):
            bad = float(np.min(lam)) if np.any(lam < self.lambda_min_um) else float(np.max(lam))
            raise ValueError(
                f"wavelength {bad:.6g} um outside Sellmeier validity "
                f"[{self.lambda_min_um:g}, {self.lambda_max_um:g}] um for set '{self.name}'"
            )


BBO_DEFAULT = SellmeierSet(
    name="bbo-default",
    ordinary=SellmeierBranch(b1=2.7359, c1=0.01878, e1=0.01822, d1=0.01354),
    extraordinary=SellmeierBranch(b1=2.3753, c1=0.01224, e1=0.01667, d1=0.01516),
    lambda_min_um=0.22,
    lambda_max_um=1.06,
)

SELLMEIER_SETS = {BBO_DEFAULT.name: BBO_DEFAULT}


@dataclass(frozen=True)
class CrystalSpec:
    """Uniaxial crystal: length, cut angle, dispersion set, walkoff orientation.

    ``cut_angle_rad`` is the angle between the pump propagation axis and the
    crystal axis.  ``walkoff_sign`` selects the orientation of the Poynting
    walkoff within the z-y plane; +1 makes the emission annulus widen toward
    +y for a focused pump.
    """

    length_m: float
    cut_angle_rad: float
    sellmeier: SellmeierSet = field(default=BBO_DEFAULT)
    walkoff_sign: int = 1

    def __post_init__(self):
        if not self.length_m > 0:
            raise ValueError(f"invariant L > 0 violated (got {self.length_m!r})")
        if not 0 < self.cut_angle_rad < np.pi / 2:
            raise ValueError(
                f"invariant 0 < theta_c < pi/2 violated (got {self.cut_angle_rad!r} rad)"
            )
        if self.walkoff_sign not in (1, -1):
            raise ValueError(f"walkoff_sign must be +1 or -1 (got {self.walkoff_sign!r})")


def n_ordinary(lam_um, s: SellmeierSet = BBO_DEFAULT):
    """Ordinary index at wavelength lam_um (microns)."""
    s.check_range(lam_um)
    return np.sqrt(s.ordinary.n_squared(lam_um))


def n_extraordinary_principal(lam_um, s: SellmeierSet = BBO_DEFAULT):
    """Principal extraordinary index (propagation normal to the axis)."""
    s.check_range(lam_um)
    return np.sqrt(s.extraordinary.n_squared(lam_um))


def n_extraordinary(lam_um, theta_rad, s: SellmeierSet = BBO_DEFAULT):
    """Extraordinary index at angle theta from the crystal axis.

    1/n(theta)^2 = cos^2(theta)/n_o^2 + sin^2(theta)/n_e^2.
    """
    s.check_range(lam_um)
    no2 = s.ordinary.n_squared(lam_um)
    ne2 = s.extraordinary.n_squared(lam_um)
    cos2 = np.cos(theta_rad) ** 2
    sin2 = np.sin(theta_rad) ** 2
    return 1.0 / np.sqrt(cos2 / no2 + sin2 / ne2)


def wavenumber(omega, polarization: str, crystal: CrystalSpec):
    """k = n(omega) * omega / c in rad/m.

    polarization: "ordinary" for signal/idler, "extraordinary" for the pump
    e-wave evaluated at the crystal cut angle.
    """
    lam_um = 2.0 * np.pi * C_VACUUM / np.asarray(omega, dtype=float) * 1e6
    if polarization == "ordinary":
        n = n_ordinary(lam_um, crystal.sellmeier)
    elif polarization == "extraordinary":
        n = n_extraordinary(lam_um, crystal.cut_angle_rad, crystal.sellmeier)
    else:
        raise ValueError(f"unknown polarization {polarization!r}")
    return n * np.asarray(omega, dtype=float) / C_VACUUM


def group_derivative(omega: float, polarization: str, crystal: CrystalSpec) -> float:
    """dk/domega in s/m by central finite difference, relative step 1e-6."""
    h = 1e-6 * omega
    k_hi = wavenumber(omega + h, polarization, crystal)
    k_lo = wavenumber(omega - h, polarization, crystal)
    return float((k_hi - k_lo) / (2.0 * h))


def walkoff_angle(lam_p_um: float, crystal: CrystalSpec) -> float:
    """Poynting-vector walkoff magnitude (rad) of the pump e-wave at the cut angle.

    tan(rho) = (n(theta)^2 / 2) * sin(2 theta) * (1/n_e^2 - 1/n_o^2); the sign
    is applied separately via CrystalSpec.walkoff_sign at use sites.
    """
    s = crystal.sellmeier
    s.check_range(lam_p_um)
    theta = crystal.cut_angle_rad
    n_theta = n_extraordinary(lam_p_um, theta, s)
    no2 = s.ordinary.n_squared(lam_p_um)
    ne2 = s.extraordinary.n_squared(lam_p_um)
    tan_rho = 0.5 * n_theta**2 * np.sin(2.0 * theta) * (1.0 / ne2 - 1.0 / no2)
    return float(abs(np.arctan(tan_rho)))
