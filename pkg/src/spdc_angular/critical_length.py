"""Critical crystal length: pump width vs longitudinal width, and their crossover.

The CAS is the product of a pump factor of 1/e full width dk_pump =
2 sqrt(2)/W_y and a crystal factor whose width dk_crystal shrinks roughly
as 1/L.  The critical length solves dk_crystal(L) = dk_pump(W): below it
the pump dominates the CAS (short regime), above it the crystal does.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np
from scipy.optimize import bisect, minimize_scalar

from .dispersion import wavenumber
from .phasematch import (
    PhasematchContext,
    PumpSpec,
    TransverseWavevector,
    delta_k,
    longitudinal_intensity,
)
from .spectra import _build_inner_window, default_inner_halfwidth


class BracketError(RuntimeError):
    """A root or maximum could not be bracketed for this configuration."""


@dataclass(frozen=True)
class WidthReport:
    """1/e full widths along k_y, the reference idler, and the regime tag."""

    pump_width_rad_m: float
    longitudinal_width_rad_m: float
    idler: TransverseWavevector
    regime: str  # "short" (L < Lc) | "long" (L > Lc) | "boundary"
    critical_length_m: float
    crystal_length_m: float

    def __post_init__(self):
        if not (self.pump_width_rad_m > 0 and self.longitudinal_width_rad_m > 0):
            raise ValueError("widths must be positive")
        if self.regime not in ("short", "long", "boundary"):
            raise ValueError(f"unknown regime tag {self.regime!r}")


def ring_radius(ctx: PhasematchContext) -> float:
    """Radius of the degenerate phasematching ring: root of dk for a (0, q), (0, -q) pair."""
    om = 0.5 * ctx.omega_p
    k_deg = float(wavenumber(om, "ordinary", ctx.crystal))

    def f(q):
        return delta_k(om, TransverseWavevector(0.0, q), om,
                       TransverseWavevector(0.0, -q), ctx)

    qs = np.linspace(1.0, 0.95 * k_deg, 256)
    vals = np.array([f(q) for q in qs])
    sign_change = np.nonzero(np.diff(np.sign(vals)) != 0)[0]
    if sign_change.size == 0:
        raise BracketError("no phasematching ring: dk has no root for symmetric pairs")
    i = int(sign_change[0])
    return float(bisect(f, qs[i], qs[i + 1], xtol=1e-3))


def reference_idler(ctx: PhasematchContext, inner_halfwidth: float | None = None,
                    inner_nodes: int = 41) -> TransverseWavevector:
    """Idler wavevector (0, q0) with q0 > 0 maximizing the singles rate.

    Maximizes the y-axis slice of the ideal angular spectrum by
    golden-section search to an absolute tolerance of 1 rad/m.
    """
    if inner_halfwidth is None:
        inner_halfwidth = default_inner_halfwidth(ctx)
    window = _build_inner_window(ctx, inner_halfwidth, inner_nodes)
    wvec = window.weights * window.pump_sq

    def as_slice(q: float) -> float:
        ki = TransverseWavevector(window.dx, -q + window.dy)
        lng = longitudinal_intensity(TransverseWavevector(0.0, q), ki, ctx)
        return float(lng @ wvec)

    q_est = ring_radius(ctx)
    qs = np.linspace(0.5 * q_est, 1.5 * q_est, 41)
    vals = np.array([as_slice(q) for q in qs])
    imax = int(np.argmax(vals))
    if imax in (0, qs.size - 1):
        raise BracketError("no interior singles maximum in bracket: non-phasematched geometry")
    res = minimize_scalar(
        lambda q: -as_slice(q),
        bracket=(qs[imax - 1], qs[imax], qs[imax + 1]),
        method="golden",
        options={"xtol": 1.0 / qs[imax]},
    )
    return TransverseWavevector(0.0, float(res.x))


def pump_angular_width(pump: PumpSpec) -> float:
    """1/e full width along k_y of the pump angular spectrum: 2 sqrt(2) / W_y."""
    return 2.0 * np.sqrt(2.0) / pump.waist_y_m


def _one_over_e_width(xs: np.ndarray, ys: np.ndarray):
    """Distance between the two 1/e crossings around the profile maximum.

    Returns None when either crossing lies outside the sampled window.
    Crossings are located by linear interpolation between adjacent samples.
    """
    imax = int(np.argmax(ys))
    level = ys[imax] / np.e
    below_left = np.nonzero(ys[:imax] < level)[0]
    below_right = np.nonzero(ys[imax + 1:] < level)[0]
    if imax in (0, ys.size - 1) or below_left.size == 0 or below_right.size == 0:
        return None
    j = int(below_left[-1])
    t = (level - ys[j]) / (ys[j + 1] - ys[j])
    x_left = xs[j] + t * (xs[j + 1] - xs[j])
    j = imax + 1 + int(below_right[0])
    t = (level - ys[j - 1]) / (ys[j] - ys[j - 1])
    x_right = xs[j - 1] + t * (xs[j] - xs[j - 1])
    return float(x_right - x_left)


def longitudinal_angular_width(length_m: float, ctx: PhasematchContext,
                               k_i0: TransverseWavevector, n_samples: int = 401) -> float:
    """1/e full width along k_sy of the crystal factor at fixed idler k_i0.

    Samples the longitudinal intensity on a slice through its maximum near
    the conjugate point; the window starts at +-3x a linearized width
    estimate and doubles up to 3 times if the profile does not drop to 1/e.
    """
    if not length_m > 0:
        raise ValueError(f"crystal length must be positive (got {length_m!r})")
    ctx_l = replace(ctx, crystal=replace(ctx.crystal, length_m=length_m))
    om = 0.5 * ctx_l.omega_p
    k_deg = float(wavenumber(om, "ordinary", ctx_l.crystal))
    q0 = abs(float(k_i0.ky))
    tan_theta = q0 / np.sqrt(max(k_deg**2 - q0**2, 1e-300))
    slope = abs(tan_theta + ctx_l.tan_rho0_signed)
    slope = max(slope, 0.2 * max(tan_theta, 1e-6))
    # 2x the sinc^2 1/e half-argument (~1.6435) over the linearized slope
    est = 6.574 / (length_m * slope)

    half = 3.0 * est
    center = -float(k_i0.ky)
    for _ in range(4):
        ys = np.linspace(center - half, center + half, n_samples)
        prof = longitudinal_intensity(
            TransverseWavevector(np.zeros_like(ys), ys), k_i0, ctx_l
        )
        width = _one_over_e_width(ys, prof)
        if width is not None:
            return width
        half *= 2.0
    raise RuntimeError(
        "longitudinal profile does not drop to 1/e within the sampled window "
        "after 3 window doublings"
    )


def critical_length(pump: PumpSpec, ctx: PhasematchContext,
                    bracket_m: tuple[float, float] = (0.05e-3, 20e-3)) -> float:
    """Crystal length at which the longitudinal width equals the pump width.

    Bisection on g(L) = dk_crystal(L) - dk_pump over the bracket, absolute
    tolerance 0.01 mm; g is monotone decreasing so the root is unique.
    """
    ctx_p = replace(ctx, pump=pump)
    k_i0 = reference_idler(ctx_p)
    target = pump_angular_width(pump)

    def g(length):
        return longitudinal_angular_width(length, ctx_p, k_i0) - target

    lo, hi = bracket_m
    g_lo = g(lo)
    g_hi = g(hi)
    if not (g_lo > 0 > g_hi):
        raise BracketError(
            f"critical length not bracketed by [{lo * 1e3:g}, {hi * 1e3:g}] mm "
            f"(g(lo)={g_lo:.3g}, g(hi)={g_hi:.3g}); out of model range"
        )
    return float(bisect(g, lo, hi, xtol=0.01e-3))


@dataclass(frozen=True)
class CriticalLengthCurve:
    """Sampled boundary of the {W, L} parameter space with a linear fit."""

    waists_m: np.ndarray
    lengths_m: np.ndarray
    slope: float
    intercept_m: float
    r_squared: float


def critical_length_curve(w_min_m: float, w_max_m: float, w_step_m: float,
                          ctx: PhasematchContext) -> CriticalLengthCurve:
    """Critical length sampled over a range of isotropic pump waists W.

    Each point solves critical_length for W_x = W_y = W; a least-squares
    line summarizes the boundary.
    """
    n = int(np.floor((w_max_m - w_min_m) / w_step_m + 1 + 1e-9))
    waists = w_min_m + w_step_m * np.arange(n)
    lengths = np.empty(n)
    for i, w in enumerate(waists):
        pump = replace(ctx.pump, waist_x_m=float(w), waist_y_m=float(w))
        lengths[i] = critical_length(pump, ctx)
    slope, intercept = np.polyfit(waists, lengths, 1)
    fitted = slope * waists + intercept
    ss_res = float(np.sum((lengths - fitted) ** 2))
    ss_tot = float(np.sum((lengths - np.mean(lengths)) ** 2))
    r_squared = 1.0 - ss_res / ss_tot if ss_tot > 0 else 1.0
    return CriticalLengthCurve(waists, lengths, float(slope), float(intercept), r_squared)


def width_report(ctx: PhasematchContext, boundary_band: float = 0.15) -> WidthReport:
    """Widths, reference idler, critical length, and regime tag for one scenario.

    The regime is "boundary" when |1 - L/Lc| < boundary_band, otherwise
    "short" for L < Lc and "long" for L > Lc.
    """
    k_i0 = reference_idler(ctx)
    dk_pump = pump_angular_width(ctx.pump)
    length = ctx.crystal.length_m
    dk_long = longitudinal_angular_width(length, ctx, k_i0)
    lc = critical_length(ctx.pump, ctx)
    ratio = length / lc
    if abs(1.0 - ratio) < boundary_band:
        regime = "boundary"
    elif ratio < 1.0:
        regime = "short"
    else:
        regime = "long"
    return WidthReport(
        pump_width_rad_m=dk_pump,
        longitudinal_width_rad_m=dk_long,
        idler=k_i0,
        regime=regime,
        critical_length_m=lc,
        crystal_length_m=length,
    )
