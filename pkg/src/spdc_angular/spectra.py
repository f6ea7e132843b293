"""Angular-spectrum maps: CAS and AS grids, detector smearing, domain mapping.

The conditional angular spectrum (CAS) is the coincidence rate over the
signal transverse wavevector with the idler fixed; the angular spectrum
(AS) integrates the CAS over all idler wavevectors and produces the
familiar emission annulus.  Finite detectors enter as Gaussian acceptance
kernels on the Fourier plane, mapped to wavevector units at the degenerate
frequency.

Grid cells are mutually independent: each cell's value is a fixed-order
quadrature of its own integrand, so results are bit-identical no matter
how cells are partitioned across workers.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np
from scipy.constants import c as C_VACUUM

from .dispersion import CrystalSpec, n_ordinary, wavenumber
from .phasematch import (
    PhasematchContext,
    TransverseWavevector,
    longitudinal_intensity,
    pump_angular_intensity,
)


@dataclass(frozen=True)
class FourierOptics:
    """f-f imaging system mapping transverse wavevector to Fourier-plane position."""

    focal_length_m: float
    exit_face_refraction: bool = True

    def __post_init__(self):
        if not self.focal_length_m > 0:
            raise ValueError(f"invariant f > 0 violated (got {self.focal_length_m!r})")


@dataclass(frozen=True)
class DetectorSpec:
    """Detector acceptance on the Fourier plane.

    ``acceptance`` is "delta" (ideal point detector) or "gaussian" with
    ``width_m`` the 1/e full width of the intensity acceptance in position
    units.  ``center_m`` is optional bookkeeping; the spectra operations
    position kernels explicitly.
    """

    acceptance: str = "delta"
    width_m: float | None = None
    center_m: tuple[float, float] | None = None

    def __post_init__(self):
        if self.acceptance not in ("delta", "gaussian"):
            raise ValueError(f"acceptance must be 'delta' or 'gaussian' (got {self.acceptance!r})")
        if self.acceptance == "gaussian" and not (self.width_m and self.width_m > 0):
            raise ValueError("invariant gaussian width > 0 violated")


@dataclass(frozen=True)
class GridRequest:
    """Uniform 2-D grid request: min/max/step per axis (wavevector units, rad/m)."""

    x_min: float
    x_max: float
    x_step: float
    y_min: float
    y_max: float
    y_step: float

    def __post_init__(self):
        for lo, hi, step, name in (
            (self.x_min, self.x_max, self.x_step, "x"),
            (self.y_min, self.y_max, self.y_step, "y"),
        ):
            if not step > 0:
                raise ValueError(f"{name}_step must be positive (got {step!r})")
            if not hi > lo:
                raise ValueError(f"degenerate axis: {name}_max must exceed {name}_min")

    @property
    def x_axis(self) -> np.ndarray:
        n = int(np.floor((self.x_max - self.x_min) / self.x_step + 1 + 1e-9))
        return self.x_min + self.x_step * np.arange(n)

    @property
    def y_axis(self) -> np.ndarray:
        n = int(np.floor((self.y_max - self.y_min) / self.y_step + 1 + 1e-9))
        return self.y_min + self.y_step * np.arange(n)

    def extended(self, pad_x_cells: int, pad_y_cells: int) -> "GridRequest":
        return GridRequest(
            x_min=self.x_min - pad_x_cells * self.x_step,
            x_max=self.x_max + pad_x_cells * self.x_step,
            x_step=self.x_step,
            y_min=self.y_min - pad_y_cells * self.y_step,
            y_max=self.y_max + pad_y_cells * self.y_step,
            y_step=self.y_step,
        )


@dataclass
class SpectrumGrid:
    """2-D non-negative intensity map with explicit axes.

    ``values[iy, ix]`` corresponds to (y_axis[iy], x_axis[ix]).  ``domain``
    is "wavevector" (rad/m) or "position" (m on the Fourier plane).
    """

    x_axis: np.ndarray
    y_axis: np.ndarray
    values: np.ndarray
    domain: str = "wavevector"
    photon: str = "signal"
    scenario_hash: str = ""

    def __post_init__(self):
        self.x_axis = np.asarray(self.x_axis, dtype=float)
        self.y_axis = np.asarray(self.y_axis, dtype=float)
        self.values = np.asarray(self.values, dtype=float)
        if self.values.shape != (self.y_axis.size, self.x_axis.size):
            raise ValueError(
                f"values shape {self.values.shape} does not match axes "
                f"({self.y_axis.size}, {self.x_axis.size})"
            )
        if self.x_axis.size > 1 and not np.all(np.diff(self.x_axis) > 0):
            raise ValueError("x axis must be strictly increasing")
        if self.y_axis.size > 1 and not np.all(np.diff(self.y_axis) > 0):
            raise ValueError("y axis must be strictly increasing")
        if np.any(self.values < 0):
            raise ValueError("grid values must be non-negative")

    @property
    def x_step(self) -> float:
        return float(self.x_axis[1] - self.x_axis[0]) if self.x_axis.size > 1 else 0.0

    @property
    def y_step(self) -> float:
        return float(self.y_axis[1] - self.y_axis[0]) if self.y_axis.size > 1 else 0.0


class Profile(NamedTuple):
    """1-D projection of a grid: coordinates and summed values."""

    coords: np.ndarray
    values: np.ndarray


def _simpson_1d(halfwidth: float, n: int):
    """Symmetric 1-D composite-Simpson nodes/weights on [-halfwidth, halfwidth]."""
    if n < 3:
        raise ValueError("Simpson rule needs at least 3 nodes")
    if n % 2 == 0:
        n += 1
    xs = np.linspace(-halfwidth, halfwidth, n)
    h = xs[1] - xs[0]
    w = np.ones(n)
    w[1:-1:2] = 4.0
    w[2:-1:2] = 2.0
    return xs, w * (h / 3.0)


def default_inner_halfwidth(ctx: PhasematchContext) -> float:
    """Smallest admissible idler-integration half-window: 4 sqrt(2) / min(W)."""
    return 4.0 * np.sqrt(2.0) / min(ctx.pump.waist_x_m, ctx.pump.waist_y_m)


class _InnerWindow(NamedTuple):
    dx: np.ndarray       # flattened x offsets, shape (I,)
    dy: np.ndarray       # flattened y offsets, shape (I,)
    weights: np.ndarray  # flattened 2-D Simpson weights, shape (I,)
    pump_sq: np.ndarray  # pump angular intensity at the offsets, shape (I,)


def _build_inner_window(ctx: PhasematchContext, halfwidth: float, nodes: int) -> _InnerWindow:
    xs, wx = _simpson_1d(halfwidth, nodes)
    DX, DY = np.meshgrid(xs, xs, indexing="ij")
    W2 = np.outer(wx, wx)
    dx = DX.ravel()
    dy = DY.ravel()
    pump_sq = pump_angular_intensity(TransverseWavevector(dx, dy), ctx.pump)
    # Coverage guard: the pump factor must be negligible on the window edge.
    edge = np.abs(np.abs(DX) - halfwidth) < 1e-12
    edge |= np.abs(np.abs(DY) - halfwidth) < 1e-12
    if float(np.max(pump_sq[edge.ravel()])) > 1e-3:
        warnings.warn(
            "idler integration window too small: pump angular intensity at the "
            "window edge exceeds 1e-3 of its center value",
            RuntimeWarning,
            stacklevel=3,
        )
    return _InnerWindow(dx=dx, dy=dy, weights=W2.ravel(), pump_sq=pump_sq)


def _as_rows(x_axis, y_axis, ctx, window: _InnerWindow, iy_list):
    """AS values for the selected rows; each cell integrates the CAS over the window."""
    wvec = window.weights * window.pump_sq
    out = np.empty((len(iy_list), x_axis.size))
    for row, iy in enumerate(iy_list):
        ksx = x_axis[:, None]
        ksy = np.full((x_axis.size, 1), y_axis[iy])
        ki = TransverseWavevector(-ksx + window.dx[None, :], -ksy + window.dy[None, :])
        lng = longitudinal_intensity(TransverseWavevector(ksx, ksy), ki, ctx)
        out[row] = lng @ wvec
    return out


def _as_row_task(args):
    return _as_rows(*args)


def _cas_row_task(args):
    return _cas_idler_smeared_rows(*args)


def _run_row_blocks(task, args_builder, n_rows: int, workers: int) -> np.ndarray:
    """Evaluate rows in contiguous blocks, optionally across processes.

    Every cell is computed from its own data in a fixed order, so the
    result is identical for any worker count.
    """
    if workers <= 1:
        return task(args_builder(list(range(n_rows))))
    blocks = [list(b) for b in np.array_split(np.arange(n_rows), workers) if b.size]
    from concurrent.futures import ProcessPoolExecutor

    with ProcessPoolExecutor(max_workers=len(blocks)) as pool:
        parts = list(pool.map(task, [args_builder(b) for b in blocks]))
    return np.vstack(parts)


def as_ideal(grid: GridRequest, ctx: PhasematchContext, inner_halfwidth: float | None = None,
             inner_nodes: int = 41, scenario_hash: str = "", workers: int = 1) -> SpectrumGrid:
    """Singles angular spectrum with ideal (delta) detection.

    Each cell is the 2-D Simpson quadrature of the coincidence rate over an
    idler window centered at the conjugate point.  ``inner_halfwidth``
    defaults to 4 sqrt(2)/min(W_x, W_y) and may not be set smaller.
    """
    hw_min = default_inner_halfwidth(ctx)
    if inner_halfwidth is None:
        inner_halfwidth = hw_min
    elif inner_halfwidth < hw_min:
        raise ValueError(
            f"inner integration half-width {inner_halfwidth:g} below minimum {hw_min:g} rad/m"
        )
    window = _build_inner_window(ctx, inner_halfwidth, inner_nodes)
    x_axis = grid.x_axis
    y_axis = grid.y_axis
    values = _run_row_blocks(
        _as_row_task,
        lambda rows: (x_axis, y_axis, ctx, window, rows),
        y_axis.size,
        workers,
    )
    return SpectrumGrid(x_axis, y_axis, values, domain="wavevector", photon="signal",
                        scenario_hash=scenario_hash)


def as_points(ksx, ksy, ctx: PhasematchContext, inner_halfwidth: float | None = None,
              inner_nodes: int = 41) -> np.ndarray:
    """Ideal AS evaluated at arbitrary signal wavevectors (1-D arrays)."""
    if inner_halfwidth is None:
        inner_halfwidth = default_inner_halfwidth(ctx)
    window = _build_inner_window(ctx, inner_halfwidth, inner_nodes)
    wvec = window.weights * window.pump_sq
    ksx = np.atleast_1d(np.asarray(ksx, dtype=float))[:, None]
    ksy = np.atleast_1d(np.asarray(ksy, dtype=float))[:, None]
    ki = TransverseWavevector(-ksx + window.dx[None, :], -ksy + window.dy[None, :])
    lng = longitudinal_intensity(TransverseWavevector(ksx, ksy), ki, ctx)
    return lng @ wvec


def cas_ideal(grid: GridRequest, k_i0: TransverseWavevector, ctx: PhasematchContext,
              scenario_hash: str = "") -> SpectrumGrid:
    """Conditional angular spectrum with ideal detectors at fixed idler k_i0.

    Cell value = pump_angular_intensity(k_s + k_i0) * longitudinal_intensity.
    """
    x_axis = grid.x_axis
    y_axis = grid.y_axis
    KX = x_axis[None, :] + np.zeros((y_axis.size, 1))
    KY = y_axis[:, None] + np.zeros((1, x_axis.size))
    s2 = pump_angular_intensity(
        TransverseWavevector(KX + k_i0.kx, KY + k_i0.ky), ctx.pump
    )
    lng = longitudinal_intensity(
        TransverseWavevector(KX, KY),
        TransverseWavevector(float(k_i0.kx), float(k_i0.ky)),
        ctx,
    )
    return SpectrumGrid(x_axis, y_axis, s2 * lng, domain="wavevector", photon="coincidence",
                        scenario_hash=scenario_hash)


def acceptance_sigma_k(detector: DetectorSpec, optics: FourierOptics,
                       ctx: PhasematchContext) -> float:
    """1/e half-width of the acceptance kernel in wavevector units.

    Position widths map through k = [omega/(c f)] rho at the degenerate
    frequency.
    """
    omega_deg = 0.5 * ctx.omega_p
    return (omega_deg / (C_VACUUM * optics.focal_length_m)) * 0.5 * detector.width_m


def _gaussian_kernel(step: float, sigma_k: float) -> np.ndarray:
    """Sampled unit-mass Gaussian exp(-x^2/sigma^2) kernel for grid convolution."""
    m = max(1, int(np.ceil(3.5 * sigma_k / step)))
    xs = step * np.arange(-m, m + 1)
    kern = np.exp(-((xs / sigma_k) ** 2))
    return kern / kern.sum()


def _convolve_separable(values: np.ndarray, kern_x: np.ndarray, kern_y: np.ndarray) -> np.ndarray:
    """'valid' separable convolution along x (axis 1) then y (axis 0)."""
    out = np.apply_along_axis(np.convolve, 1, values, kern_x, mode="valid")
    out = np.apply_along_axis(np.convolve, 0, out, kern_y, mode="valid")
    return out


def _cas_idler_smeared_rows(x_axis, y_axis, k_i0, ctx, sigma_i: float | None,
                            iy_list, idler_nodes: int = 17):
    """CAS rows after integrating the idler acceptance; signal still ideal.

    sigma_i None means a delta idler detector.
    """
    out = np.empty((len(iy_list), x_axis.size))
    if sigma_i is None:
        dx = np.zeros(1)
        dy = np.zeros(1)
        wvec = np.ones(1)
    else:
        xs, wx = _simpson_1d(3.5 * sigma_i, idler_nodes)
        DX, DY = np.meshgrid(xs, xs, indexing="ij")
        W2 = np.outer(wx, wx)
        u = np.exp(-((DX**2 + DY**2) / sigma_i**2))
        wvec = (W2 * u).ravel()
        wvec = wvec / wvec.sum()
        dx = DX.ravel()
        dy = DY.ravel()
    kix = float(k_i0.kx) + dx[None, :]
    kiy = float(k_i0.ky) + dy[None, :]
    for row, iy in enumerate(iy_list):
        ksx = x_axis[:, None]
        ksy = np.full((x_axis.size, 1), y_axis[iy])
        s2 = pump_angular_intensity(TransverseWavevector(ksx + kix, ksy + kiy), ctx.pump)
        lng = longitudinal_intensity(
            TransverseWavevector(ksx, ksy), TransverseWavevector(kix, kiy), ctx
        )
        out[row] = (s2 * lng) @ wvec
    return out


def cas_with_detectors(grid: GridRequest, k_i0: TransverseWavevector,
                       detectors: tuple[DetectorSpec, DetectorSpec],
                       optics: FourierOptics, ctx: PhasematchContext,
                       idler_nodes: int = 17, scenario_hash: str = "",
                       workers: int = 1) -> SpectrumGrid:
    """CAS with finite detector acceptances (signal, idler).

    The fixed idler acceptance is integrated by Gaussian-weighted quadrature
    around k_i0; the scanning signal acceptance is a separable unit-mass
    Gaussian convolution over the grid.  Delta/delta reduces exactly to
    cas_ideal.
    """
    det_s, det_i = detectors
    if det_s.acceptance == "delta" and det_i.acceptance == "delta":
        out = cas_ideal(grid, k_i0, ctx, scenario_hash=scenario_hash)
        out.photon = "coincidence"
        return out

    sigma_i = None if det_i.acceptance == "delta" else acceptance_sigma_k(det_i, optics, ctx)
    if det_s.acceptance == "delta":
        work = grid
        pad_x = pad_y = 0
        kern_x = kern_y = None
    else:
        sigma_s = acceptance_sigma_k(det_s, optics, ctx)
        kern_x = _gaussian_kernel(grid.x_step, sigma_s)
        kern_y = _gaussian_kernel(grid.y_step, sigma_s)
        pad_x = (kern_x.size - 1) // 2
        pad_y = (kern_y.size - 1) // 2
        work = grid.extended(pad_x, pad_y)

    x_axis = work.x_axis
    y_axis = work.y_axis
    values = _run_row_blocks(
        _cas_row_task,
        lambda rows: (x_axis, y_axis, k_i0, ctx, sigma_i, rows, idler_nodes),
        y_axis.size,
        workers,
    )
    if kern_x is not None:
        values = _convolve_separable(values, kern_x, kern_y)
    return SpectrumGrid(grid.x_axis, grid.y_axis, values, domain="wavevector",
                        photon="coincidence", scenario_hash=scenario_hash)


def as_with_detector(grid: GridRequest, detector: DetectorSpec, optics: FourierOptics,
                     ctx: PhasematchContext, inner_halfwidth: float | None = None,
                     inner_nodes: int = 41, scenario_hash: str = "",
                     workers: int = 1) -> SpectrumGrid:
    """AS with a finite detector; a delta detector reduces exactly to as_ideal."""
    if detector.acceptance == "delta":
        return as_ideal(grid, ctx, inner_halfwidth, inner_nodes,
                        scenario_hash=scenario_hash, workers=workers)
    sigma = acceptance_sigma_k(detector, optics, ctx)
    kern_x = _gaussian_kernel(grid.x_step, sigma)
    kern_y = _gaussian_kernel(grid.y_step, sigma)
    work = grid.extended((kern_x.size - 1) // 2, (kern_y.size - 1) // 2)
    ideal = as_ideal(work, ctx, inner_halfwidth, inner_nodes, workers=workers)
    values = _convolve_separable(ideal.values, kern_x, kern_y)
    return SpectrumGrid(grid.x_axis, grid.y_axis, values, domain="wavevector",
                        photon="signal", scenario_hash=scenario_hash)


def _bilinear(values: np.ndarray, x_axis: np.ndarray, y_axis: np.ndarray,
              xq: np.ndarray, yq: np.ndarray) -> np.ndarray:
    """Bilinear interpolation on a uniform grid; queries outside return 0."""
    dx = x_axis[1] - x_axis[0]
    dy = y_axis[1] - y_axis[0]
    fx = (xq - x_axis[0]) / dx
    fy = (yq - y_axis[0]) / dy
    inside = (fx >= 0) & (fx <= x_axis.size - 1) & (fy >= 0) & (fy <= y_axis.size - 1)
    fx = np.clip(fx, 0, x_axis.size - 1)
    fy = np.clip(fy, 0, y_axis.size - 1)
    ix = np.minimum(fx.astype(int), x_axis.size - 2)
    iy = np.minimum(fy.astype(int), y_axis.size - 2)
    tx = fx - ix
    ty = fy - iy
    v = (
        values[iy, ix] * (1 - tx) * (1 - ty)
        + values[iy, ix + 1] * tx * (1 - ty)
        + values[iy + 1, ix] * (1 - tx) * ty
        + values[iy + 1, ix + 1] * tx * ty
    )
    return np.where(inside, v, 0.0)


def wavevector_per_position(optics: FourierOptics, ctx: PhasematchContext,
                            omega: float | None = None) -> float:
    """Conversion factor k / rho on the Fourier plane (rad/m per m).

    With exit-face refraction the tangential wavevector is conserved, so
    k = [omega/(c f)] rho; with refraction disabled the internal angle is
    kept and k = n_o [omega/(c f)] rho.  Defaults to the degenerate
    frequency.
    """
    if omega is None:
        omega = 0.5 * ctx.omega_p
    factor = omega / (C_VACUUM * optics.focal_length_m)
    if not optics.exit_face_refraction:
        lam_um = 2.0 * np.pi * C_VACUUM / omega * 1e6
        factor *= float(n_ordinary(lam_um, ctx.crystal.sellmeier))
    return factor


def to_position_domain(grid: SpectrumGrid, optics: FourierOptics, ctx: PhasematchContext,
                       n_freq_samples: int = 1) -> SpectrumGrid:
    """Map a wavevector-domain grid to Fourier-plane position coordinates.

    Axes are labeled at the degenerate frequency.  With n_freq_samples > 1
    the rate is averaged over that many frequencies spanning the signal
    filter passband (trapezoid weights), resampling the source grid at each
    frequency's own k/rho scaling; n_freq_samples = 1 is a pure axis
    rescale.
    """
    if grid.domain != "wavevector":
        raise ValueError("to_position_domain expects a wavevector-domain grid")
    if n_freq_samples < 1:
        raise ValueError("n_freq_samples must be >= 1")

    def k_per_rho(omega: float) -> float:
        return wavevector_per_position(optics, ctx, omega)

    omega_deg = 0.5 * ctx.omega_p
    scale_deg = k_per_rho(omega_deg)
    x_pos = grid.x_axis / scale_deg
    y_pos = grid.y_axis / scale_deg

    if n_freq_samples == 1:
        values = grid.values.copy()
    else:
        omegas = np.linspace(ctx.signal_filter.omega_lo, ctx.signal_filter.omega_hi,
                             n_freq_samples)
        weights = np.ones(n_freq_samples)
        weights[0] = weights[-1] = 0.5
        XQ, YQ = np.meshgrid(x_pos, y_pos)
        values = np.zeros_like(grid.values)
        for om, w in zip(omegas, weights):
            s = k_per_rho(float(om))
            values += w * _bilinear(grid.values, grid.x_axis, grid.y_axis, XQ * s, YQ * s)
        values /= weights.sum()

    return SpectrumGrid(x_pos, y_pos, values, domain="position", photon=grid.photon,
                        scenario_hash=grid.scenario_hash)


def project(grid: SpectrumGrid, axis: str) -> Profile:
    """Sum the grid along the named axis; total mass is preserved.

    axis="rows" adds up each row (sums over x), returning a profile over the
    y coordinates; axis="columns" adds up each column, returning a profile
    over x.
    """
    if axis == "rows":
        return Profile(coords=grid.y_axis.copy(), values=grid.values.sum(axis=1))
    if axis == "columns":
        return Profile(coords=grid.x_axis.copy(), values=grid.values.sum(axis=0))
    raise ValueError(f"axis must be 'rows' or 'columns' (got {axis!r})")


def external_emission_angle(k_perp_mag: float, omega: float, crystal: CrystalSpec,
                            exit_face_refraction: bool = True) -> float:
    """Propagation angle (rad) outside the crystal for a transverse wavevector.

    The internal angle satisfies sin(theta_int) = k_perp / k(omega); at a
    flat exit face normal to the pump axis Snell's law gives
    sin(theta_ext) = n_o sin(theta_int) = k_perp c / omega.
    """
    if exit_face_refraction:
        return float(np.arcsin(k_perp_mag * C_VACUUM / omega))
    k_tot = float(wavenumber(omega, "ordinary", crystal))
    return float(np.arcsin(k_perp_mag / k_tot))
