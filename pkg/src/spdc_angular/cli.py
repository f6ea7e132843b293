"""Command-line driver: spdc-angular {as, cas, widths, lc-curve}.

Exit status: 0 on success, 1 on configuration errors, 2 on numerical
failures.  Artifacts are written to --out-dir and embed the scenario hash.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from .critical_length import (
    BracketError,
    critical_length_curve,
    reference_idler,
    width_report,
)
from .gridio import emit_grid, emit_profile_csv
from .phasematch import TransverseWavevector
from .scenario import ConfigError, ScenarioConfig, build_context, load_scenario
from .spectra import (
    GridRequest,
    as_with_detector,
    cas_with_detectors,
    project,
    to_position_domain,
    wavevector_per_position,
)

COMMANDS = ("as", "cas", "widths", "lc-curve")


def _centered_request(center_x: float, center_y: float, halfwidth: float,
                      step: float) -> GridRequest:
    return GridRequest(
        x_min=center_x - halfwidth, x_max=center_x + halfwidth, x_step=step,
        y_min=center_y - halfwidth, y_max=center_y + halfwidth, y_step=step,
    )


def _finalize_grid(grid, cfg: ScenarioConfig, optics, ctx):
    if cfg["grid_domain"] == "position":
        return to_position_domain(grid, optics, ctx,
                                  n_freq_samples=cfg["position_freq_samples"])
    return grid


def _emit_map_artifacts(grid, stem: str, cfg: ScenarioConfig, out_dir: Path,
                        fmt: str) -> list[Path]:
    unit = "rad/m" if grid.domain == "wavevector" else "m"
    written = emit_grid(grid, fmt, out_dir / stem, pgm_levels=cfg["pgm_levels"])
    written.append(emit_profile_csv(project(grid, "columns"), out_dir / f"{stem}_proj_x.csv",
                                    "x", unit, grid.scenario_hash))
    written.append(emit_profile_csv(project(grid, "rows"), out_dir / f"{stem}_proj_y.csv",
                                    "y", unit, grid.scenario_hash))
    return written


def run_command(command: str, cfg: ScenarioConfig, out_dir: str | Path = ".",
                workers: int = 1, fmt: str | None = None) -> list[Path]:
    """Execute one CLI command and return the written artifact paths."""
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    fmt = fmt or cfg["output_format"]
    ctx = build_context(cfg)
    optics = cfg.optics()
    shash = cfg.scenario_hash

    if command == "widths":
        rep = width_report(ctx)
        payload = {
            "scenario": shash,
            "pump_width_rad_per_m": rep.pump_width_rad_m,
            "longitudinal_width_rad_per_m": rep.longitudinal_width_rad_m,
            "idler_kx_rad_per_m": rep.idler.kx,
            "idler_ky_rad_per_m": rep.idler.ky,
            "regime": rep.regime,
            "critical_length_mm": rep.critical_length_m * 1e3,
            "crystal_length_mm": rep.crystal_length_m * 1e3,
        }
        path = out_dir / "widths.json"
        path.write_text(json.dumps(payload, indent=2, sort_keys=True) + "\n")
        print(f"regime: {rep.regime} (L = {rep.crystal_length_m * 1e3:.3g} mm, "
              f"Lc = {rep.critical_length_m * 1e3:.3g} mm)")
        return [path]

    if command == "lc-curve":
        curve = critical_length_curve(
            cfg["lc_curve_w_min_um"] * 1e-6,
            cfg["lc_curve_w_max_um"] * 1e-6,
            cfg["lc_curve_w_step_um"] * 1e-6,
            ctx,
        )
        lines = [
            f"# scenario: {shash}",
            f"# fit: slope={curve.slope:.8e} intercept_mm={curve.intercept_m * 1e3:.8e} "
            f"r_squared={curve.r_squared:.6f}",
            "# columns: waist_um,critical_length_mm",
        ]
        for w, lc in zip(curve.waists_m, curve.lengths_m):
            lines.append(f"{w * 1e6:.8e},{lc * 1e3:.8e}")
        path = out_dir / "lc_curve.csv"
        path.write_text("\n".join(lines) + "\n")
        print(f"lc-curve: {curve.waists_m.size} points, R^2 = {curve.r_squared:.4f}")
        return [path]

    scale = wavevector_per_position(optics, ctx)
    q0 = reference_idler(ctx, inner_nodes=cfg["inner_window_nodes"])

    if command == "as":
        halfwidth_m = cfg["as_grid_halfwidth_um"] * 1e-6
        ring_rho = q0.ky / scale
        if halfwidth_m < 1.1 * ring_rho:
            raise ConfigError(
                f"as_grid_halfwidth_um: grid extents do not cover the annulus "
                f"(ring radius {ring_rho * 1e6:.0f} um needs halfwidth >= "
                f"{1.1 * ring_rho * 1e6:.0f} um)"
            )
        req = _centered_request(0.0, 0.0, halfwidth_m * scale,
                                cfg["as_grid_step_um"] * 1e-6 * scale)
        grid = as_with_detector(
            req, cfg.detector(cfg["as_detector_mode"]), optics, ctx,
            inner_nodes=cfg["inner_window_nodes"], scenario_hash=shash, workers=workers,
        )
        grid = _finalize_grid(grid, cfg, optics, ctx)
        return _emit_map_artifacts(grid, "as_grid", cfg, out_dir, fmt)

    if command == "cas":
        azim = np.deg2rad(cfg["cas_idler_azimuth_deg"])
        k_i0 = TransverseWavevector(float(q0.ky * np.cos(azim)), float(q0.ky * np.sin(azim)))
        halfwidth_k = cfg["cas_grid_halfwidth_um"] * 1e-6 * scale
        req = _centered_request(-k_i0.kx, -k_i0.ky, halfwidth_k,
                                cfg["cas_grid_step_um"] * 1e-6 * scale)
        detector = cfg.detector(cfg["cas_detector_mode"])
        grid = cas_with_detectors(
            req, k_i0, (detector, detector), optics, ctx,
            idler_nodes=cfg["idler_acceptance_nodes"], scenario_hash=shash, workers=workers,
        )
        grid = _finalize_grid(grid, cfg, optics, ctx)
        return _emit_map_artifacts(grid, "cas_grid", cfg, out_dir, fmt)

    raise ConfigError(f"unknown command {command!r} (expected one of {', '.join(COMMANDS)})")


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="spdc-angular",
        description="Angular spectra of type-I SPDC photon pairs and the "
                    "critical-crystal-length analysis.",
    )
    parser.add_argument("command", choices=COMMANDS)
    parser.add_argument("--config", required=True,
                        help="path to a scenario JSON file, or a preset name "
                             "(measurement-1 .. measurement-4)")
    parser.add_argument("--out-dir", default=".", help="artifact directory (default: .)")
    parser.add_argument("--workers", type=int, default=1,
                        help="row-parallel worker count; results are identical "
                             "for any value (default: 1)")
    parser.add_argument("--format", choices=("csv", "pgm", "both"), default=None,
                        help="override the configured output format for grid artifacts")
    args = parser.parse_args(argv)

    try:
        cfg = load_scenario(args.config)
        written = run_command(args.command, cfg, args.out_dir, args.workers, args.format)
    except ConfigError as err:
        print(f"config error: {err}", file=sys.stderr)
        return 1
    except ValueError as err:
        print(f"config error: {err}", file=sys.stderr)
        return 1
    except (BracketError, RuntimeError) as err:
        print(f"numerical failure: {err}", file=sys.stderr)
        return 2
    for path in written:
        print(path)
    return 0


if __name__ == "__main__":
    sys.exit(main())
