"""Grid and profile emitters: inspectable CSV and zero-dependency PGM renders.

CSV carries axis metadata in comment headers and row-major values at 9
significant digits; parsing a CSV back returns exactly the decimals stored
in the file, so emit -> parse -> emit is byte-identical.  PGM is binary
8-bit (P5), scaled to the grid maximum, optionally quantized to six gray
levels.
"""

from __future__ import annotations

from pathlib import Path

import numpy as np

from .spectra import Profile, SpectrumGrid

_UNITS = {"wavevector": "rad/m", "position": "m"}


def _axis_header(label: str, axis: np.ndarray, unit: str) -> str:
    step = axis[1] - axis[0]
    return (
        f"# {label}: min={axis[0]:.8e} max={axis[-1]:.8e} step={step:.8e} "
        f"n={axis.size} unit={unit}"
    )


def _check_axes(grid: SpectrumGrid) -> None:
    if grid.x_axis.size < 2 or grid.y_axis.size < 2:
        raise ValueError("degenerate axis: grid needs at least 2 points per axis")


def emit_grid_csv(grid: SpectrumGrid, path: str | Path) -> Path:
    """Write a grid as CSV: comment headers, then one line per y row."""
    _check_axes(grid)
    path = Path(path)
    unit = _UNITS[grid.domain]
    lines = [
        f"# scenario: {grid.scenario_hash}",
        f"# domain: {grid.domain}",
        f"# photon: {grid.photon}",
        _axis_header("x", grid.x_axis, unit),
        _axis_header("y", grid.y_axis, unit),
    ]
    for row in grid.values:
        lines.append(",".join(f"{v:.8e}" for v in row))
    path.write_text("\n".join(lines) + "\n")
    return path


def parse_grid_csv(path: str | Path) -> SpectrumGrid:
    """Read back a grid written by emit_grid_csv."""
    meta: dict[str, str] = {}
    rows = []
    for line in Path(path).read_text().splitlines():
        if line.startswith("#"):
            key, _, rest = line[1:].partition(":")
            meta[key.strip()] = rest.strip()
        elif line.strip():
            rows.append([float(v) for v in line.split(",")])

    def axis_from(label: str) -> np.ndarray:
        fields = dict(item.split("=") for item in meta[label].split() if "=" in item)
        n = int(fields["n"])
        lo = float(fields["min"])
        step = float(fields["step"])
        return lo + step * np.arange(n)

    return SpectrumGrid(
        x_axis=axis_from("x"),
        y_axis=axis_from("y"),
        values=np.array(rows),
        domain=meta.get("domain", "wavevector"),
        photon=meta.get("photon", "signal"),
        scenario_hash=meta.get("scenario", ""),
    )


def emit_grid_pgm(grid: SpectrumGrid, path: str | Path, levels: int = 0) -> Path:
    """Write an 8-bit binary PGM scaled to the grid maximum.

    levels=0 keeps the continuous 0-255 scale; levels=6 quantizes to six
    gray levels.  Rows are written top-down (+y at the top of the image).
    """
    _check_axes(grid)
    if levels not in (0, 6):
        raise ValueError(f"levels must be 0 or 6 (got {levels!r})")
    path = Path(path)
    vmax = float(grid.values.max())
    if vmax > 0:
        norm = grid.values / vmax
    else:
        norm = np.zeros_like(grid.values)
    if levels == 6:
        idx = np.minimum((norm * 6).astype(int), 5)
        pixels = (idx * 51).astype(np.uint8)
    else:
        pixels = np.clip(np.round(norm * 255), 0, 255).astype(np.uint8)
    pixels = pixels[::-1, :]
    header = (
        f"P5\n# scenario: {grid.scenario_hash}\n"
        f"{grid.x_axis.size} {grid.y_axis.size}\n255\n"
    )
    path.write_bytes(header.encode("ascii") + pixels.tobytes())
    return path


def emit_grid(grid: SpectrumGrid, fmt: str, path: str | Path, pgm_levels: int = 0) -> list[Path]:
    """Emit a grid in the requested format(s); returns the written paths."""
    path = Path(path)
    written = []
    if fmt in ("csv", "both"):
        written.append(emit_grid_csv(grid, path.with_suffix(".csv")))
    if fmt in ("pgm", "both"):
        written.append(emit_grid_pgm(grid, path.with_suffix(".pgm"), levels=pgm_levels))
    if not written:
        raise ValueError(f"format must be 'csv', 'pgm' or 'both' (got {fmt!r})")
    return written


def emit_profile_csv(profile: Profile, path: str | Path, coord_label: str,
                     unit: str, scenario_hash: str = "") -> Path:
    """Write a 1-D projection as two-column CSV (coordinate, value)."""
    path = Path(path)
    lines = [
        f"# scenario: {scenario_hash}",
        f"# coord: {coord_label} unit={unit}",
    ]
    for c, v in zip(profile.coords, profile.values):
        lines.append(f"{c:.8e},{v:.8e}")
    path.write_text("\n".join(lines) + "\n")
    return path
