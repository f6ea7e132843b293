"""Scenario configuration: flat JSON documents, presets, and context builders.

A scenario is a flat JSON object whose keys carry their units as suffixes
(e.g. "pump_waist_x_um").  Unknown keys are rejected; omitted keys take
the documented defaults.  Four packaged presets reproduce the published
measurement configurations; the SPDC_ANGULAR_PRESET_DIR environment
variable overrides the preset location.
"""

from __future__ import annotations

import hashlib
import json
import os
from dataclasses import dataclass
from importlib import resources
from pathlib import Path

import numpy as np

from .dispersion import SELLMEIER_SETS, CrystalSpec, SellmeierBranch, SellmeierSet
from .phasematch import FilterSpec, PhasematchContext, PumpSpec
from .spectra import DetectorSpec, FourierOptics

PRESET_ENV_VAR = "SPDC_ANGULAR_PRESET_DIR"

REQUIRED_KEYS = ("crystal_length_mm", "pump_waist_x_um", "pump_waist_y_um")

# key -> (default, type); defaults apply whenever the key is omitted.
DEFAULTS: dict[str, tuple[object, type]] = {
    "name": ("", str),
    "cut_angle_deg": (29.3, float),
    "walkoff_sign": (1, int),
    "sellmeier_set": ("bbo-default", str),
    "pump_wavelength_nm": (406.8, float),
    "signal_filter_center_nm": (810.0, float),
    "signal_filter_bandwidth_nm": (10.0, float),
    "idler_filter_center_nm": (810.0, float),
    "idler_filter_bandwidth_nm": (10.0, float),
    "lens_focal_length_cm": (10.0, float),
    "exit_face_refraction": (True, bool),
    "detector_width_um": (200.0, float),
    "as_detector_mode": ("delta", str),
    "cas_detector_mode": ("gaussian", str),
    "cas_idler_azimuth_deg": (180.0, float),
    "grid_domain": ("position", str),
    "as_grid_step_um": (200.0, float),
    "as_grid_halfwidth_um": (8200.0, float),
    "cas_grid_step_um": (50.0, float),
    "cas_grid_halfwidth_um": (800.0, float),
    "position_freq_samples": (1, int),
    "freq_nodes": (33, int),
    "inner_window_nodes": (41, int),
    "idler_acceptance_nodes": (17, int),
    "lc_curve_w_min_um": (30.0, float),
    "lc_curve_w_max_um": (200.0, float),
    "lc_curve_w_step_um": (10.0, float),
    "output_format": ("csv", str),
    "pgm_levels": (0, int),
}

# Required only when sellmeier_set == "custom".
CUSTOM_SELLMEIER_KEYS = (
    "sellmeier_o_b1", "sellmeier_o_c1_um2", "sellmeier_o_e1_um2", "sellmeier_o_d1",
    "sellmeier_e_b1", "sellmeier_e_c1_um2", "sellmeier_e_e1_um2", "sellmeier_e_d1",
    "sellmeier_lambda_min_um", "sellmeier_lambda_max_um",
)

REQUIRED_TYPES = {
    "crystal_length_mm": float,
    "pump_waist_x_um": float,
    "pump_waist_y_um": float,
}
CUSTOM_TYPES = {key: float for key in CUSTOM_SELLMEIER_KEYS}


class ConfigError(ValueError):
    """Scenario document failed parsing or violated an invariant."""


def _check_invariants(cfg: dict) -> None:
    positive = {
        "crystal_length_mm": "L > 0",
        "pump_waist_x_um": "W_x > 0",
        "pump_waist_y_um": "W_y > 0",
        "pump_wavelength_nm": "pump wavelength > 0",
        "signal_filter_bandwidth_nm": "bandwidth > 0",
        "idler_filter_bandwidth_nm": "bandwidth > 0",
        "lens_focal_length_cm": "f > 0",
        "detector_width_um": "detector width > 0",
        "as_grid_step_um": "grid step > 0",
        "as_grid_halfwidth_um": "grid halfwidth > 0",
        "cas_grid_step_um": "grid step > 0",
        "cas_grid_halfwidth_um": "grid halfwidth > 0",
        "lc_curve_w_min_um": "W range > 0",
        "lc_curve_w_step_um": "W step > 0",
    }
    for key, inv in positive.items():
        if not cfg[key] > 0:
            raise ConfigError(f"{key}: invariant {inv} violated (got {cfg[key]!r})")
    if not 0 < cfg["cut_angle_deg"] < 90:
        raise ConfigError(
            f"cut_angle_deg: invariant 0 < theta_c < pi/2 violated (got {cfg['cut_angle_deg']!r})"
        )
    if cfg["walkoff_sign"] not in (1, -1):
        raise ConfigError(f"walkoff_sign: must be +1 or -1 (got {cfg['walkoff_sign']!r})")
    for key in ("as_detector_mode", "cas_detector_mode"):
        if cfg[key] not in ("delta", "gaussian"):
            raise ConfigError(f"{key}: must be 'delta' or 'gaussian' (got {cfg[key]!r})")
    if cfg["grid_domain"] not in ("wavevector", "position"):
        raise ConfigError(
            f"grid_domain: must be 'wavevector' or 'position' (got {cfg['grid_domain']!r})"
        )
    if cfg["output_format"] not in ("csv", "pgm", "both"):
        raise ConfigError(
            f"output_format: must be 'csv', 'pgm' or 'both' (got {cfg['output_format']!r})"
        )
    if cfg["pgm_levels"] not in (0, 6):
        raise ConfigError(f"pgm_levels: must be 0 (continuous) or 6 (got {cfg['pgm_levels']!r})")
    for key in ("position_freq_samples", "freq_nodes"):
        if cfg[key] < 1:
            raise ConfigError(f"{key}: invariant >= 1 violated (got {cfg[key]!r})")
    for key in ("inner_window_nodes", "idler_acceptance_nodes"):
        if cfg[key] < 3:
            raise ConfigError(f"{key}: invariant >= 3 violated (got {cfg[key]!r})")
    if not cfg["lc_curve_w_max_um"] > cfg["lc_curve_w_min_um"]:
        raise ConfigError("lc_curve_w_max_um: must exceed lc_curve_w_min_um")
    if cfg["sellmeier_set"] != "custom" and cfg["sellmeier_set"] not in SELLMEIER_SETS:
        known = ", ".join(sorted(SELLMEIER_SETS))
        raise ConfigError(
            f"sellmeier_set: unknown set {cfg['sellmeier_set']!r} (known: {known}, or 'custom')"
        )


def _coerce(key: str, value, expected: type):
    if expected is float:
        if isinstance(value, bool) or not isinstance(value, (int, float)):
            raise ConfigError(f"{key}: expected a number, got {value!r}")
        return float(value)
    if expected is int:
        if isinstance(value, bool) or not isinstance(value, int):
            raise ConfigError(f"{key}: expected an integer, got {value!r}")
        return value
    if expected is bool:
        if not isinstance(value, bool):
            raise ConfigError(f"{key}: expected true/false, got {value!r}")
        return value
    if not isinstance(value, str):
        raise ConfigError(f"{key}: expected a string, got {value!r}")
    return value


def resolve_config(document: dict) -> dict:
    """Validate a raw flat mapping and fill in defaults."""
    if not isinstance(document, dict):
        raise ConfigError("scenario document must be a JSON object")
    custom = document.get("sellmeier_set") == "custom"
    known = set(DEFAULTS) | set(REQUIRED_KEYS)
    if custom:
        known |= set(CUSTOM_SELLMEIER_KEYS)
    unknown = sorted(set(document) - known)
    if unknown:
        raise ConfigError(f"unknown keys: {', '.join(unknown)}")
    for key in REQUIRED_KEYS:
        if key not in document:
            raise ConfigError(f"missing required key '{key}'")
    if custom:
        for key in CUSTOM_SELLMEIER_KEYS:
            if key not in document:
                raise ConfigError(f"missing required key '{key}' (sellmeier_set is 'custom')")

    resolved: dict = {}
    for key, (default, typ) in DEFAULTS.items():
        resolved[key] = _coerce(key, document[key], typ) if key in document else default
    for key in REQUIRED_KEYS:
        resolved[key] = _coerce(key, document[key], REQUIRED_TYPES[key])
    if custom:
        for key in CUSTOM_SELLMEIER_KEYS:
            resolved[key] = _coerce(key, document[key], CUSTOM_TYPES[key])
    _check_invariants(resolved)
    return resolved


def _validate_sellmeier(s: SellmeierSet, n_grid: int = 50) -> None:
    lams = np.linspace(s.lambda_min_um, s.lambda_max_um, n_grid)
    no2 = s.ordinary.n_squared(lams)
    ne2 = s.extraordinary.n_squared(lams)
    if not np.all(no2 > 1) or not np.all(ne2 > 1):
        raise ConfigError("sellmeier invariant n^2 > 1 violated over the validity range")
    if not np.all(no2 > ne2):
        raise ConfigError("sellmeier invariant n_o > n_e (negative uniaxial) violated")


@dataclass(frozen=True)
class ScenarioConfig:
    """A fully resolved scenario (all defaults applied and validated)."""

    values: dict

    def __getitem__(self, key: str):
        return self.values[key]

    @property
    def scenario_hash(self) -> str:
        canon = json.dumps(self.values, sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(canon.encode()).hexdigest()[:16]

    def sellmeier(self) -> SellmeierSet:
        cfg = self.values
        if cfg["sellmeier_set"] != "custom":
            return SELLMEIER_SETS[cfg["sellmeier_set"]]
        s = SellmeierSet(
            name="custom",
            ordinary=SellmeierBranch(
                cfg["sellmeier_o_b1"], cfg["sellmeier_o_c1_um2"],
                cfg["sellmeier_o_e1_um2"], cfg["sellmeier_o_d1"],
            ),
            extraordinary=SellmeierBranch(
                cfg["sellmeier_e_b1"], cfg["sellmeier_e_c1_um2"],
                cfg["sellmeier_e_e1_um2"], cfg["sellmeier_e_d1"],
            ),
            lambda_min_um=cfg["sellmeier_lambda_min_um"],
            lambda_max_um=cfg["sellmeier_lambda_max_um"],
        )
        _validate_sellmeier(s)
        return s

    def crystal(self) -> CrystalSpec:
        cfg = self.values
        return CrystalSpec(
            length_m=cfg["crystal_length_mm"] * 1e-3,
            cut_angle_rad=float(np.deg2rad(cfg["cut_angle_deg"])),
            sellmeier=self.sellmeier(),
            walkoff_sign=cfg["walkoff_sign"],
        )

    def pump(self) -> PumpSpec:
        cfg = self.values
        return PumpSpec(
            wavelength_m=cfg["pump_wavelength_nm"] * 1e-9,
            waist_x_m=cfg["pump_waist_x_um"] * 1e-6,
            waist_y_m=cfg["pump_waist_y_um"] * 1e-6,
        )

    def filters(self) -> tuple[FilterSpec, FilterSpec]:
        cfg = self.values
        return (
            FilterSpec(cfg["signal_filter_center_nm"] * 1e-9,
                       cfg["signal_filter_bandwidth_nm"] * 1e-9),
            FilterSpec(cfg["idler_filter_center_nm"] * 1e-9,
                       cfg["idler_filter_bandwidth_nm"] * 1e-9),
        )

    def optics(self) -> FourierOptics:
        cfg = self.values
        return FourierOptics(
            focal_length_m=cfg["lens_focal_length_cm"] * 1e-2,
            exit_face_refraction=cfg["exit_face_refraction"],
        )

    def detector(self, mode: str) -> DetectorSpec:
        if mode == "delta":
            return DetectorSpec(acceptance="delta")
        return DetectorSpec(acceptance="gaussian",
                            width_m=self.values["detector_width_um"] * 1e-6)


def build_context(cfg: ScenarioConfig) -> PhasematchContext:
    signal_filter, idler_filter = cfg.filters()
    try:
        return PhasematchContext(
            crystal=cfg.crystal(),
            pump=cfg.pump(),
            signal_filter=signal_filter,
            idler_filter=idler_filter,
            freq_nodes=cfg["freq_nodes"],
        )
    except ValueError as err:
        raise ConfigError(str(err)) from err


def _packaged_preset_dir() -> Path:
    return Path(resources.files("spdc_angular").joinpath("presets"))


def _preset_dir() -> Path:
    override = os.environ.get(PRESET_ENV_VAR)
    if override:
        return Path(override)
    return _packaged_preset_dir()


def list_presets() -> list[str]:
    directory = _preset_dir()
    if not directory.is_dir():
        return []
    return sorted(p.stem for p in directory.glob("*.json"))


def _parse_document(text: str, source: str) -> dict:
    try:
        return json.loads(text)
    except json.JSONDecodeError as err:
        raise ConfigError(
            f"{source}: parse error at line {err.lineno}, column {err.colno}: {err.msg}"
        ) from err


def load_scenario(path_or_name: str | Path) -> ScenarioConfig:
    """Load a scenario from a JSON file path or a preset name."""
    path = Path(path_or_name)
    if not path.is_file():
        candidate = _preset_dir() / f"{path_or_name}.json"
        if candidate.is_file():
            path = candidate
        else:
            raise ConfigError(
                f"no such config file or preset: {path_or_name!r} "
                f"(presets: {', '.join(list_presets()) or 'none'})"
            )
    resolved = resolve_config(_parse_document(path.read_text(), str(path)))
    return ScenarioConfig(values=resolved)


def preset_scenario(name: str, **overrides) -> ScenarioConfig:
    """Load a packaged preset and apply key overrides (same validation as files)."""
    path = _preset_dir() / f"{name}.json"
    if not path.is_file():
        raise ConfigError(f"no such preset: {name!r} (presets: {', '.join(list_presets())})")
    document = _parse_document(path.read_text(), str(path))
    document.update(overrides)
    return ScenarioConfig(values=resolve_config(document))
