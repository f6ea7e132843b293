"""Angular spectra of type-I non-collinear SPDC photon pairs.

Computes the singles angular spectrum (AS) and the coincidence conditional
angular spectrum (CAS) for a CW-pumped uniaxial crystal, and the critical
crystal length separating the pump-dominated from the crystal-dominated
regime.
"""

from .dispersion import (
    BBO_DEFAULT,
    SELLMEIER_SETS,
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
from .phasematch import (
    FilterSpec,
    PhasematchContext,
    PumpSpec,
    TransverseWavevector,
    delta_k,
    kz_longitudinal,
    longitudinal_intensity,
    pump_angular_intensity,
    sinc_sq,
)
from .spectra import (
    DetectorSpec,
    FourierOptics,
    GridRequest,
    SpectrumGrid,
    as_ideal,
    as_with_detector,
    cas_ideal,
    cas_with_detectors,
    external_emission_angle,
    project,
    to_position_domain,
)
from .critical_length import (
    BracketError,
    WidthReport,
    critical_length,
    critical_length_curve,
    longitudinal_angular_width,
    pump_angular_width,
    reference_idler,
    width_report,
)
from .scenario import (
    ConfigError,
    ScenarioConfig,
    build_context,
    list_presets,
    load_scenario,
    preset_scenario,
)
from .gridio import emit_grid, emit_profile_csv, parse_grid_csv

__version__ = "0.1.0"
