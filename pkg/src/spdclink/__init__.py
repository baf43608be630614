"""Simulation and analysis toolkit for photon-pair creation interference
between two distant SPDC sources sharing one free-space link."""

from .analysis import (
    CosineFit,
    ExtremaResult,
    FringeTrace,
    VisibilityEstimate,
    VisibilityExtrapolation,
    expected_period_bins,
    find_extrema,
    fit_cosine,
    linear_visibility_extrapolation,
    monte_carlo_visibility,
    shot_noise_visibility_error,
    visibility,
)
from .coherence import (
    PathLayout,
    SourceSpectrum,
    coherence_length,
    coherence_time,
    dc_condition,
    pump_coherence_factor,
    pump_condition,
)
from .coincidence import (
    CoincidenceResult,
    accidental_estimate,
    bin_counts,
    count_coincidences,
)
from .errors import (
    DegenerateInputError,
    GainRegimeWarning,
    ScenarioParseError,
    TagBudgetError,
    UnsortedStreamError,
    ValidationError,
)
from .optics import (
    FocusingElement,
    GaussianBeam,
    aperture_check,
    beam_radius_at,
    conjugate_waist,
    matched_spdc_focal_parameter,
    peak_intensity,
    rayleigh_length,
)
from .pipeline import (
    run_analyze,
    run_audit,
    run_extrapolate,
    run_reproduce,
    run_simulate,
)
from .quantum import (
    SpdcProcess,
    TwoModeState,
    emission_probability,
    fringe_visibility_from_amplitudes,
    superposed_pair_amplitude,
    truncated_state,
)
from .rates import (
    DetectorParams,
    RateParams,
    accidental_rate,
    brightness,
    coincidence_rate,
    fringe_period_in_stage_travel,
    singles_rate,
)
from .scenario import PRESET_NAMES, Scenario, load_scenario, loads_scenario
from .tagsim import (
    ScanGroundTruth,
    ScanResult,
    TimeTagStream,
    simulate_scan,
    thinned_poisson_times,
)
from .turbulence import (
    GainSeries,
    TurbulenceModel,
    coupling_efficiency,
    sample_gain_series,
    sigma_from_distance,
)

__version__ = "0.1.0"
