"""Scenario configuration: file grammar, validation, presets.

Scenario files are plain-text section/key files (configparser syntax) whose
scalar values carry SI unit suffixes, e.g. ``stage_velocity = 180 nm/s`` or
``bandwidth = 160 MHz``.  Sections group the physical subsystems; see the
README for the full grammar and the preset files for complete examples.
"""

import math
import re
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path
from configparser import ConfigParser, Error as ConfigParserError

from . import coherence
from .coherence import PathLayout, SourceSpectrum
from .errors import ScenarioParseError, ValidationError
from .rates import DetectorParams
from .turbulence import TurbulenceModel

PRESET_NAMES = ("paper_2m", "paper_20m", "paper_70m")

_NUMBER_RE = re.compile(r"^([+-]?(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?)\s*(.*)$")

_UNIT_TABLES = {
    "length": {
        "pm": 1e-12, "nm": 1e-9, "um": 1e-6, "µm": 1e-6,
        "mm": 1e-3, "cm": 1e-2, "m": 1.0, "km": 1e3,
    },
    "time": {
        "fs": 1e-15, "ps": 1e-12, "ns": 1e-9, "us": 1e-6, "µs": 1e-6,
        "ms": 1e-3, "s": 1.0, "min": 60.0,
    },
    "frequency": {"Hz": 1.0, "kHz": 1e3, "MHz": 1e6, "GHz": 1e9, "THz": 1e12},
    "power": {"nW": 1e-9, "uW": 1e-6, "µW": 1e-6, "mW": 1e-3, "W": 1.0},
    "speed": {"nm/s": 1e-9, "um/s": 1e-6, "µm/s": 1e-6, "mm/s": 1e-3, "m/s": 1.0},
    "rate": {"cps": 1.0, "counts/s": 1.0, "1/s": 1.0, "kcps": 1e3, "Mcps": 1e6},
    "angle": {"urad": 1e-6, "µrad": 1e-6, "mrad": 1e-3, "rad": 1.0,
              "deg": math.pi / 180.0},
    "dimensionless": {"": 1.0, "%": 1e-2},
}

_GENERIC_TABLE = {}
for _table in _UNIT_TABLES.values():
    _GENERIC_TABLE.update(_table)


def parse_quantity(text, kind, where=""):
    """Parse a unit-suffixed scalar like '180 nm/s' into SI base units."""
    m = _NUMBER_RE.match(text.strip())
    if not m:
        raise ScenarioParseError(f"{where}: cannot parse quantity {text!r}")
    value = float(m.group(1))
    unit = m.group(2).strip()
    table = _GENERIC_TABLE if kind == "any" else _UNIT_TABLES[kind]
    if unit not in table:
        raise ScenarioParseError(f"{where}: unit {unit!r} is not a {kind} unit")
    return value * table[unit]


@dataclass(frozen=True)
class GainConfig:
    base: float
    contrast: float = 1.0

    def __post_init__(self):
        if self.base < 0.0:
            raise ValueError("base gain must be >= 0")
        if not 0.0 <= self.contrast <= 1.0:
            raise ValueError("contrast must be in [0, 1]")


@dataclass(frozen=True)
class LinkConfig:
    pair_rate: float
    transmission: float = 1.0

    def __post_init__(self):
        if self.pair_rate < 0.0:
            raise ValueError("pair_rate must be >= 0")
        if not 0.0 <= self.transmission <= 1.0:
            raise ValueError("transmission must be in [0, 1]")


@dataclass(frozen=True)
class BeamTrain:
    """Launch/collection optics of both beams."""

    fiber_collimated_waist: float
    focus_lens: float
    pump_focus_waist: float
    spdc_waist: float
    spdc_wavelength: float
    collimating_mirror: float
    aperture: float
    xi_pump: float

    def __post_init__(self):
        for name in (
            "fiber_collimated_waist", "focus_lens", "pump_focus_waist",
            "spdc_waist", "spdc_wavelength", "collimating_mirror",
            "aperture", "xi_pump",
        ):
            if getattr(self, name) <= 0.0:
                raise ValueError(f"{name} must be > 0")


@dataclass(frozen=True)
class ScanConfig:
    duration: float
    stage_velocity: float
    fold_factor: float = 2.0
    phase_offset: float = 0.0
    seed: int = 0

    def __post_init__(self):
        if self.duration <= 0.0:
            raise ValueError("duration must be > 0")
        if self.stage_velocity <= 0.0:
            raise ValueError("stage_velocity must be > 0")
        if self.fold_factor < 1.0:
            raise ValueError("fold_factor must be >= 1")
        if not 0 <= self.seed < 2**64:
            raise ValueError("seed must fit an unsigned 64-bit integer")


@dataclass
class Scenario:
    """One fully validated simulation scenario."""

    name: str
    distance: float
    source: SourceSpectrum
    pump_power: float
    optics_wavelength: float
    beams: BeamTrain
    gains: GainConfig
    link: LinkConfig
    paths: PathLayout
    detector: DetectorParams
    turbulence: TurbulenceModel
    scan: ScanConfig
    reference: dict = field(default_factory=dict)

    def pump_wavenumber(self):
        return 2.0 * math.pi / self.source.center_wavelength

    def fringe_period_travel(self):
        """Stage travel per fringe [m]."""
        return self.source.center_wavelength / self.scan.fold_factor

    def fringe_period_seconds(self):
        return self.fringe_period_travel() / self.scan.stage_velocity

    def pump_coherence_factor(self):
        mismatch = abs(self.paths.pump_path - self.paths.dc_path_a - self.paths.dc_path_b)
        return coherence.pump_coherence_factor(
            mismatch, self.paths.pump_coh_len, self.source.lineshape
        )

    def to_dict(self):
        """Plain-scalar echo of the scenario (SI units) for reports."""
        return {
            "name": self.name,
            "distance_m": self.distance,
            "source": {
                "center_wavelength_m": self.source.center_wavelength,
                "optics_wavelength_m": self.optics_wavelength,
                "bandwidth_hz": self.source.fwhm_bandwidth,
                "lineshape": self.source.lineshape,
                "power_w": self.pump_power,
            },
            "beams": {
                "fiber_collimated_waist_m": self.beams.fiber_collimated_waist,
                "focus_lens_m": self.beams.focus_lens,
                "pump_focus_waist_m": self.beams.pump_focus_waist,
                "spdc_waist_m": self.beams.spdc_waist,
                "spdc_wavelength_m": self.beams.spdc_wavelength,
                "collimating_mirror_m": self.beams.collimating_mirror,
                "aperture_m": self.beams.aperture,
                "xi_pump": self.beams.xi_pump,
            },
            "gains": {"base": self.gains.base, "contrast": self.gains.contrast},
            "link": {
                "pair_rate_cps": self.link.pair_rate,
                "transmission": self.link.transmission,
            },
            "paths": {
                "pump_path_m": self.paths.pump_path,
                "dc_path_a_m": self.paths.dc_path_a,
                "dc_path_b_m": self.paths.dc_path_b,
                "pump_coh_len_m": self.paths.pump_coh_len,
                "dc_coh_len_m": self.paths.dc_coh_len,
            },
            "detector": {
                "efficiency_signal": self.detector.efficiency_signal,
                "efficiency_idler": self.detector.efficiency_idler,
                "dark_rate_cps": self.detector.dark_rate,
                "coincidence_window_s": self.detector.coincidence_window,
                "integration_time_s": self.detector.integration_time,
                "timestamp_jitter_s": self.detector.timestamp_jitter,
                "dead_time_s": self.detector.dead_time,
                "singles_background_fraction": self.detector.singles_background_fraction,
                "singles_visibility_signal": self.detector.singles_visibility_signal,
                "singles_visibility_idler": self.detector.singles_visibility_idler,
            },
            "turbulence": {
                "sigma_angle_rad": self.turbulence.sigma_angle,
                "angle_scale_rad": self.turbulence.angle_scale,
                "sigma_phase_rad": self.turbulence.sigma_phase,
                "correlation_time_s": self.turbulence.correlation_time,
            },
            "scan": {
                "duration_s": self.scan.duration,
                "stage_velocity_m_s": self.scan.stage_velocity,
                "fold_factor": self.scan.fold_factor,
                "phase_offset_rad": self.scan.phase_offset,
                "seed": self.scan.seed,
            },
            "reference": dict(self.reference),
        }


# Field table: (section, key) -> (kind, required, default). Defaults are in
# SI base units; None marks an optional field with no value.
_FIELDS = {
    ("scenario", "name"): ("str", True, None),
    ("scenario", "distance"): ("length", True, None),
    ("source", "center_wavelength"): ("length", True, None),
    ("source", "optics_wavelength"): ("length", False, None),
    ("source", "bandwidth"): ("frequency", True, None),
    ("source", "lineshape"): ("str", False, "lorentzian"),
    ("source", "power"): ("power", True, None),
    ("beams", "fiber_collimated_waist"): ("length", True, None),
    ("beams", "focus_lens"): ("length", True, None),
    ("beams", "pump_focus_waist"): ("length", True, None),
    ("beams", "spdc_waist"): ("length", True, None),
    ("beams", "spdc_wavelength"): ("length", True, None),
    ("beams", "collimating_mirror"): ("length", True, None),
    ("beams", "aperture"): ("length", True, None),
    ("beams", "xi_pump"): ("dimensionless", True, None),
    ("gains", "base"): ("dimensionless", True, None),
    ("gains", "contrast"): ("dimensionless", False, 1.0),
    ("link", "pair_rate"): ("rate", True, None),
    ("link", "transmission"): ("dimensionless", False, 1.0),
    ("paths", "pump_path"): ("length", True, None),
    ("paths", "dc_path_a"): ("length", True, None),
    ("paths", "dc_path_b"): ("length", True, None),
    ("paths", "dc_coh_len"): ("length", False, 0.2e-3),
    ("detector", "efficiency_signal"): ("dimensionless", True, None),
    ("detector", "efficiency_idler"): ("dimensionless", True, None),
    ("detector", "dark_rate"): ("rate", False, 0.0),
    ("detector", "coincidence_window"): ("time", True, None),
    ("detector", "integration_time"): ("time", True, None),
    ("detector", "timestamp_jitter"): ("time", False, 100e-12),
    ("detector", "dead_time"): ("time", False, 0.0),
    ("detector", "singles_background_fraction"): ("dimensionless", False, 0.0),
    ("detector", "singles_visibility_signal"): ("dimensionless", False, None),
    ("detector", "singles_visibility_idler"): ("dimensionless", False, None),
    ("turbulence", "sigma_angle"): ("angle", False, 0.0),
    ("turbulence", "angle_scale"): ("angle", False, 1.0e-3),
    ("turbulence", "sigma_phase"): ("angle", False, 0.0),
    ("turbulence", "correlation_time"): ("time", False, 1.0),
    ("scan", "duration"): ("time", True, None),
    ("scan", "stage_velocity"): ("speed", True, None),
    ("scan", "fold_factor"): ("dimensionless", False, 2.0),
    ("scan", "phase_offset"): ("angle", False, 0.0),
    ("scan", "seed"): ("int", False, 0),
}

_KNOWN_SECTIONS = {s for s, _ in _FIELDS} | {"reference"}


def _parse_fields(cp):
    values = {}
    problems = []
    for (section, key), (kind, required, default) in _FIELDS.items():
        where = f"{section}.{key}"
        if cp.has_option(section, key):
            raw = cp.get(section, key)
            if kind == "str":
                values[(section, key)] = raw.strip()
            elif kind == "int":
                try:
                    values[(section, key)] = int(raw)
                except ValueError:
                    raise ScenarioParseError(f"{where}: expected an integer, got {raw!r}")
            else:
                values[(section, key)] = parse_quantity(raw, kind, where)
        elif required:
            problems.append((where, "missing required field"))
            values[(section, key)] = None
        else:
            values[(section, key)] = default
    for section in cp.sections():
        if section not in _KNOWN_SECTIONS:
            problems.append((section, "unknown section"))
            continue
        if section == "reference":
            continue
        for key in cp.options(section):
            if (section, key) not in _FIELDS:
                problems.append((f"{section}.{key}", "unknown field"))
    return values, problems


def _build(values, problems):
    def make(section, factory, kwargs, allow_none=()):
        # Missing required inputs are already recorded as problems.
        if any(v is None for k, v in kwargs.items() if k not in allow_none):
            return None
        try:
            return factory(**kwargs)
        except ValueError as exc:
            problems.append((section, str(exc)))
            return None

    v = values
    source = make("source", SourceSpectrum, dict(
        center_wavelength=v[("source", "center_wavelength")],
        fwhm_bandwidth=v[("source", "bandwidth")],
        lineshape=v[("source", "lineshape")],
    ))
    beams = make("beams", BeamTrain, dict(
        fiber_collimated_waist=v[("beams", "fiber_collimated_waist")],
        focus_lens=v[("beams", "focus_lens")],
        pump_focus_waist=v[("beams", "pump_focus_waist")],
        spdc_waist=v[("beams", "spdc_waist")],
        spdc_wavelength=v[("beams", "spdc_wavelength")],
        collimating_mirror=v[("beams", "collimating_mirror")],
        aperture=v[("beams", "aperture")],
        xi_pump=v[("beams", "xi_pump")],
    ))
    gains = make("gains", GainConfig, dict(
        base=v[("gains", "base")],
        contrast=v[("gains", "contrast")],
    ))
    link = make("link", LinkConfig, dict(
        pair_rate=v[("link", "pair_rate")],
        transmission=v[("link", "transmission")],
    ))
    paths = None
    if source is not None:
        pump_coh_len = coherence.coherence_length(coherence.coherence_time(source))
        paths = make("paths", PathLayout, dict(
            pump_path=v[("paths", "pump_path")],
            dc_path_a=v[("paths", "dc_path_a")],
            dc_path_b=v[("paths", "dc_path_b")],
            pump_coh_len=pump_coh_len,
            dc_coh_len=v[("paths", "dc_coh_len")],
        ))
    detector = make("detector", DetectorParams, dict(
        efficiency_signal=v[("detector", "efficiency_signal")],
        efficiency_idler=v[("detector", "efficiency_idler")],
        dark_rate=v[("detector", "dark_rate")],
        coincidence_window=v[("detector", "coincidence_window")],
        integration_time=v[("detector", "integration_time")],
        timestamp_jitter=v[("detector", "timestamp_jitter")],
        dead_time=v[("detector", "dead_time")],
        singles_background_fraction=v[("detector", "singles_background_fraction")],
        singles_visibility_signal=v[("detector", "singles_visibility_signal")],
        singles_visibility_idler=v[("detector", "singles_visibility_idler")],
    ), allow_none=("singles_visibility_signal", "singles_visibility_idler"))
    turbulence = make("turbulence", TurbulenceModel, dict(
        sigma_angle=v[("turbulence", "sigma_angle")],
        angle_scale=v[("turbulence", "angle_scale")],
        sigma_phase=v[("turbulence", "sigma_phase")],
        correlation_time=v[("turbulence", "correlation_time")],
        distance=v[("scenario", "distance")] or 0.0,
    ))
    scan = make("scan", ScanConfig, dict(
        duration=v[("scan", "duration")],
        stage_velocity=v[("scan", "stage_velocity")],
        fold_factor=v[("scan", "fold_factor")],
        phase_offset=v[("scan", "phase_offset")],
        seed=v[("scan", "seed")],
    ))
    if v[("scenario", "distance")] is not None and v[("scenario", "distance")] < 0.0:
        problems.append(("scenario.distance", "must be >= 0"))
    if v[("source", "power")] is not None and v[("source", "power")] < 0.0:
        problems.append(("source.power", "must be >= 0"))
    if source is not None and scan is not None:
        period = source.center_wavelength / scan.fold_factor / scan.stage_velocity
        if scan.duration < 3.0 * period:
            problems.append(
                ("scan.duration", f"must cover at least 3 fringe periods ({3 * period:.3g} s)")
            )
    if problems:
        raise ValidationError(problems)
    optics_wl = v[("source", "optics_wavelength")]
    return Scenario(
        name=v[("scenario", "name")],
        distance=v[("scenario", "distance")],
        source=source,
        pump_power=v[("source", "power")],
        optics_wavelength=optics_wl if optics_wl is not None else source.center_wavelength,
        beams=beams,
        gains=gains,
        link=link,
        paths=paths,
        detector=detector,
        turbulence=turbulence,
        scan=scan,
        reference={},
    )


def _parse_reference(cp):
    ref = {}
    if cp.has_section("reference"):
        for key in cp.options("reference"):
            ref[key] = parse_quantity(cp.get("reference", key), "any", f"reference.{key}")
    return ref


def loads_scenario(text, origin="<string>"):
    """Parse and validate scenario text; see load_scenario."""
    cp = ConfigParser(inline_comment_prefixes=("#",), interpolation=None)
    try:
        cp.read_string(text, source=origin)
    except ConfigParserError as exc:
        raise ScenarioParseError(f"{origin}: {exc}") from exc
    for required_section in ("scenario",):
        if not cp.has_section(required_section):
            raise ValidationError([(required_section, "missing required section")])
    values, problems = _parse_fields(cp)
    scenario = _build(values, problems)
    scenario.reference = _parse_reference(cp)
    return scenario


def load_scenario(source):
    """Load a scenario from a preset name or a file path.

    Raises ScenarioParseError for unreadable/aborted parses and
    ValidationError (with field paths) for constraint violations.
    """
    name = str(source)
    if name in PRESET_NAMES:
        text = resources.files("spdclink.presets").joinpath(f"{name}.cfg").read_text()
        return loads_scenario(text, origin=name)
    path = Path(source)
    try:
        text = path.read_text()
    except OSError as exc:
        raise ScenarioParseError(f"cannot read scenario file {path}: {exc}") from exc
    return loads_scenario(text, origin=str(path))
