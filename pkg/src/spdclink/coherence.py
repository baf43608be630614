"""Coherence times/lengths and the path-length conditions gating interference.

Interference between the two creation processes survives only while the
pump path's excess over the two down-conversion paths stays inside the pump
coherence length, and the two down-conversion paths stay inside their own
coherence length.  All path lengths are measured from the first crystal's
output facet to the second crystal's input facet.
"""

import math
from dataclasses import dataclass
from typing import NamedTuple

SPEED_OF_LIGHT = 299_792_458.0  # m/s

LINESHAPES = ("lorentzian", "gaussian")


@dataclass(frozen=True)
class SourceSpectrum:
    """Laser spectrum: center wavelength [m], FWHM bandwidth [Hz], lineshape."""

    center_wavelength: float
    fwhm_bandwidth: float
    lineshape: str = "lorentzian"

    def __post_init__(self):
        if self.center_wavelength <= 0.0:
            raise ValueError("center_wavelength must be > 0")
        if self.fwhm_bandwidth <= 0.0:
            raise ValueError("fwhm_bandwidth must be > 0")
        if self.lineshape not in LINESHAPES:
            raise ValueError(f"lineshape must be one of {LINESHAPES}")


@dataclass(frozen=True)
class PathLayout:
    """Pump and down-conversion path lengths with their coherence lengths [m]."""

    pump_path: float
    dc_path_a: float
    dc_path_b: float
    pump_coh_len: float
    dc_coh_len: float

    def __post_init__(self):
        for name in ("pump_path", "dc_path_a", "dc_path_b"):
            if getattr(self, name) < 0.0:
                raise ValueError(f"{name} must be >= 0")
        for name in ("pump_coh_len", "dc_coh_len"):
            if getattr(self, name) <= 0.0:
                raise ValueError(f"{name} must be > 0")


class ConditionResult(NamedTuple):
    satisfied: bool
    margin: float  # coherence length minus |mismatch|, in meters


def coherence_time(spectrum):
    """Coherence time [s] from the FWHM bandwidth.

    Lorentzian convention: ``1 / (pi * dnu)``.
    Gaussian convention:   ``sqrt(2*ln2/pi) / dnu``.
    """
    dnu = spectrum.fwhm_bandwidth
    if spectrum.lineshape == "lorentzian":
        return 1.0 / (math.pi * dnu)
    return math.sqrt(2.0 * math.log(2.0) / math.pi) / dnu


def coherence_length(t_coh):
    """Coherence length [m], ``c * t_coh``."""
    if t_coh <= 0.0:
        raise ValueError("coherence time must be > 0")
    return SPEED_OF_LIGHT * t_coh


def pump_condition(layout):
    """Check |L_pump - L_dc_a - L_dc_b| against the pump coherence length."""
    mismatch = abs(layout.pump_path - layout.dc_path_a - layout.dc_path_b)
    margin = layout.pump_coh_len - mismatch
    return ConditionResult(margin >= 0.0, margin)


def dc_condition(layout):
    """Check |L_dc_a - L_dc_b| against the down-conversion coherence length."""
    mismatch = abs(layout.dc_path_a - layout.dc_path_b)
    margin = layout.dc_coh_len - mismatch
    return ConditionResult(margin >= 0.0, margin)


def pump_coherence_factor(mismatch, coh_len, lineshape="lorentzian"):
    """Fringe-contrast factor in [0, 1] for a given path mismatch.

    Monotone nonincreasing in |mismatch| and exactly 1 at zero mismatch:
    ``exp(-|dL|/L_coh)`` for a Lorentzian line, ``exp(-(dL/L_coh)^2)`` for a
    Gaussian one.
    """
    if coh_len <= 0.0:
        raise ValueError("coherence length must be > 0")
    if lineshape not in LINESHAPES:
        raise ValueError(f"lineshape must be one of {LINESHAPES}")
    x = abs(mismatch) / coh_len
    if lineshape == "lorentzian":
        return math.exp(-x)
    return math.exp(-x * x)
