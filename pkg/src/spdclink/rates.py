"""Deterministic count-rate formulas for the fringe scan.

The coincidence fringe follows
``C = A2 * I_p * f_s * f_i * [1 + V_p * V_c * cos(k_p * dL + dPhi)]``
with the pump coherence factor ``V_p`` and the contrast factor ``V_c``
(amplitude balance times mode overlap).  Singles fringes are modeled
phenomenologically through a target singles visibility.
"""

import math
from dataclasses import dataclass
from typing import Optional


@dataclass(frozen=True)
class RateParams:
    """Inputs of the coincidence fringe model.

    amp_sq: overall conversion constant |A|^2 [counts*cm^2/W/s]
    pump_intensity: pump peak intensity [W/cm^2]
    spectral_s, spectral_i: filtered spectral factors (opaque multiplicative
        constants, dimensionless)
    vis_pump: pump coherence factor V_p in [0, 1]
    vis_contrast: contrast factor V_c in [0, 1]
    k_pump: pump wavenumber 2*pi/lambda_p [1/m]
    delta_L: pump vs down-conversion path difference [m]
    delta_Phi: non-dynamical phase offset [rad]
    """

    amp_sq: float
    pump_intensity: float
    spectral_s: float = 1.0
    spectral_i: float = 1.0
    vis_pump: float = 1.0
    vis_contrast: float = 1.0
    k_pump: float = 2.0 * math.pi / 405.5e-9
    delta_L: float = 0.0
    delta_Phi: float = 0.0

    def __post_init__(self):
        for name in ("amp_sq", "pump_intensity", "spectral_s", "spectral_i"):
            if getattr(self, name) < 0.0:
                raise ValueError(f"{name} must be >= 0")
        for name in ("vis_pump", "vis_contrast"):
            v = getattr(self, name)
            if not 0.0 <= v <= 1.0:
                raise ValueError(f"{name} must be in [0, 1], got {v}")


@dataclass(frozen=True)
class DetectorParams:
    """Detection chain parameters shared by simulation and analysis.

    The trailing optional fields extend the basic contract: timestamp
    jitter, dead time, and per-channel singles visibility targets used by
    the tag synthesizer (None leaves the singles fringe at its natural
    contrast).
    """

    efficiency_signal: float = 1.0
    efficiency_idler: float = 1.0
    dark_rate: float = 0.0
    coincidence_window: float = 1.5e-9
    integration_time: float = 70.0e-3
    singles_background_fraction: float = 0.0
    timestamp_jitter: float = 100.0e-12
    dead_time: float = 0.0
    singles_visibility_signal: Optional[float] = None
    singles_visibility_idler: Optional[float] = None

    def __post_init__(self):
        for name in (
            "efficiency_signal",
            "efficiency_idler",
            "singles_background_fraction",
        ):
            v = getattr(self, name)
            if not 0.0 <= v <= 1.0:
                raise ValueError(f"{name} must be in [0, 1], got {v}")
        for name in ("dark_rate", "timestamp_jitter", "dead_time"):
            if getattr(self, name) < 0.0:
                raise ValueError(f"{name} must be >= 0")
        for name in ("coincidence_window", "integration_time"):
            if getattr(self, name) <= 0.0:
                raise ValueError(f"{name} must be > 0")
        for name in ("singles_visibility_signal", "singles_visibility_idler"):
            v = getattr(self, name)
            if v is not None and not 0.0 <= v <= 1.0:
                raise ValueError(f"{name} must be in [0, 1], got {v}")


def coincidence_rate(params):
    """Coincidence rate [counts/s] of the fringe model at the given phase."""
    vv = params.vis_pump * params.vis_contrast
    if vv > 1.0:
        raise ValueError("visibility product must be <= 1")
    scale = params.amp_sq * params.pump_intensity * params.spectral_s * params.spectral_i
    return scale * (1.0 + vv * math.cos(params.k_pump * params.delta_L + params.delta_Phi))


def fringe_period_in_stage_travel(lambda_p, fold_factor=2.0):
    """Stage travel per fringe [m].

    A retroreflector trombone folds the geometric path change, so one full
    fringe of ``k_p * dL`` needs ``lambda_p / fold_factor`` of stage travel.
    """
    if lambda_p <= 0.0:
        raise ValueError("lambda_p must be > 0")
    if fold_factor < 1.0:
        raise ValueError("fold_factor must be >= 1")
    return lambda_p / fold_factor


def accidental_rate(singles_a, singles_b, t_c):
    """Accidental coincidence rate ``C_A * C_B * t_c`` [counts/s]."""
    if singles_a < 0.0 or singles_b < 0.0 or t_c < 0.0:
        raise ValueError("inputs must be >= 0")
    return singles_a * singles_b * t_c


def brightness(singles_a, singles_b, coincidences):
    """Inferred source pair rate ``C_A * C_B / C_c`` [pairs/s]."""
    if singles_a < 0.0 or singles_b < 0.0:
        raise ValueError("singles rates must be >= 0")
    if coincidences <= 0.0:
        raise ValueError("brightness undefined for zero coincidence rate")
    return singles_a * singles_b / coincidences


def singles_rate(
    pair_rate,
    efficiency,
    background_fraction,
    dark_rate,
    phase,
    singles_visibility,
):
    """Singles rate [counts/s] with a phenomenological fringe.

    Detected pair photons ``efficiency * pair_rate`` are mixed with a
    non-interfering background making up ``background_fraction`` of the
    non-dark singles, and the mix is given fringe contrast
    ``singles_visibility``; dark counts add on top (and slightly dilute the
    realized contrast).
    """
    if pair_rate < 0.0 or dark_rate < 0.0:
        raise ValueError("rates must be >= 0")
    for name, v in (
        ("efficiency", efficiency),
        ("background_fraction", background_fraction),
        ("singles_visibility", singles_visibility),
    ):
        if not 0.0 <= v <= 1.0:
            raise ValueError(f"{name} must be in [0, 1], got {v}")
    if background_fraction == 1.0:
        raise ValueError("background_fraction must be < 1")
    mean = efficiency * pair_rate / (1.0 - background_fraction)
    return mean * (1.0 + singles_visibility * math.cos(phase)) + dark_rate
