"""Stochastic free-space degradation of the second creation process.

Turbulent air tilts the pump's angle of arrival at the far crystal, which
lowers and randomizes that process's effective gain; slow phase noise
perturbs the interferometer phase.  Both are modeled as AR(1) processes
(discretized Ornstein-Uhlenbeck): the simplest stationary correlated noise
that is exactly reproducible from a seed.
"""

import math
from dataclasses import dataclass

import numpy as np
from scipy.signal import lfilter


@dataclass(frozen=True)
class TurbulenceModel:
    """Noise strengths for one link.

    sigma_angle: std of the arrival-angle fluctuation [rad]
    angle_scale: 1/e half-width of the angular coupling profile [rad]
    sigma_phase: stationary std of the slow phase noise [rad]
    correlation_time: AR(1) relaxation time shared by both processes [s]
    distance: link length this model was calibrated for [m]
    """

    sigma_angle: float = 0.0
    angle_scale: float = 1.0e-3
    sigma_phase: float = 0.0
    correlation_time: float = 1.0
    distance: float = 0.0

    def __post_init__(self):
        for name in ("sigma_angle", "sigma_phase", "distance"):
            if getattr(self, name) < 0.0:
                raise ValueError(f"{name} must be >= 0")
        if self.correlation_time <= 0.0:
            raise ValueError("correlation_time must be > 0")
        if self.sigma_angle > 0.0 and self.angle_scale <= 0.0:
            raise ValueError("angle_scale must be > 0 when sigma_angle > 0")


@dataclass
class GainSeries:
    """Per-bin effective gain of the far process and per-bin phase offset."""

    gain: np.ndarray
    phase_offset: np.ndarray
    bin_duration: float

    def __post_init__(self):
        self.gain = np.asarray(self.gain, dtype=float)
        self.phase_offset = np.asarray(self.phase_offset, dtype=float)
        if self.gain.shape != self.phase_offset.shape:
            raise ValueError("gain and phase_offset must have equal length")
        if np.any(self.gain < 0.0):
            raise ValueError("gains must be >= 0")


def coupling_efficiency(theta, theta0):
    """Mode-overlap efficiency ``exp(-(theta/theta0)^2)`` for a tilt ``theta``."""
    if theta0 <= 0.0:
        raise ValueError("theta0 must be > 0")
    return np.exp(-np.square(np.asarray(theta, dtype=float) / theta0))


def _ar1(rng, n, sigma, rho):
    # Stationary AR(1): x0 ~ N(0, sigma), x[k] = rho*x[k-1] + sigma*sqrt(1-rho^2)*eps
    if sigma == 0.0:
        return np.zeros(n)
    innovations = rng.standard_normal(n) * (sigma * math.sqrt(1.0 - rho * rho))
    innovations[0] = rng.standard_normal() * sigma
    return lfilter([1.0], [1.0, -rho], innovations)


def sample_gain_series(model, base_gain, n_bins, seed, bin_duration=0.07):
    """Draw one realization of the far process's gain and phase noise.

    The arrival angle and the phase offset are independent AR(1) series with
    the model's stds and correlation time, sampled on bins of
    ``bin_duration``; the gain couples through the field amplitude,
    ``g2 = base_gain * sqrt(coupling_efficiency(theta))``.  Deterministic for
    a fixed seed.
    """
    if n_bins <= 0:
        raise ValueError("n_bins must be > 0")
    if base_gain < 0.0:
        raise ValueError("base_gain must be >= 0")
    if bin_duration <= 0.0:
        raise ValueError("bin_duration must be > 0")
    rng = np.random.default_rng(seed)
    rho = math.exp(-bin_duration / model.correlation_time)
    theta = _ar1(rng, n_bins, model.sigma_angle, rho)
    phase = _ar1(rng, n_bins, model.sigma_phase, rho)
    if model.sigma_angle > 0.0:
        gain = base_gain * np.sqrt(coupling_efficiency(theta, model.angle_scale))
    else:
        gain = np.full(n_bins, float(base_gain))
    return GainSeries(gain=gain, phase_offset=phase, bin_duration=bin_duration)


def sigma_from_distance(distance, calibration):
    """Interpolate a noise std for ``distance`` from calibration anchors.

    ``calibration`` is a sequence of ``(distance_m, sigma)`` pairs; values
    between anchors are piecewise-linear, values outside are clamped to the
    nearest anchor.
    """
    anchors = sorted((float(d), float(s)) for d, s in calibration)
    if not anchors:
        raise ValueError("calibration must contain at least one anchor")
    dists, sigmas = zip(*anchors)
    return float(np.interp(distance, dists, sigmas))
