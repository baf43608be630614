"""Statistics on fringe traces.

Extrema extraction with a period-aware separation constraint, visibility
from extrema means, Monte-Carlo resampling of counting noise, the
closed-form shot-noise propagation it converges to, cosine fits, and the
linear visibility-vs-distance extrapolation.
"""

import math
import warnings
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import curve_fit
from scipy.signal import find_peaks

from .errors import DegenerateInputError

TWO_PI = 2.0 * math.pi


@dataclass
class FringeTrace:
    """Per-bin count series of one phase scan.

    counts: nonnegative counts per integration bin
    bin_duration: bin width [s]
    stage_velocity: delay-stage speed during the scan [m/s] (0 if unknown)
    """

    counts: np.ndarray
    bin_duration: float
    stage_velocity: float = 0.0
    metadata: dict = field(default_factory=dict)

    def __post_init__(self):
        self.counts = np.asarray(self.counts)
        if self.bin_duration <= 0.0:
            raise ValueError("bin_duration must be > 0")
        if self.counts.size and self.counts.min() < 0:
            raise ValueError("counts must be >= 0")

    def __len__(self):
        return self.counts.size

    def times(self):
        """Bin-center times [s]."""
        return (np.arange(self.counts.size) + 0.5) * self.bin_duration


@dataclass
class ExtremaResult:
    maxima: np.ndarray
    minima: np.ndarray
    max_indices: np.ndarray
    min_indices: np.ndarray

    @property
    def n_maxima(self):
        return self.maxima.size

    @property
    def n_minima(self):
        return self.minima.size


@dataclass
class VisibilityEstimate:
    """Visibility with its Monte-Carlo sampled distribution.

    ``mean`` is clamped to [0, 1] (1 is the upper bound by definition);
    ``std`` is the distribution's standard deviation, not the standard
    error of the mean.
    """

    mean: float
    std: float
    samples: np.ndarray
    n_maxima: int
    n_minima: int


def expected_period_bins(lambda_p, v_m, fold_factor, bin_duration):
    """Fringe period expressed in integration bins."""
    if min(lambda_p, v_m, fold_factor, bin_duration) <= 0.0:
        raise ValueError("all arguments must be > 0")
    return lambda_p / (fold_factor * v_m) / bin_duration


def find_extrema(trace, period_bins):
    """Local maxima and minima with at least half a period of separation.

    Plateau ties resolve to the earlier bin; trace endpoints are never
    extrema.  A trace shorter than one period yields an empty result with a
    warning.
    """
    if period_bins < 4:
        raise ValueError("period_bins must be >= 4 to resolve extrema")
    counts = np.asarray(trace.counts, dtype=float)
    if counts.size < period_bins:
        warnings.warn("trace shorter than one fringe period; no extrema returned")
        empty = np.array([])
        empty_i = np.array([], dtype=int)
        return ExtremaResult(empty, empty, empty_i, empty_i)
    distance = max(1.0, period_bins / 2.0)
    _, props_max = find_peaks(counts, distance=distance, plateau_size=1)
    _, props_min = find_peaks(-counts, distance=distance, plateau_size=1)
    max_idx = props_max["left_edges"]
    min_idx = props_min["left_edges"]
    return ExtremaResult(counts[max_idx], counts[min_idx], max_idx, min_idx)


def visibility(max_mean, min_mean):
    """Fringe contrast ``(max - min) / (max + min)``.

    Noise can push the raw value slightly negative; the raw value is
    returned with a warning rather than clamped.
    """
    denom = max_mean + min_mean
    if denom == 0.0:
        raise DegenerateInputError("visibility undefined for max + min = 0")
    v = (max_mean - min_mean) / denom
    if v < 0.0:
        warnings.warn(f"negative visibility {v:.3g}; extrema likely noise-dominated")
    return v


def monte_carlo_visibility(maxima, minima, n_samples=100_000, seed=0):
    """Visibility distribution from Poisson-resampled extrema.

    Every observed extremum is taken as the mean of a Poisson distribution;
    each draw resamples all of them, recomputes the two means and the
    visibility.  Draws whose resampled extrema are all zero are pinned to
    the upper bound 1.  Deterministic for a fixed seed.
    """
    maxima = np.atleast_1d(np.asarray(maxima, dtype=float))
    minima = np.atleast_1d(np.asarray(minima, dtype=float))
    if maxima.size == 0 or minima.size == 0:
        raise DegenerateInputError("need at least one maximum and one minimum")
    if n_samples < 10_000:
        raise ValueError("n_samples must be >= 10000 for a stable distribution")
    rng = np.random.default_rng(seed)
    max_means = rng.poisson(maxima, size=(n_samples, maxima.size)).mean(axis=1)
    min_means = rng.poisson(minima, size=(n_samples, minima.size)).mean(axis=1)
    denom = max_means + min_means
    safe = np.where(denom > 0.0, denom, 1.0)
    samples = np.where(denom > 0.0, (max_means - min_means) / safe, 1.0)
    mean = float(np.clip(samples.mean(), 0.0, 1.0))
    std = float(samples.std(ddof=1))
    return VisibilityEstimate(mean, std, samples, maxima.size, minima.size)


def shot_noise_visibility_error(mu_max, mu_min):
    """Closed-form visibility error for Poissonian extrema.

    Gaussian propagation of ``dn = sqrt(n)`` through ``V = (M - m)/(M + m)``
    for one maximum with mean ``mu_max`` and one minimum with mean
    ``mu_min``:

        sigma_V = 2 * sqrt(mu_min^2 * mu_max + mu_max^2 * mu_min) / (mu_max + mu_min)^2
    """
    if mu_max < 0.0 or mu_min < 0.0:
        raise ValueError("means must be >= 0")
    denom = mu_max + mu_min
    if denom == 0.0:
        raise DegenerateInputError("error undefined for mu_max + mu_min = 0")
    return 2.0 * math.sqrt(mu_min**2 * mu_max + mu_max**2 * mu_min) / denom**2


@dataclass
class CosineFit:
    amplitude: float
    offset: float
    period: float
    phase: float
    residual: float
    converged: bool

    @property
    def visibility(self):
        if self.offset <= 0.0:
            return math.nan
        return self.amplitude / self.offset


def _cosine(t, offset, amplitude, period, phase):
    return offset + amplitude * np.cos(TWO_PI * t / period + phase)


def fit_cosine(trace, initial_period):
    """Least-squares fit of ``offset + amplitude*cos(2*pi*t/period + phase)``.

    ``initial_period`` [s] seeds the refinement: a quadrature scan over
    +-10% locks onto the nearest spectral peak before the nonlinear fit, so
    the initial guess only needs to be roughly right.  Non-convergence
    returns the flagged starting point instead of raising.
    """
    if initial_period <= 0.0:
        raise ValueError("initial_period must be > 0")
    t = trace.times()
    y = np.asarray(trace.counts, dtype=float)
    if t.size * trace.bin_duration < 2.0 * initial_period:
        warnings.warn("trace shorter than two periods; cosine fit may be unstable")
    offset0 = float(y.mean())
    # long traces need the period within a fraction of a spectral lobe
    candidates = initial_period * np.linspace(0.9, 1.1, 161)
    zs = ((y - offset0) * np.exp(-1j * TWO_PI * np.outer(1.0 / candidates, t))).sum(axis=1)
    best = int(np.argmax(np.abs(zs)))
    period0 = float(candidates[best])
    z = zs[best]
    amp0 = 2.0 * abs(z) / max(t.size, 1)
    phase0 = float(np.angle(z))
    p0 = (offset0, amp0, period0, phase0)
    try:
        popt, _ = curve_fit(_cosine, t, y, p0=p0, maxfev=20_000)
        converged = True
    except RuntimeError:
        popt, converged = p0, False
    offset, amplitude, period, phase = (float(v) for v in popt)
    period = abs(period)
    if amplitude < 0.0:
        amplitude = -amplitude
        phase += math.pi
    phase %= TWO_PI
    residual = float(np.sqrt(np.mean((y - _cosine(t, offset, amplitude, period, phase)) ** 2)))
    return CosineFit(amplitude, offset, period, phase, residual, converged)


@dataclass
class VisibilityExtrapolation:
    """Ordinary least-squares line through (distance, visibility) points."""

    slope: float
    intercept: float

    def visibility_at(self, distance):
        return self.intercept + self.slope * distance

    def distance_at(self, vis):
        """Distance where the fitted line crosses ``vis`` (inf for flat lines)."""
        if self.slope == 0.0:
            return math.inf
        return (self.intercept - vis) / (-self.slope)


def linear_visibility_extrapolation(points):
    """Fit a line to visibility-vs-distance points."""
    pts = [(float(d), float(v)) for d, v in points]
    if len(pts) < 2:
        raise ValueError("need at least two (distance, visibility) points")
    x = np.array([p[0] for p in pts])
    y = np.array([p[1] for p in pts])
    if np.ptp(x) == 0.0:
        raise DegenerateInputError("distances are all equal; line is undefined")
    if np.ptp(y) == 0.0:
        return VisibilityExtrapolation(0.0, float(y[0]))
    slope, intercept = np.polyfit(x, y, 1)
    return VisibilityExtrapolation(float(slope), float(intercept))
