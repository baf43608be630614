"""Synthesize two-channel photon time-tag streams for a full phase scan.

Detected events decompose into independent Poisson processes (marking
theorem): coincident pairs at rate ``eff_s * eff_i * pair_rate(t)``,
per-channel unpaired singles topping the channel up to its target singles
fringe, and dark counts.  Each component is drawn exactly by thinning, so
a stream is statistically identical to simulating every source pair and
thinning detections, at a fraction of the cost.
"""

import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .errors import TagBudgetError
from .turbulence import sample_gain_series

PS_PER_S = 1_000_000_000_000

DEFAULT_MAX_EXPECTED_TAGS = 5.0e7

CHANNELS = ("signal", "idler")


@dataclass
class TimeTagStream:
    """Sorted detection timestamps of one channel, in integer picoseconds."""

    channel: str
    timestamps_ps: np.ndarray
    duration_ps: int
    seed: Optional[int] = None
    scenario_id: str = ""

    def __post_init__(self):
        if self.channel not in CHANNELS:
            raise ValueError(f"channel must be one of {CHANNELS}")
        self.timestamps_ps = np.asarray(self.timestamps_ps, dtype=np.int64)
        if self.timestamps_ps.size:
            if self.timestamps_ps[0] < 0:
                raise ValueError("timestamps must be >= 0")
            if self.timestamps_ps[-1] > self.duration_ps:
                raise ValueError("duration must cover all tags")

    def __len__(self):
        return self.timestamps_ps.size

    def rate(self):
        """Mean count rate [counts/s]."""
        if self.duration_ps == 0:
            return 0.0
        return self.timestamps_ps.size * PS_PER_S / self.duration_ps


@dataclass
class ScanGroundTruth:
    """Per-bin generating-model values recorded alongside a simulated scan."""

    bin_duration: float
    pair_rate: np.ndarray  # detected-pair rate per bin [counts/s]
    phase: np.ndarray  # total phase at bin centers [rad]
    gain: np.ndarray  # effective far-process gain per bin
    phase_noise: np.ndarray  # slow phase offset per bin [rad]
    bin_visibility: np.ndarray  # instantaneous model visibility per bin
    expected_coincidences: np.ndarray  # expected matched counts per bin
    expected_singles_signal: np.ndarray
    expected_singles_idler: np.ndarray
    mean_visibility: float = 0.0
    metadata: dict = field(default_factory=dict)

    def to_dict(self):
        d = {
            "bin_duration": self.bin_duration,
            "mean_visibility": self.mean_visibility,
            "metadata": self.metadata,
        }
        for name in (
            "pair_rate",
            "phase",
            "gain",
            "phase_noise",
            "bin_visibility",
            "expected_coincidences",
            "expected_singles_signal",
            "expected_singles_idler",
        ):
            d[name] = np.asarray(getattr(self, name)).tolist()
        return d

    @classmethod
    def from_dict(cls, d):
        kwargs = {
            "bin_duration": d["bin_duration"],
            "mean_visibility": d.get("mean_visibility", 0.0),
            "metadata": d.get("metadata", {}),
        }
        for name in (
            "pair_rate",
            "phase",
            "gain",
            "phase_noise",
            "bin_visibility",
            "expected_coincidences",
            "expected_singles_signal",
            "expected_singles_idler",
        ):
            kwargs[name] = np.asarray(d[name], dtype=float)
        return cls(**kwargs)


@dataclass
class ScanResult:
    signal: TimeTagStream
    idler: TimeTagStream
    truth: ScanGroundTruth


def thinned_poisson_times(rate_fn, duration, rate_max, seed=None, rng=None,
                          max_expected=DEFAULT_MAX_EXPECTED_TAGS):
    """Draw an inhomogeneous Poisson sample on [0, duration] by thinning.

    ``rate_fn`` must accept an ndarray of times [s] and return rates
    [counts/s] bounded by ``rate_max``; candidates violating the bound raise
    at sample time.  Returns sorted times [s]; exact for any bounded rate.
    """
    if duration < 0.0:
        raise ValueError("duration must be >= 0")
    if rate_max < 0.0:
        raise ValueError("rate_max must be >= 0")
    if rate_max * duration > max_expected:
        raise TagBudgetError(
            f"expected candidate count {rate_max * duration:.3g} exceeds cap {max_expected:.3g}"
        )
    if rng is None:
        rng = np.random.default_rng(seed)
    if rate_max == 0.0 or duration == 0.0:
        return np.empty(0)
    n = rng.poisson(rate_max * duration)
    times = np.sort(rng.uniform(0.0, duration, n))
    rates = np.asarray(rate_fn(times), dtype=float)
    if np.any(rates < 0.0):
        raise ValueError("rate_fn returned a negative rate")
    if np.any(rates > rate_max * (1.0 + 1e-9)):
        raise ValueError("rate_fn exceeds rate_max")
    keep = rng.uniform(0.0, rate_max, n) < rates
    return times[keep]


def _homogeneous_times(rate, duration, rng):
    if rate <= 0.0:
        return np.empty(0)
    n = rng.poisson(rate * duration)
    return np.sort(rng.uniform(0.0, duration, n))


def _apply_dead_time(ts_ps, dead_ps):
    # Non-paralyzable: a tag within dead_ps of the last accepted tag is lost.
    if dead_ps <= 0 or ts_ps.size == 0:
        return ts_ps
    keep = np.empty(ts_ps.size, dtype=bool)
    last = -dead_ps - 1
    for k in range(ts_ps.size):
        ok = ts_ps[k] - last >= dead_ps
        keep[k] = ok
        if ok:
            last = ts_ps[k]
    return ts_ps[keep]


def _finalize_channel(times_s, rng, jitter_std, duration_ps, dead_ps):
    if jitter_std > 0.0 and times_s.size:
        times_s = times_s + rng.normal(0.0, jitter_std, times_s.size)
    ts = np.rint(times_s * PS_PER_S).astype(np.int64)
    np.clip(ts, 0, duration_ps, out=ts)
    ts.sort()
    return _apply_dead_time(ts, dead_ps)


class _BinnedFringeRate:
    """Piecewise rate ``scale * (env[bin] + cross[bin] * cos(omega*t + phase0 + noise[bin]))``."""

    def __init__(self, scale, envelope, cross, omega, phase0, phase_noise, bin_duration):
        self.scale = scale
        self.envelope = envelope
        self.cross = cross
        self.omega = omega
        self.phase0 = phase0
        self.phase_noise = phase_noise
        self.bin_duration = bin_duration

    def _bins(self, t):
        b = (t / self.bin_duration).astype(int)
        return np.clip(b, 0, self.envelope.size - 1)

    def __call__(self, t):
        t = np.asarray(t, dtype=float)
        b = self._bins(t)
        phase = self.omega * t + self.phase0 + self.phase_noise[b]
        return self.scale * (self.envelope[b] + self.cross[b] * np.cos(phase))

    def max_rate(self):
        return self.scale * float(np.max(self.envelope + np.abs(self.cross)))

    def bin_average(self, n_bins):
        """Exact per-bin time average of the rate [counts/s]."""
        centers = (np.arange(n_bins) + 0.5) * self.bin_duration
        b = np.arange(n_bins)
        half = 0.5 * self.omega * self.bin_duration
        sinc = math.sin(half) / half if half != 0.0 else 1.0
        phase = self.omega * centers + self.phase0 + self.phase_noise[b]
        return self.scale * (self.envelope[b] + sinc * self.cross[b] * np.cos(phase))


def _positive_difference(rate_a, rate_b):
    """Rate function max(rate_a(t) - rate_b(t), 0)."""

    def fn(t):
        return np.maximum(rate_a(t) - rate_b(t), 0.0)

    return fn


def simulate_scan(scenario, seed=None, max_expected_tags=DEFAULT_MAX_EXPECTED_TAGS):
    """Simulate one full phase scan of a scenario.

    Returns signal and idler TimeTagStreams plus the per-bin ground truth of
    the generating model.  Deterministic for a fixed seed: identical seeds
    give identical streams.
    """
    scan = scenario.scan
    det = scenario.detector
    if seed is None:
        seed = scan.seed
    seeds = np.random.SeedSequence(seed).spawn(8)
    duration = scan.duration
    t_int = det.integration_time
    duration_ps = int(round(duration * PS_PER_S))
    bin_ps = int(round(t_int * PS_PER_S))
    n_bins = max(1, math.ceil(duration_ps / bin_ps))

    g1 = scenario.gains.base
    series = sample_gain_series(
        scenario.turbulence, g1, n_bins, seeds[0], bin_duration=t_int
    )
    g2 = series.gain
    vis_pump = scenario.pump_coherence_factor()
    kappa = scenario.gains.contrast
    omega = scenario.pump_wavenumber() * scan.fold_factor * scan.stage_velocity
    norm = 2.0 * g1 * g1 if g1 > 0.0 else 1.0

    envelope = g1 * g1 + g2 * g2
    cross_pair = 2.0 * g1 * g2 * kappa * vis_pump

    tau = scenario.link.transmission
    eff_s = det.efficiency_signal * tau
    eff_i = det.efficiency_idler * tau
    pair_scale = scenario.link.pair_rate * eff_s * eff_i / norm

    pair_rate = _BinnedFringeRate(
        pair_scale, envelope, cross_pair, omega, scan.phase_offset,
        series.phase_offset, t_int,
    )

    singles_rates = {}
    for channel, eff, target in (
        ("signal", eff_s, det.singles_visibility_signal),
        ("idler", eff_i, det.singles_visibility_idler),
    ):
        scale = scenario.link.pair_rate * eff / norm / (1.0 - det.singles_background_fraction)
        if target is None:
            kappa_s = kappa
        else:
            natural = vis_pump * 2.0 * g1 * g1 / norm if g1 > 0.0 else 1.0
            kappa_s = target / natural if natural > 0.0 else 0.0
        cross = 2.0 * g1 * g2 * kappa_s * vis_pump
        singles_rates[channel] = _BinnedFringeRate(
            scale, envelope, cross, omega, scan.phase_offset,
            series.phase_offset, t_int,
        )

    expected_total = duration * (
        pair_rate.max_rate()
        + singles_rates["signal"].max_rate()
        + singles_rates["idler"].max_rate()
        + 2.0 * det.dark_rate
    )
    if expected_total > max_expected_tags:
        raise TagBudgetError(
            f"expected tag count {expected_total:.3g} exceeds cap {max_expected_tags:.3g}"
        )

    rng_pairs = np.random.default_rng(seeds[1])
    pair_times = thinned_poisson_times(
        pair_rate, duration, pair_rate.max_rate(), rng=rng_pairs,
        max_expected=max_expected_tags,
    )

    extra = {}
    for channel, child in (("signal", seeds[2]), ("idler", seeds[3])):
        rate_fn = _positive_difference(singles_rates[channel], pair_rate)
        extra[channel] = thinned_poisson_times(
            rate_fn, duration, singles_rates[channel].max_rate(),
            rng=np.random.default_rng(child), max_expected=max_expected_tags,
        )

    dark = {
        "signal": _homogeneous_times(det.dark_rate, duration, np.random.default_rng(seeds[4])),
        "idler": _homogeneous_times(det.dark_rate, duration, np.random.default_rng(seeds[5])),
    }

    dead_ps = int(round(det.dead_time * PS_PER_S))
    streams = {}
    for channel, child in (("signal", seeds[6]), ("idler", seeds[7])):
        times = np.concatenate((pair_times, extra[channel], dark[channel]))
        times.sort()
        ts = _finalize_channel(
            times, np.random.default_rng(child), det.timestamp_jitter,
            duration_ps, dead_ps,
        )
        streams[channel] = TimeTagStream(
            channel=channel, timestamps_ps=ts, duration_ps=duration_ps,
            seed=int(seed), scenario_id=scenario.name,
        )

    with np.errstate(invalid="ignore", divide="ignore"):
        bin_vis = np.where(envelope > 0.0, vis_pump * kappa * 2.0 * g1 * g2 / envelope, 0.0)
    expected_pairs = pair_rate.bin_average(n_bins)
    truth = ScanGroundTruth(
        bin_duration=t_int,
        pair_rate=expected_pairs,
        phase=omega * (np.arange(n_bins) + 0.5) * t_int + scan.phase_offset + series.phase_offset,
        gain=g2,
        phase_noise=series.phase_offset,
        bin_visibility=bin_vis,
        expected_coincidences=expected_pairs * t_int,
        expected_singles_signal=singles_rates["signal"].bin_average(n_bins) * t_int
        + det.dark_rate * t_int,
        expected_singles_idler=singles_rates["idler"].bin_average(n_bins) * t_int
        + det.dark_rate * t_int,
        mean_visibility=float(np.mean(bin_vis)),
        metadata={"seed": int(seed), "scenario": scenario.name},
    )
    return ScanResult(signal=streams["signal"], idler=streams["idler"], truth=truth)
