"""Pair-creation amplitudes for two coherently pumped SPDC sources.

Two low-gain sources whose output modes are overlapped emit a photon pair
with first-order amplitude ``g2 + g1*exp(i*phi)``: the emission can be
enhanced (up to a factor of four in probability for balanced gains) or
fully suppressed by the relative phase ``phi`` alone.
"""

import cmath
import math
import warnings
from dataclasses import dataclass, field

from .errors import DegenerateInputError, GainRegimeWarning

TWO_PI = 2.0 * math.pi

# Above this gain the O(g^2) truncation starts to leak probability into
# multi-pair terms; results are still computed, just flagged.
DEFAULT_GAIN_WARN_THRESHOLD = 0.1


def _check_gain(g, name="gain"):
    if g < 0.0:
        raise ValueError(f"{name} must be >= 0, got {g}")


@dataclass(frozen=True)
class SpdcProcess:
    """One nonlinear pair source: gain, relative phase and pump geometry."""

    gain: float
    phase: float = 0.0
    pump_wavelength: float = 405.5e-9
    crystal_length: float = 1.0e-3
    warn_threshold: float = field(default=DEFAULT_GAIN_WARN_THRESHOLD, repr=False)

    def __post_init__(self):
        _check_gain(self.gain)
        if self.pump_wavelength <= 0.0:
            raise ValueError("pump_wavelength must be > 0")
        if self.crystal_length <= 0.0:
            raise ValueError("crystal_length must be > 0")
        if self.gain > self.warn_threshold:
            warnings.warn(
                f"gain {self.gain} exceeds low-gain threshold {self.warn_threshold}",
                GainRegimeWarning,
                stacklevel=2,
            )
        object.__setattr__(self, "phase", self.phase % TWO_PI)


@dataclass(frozen=True)
class TwoModeState:
    """Truncated two-mode state: vacuum, one-pair and optional two-pair terms."""

    amp_vac: complex
    amp_pair: complex
    amp_double: complex = 0.0j

    def norm(self):
        return math.sqrt(
            abs(self.amp_vac) ** 2 + abs(self.amp_pair) ** 2 + abs(self.amp_double) ** 2
        )

    def normalized(self):
        n = self.norm()
        if n == 0.0:
            raise DegenerateInputError("cannot normalize the zero state")
        return TwoModeState(self.amp_vac / n, self.amp_pair / n, self.amp_double / n)

    def pair_probability(self):
        return abs(self.amp_pair) ** 2


def superposed_pair_amplitude(g1, g2, phi):
    """First-order pair amplitude of two overlapped sources, ``g2 + g1*e^{i*phi}``.

    ``phi`` is attached to the first source's amplitude; every observable
    depends only on the relative phase, so the choice is a convention.
    """
    _check_gain(g1, "g1")
    _check_gain(g2, "g2")
    return g2 + g1 * cmath.exp(1j * phi)


def emission_probability(g1, g2, phi):
    """Pair-emission probability ``g1^2 + g2^2 + 2*g1*g2*cos(phi)``.

    Closed form of ``|superposed_pair_amplitude|^2``; exactly symmetric under
    ``(g1, g2, phi) -> (g2, g1, -phi)``.
    """
    _check_gain(g1, "g1")
    _check_gain(g2, "g2")
    return g1 * g1 + g2 * g2 + 2.0 * g1 * g2 * math.cos(phi)


def fringe_visibility_from_amplitudes(g1, g2):
    """Fringe contrast of the emission probability over a full phase scan.

    Equals ``2*g1*g2 / (g1^2 + g2^2)``, i.e. ``(max - min)/(max + min)`` with
    max ``(g1+g2)^2`` and min ``(g1-g2)^2``.
    """
    _check_gain(g1, "g1")
    _check_gain(g2, "g2")
    denom = g1 * g1 + g2 * g2
    if denom == 0.0:
        raise DegenerateInputError("visibility undefined for g1 = g2 = 0")
    return 2.0 * g1 * g2 / denom


def truncated_state(g1, g2, phi, include_double=False):
    """Normalized truncated state after overlapping both sources' output modes.

    The optional two-pair coefficient uses the naive squared-amplitude model
    ``(g2 + g1*e^{i*phi})^2 / 2``; it demonstrates the visibility penalty of
    double emissions but is not a full multimode squeezing treatment.
    """
    amp_pair = superposed_pair_amplitude(g1, g2, phi)
    amp_double = 0.5 * amp_pair * amp_pair if include_double else 0.0j
    return TwoModeState(1.0 + 0.0j, amp_pair, amp_double).normalized()
