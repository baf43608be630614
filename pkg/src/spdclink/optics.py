"""Gaussian beam transport for the free-space link.

Thin-lens, paraxial, ideal-Gaussian model: waists, Rayleigh lengths,
collimation/focusing through a lens or concave mirror, pump/SPDC focal
parameter matching, and aperture clearance checks.
"""

import math
import warnings
from dataclasses import dataclass
from typing import NamedTuple


@dataclass(frozen=True)
class GaussianBeam:
    """Ideal TEM00 beam.

    Parameters
    ----------
    wavelength: float
        Vacuum wavelength [m].
    waist_radius: float
        1/e^2 intensity radius at the waist [m].
    waist_position: float
        Waist location along the propagation axis [m].
    """

    wavelength: float
    waist_radius: float
    waist_position: float = 0.0

    def __post_init__(self):
        if self.wavelength <= 0.0:
            raise ValueError("wavelength must be > 0")
        if self.waist_radius <= 0.0:
            raise ValueError("waist_radius must be > 0")


@dataclass(frozen=True)
class FocusingElement:
    """Thin lens or concave mirror: focal length and clear aperture [m]."""

    focal_length: float
    aperture_diameter: float = 25.4e-3

    def __post_init__(self):
        if self.focal_length <= 0.0:
            raise ValueError("focal_length must be > 0")
        if self.aperture_diameter <= 0.0:
            raise ValueError("aperture_diameter must be > 0")


class ApertureCheck(NamedTuple):
    passed: bool
    ratio: float  # beam diameter over aperture diameter


def rayleigh_length(beam):
    """Rayleigh length ``z_R = pi * w0^2 / lambda`` [m]."""
    return math.pi * beam.waist_radius**2 / beam.wavelength


def beam_radius_at(beam, z):
    """1/e^2 beam radius at axial position ``z`` [m].

    ``w(z) = w0 * sqrt(1 + ((z - z_waist)/z_R)^2)``
    """
    zr = rayleigh_length(beam)
    return beam.waist_radius * math.sqrt(1.0 + ((z - beam.waist_position) / zr) ** 2)


def conjugate_waist(beam, element):
    """Waist conjugation by a focusing element in the far-field regime.

    With the input waist at the element's front focal plane, the output
    waist sits at the back focal plane with radius ``f * lambda / (pi * w_in)``.
    Covers both collimation (small waist -> large) and focusing (large ->
    small).  Warns when input and output waists are comparable, where the
    front/back focal plane approximation degrades.
    """
    w_out = element.focal_length * beam.wavelength / (math.pi * beam.waist_radius)
    ratio = w_out / beam.waist_radius
    if 0.5 <= ratio <= 2.0:
        warnings.warn(
            f"waist conjugation outside far-field regime (w_out/w_in = {ratio:.3g})",
            stacklevel=2,
        )
    return GaussianBeam(
        wavelength=beam.wavelength,
        waist_radius=w_out,
        waist_position=beam.waist_position + 2.0 * element.focal_length,
    )


def matched_spdc_focal_parameter(xi_pump):
    """Down-conversion focal parameter giving near-optimal coupling.

    Empirical matching relation ``xi_dc = sqrt(2.84 * xi_pump)``.
    """
    if xi_pump <= 0.0:
        raise ValueError("xi_pump must be > 0")
    return math.sqrt(2.84 * xi_pump)


def aperture_check(beam, z, aperture_diameter):
    """Compare the beam diameter at ``z`` against a circular aperture."""
    if aperture_diameter <= 0.0:
        raise ValueError("aperture_diameter must be > 0")
    ratio = 2.0 * beam_radius_at(beam, z) / aperture_diameter
    return ApertureCheck(ratio <= 1.0, ratio)


def peak_intensity(power, waist):
    """On-axis peak intensity of a Gaussian beam [W/cm^2].

    ``I0 = 2 P / (pi * w0^2)``, converted from W/m^2.
    """
    if power < 0.0:
        raise ValueError("power must be >= 0")
    if waist <= 0.0:
        raise ValueError("waist must be > 0")
    return 2.0 * power / (math.pi * waist**2) * 1e-4
