"""Measurement geometry: background medium, wavenumber, antenna placement.

The antenna layout follows the bistatic ring configuration used by the
Institute Fresnel: emitters sit on a circle of radius 0.72 m and, for each
emitter, the receivers occupy an arc of the 0.76 m circle that is rigidly
attached to the emitter direction.  With the defaults, emitter ``m`` sits at
angle ``2*(m - 1)*pi / M`` and its receivers run from 60 deg to 300 deg away
from it in 5 deg steps.

Emitters are indexed by ``m`` and receivers by ``n`` (both 1-based).  Earlier
write-ups of this configuration overload the letter ``n`` for both roles; the
convention here is deliberate and used consistently by every module.

All angles are radians; degrees appear only at CLI boundaries.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import InvalidInputError

#: Vacuum permittivity used as the default background, F/m.
EPSILON_0 = 8.854e-12

#: Vacuum permeability, H/m.
MU_0 = 4.0e-7 * math.pi


@dataclass(frozen=True)
class Medium:
    """Homogeneous background medium.

    Attributes
    ----------
    eps_b : float
        Background permittivity, F/m.  Defaults to vacuum.
    mu_b : float
        Background permeability, H/m.
    sigma_b : float
        Background conductivity, S/m.  The model assumes a lossless
        background, so this must be exactly zero.
    """

    eps_b: float = EPSILON_0
    mu_b: float = MU_0
    sigma_b: float = 0.0

    def __post_init__(self):
        if not (self.eps_b > 0):
            raise InvalidInputError(f"eps_b must be > 0, got {self.eps_b}")
        if not (self.mu_b > 0):
            raise InvalidInputError(f"mu_b must be > 0, got {self.mu_b}")
        if self.sigma_b != 0.0:
            raise InvalidInputError(
                f"sigma_b must be exactly 0 in this model, got {self.sigma_b}")


@dataclass(frozen=True)
class Frequency:
    """Operating frequency.

    Attributes
    ----------
    f : float
        Frequency in Hz, > 0.
    """

    f: float

    def __post_init__(self):
        if not (self.f > 0) or not math.isfinite(self.f):
            raise InvalidInputError(f"frequency must be finite and > 0, got {self.f}")

    @property
    def omega(self) -> float:
        """Angular frequency, rad/s."""
        return 2.0 * math.pi * self.f

    @classmethod
    def from_ghz(cls, f_ghz: float) -> "Frequency":
        return cls(f_ghz * 1e9)


@dataclass(frozen=True)
class ArrayGeometry:
    """Emitter/receiver ring layout with a per-emitter receiver arc.

    Emitter ``m`` (1-based) sits at angle ``2*(m - 1)*pi / num_emitters`` on
    the circle of radius ``emitter_radius``.  Receiver ``n`` (1-based) for
    that emitter sits on the circle of radius ``receiver_radius`` at angle::

        theta_n = emitter_angle + aperture_start + (n - 1) * aperture_span / (num_receivers - 1)

    With the defaults the receiver arc spans [60 deg, 300 deg] relative to
    the emitter, in 5 deg steps.
    """

    emitter_radius: float = 0.72
    receiver_radius: float = 0.76
    num_emitters: int = 36
    num_receivers: int = 49
    aperture_start: float = math.pi / 3.0
    aperture_span: float = 4.0 * math.pi / 3.0

    def __post_init__(self):
        if not (self.emitter_radius > 0):
            raise InvalidInputError("emitter_radius must be > 0")
        if not (self.receiver_radius > 0):
            raise InvalidInputError("receiver_radius must be > 0")
        if self.num_emitters < 1:
            raise InvalidInputError("num_emitters must be >= 1")
        if self.num_receivers < 2:
            raise InvalidInputError("num_receivers must be >= 2")
        if not (0.0 < self.aperture_span <= 2.0 * math.pi):
            raise InvalidInputError("aperture_span must be in (0, 2*pi]")


def wavenumber(freq: Frequency, medium: Medium) -> float:
    """Background wavenumber ``omega * sqrt(eps_b * mu_b)``, rad/m."""
    return freq.omega * math.sqrt(medium.eps_b * medium.mu_b)


def wavelength(freq: Frequency, medium: Medium) -> float:
    """Background wavelength ``2*pi / k``, m."""
    return 2.0 * math.pi / wavenumber(freq, medium)


def _check_emitter_index(geom: ArrayGeometry, m: int) -> None:
    if not 1 <= m <= geom.num_emitters:
        raise InvalidInputError(
            f"emitter index m={m} out of range [1, {geom.num_emitters}]")


def _check_receiver_index(geom: ArrayGeometry, n: int) -> None:
    if not 1 <= n <= geom.num_receivers:
        raise InvalidInputError(
            f"receiver index n={n} out of range [1, {geom.num_receivers}]")


def emitter_angle(geom: ArrayGeometry, m: int) -> float:
    """Angle of emitter ``m`` (1-based), rad."""
    _check_emitter_index(geom, m)
    return 2.0 * (m - 1) * math.pi / geom.num_emitters


def receiver_angle(geom: ArrayGeometry, m: int, n: int) -> float:
    """Angle of receiver ``n`` in the arc attached to emitter ``m``, rad."""
    _check_receiver_index(geom, n)
    step = geom.aperture_span / (geom.num_receivers - 1)
    return emitter_angle(geom, m) + geom.aperture_start + (n - 1) * step


def emitter_position(geom: ArrayGeometry, m: int) -> np.ndarray:
    """Cartesian position of emitter ``m``, shape (2,), m."""
    ang = emitter_angle(geom, m)
    return geom.emitter_radius * np.array([math.cos(ang), math.sin(ang)])


def receiver_position(geom: ArrayGeometry, m: int, n: int) -> np.ndarray:
    """Cartesian position of receiver ``n`` for emitter ``m``, shape (2,), m."""
    ang = receiver_angle(geom, m, n)
    return geom.receiver_radius * np.array([math.cos(ang), math.sin(ang)])


def emitter_positions(geom: ArrayGeometry) -> np.ndarray:
    """All emitter positions, shape (num_emitters, 2)."""
    ang = 2.0 * math.pi * np.arange(geom.num_emitters) / geom.num_emitters
    return geom.emitter_radius * np.stack([np.cos(ang), np.sin(ang)], axis=-1)


def receiver_positions(geom: ArrayGeometry, m: int) -> np.ndarray:
    """Receiver positions for emitter ``m``, shape (num_receivers, 2)."""
    _check_emitter_index(geom, m)
    step = geom.aperture_span / (geom.num_receivers - 1)
    ang = (emitter_angle(geom, m) + geom.aperture_start
           + step * np.arange(geom.num_receivers))
    return geom.receiver_radius * np.stack([np.cos(ang), np.sin(ang)], axis=-1)
