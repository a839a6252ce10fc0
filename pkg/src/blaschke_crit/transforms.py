"""Cayley transform between the unit disc and the upper half-plane.

``cayley`` sends the disc onto the upper half-plane, the unit circle minus
the point 1 onto the real line, 1 to infinity and -1 to 0.
"""
from dataclasses import dataclass

import numpy as np

from .errors import InvalidDiscPoint, InvalidHalfPlanePoint, PoleAtMinusI, PoleAtOne

DISC_MARGIN = 1e-12
_POLE_GUARD = 1e-300


@dataclass(frozen=True)
class DiscPoint:
    value: complex

    def __post_init__(self):
        v = complex(self.value)
        if not np.isfinite(v) or abs(v) >= 1.0 - DISC_MARGIN:
            raise InvalidDiscPoint(f"|{v}| is not below 1 - {DISC_MARGIN:g}")
        object.__setattr__(self, "value", v)

    def __complex__(self):
        return self.value


@dataclass(frozen=True)
class HalfPlanePoint:
    value: complex

    def __post_init__(self):
        v = complex(self.value)
        if not np.isfinite(v) or v.imag <= 1e-12 * (1.0 + abs(v)):
            raise InvalidHalfPlanePoint(f"{v} is not in the upper half-plane")
        object.__setattr__(self, "value", v)

    def __complex__(self):
        return self.value


@dataclass(frozen=True)
class CriticalPointSet:
    """Prescribed critical points in the disc together with their lifts."""

    disc_points: tuple
    halfplane_points: tuple

    def __post_init__(self):
        if len(self.disc_points) == 0:
            raise InvalidDiscPoint("at least one critical point is required")
        if len(self.disc_points) != len(self.halfplane_points):
            raise ValueError("disc_points and halfplane_points differ in length")

    @property
    def xi(self):
        return np.array([p.value for p in self.disc_points], dtype=complex)

    @property
    def zeta(self):
        return np.array([p.value for p in self.halfplane_points], dtype=complex)

    @property
    def degree(self):
        """Degree n of the Blaschke product; there are n - 1 critical points."""
        return len(self.disc_points) + 1

    def __len__(self):
        return len(self.disc_points)


def cayley(z):
    """T(z) = i (1 + z) / (1 - z)."""
    z = complex(z)
    if abs(z - 1.0) < _POLE_GUARD:
        raise PoleAtOne("T has its pole at z = 1")
    return 1j * (1.0 + z) / (1.0 - z)


def inverse_cayley(w):
    """T^{-1}(w) = (w - i) / (w + i)."""
    w = complex(w)
    if abs(w + 1j) < _POLE_GUARD:
        raise PoleAtMinusI("T^{-1} has its pole at w = -i")
    return (w - 1j) / (w + 1j)


def cayley_array(z):
    z = np.asarray(z, dtype=complex)
    return 1j * (1.0 + z) / (1.0 - z)


def inverse_cayley_array(w):
    w = np.asarray(w, dtype=complex)
    return (w - 1j) / (w + 1j)


def lift_critical_points(xs):
    """Validate disc points and pair each with its image under ``cayley``."""
    disc = tuple(p if isinstance(p, DiscPoint) else DiscPoint(p) for p in xs)
    if not disc:
        raise InvalidDiscPoint("at least one critical point is required")
    lifted = tuple(HalfPlanePoint(cayley(p.value)) for p in disc)
    return CriticalPointSet(disc, lifted)


def critical_points_from_halfplane(zetas):
    """Build a CriticalPointSet from points already in the upper half-plane."""
    upper = tuple(p if isinstance(p, HalfPlanePoint) else HalfPlanePoint(p) for p in zetas)
    disc = tuple(DiscPoint(inverse_cayley(p.value)) for p in upper)
    return CriticalPointSet(disc, upper)
