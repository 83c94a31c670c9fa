"""Array geometries, steering vectors and beampatterns.

Angles are radians everywhere in the library; the command line converts
from degrees at the boundary.  A uniform linear array (ULA) element m
(1-based) at direction theta contributes the phase

    exp(j * 2*pi * (m - 1) * spacing_ratio * sin(theta)),

so the first element is always 1.  A uniform rectangular array (URA) is
the Kronecker product of an azimuth ULA factor (sine argument
sin(psi)*sin(theta)) and an elevation ULA factor (sine argument
sin(psi)*cos(theta)), azimuth-major.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import BroadbeamError

HALF_PI = np.pi / 2.0


@dataclass(frozen=True)
class UlaGeometry:
    """Uniform linear array: element count and spacing in wavelengths."""

    antennas: int
    spacing_ratio: float = 0.5

    def __post_init__(self):
        if self.antennas < 1:
            raise ValueError(f"antennas must be >= 1, got {self.antennas}")
        if not np.isfinite(self.spacing_ratio) or self.spacing_ratio <= 0:
            raise ValueError(f"spacing_ratio must be finite and > 0, got {self.spacing_ratio}")


@dataclass(frozen=True)
class UraGeometry:
    """Uniform rectangular array as an azimuth-by-elevation factor pair."""

    azimuth: UlaGeometry
    elevation: UlaGeometry

    @property
    def size(self) -> int:
        return self.azimuth.antennas * self.elevation.antennas


@dataclass(frozen=True)
class Direction:
    """Look direction: theta alone for a ULA, (psi, theta) for a URA."""

    theta: float
    psi: float | None = None

    def __post_init__(self):
        if not -HALF_PI <= self.theta <= HALF_PI:
            raise ValueError(f"theta must lie in [-pi/2, pi/2], got {self.theta}")
        if self.psi is not None and not -HALF_PI <= self.psi <= HALF_PI:
            raise ValueError(f"psi must lie in [-pi/2, pi/2], got {self.psi}")


def steering_from_sines(antennas: int, spacing_ratio: float, sines) -> np.ndarray:
    """Steering vectors for an array of sine-of-angle arguments.

    Parameters
    ----------
    antennas : int
        Element count M.
    spacing_ratio : float
        Element spacing in wavelengths.
    sines : array_like
        Sine arguments, any shape S.

    Returns
    -------
    ndarray, shape S + (M,)
        exp(j*2*pi*(m-1)*spacing_ratio*sine) for m = 1..M.

    The URA code path reuses this with composite arguments
    sin(psi)*sin(theta) and sin(psi)*cos(theta) in place of sin(theta).
    """
    sines = np.asarray(sines, dtype=float)
    orders = np.arange(antennas)
    phase = 2.0 * np.pi * spacing_ratio * np.multiply.outer(sines, orders)
    return np.exp(1j * phase)


def steering_vector_ula(geom: UlaGeometry, theta: float) -> np.ndarray:
    """Steering vector of a ULA at direction theta (radians)."""
    return steering_from_sines(geom.antennas, geom.spacing_ratio, np.sin(theta))


def steering_vector_ura(geom: UraGeometry, direction: Direction) -> np.ndarray:
    """Steering vector of a URA, Kronecker product of the two axis factors."""
    if direction.psi is None:
        raise ValueError("URA directions require both psi and theta")
    sin_psi = np.sin(direction.psi)
    azimuth = steering_from_sines(
        geom.azimuth.antennas, geom.azimuth.spacing_ratio, sin_psi * np.sin(direction.theta)
    )
    elevation = steering_from_sines(
        geom.elevation.antennas, geom.elevation.spacing_ratio, sin_psi * np.cos(direction.theta)
    )
    return np.kron(azimuth, elevation)


def clamp_small_negative(values, tol: float = 1e-12):
    """Zero out round-off negatives in power values; reject anything worse.

    Values in [-tol, 0) are clamped to 0.  A value below -tol indicates an
    internal inconsistency and raises.
    """
    values = np.asarray(values)
    worst = values.min() if values.size else 0.0
    if worst < -tol:
        raise BroadbeamError(f"pattern value {worst} is negative beyond round-off tolerance {tol}")
    return np.where((values < 0) & (values >= -tol), 0.0, values)


def _coerce_direction(direction) -> Direction:
    if isinstance(direction, Direction):
        return direction
    return Direction(theta=float(direction))


def beampattern(geom, v: np.ndarray, direction) -> float:
    """Radiated power |v^H a(direction)|^2 of precoder v at one direction.

    `direction` may be a Direction or, for a ULA, a bare theta in radians.
    """
    d = _coerce_direction(direction)
    if isinstance(geom, UraGeometry):
        a = steering_vector_ura(geom, d)
        size = geom.size
    else:
        a = steering_vector_ula(geom, d.theta)
        size = geom.antennas
    v = np.asarray(v)
    if v.shape != (size,):
        raise ValueError(f"precoder length {v.shape} does not match array size {size}")
    return float(np.abs(np.vdot(v, a)) ** 2)


def ula_pattern_samples(geom: UlaGeometry, v: np.ndarray, thetas) -> np.ndarray:
    """Vectorized |v^H a(theta)|^2 over an array of ULA directions."""
    v = np.asarray(v)
    if v.shape != (geom.antennas,):
        raise ValueError(f"precoder length {v.shape} does not match array size {geom.antennas}")
    a = steering_from_sines(geom.antennas, geom.spacing_ratio, np.sin(np.asarray(thetas, dtype=float)))
    return np.abs(a @ np.conj(v)) ** 2


def ura_pattern_samples(geom: UraGeometry, v: np.ndarray, psis, thetas) -> np.ndarray:
    """Vectorized URA pattern on the outer grid of psi and theta values.

    Returns an array of shape (len(psis), len(thetas)).
    """
    v = np.asarray(v)
    if v.shape != (geom.size,):
        raise ValueError(f"precoder length {v.shape} does not match array size {geom.size}")
    psis = np.asarray(psis, dtype=float)
    thetas = np.asarray(thetas, dtype=float)
    sin_psi = np.sin(psis)[:, None]
    arg_az = sin_psi * np.sin(thetas)[None, :]
    arg_el = sin_psi * np.cos(thetas)[None, :]
    a_az = steering_from_sines(geom.azimuth.antennas, geom.azimuth.spacing_ratio, arg_az)
    a_el = steering_from_sines(geom.elevation.antennas, geom.elevation.spacing_ratio, arg_el)
    # a = kron(a_az, a_el); the projection splits into an einsum over both factors
    vmat = np.conj(v).reshape(geom.azimuth.antennas, geom.elevation.antennas)
    proj = np.einsum("ptm,ptn,mn->pt", a_az, a_el, vmat)
    return np.abs(proj) ** 2


def beampattern_grid(geom, v: np.ndarray, grid_size: int) -> list:
    """Beampattern on a uniform direction grid.

    For a ULA the grid is `grid_size` thetas spanning [-pi/2, pi/2]
    inclusive; for a URA it is the same grid per axis, grid_size^2 entries
    in psi-major order.  Returns a list of (Direction, power) tuples.
    """
    if grid_size < 2:
        raise ValueError(f"grid_size must be >= 2, got {grid_size}")
    angles = np.linspace(-HALF_PI, HALF_PI, grid_size)
    if isinstance(geom, UraGeometry):
        powers = clamp_small_negative(ura_pattern_samples(geom, v, angles, angles))
        return [
            (Direction(theta=angles[t], psi=angles[p]), float(powers[p, t]))
            for p in range(grid_size)
            for t in range(grid_size)
        ]
    powers = clamp_small_negative(ula_pattern_samples(geom, v, angles))
    return [(Direction(theta=angles[t]), float(powers[t])) for t in range(grid_size)]
